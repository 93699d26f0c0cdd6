// Acceptance suite: one line per criterion, PASS/FAIL with timing.
// Returns the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "wander/commands.hpp"
#include "wander/family.hpp"
#include "wander/skeleton.hpp"
#include "wander/synthesis.hpp"
#include "wander/verify.hpp"

using namespace wander;
using padic::FieldContext;

namespace {

int g_failures = 0;

void criterion(int n, const std::string& what, double budget_s,
               const std::function<bool()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string note;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note = std::string(" [exception: ") + e.what() + "]";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (secs > budget_s) {
    ok = false;
    note += " [over time budget]";
  }
  if (!ok) ++g_failures;
  std::printf("%s criterion %d: %s (%.2fs)%s\n", ok ? "PASS" : "FAIL", n,
              what.c_str(), secs, note.c_str());
  std::fflush(stdout);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const skeleton::RadiiConfig kDemo{2, {2, 4, 7, 12}, 0};

}  // namespace

int main() {
  // 1. Exact radius-map identities on greedy configs for p in {2,3,5}.
  criterion(1, "skeleton exactness (p in {2,3,5}, greedy J=8)", 1.0, [] {
    for (unsigned long p : {2ul, 3ul, 5ul}) {
      const auto cfg = skeleton::make_generic(p, 8, 2);
      const Rat rho = skeleton::varrho_log(p);
      if (skeleton::phi_log(cfg, rho) != rho) return false;
      for (int j = 1; j < cfg.horizon(); ++j) {
        // continuity: piece j+1 evaluated at the breakpoint q_j
        Rat sum = 0;
        for (int i = 1; i <= j; ++i) sum += cfg.q(i);
        const Rat next =
            1 - sum + (Rat(static_cast<long>(p)) + j) * cfg.q(j);
        if (skeleton::phi_log(cfg, cfg.q(j)) != next) return false;
      }
      for (const Rat& q :
           {rho, Rat(0), Rat(1, 3), cfg.q(1), Rat(9, 2), cfg.q(8)}) {
        if (skeleton::phi_inv_log(cfg, skeleton::phi_log(cfg, q)) != q)
          return false;
      }
    }
    return true;
  });

  // 2. Full certificate, every margin positive, byte-identical rerun.
  criterion(2, "certificate (p=2, J=12, K=10), deterministic", 10.0, [] {
    commands::Options o;
    o.horizon = 12;
    o.stages = 10;
    o.out = "acc_cert_a.json";
    std::ostringstream log;
    if (commands::cmd_certify(o, log) != 0) return false;
    o.out = "acc_cert_b.json";
    if (commands::cmd_certify(o, log) != 0) return false;
    if (slurp("acc_cert_a.json") != slurp("acc_cert_b.json")) return false;
    const auto cert = nlohmann::json::parse(slurp("acc_cert_a.json"));
    long sci = 0, stab = 0, trans = 0, conn = 0;
    for (const auto& m : cert.at("margins")) {
      if (!(rat_parse(m.at("margin").get<std::string>()) > 0)) return false;
      const std::string fam = m.at("family");
      if (fam == "sci") ++sci;
      else if (fam == "stability") ++stab;
      else if (fam == "transversality") ++trans;
      else if (fam == "connecting") ++conn;
    }
    return sci == 10 && conn == 10 && trans == 9 && stab == 36 &&
           cert.at("trace_summary").at("consistent") == true;
  });

  // 3. Hand-checked synthesis anchors.
  criterion(3, "synthesis anchors (p=2, qs=(2,4,7,12): l_2=4, m_1=16)", 1.0,
            [] {
              const auto plan = synthesis::synthesize(
                  kDemo, {Rat(0), Rat(0), Rat(0)}, 3);
              return plan.l_at(2) == 4 && plan.m_at(1) == 16;
            });

  // 4. Norm-identity suite: 10^3 samples per region, tamper detected.
  criterion(4, "norm suite (1000/region, 0 failures; tamper fails)", 30.0,
            [] {
              const auto c = family::random_parameters(
                  FieldContext::base(2, 400), kDemo, 42);
              // 9 sampled integer radii (12 minus the three zero spheres)
              const auto rep = verify::verify_norms(c, 9000, 7);
              if (!rep.passed()) return false;
              auto bad = c;
              bad.drop_factor = 2;
              return verify::verify_norms(bad, 60, 7).failures > 0;
            });

  // 5. Multipliers and the inverse-branch distance law at depth.
  criterion(5, "fixed points j<=8: v(f'(w_j)) = -Lambda_j; distance law "
               "l<=20", 30.0, [] {
    const auto cfg = skeleton::make_generic(2, 10, 2);
    const auto ctx = FieldContext::base(2, 4000);
    const auto c = family::random_parameters(ctx, cfg, 42);
    for (int j = 1; j <= 8; ++j) {
      const auto wj = family::fixed_point(c, j, 3000);
      const Rat lam = skeleton::lambda_log(cfg, j);
      if (family::eval_fprime(c, wj).value.valuation() != -lam) return false;
      const auto hs = family::inverse_orbit(c, j, 20, 3000);
      for (int i = 1; i <= 20; ++i)
        if ((hs[static_cast<size_t>(i - 1)] - wj).valuation() !=
            -cfg.q(j) + i * lam)
          return false;
    }
    return true;
  });

  // 6. Parameter-derivative suite.
  criterion(6, "parameter derivatives (>=100 samples, orbits <= 6)", 30.0,
            [] {
              const auto c = family::random_parameters(
                  FieldContext::base(2, 400), kDemo, 42);
              const auto rep = verify::verify_partials(c, 100, 6, 9);
              return rep.passed() && rep.trials >= 100;
            });

  // 7. Connecting demo end to end.
  criterion(7, "connect demo (residual >= 40, prefix B0 A B1^2 B0^10, "
               "exact shift)", 120.0, [] {
    commands::Options o;
    o.out = "acc_transcript.json";
    std::ostringstream log;
    if (commands::cmd_connect_demo(o, log) != 0) return false;
    const auto tr = nlohmann::json::parse(slurp("acc_transcript.json"));
    return rat_parse(tr.at("residual_valuation").get<std::string>()) >= 40 &&
           tr.at("perturbation_valuation").at("match") == true &&
           tr.at("itinerary").at("fully_certified") == true;
  });

  // 8. Micro stability suite with negative control.
  criterion(8, "stability micro (50 samples; beyond-threshold control "
               "detected)", 30.0, [] {
    const auto c =
        family::random_parameters(FieldContext::base(2, 400), kDemo, 42);
    const auto plan =
        synthesis::synthesize(kDemo, {Rat(0), Rat(0), Rat(0)}, 3);
    if (!verify::verify_stability_micro(c, plan, 50, 10).passed())
      return false;
    return verify::verify_stability_micro(c, plan, 10, 11, true).failures >
           0;
  });

  std::printf("%d criteria failed\n", g_failures);
  return g_failures;
}
