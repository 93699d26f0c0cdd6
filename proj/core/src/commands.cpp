#include "wander/commands.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"
#include "wander/family.hpp"
#include "wander/skeleton.hpp"
#include "wander/synthesis.hpp"
#include "wander/verify.hpp"

namespace wander::commands {

namespace {

constexpr const char* kToolName = "wander";
constexpr const char* kToolVersion = "0.1.0";

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream os(path);
  os << j.dump(2) << "\n";
}

nlohmann::json error_json(const std::string& type, const std::string& what,
                          int code) {
  return {{"error", {{"type", type}, {"message", what}, {"exit", code}}}};
}

// Runs `body`, mapping exceptions to the exit-code contract and recording
// a structured error JSON at `out` when one is thrown.
int run_guarded(const std::string& out, std::ostream& log,
                const std::function<int()>& body) {
  std::string type, what;
  int code = 0;
  try {
    return body();
  } catch (const HorizonExceeded& e) { type = "HorizonExceeded"; what = e.what(); code = 2;
  } catch (const OutOfConfiguredRange& e) { type = "OutOfConfiguredRange"; what = e.what(); code = 2;
  } catch (const UnsupportedExtension& e) { type = "UnsupportedExtension"; what = e.what(); code = 2;
  } catch (const ContextMismatch& e) { type = "ContextMismatch"; what = e.what(); code = 2;
  } catch (const ValueGroupMismatch& e) { type = "ValueGroupMismatch"; what = e.what(); code = 2;
  } catch (const IncompletePlan& e) { type = "IncompletePlan"; what = e.what(); code = 2;
  } catch (const InconsistentPlan& e) { type = "InconsistentPlan"; what = e.what(); code = 3;
  } catch (const PrecisionExhausted& e) { type = "PrecisionExhausted"; what = e.what(); code = 4;
  } catch (const HenselConditionFailed& e) { type = "HenselConditionFailed"; what = e.what(); code = 4;
  } catch (const TailBoundUnavailable& e) { type = "TailBoundUnavailable"; what = e.what(); code = 4;
  } catch (const UndecidableAtPrecision& e) { type = "UndecidableAtPrecision"; what = e.what(); code = 4;
  } catch (const DegreeCapExceeded& e) { type = "DegreeCapExceeded"; what = e.what(); code = 4;
  } catch (const DivisionByIndistinguishableZero& e) { type = "DivisionByIndistinguishableZero"; what = e.what(); code = 4;
  } catch (const IndistinguishableFromZero& e) { type = "IndistinguishableFromZero"; what = e.what(); code = 4;
  } catch (const std::invalid_argument& e) { type = "InvalidArgument"; what = e.what(); code = 2;
  }
  log << type << ": " << what << "\n";
  write_json(out, error_json(type, what, code));
  return code;
}

// The demo radii for p = 2 (the configuration all worked examples use);
// the greedy generic construction otherwise.
skeleton::RadiiConfig demo_config(unsigned long p, int horizon) {
  if (p == 2 && horizon == 4) return skeleton::RadiiConfig{2, {2, 4, 7, 12}, 0};
  return skeleton::make_generic(p, horizon, 2);
}

nlohmann::json symbols_json(const synthesis::ItineraryWord& w) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& s : w) a.push_back(s.str());
  return a;
}

}  // namespace

int cmd_certify(const Options& opt, std::ostream& log) {
  const std::string out = opt.out.empty() ? "certificate.json" : opt.out;
  return run_guarded(out, log, [&]() -> int {
    if (opt.horizon < opt.stages + 1)
      throw HorizonExceeded("certify requires J >= K + 1 (J = " +
                            std::to_string(opt.horizon) +
                            ", K = " + std::to_string(opt.stages) + ")");
    const auto cfg = skeleton::make_generic(opt.prime, opt.horizon, 2);
    const Rat ebar = rat_parse(opt.eps_bar);
    const auto plan = synthesis::synthesize(
        cfg, std::vector<Rat>(static_cast<size_t>(opt.stages), ebar),
        opt.stages);
    const auto margins = synthesis::check_inequalities(cfg, plan);

    bool all_positive = true;
    nlohmann::json jm = nlohmann::json::array();
    for (const auto& m : margins) {
      if (!(m.value > 0)) all_positive = false;
      jm.push_back({{"family", m.family},
                    {"j", m.j},
                    {"k", m.k},
                    {"margin", rat_str(m.value)}});
    }

    // Every stage trace must be internally consistent (radius_trace throws
    // otherwise); the summary counts the wild entry steps r >= varrho.
    long entries = 0, wild = 0;
    for (int k = 1; k <= opt.stages; ++k) {
      const auto trace = synthesis::radius_trace(cfg, plan, k);
      entries += static_cast<long>(trace.size());
      for (const auto& e : trace)
        if (e.wild_flag) ++wild;
    }

    nlohmann::json cert = {
        {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
        {"seed", opt.seed},
        {"config", skeleton::to_json(cfg)},
        {"plan", synthesis::to_json(plan)},
        {"margins", jm},
        {"margins_positive", all_positive},
        {"trace_summary",
         {{"stages", opt.stages},
          {"entries", entries},
          {"wild_steps", wild},
          {"consistent", true}}},
        {"report_digests", nlohmann::json::object()}};
    write_json(out, cert);
    log << "certificate: " << margins.size() << " margins, "
        << (all_positive ? "all positive" : "NON-POSITIVE MARGIN") << ", "
        << entries << " trace entries\n";
    return all_positive ? 0 : 3;
  });
}

int cmd_verify(const Options& opt, std::ostream& log) {
  const std::string out = opt.out.empty() ? "report.json" : opt.out;
  return run_guarded(out, log, [&]() -> int {
    const auto ctx =
        padic::FieldContext::base(opt.prime, Rat(opt.precision));
    const auto cfg = demo_config(opt.prime, opt.horizon);
    auto c = family::random_parameters(ctx, cfg, padic::mix_seed(opt.seed, 1));

    const bool tampered = opt.drop_factor > 0;
    auto tampered_c = c;
    tampered_c.drop_factor = opt.drop_factor;

    std::vector<std::string> lemmas;
    if (opt.lemma == "all")
      lemmas = {"norms", "perturbation", "partials", "stability", "uniform"};
    else
      lemmas = {opt.lemma};

    std::vector<verify::CheckReport> reps;
    for (const auto& lemma : lemmas) {
      if (lemma == "norms") {
        reps.push_back(
            verify::verify_norms(tampered ? tampered_c : c, opt.trials,
                                 opt.seed));
      } else if (lemma == "perturbation") {
        const int j = cfg.horizon();
        const auto c_alt = c.with_coordinate(
            j, c.c_at(j) + padic::random_with_valuation(
                               ctx, -cfg.q(j) + 2, padic::mix_seed(opt.seed, 2)));
        reps.push_back(verify::verify_perturbation(
            tampered ? tampered_c : c, c_alt, opt.trials, opt.seed));
      } else if (lemma == "partials") {
        reps.push_back(verify::verify_partials(tampered ? tampered_c : c,
                                               opt.trials, 6, opt.seed));
      } else if (lemma == "stability") {
        const int K = std::min(3, cfg.horizon() - 1);
        const auto plan = synthesis::synthesize(
            cfg, std::vector<Rat>(static_cast<size_t>(K), Rat(0)), K);
        reps.push_back(verify::verify_stability_micro(c, plan, opt.trials,
                                                      opt.seed, tampered));
      } else if (lemma == "uniform") {
        const int n1 = static_cast<int>(skeleton::compute_n(cfg, 1));
        const auto sr = family::find_seed(tampered ? tampered_c : c, 1, n1,
                                          Rat(opt.precision, 4));
        reps.push_back(verify::verify_uniform_prefix(
            sr.params, sr.x, 1 + n1 + 1, opt.trials, opt.seed));
      } else {
        throw OutOfConfiguredRange("unknown lemma selector: " + lemma);
      }
    }

    bool ok = true;
    long trials = 0, failures = 0;
    nlohmann::json jr = nlohmann::json::array();
    Rat worst;
    bool first = true;
    for (const auto& r : reps) {
      ok = ok && r.passed();
      trials += r.trials;
      failures += r.failures;
      if (first || r.worst_margin < worst) worst = r.worst_margin;
      first = false;
      jr.push_back(r.to_json());
      log << r.lemma << ": " << r.trials << " trials, " << r.failures
          << " failures" << (r.passed() ? "" : " [FAIL]") << "\n";
    }

    nlohmann::json report =
        reps.size() == 1
            ? reps.front().to_json()
            : nlohmann::json{{"lemma", "all"},
                             {"trials", trials},
                             {"failures", failures},
                             {"worst_margin", rat_str(worst)},
                             {"seed", opt.seed},
                             {"reports", jr}};
    report["tampered"] = tampered;
    write_json(out, report);
    return ok ? 0 : 3;
  });
}

int cmd_connect_demo(const Options& opt, std::ostream& log) {
  const std::string out = opt.out.empty() ? "transcript.json" : opt.out;
  return run_guarded(out, log, [&]() -> int {
    if (opt.prime != 2 && opt.prime != 3)
      throw OutOfConfiguredRange(
          "connect demo supports p in {2, 3} (extension degree cap)");
    const auto ctx =
        padic::FieldContext::base(opt.prime, Rat(opt.precision));
    const auto cfg = demo_config(opt.prime, 4);
    const auto c =
        family::random_parameters(ctx, cfg, padic::mix_seed(opt.seed, 1));

    const int n1 = static_cast<int>(skeleton::compute_n(cfg, 1));
    const int k = 1, ell = 2, tail = 10;
    const auto sr = family::find_seed(c, 1, n1, Rat(opt.precision, 4));
    const auto cr = family::connect_parameter(sr.params, sr.x, k, ell, Rat(1));

    const int prefix_len = 1 + n1 + ell + tail;
    const auto it = family::itinerary(cr.params, sr.x, prefix_len);
    synthesis::ItineraryWord expected;
    expected.push_back(synthesis::sym_B(0));
    for (int i = 0; i < n1; ++i) expected.push_back(synthesis::sym_A());
    for (int i = 0; i < ell; ++i) expected.push_back(synthesis::sym_B(1));
    for (int i = 0; i < tail; ++i) expected.push_back(synthesis::sym_B(0));

    const bool prefix_ok =
        it.certified_steps == prefix_len && it.word == expected;
    const bool shift_ok = cr.shift_val == cr.predicted_shift_val;
    const bool dh_ok = cr.dh_val == cr.predicted_dh_val;

    nlohmann::json orbit = nlohmann::json::array();
    for (size_t n = 0; n < it.vals.size(); ++n) {
      nlohmann::json e = {{"n", n},
                          {"v", rat_str(it.vals[n])},
                          {"certified", n < it.word.size()}};
      if (n < it.word.size()) e["symbol"] = it.word[n].str();
      orbit.push_back(e);
    }

    nlohmann::json transcript = {
        {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
        {"p", opt.prime},
        {"seed", opt.seed},
        {"config", skeleton::to_json(cfg)},
        {"micro_plan", {{"m1", 1}, {"n1", n1}, {"k", k}, {"ell", ell}}},
        {"x_valuation", rat_str(sr.x.valuation())},
        {"steps_to_fixed", cr.steps_to_fixed},
        {"residual_valuation", rat_str(cr.residual_val)},
        {"derivative_valuation",
         {{"measured", rat_str(cr.dh_val)},
          {"predicted", rat_str(cr.predicted_dh_val)},
          {"match", dh_ok}}},
        {"perturbation_valuation",
         {{"measured", rat_str(cr.shift_val)},
          {"predicted", rat_str(cr.predicted_shift_val)},
          {"match", shift_ok}}},
        {"threshold", rat_str(cr.threshold)},
        {"within_threshold", cr.within_threshold},
        {"itinerary",
         {{"symbols", symbols_json(it.word)},
          {"expected", symbols_json(expected)},
          {"certified_steps", it.certified_steps},
          {"fully_certified", prefix_ok}}},
        {"orbit", orbit}};
    write_json(out, transcript);
    log << "connect demo: N = " << cr.steps_to_fixed
        << ", residual v >= " << rat_str(cr.residual_val)
        << ", shift v = " << rat_str(cr.shift_val)
        << (shift_ok ? " (matches prediction)" : " (MISMATCH)")
        << ", prefix " << (prefix_ok ? "certified" : "NOT certified")
        << "\n";
    return (prefix_ok && shift_ok && dh_ok) ? 0 : 3;
  });
}

}  // namespace wander::commands
