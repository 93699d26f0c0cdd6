#include "wander/skeleton.hpp"

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"

namespace wander::skeleton {

void RadiiConfig::validate() const {
  if (p < 2) throw std::invalid_argument("p must be a prime >= 2");
  if (qs.empty()) throw std::invalid_argument("empty radii configuration");
  if (!(qs.front() > 1)) throw std::invalid_argument("q_1 must exceed 1");
  for (size_t i = 1; i < qs.size(); ++i)
    if (!(qs[i - 1] < qs[i]))
      throw std::invalid_argument("log-radii must be strictly increasing");
}

LogRadius varrho_log(unsigned long p) {
  return Rat(-1, static_cast<long>(p) - 1);
}

// Region of q: 1 for q <= q_1, j for q_{j-1} < q <= q_j.
static int region_of(const RadiiConfig& cfg, const LogRadius& q) {
  if (q > cfg.qs.back())
    throw OutOfConfiguredRange("log-radius " + rat_str(q) +
                               " beyond configured horizon q_J = " +
                               rat_str(cfg.qs.back()));
  int lo = 0, hi = cfg.horizon() - 1;  // first index with q <= qs[idx]
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (q <= cfg.qs[static_cast<size_t>(mid)]) hi = mid; else lo = mid + 1;
  }
  return lo + 1;
}

static Rat prefix_sum(const RadiiConfig& cfg, int j) {
  Rat s = 0;
  for (int i = 1; i < j; ++i) s += cfg.q(i);
  return s;
}

LogRadius phi_log(const RadiiConfig& cfg, const LogRadius& q) {
  int j = region_of(cfg, q);
  // 1 - (q_1+...+q_{j-1}) + (p+j-1)*q  (the sum is empty for j = 1)
  return 1 - prefix_sum(cfg, j) + Rat(static_cast<long>(cfg.p) + j - 1) * q;
}

LogRadius phi_inv_log(const RadiiConfig& cfg, const LogRadius& q) {
  const int J = cfg.horizon();
  if (q > phi_log(cfg, cfg.q(J)))
    throw OutOfConfiguredRange("value " + rat_str(q) +
                               " beyond phi(q_J); no configured preimage");
  // Output range of region j is (phi(q_{j-1}), phi(q_j)].
  int j = 1;
  while (j < J && q > phi_log(cfg, cfg.q(j))) ++j;
  return (q - 1 + prefix_sum(cfg, j)) / Rat(static_cast<long>(cfg.p) + j - 1);
}

long compute_n(const RadiiConfig& cfg, int j) {
  LogRadius x = cfg.q(j);
  long steps = 0;
  while (x >= 0) {
    x = phi_inv_log(cfg, x);
    ++steps;
  }
  // steps = minimal count with the iterated preimage negative; n = steps - 1.
  if (steps < 2)
    throw InconsistentPlan("n_j < 1; config violates q_1 > 1");
  return steps - 1;
}

LogRadius lambda_log(const RadiiConfig& cfg, int j) {
  return phi_log(cfg, cfg.q(j)) - cfg.q(j);
}

LogRadius s_log(const RadiiConfig& cfg, int j) {
  return phi_inv_log(cfg, cfg.q(j));
}

std::optional<GenericViolation> check_generic(const RadiiConfig& cfg, long depth) {
  const int J = cfg.horizon();
  for (int i = 1; i <= J; ++i) {
    LogRadius x = cfg.q(i);
    for (long n = 1; n <= depth; ++n) {
      if (x > cfg.qs.back()) break;
      x = phi_log(cfg, x);
      for (int j = 1; j <= J; ++j)
        if (x == cfg.q(j)) return GenericViolation{i, n, j};
    }
  }
  return std::nullopt;
}

// Forward orbit of q_i hits `cand` exactly? Orbit values are strictly
// increasing above the fixed point, so we stop once past cand.
static bool orbit_hits(const RadiiConfig& cfg, const LogRadius& start,
                       const LogRadius& cand) {
  LogRadius x = start;
  while (x <= cand) {
    x = phi_log(cfg, x);
    if (x == cand) return true;
  }
  return false;
}

RadiiConfig make_generic(unsigned long p, int count, long min_gap) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (min_gap < 1) throw std::invalid_argument("min_gap must be >= 1");
  RadiiConfig cfg;
  cfg.p = p;
  for (int j = 1; j <= count; ++j) {
    Rat cand = cfg.qs.empty() ? Rat(2) : Rat(cfg.qs.back() + min_gap);
    for (;;) {
      // Values of earlier orbits at or below cand only depend on the radii
      // below cand, all of which are already fixed; region count includes
      // the candidate itself as the current top radius.
      RadiiConfig probe = cfg;
      probe.qs.push_back(cand);
      bool clean = true;
      for (const LogRadius& qi : cfg.qs)
        if (orbit_hits(probe, qi, cand)) { clean = false; break; }
      if (clean) { cfg.qs.push_back(cand); break; }
      cand += 1;
    }
  }
  cfg.generic_depth = -1;  // generic at any depth by construction
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const RadiiConfig& cfg) {
  nlohmann::json qs = nlohmann::json::array();
  for (const auto& q : cfg.qs) qs.push_back(rat_str(q));
  return {{"p", cfg.p}, {"qs", qs}, {"generic_depth", cfg.generic_depth}};
}

RadiiConfig config_from_json(const nlohmann::json& j) {
  RadiiConfig cfg;
  cfg.p = j.at("p").get<unsigned long>();
  for (const auto& s : j.at("qs"))
    cfg.qs.push_back(rat_parse(s.get<std::string>()));
  cfg.generic_depth = j.value("generic_depth", 0);
  cfg.validate();
  return cfg;
}

}  // namespace wander::skeleton
