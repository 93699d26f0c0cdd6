#pragma once

// Exact rational arithmetic for the radius dynamics on the invariant arc
// ]0,inf[, in base-p logarithmic coordinates: the radius p^q is tracked by
// its exact rational exponent q, so every multiplicative identity of the
// radius map becomes an exact affine identity over the rationals.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wander/rational.hpp"

namespace wander::skeleton {

// Prime p together with the strictly increasing log-radii q_1 < ... < q_J.
// q_1 > 1 is required so that the first transition time is at least one.
struct RadiiConfig {
  unsigned long p = 2;
  std::vector<LogRadius> qs;
  int generic_depth = 0;

  int horizon() const { return static_cast<int>(qs.size()); }
  // 1-based access, matching the stage indexing used throughout.
  const LogRadius& q(int j) const { return qs.at(static_cast<size_t>(j) - 1); }

  void validate() const;  // throws std::invalid_argument on a bad config
};

// Log of the unique fixed radius: -1/(p-1).
LogRadius varrho_log(unsigned long p);

// The radius map in log coordinates. Piecewise affine:
//   q <= q_1:            1 + p*q
//   q_{j-1} < q <= q_j:  1 - (q_1+...+q_{j-1}) + (p+j-1)*q
// Throws OutOfConfiguredRange for q > q_J.
LogRadius phi_log(const RadiiConfig& cfg, const LogRadius& q);

// Exact inverse of phi_log; defined for q <= phi_log(q_J).
LogRadius phi_inv_log(const RadiiConfig& cfg, const LogRadius& q);

// Minimal n >= 1 such that the (n+1)-fold preimage of q_j is negative,
// i.e. the transition time through the annulus between B_0 and B_j.
long compute_n(const RadiiConfig& cfg, int j);

// Log-multiplier of the fixed point in B_j: phi_log(q_j) - q_j > 0.
LogRadius lambda_log(const RadiiConfig& cfg, int j);

// Log of the first preimage radius of q_j: phi_inv_log(q_j) < q_j.
LogRadius s_log(const RadiiConfig& cfg, int j);

struct GenericViolation {
  int i;   // orbit of q_i ...
  long n;  // ... after n steps ...
  int j;   // ... hits q_j exactly
};

// Iterates each q_i forward (up to `depth` steps or until the orbit leaves
// the configured range) and reports any exact collision with another q_j.
std::optional<GenericViolation> check_generic(const RadiiConfig& cfg, long depth);

// Greedy integer construction: q_j is the smallest integer >= q_{j-1} + min_gap
// (>= 2 for j = 1) that no forward orbit of an earlier radius hits exactly.
// The output passes check_generic at any depth by construction.
RadiiConfig make_generic(unsigned long p, int count, long min_gap);

nlohmann::json to_json(const RadiiConfig& cfg);
RadiiConfig config_from_json(const nlohmann::json& j);

}  // namespace wander::skeleton
