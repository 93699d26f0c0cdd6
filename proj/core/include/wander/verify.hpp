#pragma once

// Sampled, certified property checks for the quantitative laws of the
// truncated family: norm and derivative identities, perturbation and
// parameter-derivative valuations, prefix stability, and the uniform-disk
// prefix law. Every assertion is an exact rational valuation comparison;
// a report passes iff failures = 0 and every trial was certified.

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "wander/family.hpp"
#include "wander/rational.hpp"
#include "wander/synthesis.hpp"

namespace wander::verify {

struct CheckReport {
  std::string lemma;
  long trials = 0;
  long failures = 0;
  Rat worst_margin = 0;  // smallest strict-inequality margin observed
  std::uint64_t seed = 0;
  long certified = 0;  // trials whose every valuation was decidable

  bool passed() const { return failures == 0 && certified == trials; }
  nlohmann::json to_json() const;
};

// Norm law v(f(z)) = -phi(-v(z)) on A and B_0 samples, the derivative laws
// on B_0 / B_j / A, the isometry-with-expansion on B_j, and the mean-value
// form on B_0. A drop_factor set on `c` acts as the tampered negative
// control.
CheckReport verify_norms(const family::ParameterVector& c, long trials,
                         std::uint64_t seed);

// Variation laws for a pair of parameter vectors differing in exactly one
// coordinate j: the exact variation valuation on B_k samples (k < j), the
// strict smallness bound v(df) > v(f) on samples inside the radius R_{j-1},
// and monotonicity of the sampled sup of |df| in the radius.
CheckReport verify_perturbation(const family::ParameterVector& c,
                                const family::ParameterVector& c_alt,
                                long trials, std::uint64_t seed);

// Finite-difference parameter derivatives: the single-application identity
// v(d_j f) = v(z) + v(f) + 2 q_j, its N-fold composition along orbits that
// stay below radius R_j, and the micro-seed orbit law
// v(d_j f^{o(N_1 + l')}) = -q_1 - sigma_1 + 2 q_j - l' * Lambda_1.
CheckReport verify_partials(const family::ParameterVector& c, long samples,
                            int orbit_len, std::uint64_t seed);

// Certified itinerary prefix of the micro seed is unchanged under sampled
// perturbations of the coordinates beyond the current stage. With
// negative_control, coordinate 1 is perturbed by a full unit of its radius
// instead, and the report counts the resulting prefix changes as failures
// (the caller asserts failures > 0).
CheckReport verify_stability_micro(const family::ParameterVector& c,
                                   const synthesis::StagePlan& plan,
                                   long trials, std::uint64_t seed,
                                   bool negative_control = false);

// Points z with v(z - x) > 2/(p-1) share x's certified itinerary prefix;
// additionally the wild-excursion derivative bound
// v((f^{o(m+n)})'(z)) > m - q_k - 1/(p-1) holds at the sampled points.
CheckReport verify_uniform_prefix(const family::ParameterVector& c,
                                  const padic::PadicElement& x,
                                  int prefix_len, long trials,
                                  std::uint64_t seed);

}  // namespace wander::verify
