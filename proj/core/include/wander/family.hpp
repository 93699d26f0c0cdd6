#pragma once

// The truncated map f(z) = (z^p / p) * prod_{j<=J} (1 - z/c_j) and its
// analysis: evaluation with certified tail-error valuations, the dynamical
// partition {A, B_0, B_1, ...}, itineraries, repelling fixed points w_k,
// the inverse branch on B_k, seed-point construction through radical
// extensions, and the one-parameter Newton step that connects consecutive
// stages by adjusting a single zero c_{k+1}.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wander/padic.hpp"
#include "wander/skeleton.hpp"
#include "wander/synthesis.hpp"

namespace wander::family {

using padic::ContextPtr;
using padic::PadicElement;

// The zeros c_1 ... c_J with v(c_j) = -q_j exactly, over a shared context.
struct ParameterVector {
  ContextPtr ctx;
  skeleton::RadiiConfig cfg;
  std::vector<PadicElement> c;  // c[j-1] = c_j
  int drop_factor = 0;          // j > 0 omits factor j (negative control)

  const PadicElement& c_at(int j) const {
    return c.at(static_cast<size_t>(j) - 1);
  }
  // Same zeros viewed in an extension of ctx.
  ParameterVector embed(const ContextPtr& target) const;
  // Copy with coordinate j replaced (the replacement must live in ctx).
  ParameterVector with_coordinate(int j, PadicElement cj) const;
  void validate() const;  // checks v(c_j) = -q_j
};

// Deterministic zeros with v(c_j) = -q_j from per-coordinate sub-seeds.
ParameterVector random_parameters(const ContextPtr& ctx,
                                  skeleton::RadiiConfig cfg,
                                  std::uint64_t seed);

// A computed value together with the valuation floor below which the
// truncation of the infinite product is no longer certified:
// v(value - true value) >= err_val.
struct EvalResult {
  PadicElement value;
  Rat err_val;
};

// f(z); throws TailBoundUnavailable when v(z) <= -q_J. f(0) = 0 exactly.
EvalResult eval_f(const ParameterVector& c, const PadicElement& z);
// f'(z), in the cancellation-free product-rule form.
EvalResult eval_fprime(const ParameterVector& c, const PadicElement& z);
// d f / d c_j (z) = (z^p/p) * (z/c_j^2) * prod_{i != j} (1 - z/c_i).
EvalResult eval_partial(const ParameterVector& c, const PadicElement& z, int j);

// Partition symbol of z: B_0 iff v(z) > 0; B_j iff v(z - c_j) > -q_j;
// otherwise A (boundary points classify as A). Throws
// UndecidableAtPrecision when the deciding valuation is not certified.
synthesis::Symbol classify(const ParameterVector& c, const PadicElement& z);

struct ItineraryResult {
  synthesis::ItineraryWord word;  // certified symbols only
  int certified_steps = 0;        // == word.size()
  std::vector<Rat> vals;          // valuation lower bound of each orbit point
};

// Iterates eval_f/classify for up to `steps` symbols; stops early (without
// throwing) as soon as a classification or tail bound is no longer
// certified. The returned word is guaranteed for its whole length.
ItineraryResult itinerary(const ParameterVector& c, PadicElement z, int steps);

// One JSON object per line: {"n":., "v":"num/den", "symbol":"..",
// "certified":true} followed, when the walk stopped early, by a final
// uncertified line.
void write_orbit_jsonl(std::ostream& os, const ItineraryResult& it, int steps);

// The unique repelling fixed point w_k in B_k, by Newton from z0 = c_k.
// Postcondition: v(f(w_k) - w_k) >= target_prec and v(f'(w_k)) = -Lambda_k.
PadicElement fixed_point(const ParameterVector& c, int k,
                         const Rat& target_prec);

// h^{o1}(0), ..., h^{oell}(0) for the inverse branch h of f on B_k.
// h(0) = c_k exactly; each further point refines by Newton from the
// previous one. Distance law: v(h^{oi}(0) - w_k) = -q_k + i*Lambda_k.
std::vector<PadicElement> inverse_orbit(const ParameterVector& c, int k,
                                        int ell, const Rat& target_prec);

struct SeedResult {
  ContextPtr ctx;          // extension carrying x
  ParameterVector params;  // the input zeros embedded into ctx
  PadicElement x;
};

// A point x with f^{o(m1+n1)}(x) = w_1 to target precision and certified
// itinerary prefix B_0^{m1} A^{n1}. Built backward from w_1: each preimage
// adjoins the root of the dominant monomial of f at the target radius, then
// refines by Newton. Throws DegreeCapExceeded when the accumulated
// ramification would exceed degree_cap.
SeedResult find_seed(const ParameterVector& c, int m1, int n1,
                     const Rat& target_prec, long degree_cap = 4096);

struct ConnectResult {
  ParameterVector params;   // zeros with coordinate k+1 adjusted
  PadicElement c_new;       // the adjusted c_{k+1}
  int steps_to_fixed = 0;   // detected N with f^{oN}(x) = w_k
  Rat residual_val;         // v(f^{oN}(x) - h^{oell}(0)) at the solution
  Rat dh_val;               // measured v of the finite-difference derivative
  Rat predicted_dh_val;     // 2 q_{k+1} - q_k - sigma_k
  Rat shift_val;            // v(c_new - c_{k+1})
  Rat predicted_shift_val;  // ell*Lambda_k - 2 q_{k+1} + sigma_k
  Rat threshold;            // -q_{k+1} - eps_log
  bool within_threshold = false;
};

// Newton iteration on the single parameter a = c_{k+1} for
// H(a) = f_a^{oN}(x) - h_a^{oell}(0), with the derivative obtained by a
// valuation-separated finite difference. Requires the orbit of x to reach
// w_k; N is detected by forward iteration. Throws HenselConditionFailed
// (carrying the measured valuations) when the iteration cannot make
// progress.
ConnectResult connect_parameter(const ParameterVector& c,
                                const PadicElement& x, int k, int ell,
                                const Rat& eps_log);

}  // namespace wander::family
