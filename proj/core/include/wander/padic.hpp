#pragma once

// Finite-precision arithmetic in Q_p and radical tower extensions, with
// exact rational valuations and certified absolute precision.
//
// Elements are stored as sums of monomials coeff * t_1^{i_1} ... t_k^{i_k}
// over the adjoined radicals t_i (t_i^{d_i} = a_i), with exact rational
// coefficients whose denominators are coprime to p. Each adjunction is
// required to be totally ramified (checked via the valuation of a_i), which
// makes the valuations of distinct monomials distinct: the valuation of an
// element is the exact minimum over its terms, never a tie.
//
// Precision model is absolute: an element with abs_precision N is certified
// modulo valuation >= N. Arithmetic never silently increases precision.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wander/rational.hpp"

namespace wander::padic {

class FieldContext;
using ContextPtr = std::shared_ptr<const FieldContext>;

class PadicElement {
 public:
  PadicElement() = default;

  // Constructors via FieldContext::from_rational / zero / radical below.

  const ContextPtr& context() const { return ctx_; }
  const Rat& precision() const { return prec_; }

  // True when every term sits at or above the precision bound: the element
  // is indistinguishable from 0 at its certified precision.
  bool is_zero() const { return terms_.empty(); }

  // Exact valuation; throws IndistinguishableFromZero when is_zero().
  Rat valuation() const;
  // Valuation lower bound: valuation() when distinguishable, else precision.
  Rat val_lb() const { return is_zero() ? prec_ : valuation(); }

  PadicElement operator-() const;
  friend PadicElement operator+(const PadicElement& x, const PadicElement& y);
  friend PadicElement operator-(const PadicElement& x, const PadicElement& y);
  friend PadicElement operator*(const PadicElement& x, const PadicElement& y);
  friend PadicElement operator/(const PadicElement& x, const PadicElement& y);

  PadicElement inverse() const;       // DivisionByIndistinguishableZero
  PadicElement pow(long n) const;     // n may be negative

  // Truncate the certified precision down to new_prec (never up).
  PadicElement with_precision(const Rat& new_prec) const;

  // Lossless embedding into an extension of this element's context.
  PadicElement embed(const ContextPtr& target) const;

  // Exact equality of stored representations (same context, same canonical
  // digits, same precision).
  bool same_representation(const PadicElement& o) const {
    return prec_ == o.prec_ && terms_ == o.terms_;
  }

  nlohmann::json to_json() const;

 private:
  friend class FieldContext;
  friend PadicElement element_from_json(const nlohmann::json& j);
  using Expt = std::vector<int>;  // one exponent per tower level

  ContextPtr ctx_;
  std::map<Expt, Rat> terms_;
  Rat prec_ = 0;

  void reduce();                  // canonicalize digits, drop sub-precision terms
  void reduce_exponents();        // rewrite t_i^{d_i} -> a_i
  static void check_same_context(const PadicElement& x, const PadicElement& y);
};

// Immutable description of Q_p or a radical tower over it. Extensions are
// built with adjoin_radical and simply chain their parent context.
class FieldContext : public std::enable_shared_from_this<FieldContext> {
 public:
  static ContextPtr base(unsigned long p, Rat working_precision = 64);

  unsigned long p() const { return p_; }
  const mpz_class& pz() const { return pz_; }
  const Rat& working_precision() const { return prec_; }
  long ramification() const { return e_; }
  int depth() const { return depth_; }
  const ContextPtr& parent() const { return parent_; }
  long degree() const { return d_; }                // top-level [K : K_parent]
  const PadicElement& radicand() const { return a_; }
  Rat radical_valuation() const;                    // v(t) at the top level

  // True when `other` is this context or an ancestor of it.
  bool extends(const ContextPtr& other) const;

  PadicElement from_rational(const Rat& x) const;
  PadicElement from_rational(const Rat& x, const Rat& abs_prec) const;
  PadicElement zero(const Rat& abs_prec) const;
  PadicElement one() const { return from_rational(1); }
  // The top-level radical t (throws on the base context).
  PadicElement radical() const;
  // The radical adjoined at the given tower level (1-based).
  PadicElement radical_at_level(int level) const;

  nlohmann::json to_json() const;
  static ContextPtr from_json(const nlohmann::json& j);

 private:
  friend class PadicElement;
  friend std::pair<ContextPtr, PadicElement> adjoin_radical(
      const ContextPtr&, const PadicElement&, long);

  FieldContext() = default;

  unsigned long p_ = 2;
  mpz_class pz_ = 2;
  Rat prec_ = 64;
  ContextPtr parent_;   // null for the base field
  long d_ = 1;          // degree of the top radical
  PadicElement a_;      // its d-th power, an element of the parent context
  long e_ = 1;          // total ramification index
  int depth_ = 0;       // number of tower levels
};

// Adjoins t with t^d = a. Requires the Newton-polygon slope v(a)/d to have
// exact denominator d over the current value group (gcd check); otherwise
// the irreducibility of x^d - a is not established and UnsupportedExtension
// is thrown. d = 1 returns the unchanged context and a itself.
std::pair<ContextPtr, PadicElement> adjoin_radical(const ContextPtr& ctx,
                                                   const PadicElement& a,
                                                   long d);

// Exact rational valuation (convenience wrapper).
Rat valuation(const PadicElement& x);

// Deterministic element with valuation exactly v_target.
// Throws ValueGroupMismatch if v_target is not in (1/e)Z.
PadicElement random_with_valuation(const ContextPtr& ctx, const Rat& v_target,
                                   std::uint64_t seed);

// Newton-Hensel root refinement. Requires v(F(x0)) > 2 v(F'(x0)); returns
// x* with v(F(x*)) >= target_prec.
PadicElement newton_solve(const std::function<PadicElement(const PadicElement&)>& F,
                          const std::function<PadicElement(const PadicElement&)>& dF,
                          const PadicElement& x0, const Rat& target_prec);

PadicElement element_from_json(const nlohmann::json& j);

// Derives an independent sub-seed; used to fan trials out deterministically.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace wander::padic
