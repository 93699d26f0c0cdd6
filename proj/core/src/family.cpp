#include "wander/family.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"

namespace wander::family {

using padic::adjoin_radical;
using padic::FieldContext;
using padic::mix_seed;
using padic::newton_solve;
using padic::random_with_valuation;

// ------------------------------------------------------------- parameters

ParameterVector ParameterVector::embed(const ContextPtr& target) const {
  ParameterVector r;
  r.ctx = target;
  r.cfg = cfg;
  r.drop_factor = drop_factor;
  r.c.reserve(c.size());
  for (const auto& cj : c) r.c.push_back(cj.embed(target));
  return r;
}

ParameterVector ParameterVector::with_coordinate(int j, PadicElement cj) const {
  if (cj.context() != ctx)
    throw ContextMismatch("replacement coordinate lives in another context");
  ParameterVector r = *this;
  r.c.at(static_cast<size_t>(j) - 1) = std::move(cj);
  return r;
}

void ParameterVector::validate() const {
  cfg.validate();
  if (static_cast<int>(c.size()) != cfg.horizon())
    throw OutOfConfiguredRange("zero count does not match the radii horizon");
  for (int j = 1; j <= cfg.horizon(); ++j)
    if (c_at(j).valuation() != -cfg.q(j))
      throw OutOfConfiguredRange("v(c_" + std::to_string(j) +
                                 ") != -q_" + std::to_string(j));
}

ParameterVector random_parameters(const ContextPtr& ctx,
                                  skeleton::RadiiConfig cfg,
                                  std::uint64_t seed) {
  cfg.validate();
  ParameterVector pv;
  pv.ctx = ctx;
  pv.cfg = std::move(cfg);
  for (int j = 1; j <= pv.cfg.horizon(); ++j)
    pv.c.push_back(random_with_valuation(
        ctx, -pv.cfg.q(j), mix_seed(seed, static_cast<std::uint64_t>(j))));
  return pv;
}

// ------------------------------------------------------------- evaluation

// Declared extrapolation for the first dropped radius beyond the horizon.
static Rat tail_surrogate(const skeleton::RadiiConfig& cfg) {
  const int J = cfg.horizon();
  const Rat qJ = cfg.q(J);
  return J >= 2 ? Rat(2 * qJ - cfg.q(J - 1)) : Rat(2 * qJ);
}

static void check_tail(const ParameterVector& c, const Rat& vz) {
  if (!(vz > -c.cfg.q(c.cfg.horizon())))
    throw TailBoundUnavailable("v(z) = " + rat_str(vz) +
                               " at or beyond the configured horizon");
}

// prod_{i != skip} (1 - z/c_i), honoring the drop_factor control.
static PadicElement factor_product(const ParameterVector& c,
                                   const PadicElement& z, int skip) {
  PadicElement prod = c.ctx->one();
  const PadicElement one = c.ctx->one();
  for (int i = 1; i <= c.cfg.horizon(); ++i) {
    if (i == skip || i == c.drop_factor) continue;
    prod = prod * (one - z * c.c_at(i).inverse());
  }
  return prod;
}

EvalResult eval_f(const ParameterVector& c, const PadicElement& z) {
  if (z.is_zero()) {
    const Rat prec = Rat(static_cast<long>(c.ctx->p())) * z.precision() - 1;
    return {c.ctx->zero(prec), prec};
  }
  const Rat vz = z.valuation();
  check_tail(c, vz);
  const PadicElement g =
      z.pow(static_cast<long>(c.ctx->p())) *
      c.ctx->from_rational(Rat(1, static_cast<long>(c.ctx->p())));
  PadicElement value = g * factor_product(c, z, 0);
  const Rat err =
      std::min(value.precision(), Rat(value.val_lb() + vz + tail_surrogate(c.cfg)));
  return {std::move(value), err};
}

EvalResult eval_fprime(const ParameterVector& c, const PadicElement& z) {
  if (z.is_zero()) {
    // f'(z) = z^{p-1} * (1 + O(z)); certified only as v >= (p-1) * prec(z)
    const Rat prec = Rat(static_cast<long>(c.ctx->p()) - 1) * z.precision();
    return {c.ctx->zero(prec), prec};
  }
  const Rat vz = z.valuation();
  check_tail(c, vz);
  const long p = static_cast<long>(c.ctx->p());
  const PadicElement g = z.pow(p) * c.ctx->from_rational(Rat(1, p));
  const PadicElement gprime = z.pow(p - 1);
  PadicElement value = gprime * factor_product(c, z, 0);
  for (int j = 1; j <= c.cfg.horizon(); ++j) {
    if (j == c.drop_factor) continue;
    value = value - g * c.c_at(j).inverse() * factor_product(c, z, j);
  }
  const Rat err =
      std::min(value.precision(), Rat(value.val_lb() + vz + tail_surrogate(c.cfg)));
  return {std::move(value), err};
}

EvalResult eval_partial(const ParameterVector& c, const PadicElement& z,
                        int j) {
  if (z.is_zero()) {
    const Rat prec = Rat(static_cast<long>(c.ctx->p()) + 1) * z.precision() +
                     2 * c.cfg.q(j) - 1;
    return {c.ctx->zero(prec), prec};
  }
  const Rat vz = z.valuation();
  check_tail(c, vz);
  const long p = static_cast<long>(c.ctx->p());
  const PadicElement g = z.pow(p) * c.ctx->from_rational(Rat(1, p));
  const PadicElement cj_inv = c.c_at(j).inverse();
  PadicElement value = g * z * cj_inv * cj_inv * factor_product(c, z, j);
  const Rat err =
      std::min(value.precision(), Rat(value.val_lb() + vz + tail_surrogate(c.cfg)));
  return {std::move(value), err};
}

// ----------------------------------------------------------- partition

synthesis::Symbol classify(const ParameterVector& c, const PadicElement& z) {
  if (z.is_zero()) {
    if (z.precision() > 0) return synthesis::sym_B(0);
    throw UndecidableAtPrecision("element precision " +
                                 rat_str(z.precision()) +
                                 " cannot separate B_0 from its boundary");
  }
  const Rat vz = z.valuation();
  if (vz > 0) return synthesis::sym_B(0);
  for (int j = 1; j <= c.cfg.horizon(); ++j) {
    if (vz != -c.cfg.q(j)) continue;
    const PadicElement d = z - c.c_at(j);
    if (d.is_zero()) {
      if (d.precision() > -c.cfg.q(j)) return synthesis::sym_B(j);
      throw UndecidableAtPrecision("distance to c_" + std::to_string(j) +
                                   " not resolved at current precision");
    }
    if (d.valuation() > -c.cfg.q(j)) return synthesis::sym_B(j);
  }
  return synthesis::sym_A();
}

ItineraryResult itinerary(const ParameterVector& c, PadicElement z,
                          int steps) {
  ItineraryResult r;
  for (int n = 0; n < steps; ++n) {
    r.vals.push_back(z.val_lb());
    try {
      synthesis::Symbol s = classify(c, z);
      r.word.push_back(s);
    } catch (const UndecidableAtPrecision&) {
      r.vals.pop_back();
      break;
    }
    if (n + 1 == steps) break;
    try {
      EvalResult next = eval_f(c, z);
      // certified only while the truncation error stays strictly below the
      // computed value
      if (!next.value.is_zero() && !(next.err_val > next.value.valuation()))
        break;
      z = std::move(next.value);
    } catch (const TailBoundUnavailable&) {
      break;
    }
  }
  r.certified_steps = static_cast<int>(r.word.size());
  return r;
}

void write_orbit_jsonl(std::ostream& os, const ItineraryResult& it,
                       int steps) {
  for (int n = 0; n < it.certified_steps; ++n) {
    nlohmann::json line = {{"n", n},
                           {"v", rat_str(it.vals[static_cast<size_t>(n)])},
                           {"symbol", it.word[static_cast<size_t>(n)].str()},
                           {"certified", true}};
    os << line.dump() << "\n";
  }
  if (it.certified_steps < steps) {
    nlohmann::json line = {{"n", it.certified_steps},
                           {"v", nullptr},
                           {"symbol", nullptr},
                           {"certified", false}};
    os << line.dump() << "\n";
  }
}

// ------------------------------------------------ fixed point and inverse

PadicElement fixed_point(const ParameterVector& c, int k,
                         const Rat& target_prec) {
  const PadicElement& ck = c.c_at(k);
  auto F = [&](const PadicElement& z) { return eval_f(c, z).value - z; };
  auto dF = [&](const PadicElement& z) {
    return eval_fprime(c, z).value - c.ctx->one();
  };
  return newton_solve(F, dF, ck, target_prec);
}

std::vector<PadicElement> inverse_orbit(const ParameterVector& c, int k,
                                        int ell, const Rat& target_prec) {
  std::vector<PadicElement> out;
  out.reserve(static_cast<size_t>(ell));
  out.push_back(c.c_at(k));  // h(0) = c_k: an exact zero of f
  auto dF = [&](const PadicElement& z) { return eval_fprime(c, z).value; };
  for (int i = 2; i <= ell; ++i) {
    const PadicElement y = out.back();  // f(h^{oi}(0)) = h^{o(i-1)}(0)
    auto F = [&](const PadicElement& z) { return eval_f(c, z).value - y; };
    out.push_back(newton_solve(F, dF, y, target_prec));
  }
  return out;
}

// ----------------------------------------------------------------- seeds

// Dense polynomials coeffs[i] * z^i over a shared context, as scaffolding
// for the preimage steps.
using Poly = std::vector<PadicElement>;

// z^p * prod_j (1 - z/c_j) / p - y.
static Poly build_preimage_poly(const ParameterVector& c,
                                const PadicElement& y) {
  const long p = static_cast<long>(c.ctx->p());
  Poly prod{c.ctx->one()};
  for (int j = 1; j <= c.cfg.horizon(); ++j) {
    if (j == c.drop_factor) continue;
    const PadicElement slope = -c.c_at(j).inverse();
    Poly next(prod.size() + 1, c.ctx->zero(c.ctx->working_precision()));
    for (size_t i = 0; i < prod.size(); ++i) {
      next[i] = next[i] + prod[i];
      next[i + 1] = next[i + 1] + prod[i] * slope;
    }
    prod = std::move(next);
  }
  const PadicElement pinv = c.ctx->from_rational(Rat(1, p));
  Poly phi(prod.size() + static_cast<size_t>(p),
           c.ctx->zero(c.ctx->working_precision()));
  for (size_t i = 0; i < prod.size(); ++i)
    phi[i + static_cast<size_t>(p)] = prod[i] * pinv;
  phi[0] = phi[0] - y;
  return phi;
}

// Synthetic division by the monic quadratic z^2 + b z + c.
// Returns the quotient; r1/r0 receive the remainder r1*z + r0.
static Poly divmod_quadratic(const Poly& u, const PadicElement& b,
                             const PadicElement& c, PadicElement& r1,
                             PadicElement& r0) {
  Poly s = u;
  Poly q(s.size() >= 2 ? s.size() - 2 : 0,
         b.context()->zero(b.context()->working_precision()));
  for (size_t i = s.size(); i-- > 2;) {
    q[i - 2] = s[i];
    s[i - 1] = s[i - 1] - b * s[i];
    s[i - 2] = s[i - 2] - c * s[i];
  }
  r1 = s.size() > 1 ? s[1] : s[0].context()->zero(s[0].precision());
  r0 = s[0];
  return q;
}

// One backward preimage for p = 2. The pointwise Newton refinement is
// obstructed here (the quadratic Taylor term carries valuation -1 and the
// two preimages sit exactly at the Krasner radius), so instead the degree-2
// factor z^2 + b z + c holding the small preimage pair is Hensel-lifted from
// the initial guess z^2 - 2y -- the pair is isolated on the Newton polygon,
// which makes the lift robust -- and the root is taken exactly by completing
// the square, adjoining the discriminant's square root.
static PadicElement backward_preimage_p2(ParameterVector& pv,
                                         const PadicElement& y,
                                         const Rat& target_prec,
                                         long degree_cap) {
  const ContextPtr ctx = pv.ctx;
  const Poly phi = build_preimage_poly(pv, y);
  PadicElement b = ctx->from_rational(0);
  PadicElement c = ctx->from_rational(-2) * y;
  const Rat vx_floor = -pv.cfg.q(1);  // crude bound on v of the small roots

  PadicElement r1 = ctx->one(), r0 = ctx->one();
  Rat last;
  bool have_last = false;
  for (int iter = 0;; ++iter) {
    Poly q = divmod_quadratic(phi, b, c, r1, r0);
    const Rat res = std::min(r0.val_lb(), Rat(r1.val_lb() + vx_floor));
    if (res >= target_prec) break;
    if (iter >= 64 || (have_last && !(res > last)))
      throw PrecisionExhausted("factor lift stalled at residual valuation " +
                               rat_str(res));
    last = res;
    have_last = true;
    // d(remainder)/db = -(z q mod g), d(remainder)/dc = -(q mod g)
    PadicElement u1 = ctx->one(), u0 = ctx->one();
    divmod_quadratic(q, b, c, u1, u0);
    const PadicElement zq0 = -u1 * c;          // z*(u1 z + u0) mod g
    const PadicElement zq1 = u0 - u1 * b;
    const PadicElement det = zq0 * u1 - zq1 * u0;
    const PadicElement dinv = det.inverse();
    const PadicElement db = (r0 * u1 - r1 * u0) * dinv;
    const PadicElement dc = (zq0 * r1 - zq1 * r0) * dinv;
    b = b + db;
    c = c + dc;
  }

  if (ctx->ramification() * 2 > degree_cap)
    throw DegreeCapExceeded("ramification " +
                            std::to_string(ctx->ramification() * 2) +
                            " above cap " + std::to_string(degree_cap));
  const PadicElement disc4 =
      (b * b - ctx->from_rational(4) * c) * ctx->from_rational(Rat(1, 4));
  auto [ext, w] = adjoin_radical(ctx, disc4, 2);
  pv = pv.embed(ext);
  return w - b.embed(ext) * ext->from_rational(Rat(1, 2));
}

SeedResult find_seed(const ParameterVector& c, int m1, int n1,
                     const Rat& target_prec, long degree_cap) {
  if (m1 < 1 || n1 < 0)
    throw OutOfConfiguredRange("seed construction requires m1 >= 1, n1 >= 0");
  if (c.ctx->p() != 2)
    throw UnsupportedExtension(
        "seed preimages are implemented through quadratic factor extraction; "
        "only p = 2 is supported");
  ParameterVector pv = c;
  PadicElement y = fixed_point(pv, 1, target_prec);
  for (int step = 0; step < m1 + n1; ++step)
    y = backward_preimage_p2(pv, y.embed(pv.ctx), target_prec, degree_cap);
  return {pv.ctx, pv, y};
}

// ------------------------------------------------------------ connecting

ConnectResult connect_parameter(const ParameterVector& c,
                                const PadicElement& x, int k, int ell,
                                const Rat& eps_log) {
  const ContextPtr& ctx = x.context();
  ParameterVector pv = (ctx == c.ctx) ? c : c.embed(ctx);
  const Rat prec = ctx->working_precision();

  // Detect N with f^{oN}(x) = w_k, to the accuracy the seed was built with
  // (at least an eighth of the working precision).
  const PadicElement wk = fixed_point(pv, k, prec - prec / 4);
  int N = 0;
  {
    PadicElement z = x;
    for (int n = 1; n <= 64; ++n) {
      try {
        z = eval_f(pv, z).value;
      } catch (const TailBoundUnavailable&) {
        break;
      }
      if ((z - wk).val_lb() >= prec / 8) { N = n; break; }
    }
    if (N == 0)
      throw HenselConditionFailed(
          "orbit of the seed does not reach the stage-" + std::to_string(k) +
          " fixed point");
  }

  const Rat target_prec = prec / 4;
  const Rat residual_target = prec / 8;
  auto H = [&](const PadicElement& a) {
    ParameterVector pva = pv.with_coordinate(k + 1, a);
    PadicElement z = x;
    for (int n = 0; n < N; ++n) z = eval_f(pva, z).value;
    std::vector<PadicElement> hs = inverse_orbit(pva, k, ell, target_prec);
    return z - hs.back();
  };

  const PadicElement a0 = pv.c_at(k + 1);
  // Separation for the finite difference: v(delta) = D, far above every
  // valuation the derivative can carry but well inside working precision.
  const long D = rat_ceil(prec / 8).get_si() + 16;
  mpz_class pD;
  mpz_pow_ui(pD.get_mpz_t(),
             mpz_class(static_cast<long>(ctx->p())).get_mpz_t(),
             static_cast<unsigned long>(D));
  const PadicElement delta = ctx->from_rational(Rat(pD));

  PadicElement a = a0;
  PadicElement Ha = H(a);
  Rat dh_val = 0;
  bool have_dh = false;
  PadicElement dH = ctx->one();
  Rat last = Ha.val_lb();
  for (int iter = 0; iter < 64 && !(Ha.val_lb() >= residual_target); ++iter) {
    dH = (H(a + delta) - Ha) / delta;
    if (dH.is_zero())
      throw HenselConditionFailed(
          "finite-difference derivative indistinguishable from 0 at "
          "separation valuation " + rat_str(Rat(D)));
    if (!have_dh) { dh_val = dH.valuation(); have_dh = true; }
    a = a - Ha / dH;
    Ha = H(a);
    if (Ha.val_lb() >= residual_target) break;
    if (!(Ha.val_lb() > last))
      throw HenselConditionFailed(
          "parameter iteration stalled: v(H) = " + rat_str(Ha.val_lb()) +
          ", v(dH) = " + rat_str(dH.valuation()));
    last = Ha.val_lb();
  }
  if (!(Ha.val_lb() >= residual_target))
    throw PrecisionExhausted("parameter iteration cap reached at v(H) = " +
                             rat_str(Ha.val_lb()));

  ConnectResult r{.params = pv.with_coordinate(k + 1, a),
                  .c_new = a,
                  .steps_to_fixed = N,
                  .residual_val = Ha.val_lb(),
                  .dh_val = dh_val,
                  .predicted_dh_val = 2 * pv.cfg.q(k + 1) - pv.cfg.q(k) -
                                      skeleton::s_log(pv.cfg, k),
                  .shift_val = (a - a0).val_lb(),
                  .predicted_shift_val =
                      ell * skeleton::lambda_log(pv.cfg, k) -
                      2 * pv.cfg.q(k + 1) + skeleton::s_log(pv.cfg, k),
                  .threshold = -pv.cfg.q(k + 1) - eps_log,
                  .within_threshold = false};
  r.within_threshold = r.shift_val > r.threshold;
  return r;
}

}  // namespace wander::family
