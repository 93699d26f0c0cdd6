#include "wander/padic.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"

namespace wander::padic {

// ---------------------------------------------------------------- helpers

// p-adic valuation of a nonzero integer.
static long pval_z(const mpz_class& n, const mpz_class& p) {
  mpz_class stripped;
  return static_cast<long>(mpz_remove(stripped.get_mpz_t(), n.get_mpz_t(),
                                      p.get_mpz_t()));
}

static long pval_q(const Rat& x, const mpz_class& p) {
  return pval_z(x.get_num(), p) - pval_z(x.get_den(), p);
}

static mpz_class pow_p(const mpz_class& p, long k) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k));
  return r;
}

// Valuations of the tower radicals, level 1..depth.
static std::vector<Rat> level_vals(const ContextPtr& ctx) {
  std::vector<Rat> vs(static_cast<size_t>(ctx->depth()));
  ContextPtr c = ctx;
  while (c && c->depth() > 0) {
    vs[static_cast<size_t>(c->depth()) - 1] = c->radical_valuation();
    c = c->parent();
  }
  return vs;
}

static Rat mono_val(const std::vector<Rat>& vs, const std::vector<int>& expt) {
  Rat v = 0;
  for (size_t i = 0; i < expt.size(); ++i)
    if (expt[i]) v += expt[i] * vs[i];
  return v;
}

// ---------------------------------------------------------------- element

void PadicElement::check_same_context(const PadicElement& x, const PadicElement& y) {
  if (x.ctx_ != y.ctx_)
    throw ContextMismatch("operands belong to different field contexts");
}

Rat PadicElement::valuation() const {
  if (is_zero())
    throw IndistinguishableFromZero(
        "element indistinguishable from 0 at precision " + rat_str(prec_));
  const auto vs = level_vals(ctx_);
  bool first = true;
  Rat best;
  for (const auto& [expt, c] : terms_) {
    Rat v = pval_q(c, ctx_->pz()) + mono_val(vs, expt);
    if (first || v < best) { best = v; first = false; }
  }
  return best;
}

void PadicElement::reduce() {
  const auto vs = level_vals(ctx_);
  const mpz_class& p = ctx_->pz();
  for (auto it = terms_.begin(); it != terms_.end();) {
    Rat& c = it->second;
    if (c == 0) { it = terms_.erase(it); continue; }
    const Rat mv = mono_val(vs, it->first);
    const Rat needed = prec_ - mv;  // coefficient matters below p^needed
    const long vc = pval_q(c, p);
    if (vc >= needed) { it = terms_.erase(it); continue; }
    // canonical digit: c = p^vc * (a/b) -> p^vc * (a b^{-1} mod p^m)
    const long digits = rat_ceil(needed - vc).get_si();
    const mpz_class mod = pow_p(p, digits);
    const Rat u = (vc >= 0) ? Rat(c / Rat(pow_p(p, vc)))
                            : Rat(c * Rat(pow_p(p, -vc)));
    mpz_class binv;
    if (mpz_invert(binv.get_mpz_t(), u.get_den().get_mpz_t(), mod.get_mpz_t()) == 0)
      throw Error("internal: denominator not invertible mod p^m");
    mpz_class digit = (u.get_num() % mod) * binv % mod;
    if (digit < 0) digit += mod;
    Rat canon(digit);
    if (vc >= 0) canon *= Rat(pow_p(p, vc));
    else canon /= Rat(pow_p(p, -vc));
    c = canon;
    ++it;
  }
}

void PadicElement::reduce_exponents() {
  if (ctx_->depth() == 0) return;
  // contexts[L] = context of depth L; levels[L-1] = (d_L, terms of a_L padded)
  std::vector<ContextPtr> chain(static_cast<size_t>(ctx_->depth()) + 1);
  {
    ContextPtr c = ctx_;
    while (c) { chain[static_cast<size_t>(c->depth())] = c; c = c->parent(); }
  }
  const size_t depth = static_cast<size_t>(ctx_->depth());

  std::map<Expt, Rat> out;
  // Rewrites t_L^{d_L} -> a_L from the top level down; terminates because the
  // exponent tuple strictly decreases lexicographically from the top.
  std::function<void(const Expt&, const Rat&)> add = [&](const Expt& expt,
                                                         const Rat& coeff) {
    for (size_t L = depth; L >= 1; --L) {
      const auto& lvl = chain[L];
      if (expt[L - 1] >= lvl->degree()) {
        Expt rest = expt;
        rest[L - 1] -= static_cast<int>(lvl->degree());
        for (const auto& [ae, ac] : lvl->radicand().terms_) {
          Expt combined = rest;
          for (size_t i = 0; i < ae.size(); ++i) combined[i] += ae[i];
          add(combined, coeff * ac);
        }
        return;
      }
    }
    out[expt] += coeff;
  };
  for (const auto& [expt, c] : terms_) add(expt, c);
  terms_ = std::move(out);
}

PadicElement PadicElement::operator-() const {
  PadicElement r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

PadicElement operator+(const PadicElement& x, const PadicElement& y) {
  PadicElement::check_same_context(x, y);
  PadicElement r = x;
  r.prec_ = std::min(x.prec_, y.prec_);
  for (const auto& [e, c] : y.terms_) r.terms_[e] += c;
  r.reduce();
  return r;
}

PadicElement operator-(const PadicElement& x, const PadicElement& y) {
  return x + (-y);
}

PadicElement operator*(const PadicElement& x, const PadicElement& y) {
  PadicElement::check_same_context(x, y);
  PadicElement r;
  r.ctx_ = x.ctx_;
  r.prec_ = std::min(x.prec_ + y.val_lb(), y.prec_ + x.val_lb());
  if (x.is_zero() || y.is_zero()) return r;
  for (const auto& [ex, cx] : x.terms_)
    for (const auto& [ey, cy] : y.terms_) {
      PadicElement::Expt e = ex;
      for (size_t i = 0; i < e.size(); ++i) e[i] += ey[i];
      r.terms_[e] += cx * cy;
    }
  r.reduce_exponents();
  r.reduce();
  return r;
}

PadicElement PadicElement::inverse() const {
  if (is_zero())
    throw DivisionByIndistinguishableZero(
        "inverse of an element indistinguishable from 0");
  const Rat v = valuation();
  const Rat out_prec = prec_ - 2 * v;

  // Invert the dominant (minimum-valuation) monomial exactly:
  // (c t^i)^{-1} = c^{-1} prod_L t_L^{d_L - i_L} a_L^{-1}.
  const auto vs = level_vals(ctx_);
  auto dom = terms_.begin();
  Rat domv = pval_q(dom->second, ctx_->pz()) + mono_val(vs, dom->first);
  for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it) {
    Rat tv = pval_q(it->second, ctx_->pz()) + mono_val(vs, it->first);
    if (tv < domv) { dom = it; domv = tv; }
  }
  PadicElement y = ctx_->from_rational(1 / dom->second, out_prec + 4 * (v < 0 ? -v : v) + 8);
  {
    std::vector<ContextPtr> chain(static_cast<size_t>(ctx_->depth()) + 1);
    ContextPtr c = ctx_;
    while (c) { chain[static_cast<size_t>(c->depth())] = c; c = c->parent(); }
    for (size_t L = 1; L <= static_cast<size_t>(ctx_->depth()); ++L) {
      const int iL = dom->first[L - 1];
      if (iL == 0) continue;
      const auto& lvl = chain[L];
      PadicElement t = ctx_->radical_at_level(static_cast<int>(L));
      PadicElement tpow = ctx_->one();
      for (long k = 0; k < lvl->degree() - iL; ++k) tpow = tpow * t;
      y = y * tpow * lvl->radicand().embed(ctx_).inverse();
    }
  }

  // Newton reciprocal: r = 1 - x*y has positive valuation; y(1+r) squares it.
  const PadicElement one = ctx_->one();
  PadicElement r = one - (*this) * y;
  int guard = 0;
  while (!r.is_zero() && r.valuation() < out_prec + v) {
    y = y + y * r;
    r = one - (*this) * y;
    if (++guard > 200)
      throw PrecisionExhausted("reciprocal iteration failed to converge");
  }
  return y.with_precision(out_prec);
}

PadicElement operator/(const PadicElement& x, const PadicElement& y) {
  return x * y.inverse();
}

PadicElement PadicElement::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  if (n == 0) return ctx_->one();
  PadicElement acc = ctx_->one();
  PadicElement base = *this;
  long k = n;
  while (k > 0) {
    if (k & 1) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  return acc;
}

PadicElement PadicElement::with_precision(const Rat& new_prec) const {
  PadicElement r = *this;
  r.prec_ = std::min(prec_, new_prec);
  r.reduce();
  return r;
}

PadicElement PadicElement::embed(const ContextPtr& target) const {
  if (target == ctx_) return *this;
  if (!target->extends(ctx_))
    throw ContextMismatch("target context does not extend element context");
  PadicElement r;
  r.ctx_ = target;
  r.prec_ = prec_;
  const size_t pad = static_cast<size_t>(target->depth());
  for (const auto& [e, c] : terms_) {
    Expt ee = e;
    ee.resize(pad, 0);
    r.terms_[ee] = c;
  }
  return r;
}

// ---------------------------------------------------------------- context

ContextPtr FieldContext::base(unsigned long p, Rat working_precision) {
  auto ctx = std::shared_ptr<FieldContext>(new FieldContext);
  ctx->p_ = p;
  ctx->pz_ = static_cast<long>(p);
  ctx->prec_ = std::move(working_precision);
  return ctx;
}

Rat FieldContext::radical_valuation() const {
  if (depth_ == 0) throw Error("base context has no radical");
  return a_.valuation() / d_;
}

bool FieldContext::extends(const ContextPtr& other) const {
  const FieldContext* c = this;
  for (;;) {
    if (c == other.get()) return true;
    if (!c->parent_) return false;
    c = c->parent_.get();
  }
}

PadicElement FieldContext::from_rational(const Rat& x, const Rat& abs_prec) const {
  PadicElement r;
  r.ctx_ = shared_from_this();
  r.prec_ = abs_prec;
  if (x != 0)
    r.terms_[PadicElement::Expt(static_cast<size_t>(depth_), 0)] = x;
  r.reduce();
  return r;
}

PadicElement FieldContext::from_rational(const Rat& x) const {
  return from_rational(x, prec_);
}

PadicElement FieldContext::zero(const Rat& abs_prec) const {
  PadicElement r;
  r.ctx_ = shared_from_this();
  r.prec_ = abs_prec;
  return r;
}

PadicElement FieldContext::radical() const {
  return radical_at_level(depth_);
}

PadicElement FieldContext::radical_at_level(int level) const {
  if (level < 1 || level > depth_) throw Error("no radical at that level");
  PadicElement r;
  r.ctx_ = shared_from_this();
  r.prec_ = prec_;
  PadicElement::Expt e(static_cast<size_t>(depth_), 0);
  e[static_cast<size_t>(level) - 1] = 1;
  r.terms_[e] = 1;
  return r;
}

std::pair<ContextPtr, PadicElement> adjoin_radical(const ContextPtr& ctx,
                                                   const PadicElement& a,
                                                   long d) {
  if (d < 1) throw UnsupportedExtension("radical degree must be >= 1");
  if (a.context() != ctx)
    throw ContextMismatch("radicand must live in the context being extended");
  if (d == 1) return {ctx, a};
  if (a.is_zero())
    throw UnsupportedExtension("radicand indistinguishable from 0");
  const Rat va = a.valuation();
  // slope va/d must have exact denominator d over the current value group
  const Rat w = va * ctx->ramification();
  if (!is_integer(w))
    throw UnsupportedExtension("radicand valuation outside the value group");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), mpz_class(abs(w.get_num())).get_mpz_t(),
          mpz_class(d).get_mpz_t());
  if (g != 1)
    throw UnsupportedExtension(
        "x^" + std::to_string(d) + " - a is not certified irreducible: gcd(" +
        w.get_num().get_str() + ", " + std::to_string(d) + ") != 1");

  auto child = std::shared_ptr<FieldContext>(new FieldContext);
  child->p_ = ctx->p();
  child->pz_ = ctx->pz();
  child->prec_ = ctx->working_precision();
  child->parent_ = ctx;
  child->d_ = d;
  child->a_ = a;
  child->e_ = ctx->ramification() * d;
  child->depth_ = ctx->depth() + 1;
  ContextPtr cp = child;
  return {cp, cp->radical()};
}

Rat valuation(const PadicElement& x) { return x.valuation(); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PadicElement random_with_valuation(const ContextPtr& ctx, const Rat& v_target,
                                   std::uint64_t seed) {
  const Rat w = v_target * ctx->ramification();
  if (!is_integer(w))
    throw ValueGroupMismatch("valuation " + rat_str(v_target) +
                             " not in (1/" + std::to_string(ctx->ramification()) +
                             ")Z");
  if (!(v_target < ctx->working_precision()))
    throw ValueGroupMismatch("requested valuation at or above working precision");

  // Split v_target into an integer power of p plus radical exponents,
  // working down the tower.
  std::vector<ContextPtr> chain(static_cast<size_t>(ctx->depth()) + 1);
  {
    ContextPtr c = ctx;
    while (c) { chain[static_cast<size_t>(c->depth())] = c; c = c->parent(); }
  }
  std::vector<int> expt(static_cast<size_t>(ctx->depth()), 0);
  Rat tau = v_target;
  for (int L = ctx->depth(); L >= 1; --L) {
    const auto& lvl = chain[static_cast<size_t>(L)];
    const Rat vt = lvl->radical_valuation();
    const long eprev = chain[static_cast<size_t>(L) - 1]->ramification();
    bool found = false;
    for (int i = 0; i < lvl->degree(); ++i) {
      if (is_integer((tau - i * vt) * eprev)) {
        expt[static_cast<size_t>(L) - 1] = i;
        tau -= i * vt;
        found = true;
        break;
      }
    }
    if (!found)
      throw ValueGroupMismatch("cannot realize valuation in the tower");
  }
  const long k = rat_floor(tau).get_si();  // tau is an integer now

  std::mt19937_64 rng(seed);
  const mpz_class& p = ctx->pz();
  const long digits =
      std::max(1L, rat_ceil(ctx->working_precision() - v_target).get_si());
  mpz_class u = 0, pk = 1;
  for (long i = 0; i < digits; ++i) {
    unsigned long lo = (i == 0) ? 1 : 0;
    std::uniform_int_distribution<unsigned long> dist(lo, ctx->p() - 1);
    u += dist(rng) * pk;
    pk *= p;
  }
  Rat coeff(u);
  if (k >= 0) coeff *= Rat(pow_p(p, k));
  else coeff /= Rat(pow_p(p, -k));

  PadicElement r = ctx->zero(ctx->working_precision());
  // build the monomial coeff * t^expt via radical products
  PadicElement m = ctx->from_rational(coeff);
  for (int L = 1; L <= ctx->depth(); ++L)
    for (int i = 0; i < expt[static_cast<size_t>(L) - 1]; ++i)
      m = m * ctx->radical_at_level(L);
  r = r + m;
  return r;
}

PadicElement newton_solve(const std::function<PadicElement(const PadicElement&)>& F,
                          const std::function<PadicElement(const PadicElement&)>& dF,
                          const PadicElement& x0, const Rat& target_prec) {
  PadicElement x = x0;
  PadicElement Fx = F(x);
  if (Fx.val_lb() >= target_prec) return x;
  PadicElement dFx = dF(x);
  if (dFx.is_zero())
    throw HenselConditionFailed("derivative indistinguishable from 0");
  if (!(Fx.val_lb() > 2 * dFx.valuation()))
    throw HenselConditionFailed(
        "v(F(x0)) = " + rat_str(Fx.val_lb()) + " not above 2 v(F'(x0)) = " +
        rat_str(2 * dFx.valuation()));

  Rat last = Fx.val_lb();
  for (int iter = 0; iter < 256; ++iter) {
    x = x - Fx / dFx;
    Fx = F(x);
    if (Fx.val_lb() >= target_prec) return x;
    if (!(Fx.val_lb() > last))
      throw PrecisionExhausted(
          "newton stalled at residual valuation " + rat_str(Fx.val_lb()) +
          " short of target " + rat_str(target_prec));
    last = Fx.val_lb();
    dFx = dF(x);
  }
  throw PrecisionExhausted("newton iteration cap reached");
}

// ------------------------------------------------------------ serialization

nlohmann::json FieldContext::to_json() const {
  nlohmann::json tower = nlohmann::json::array();
  std::vector<const FieldContext*> chain;
  for (const FieldContext* c = this; c->depth_ > 0; c = c->parent_.get())
    chain.push_back(c);
  std::reverse(chain.begin(), chain.end());
  for (const FieldContext* c : chain) {
    nlohmann::json digits = nlohmann::json::array();
    for (const auto& [e, coeff] : c->a_.terms_)
      digits.push_back({e, rat_str(coeff)});
    tower.push_back({{"d", c->d_},
                     {"a", digits},
                     {"a_prec", rat_str(c->a_.precision())}});
  }
  return {{"p", p_}, {"prec", rat_str(prec_)}, {"tower", tower}};
}

ContextPtr FieldContext::from_json(const nlohmann::json& j) {
  ContextPtr ctx = base(j.at("p").get<unsigned long>(),
                        rat_parse(j.at("prec").get<std::string>()));
  for (const auto& lvl : j.at("tower")) {
    PadicElement a = ctx->zero(rat_parse(lvl.at("a_prec").get<std::string>()));
    a.ctx_ = ctx;
    for (const auto& t : lvl.at("a"))
      a.terms_[t.at(0).get<std::vector<int>>()] =
          rat_parse(t.at(1).get<std::string>());
    auto [child, rad] = adjoin_radical(ctx, a, lvl.at("d").get<long>());
    ctx = child;
  }
  return ctx;
}

nlohmann::json PadicElement::to_json() const {
  nlohmann::json digits = nlohmann::json::array();
  for (const auto& [e, c] : terms_) digits.push_back({e, rat_str(c)});
  return {{"ctx", ctx_->to_json()},
          {"digits", digits},
          {"prec", rat_str(prec_)}};
}

PadicElement element_from_json(const nlohmann::json& j) {
  ContextPtr ctx = FieldContext::from_json(j.at("ctx"));
  PadicElement x = ctx->zero(rat_parse(j.at("prec").get<std::string>()));
  for (const auto& t : j.at("digits"))
    x.terms_[t.at(0).get<std::vector<int>>()] =
        rat_parse(t.at(1).get<std::string>());
  x.reduce();
  return x;
}

}  // namespace wander::padic
