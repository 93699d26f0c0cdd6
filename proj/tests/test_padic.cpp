#include <doctest.h>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"
#include "wander/padic.hpp"

using namespace wander;
using padic::adjoin_radical;
using padic::FieldContext;
using padic::PadicElement;

TEST_CASE("base field arithmetic and valuations") {
  auto ctx = FieldContext::base(2, 64);
  const auto a = ctx->from_rational(6);
  const auto b = ctx->from_rational(Rat(1, 3));
  CHECK(a.valuation() == 1);
  CHECK(b.valuation() == 0);
  CHECK((a * b).valuation() == 1);
  CHECK((a + b).valuation() == 0);
  CHECK((a - a).is_zero());
  CHECK(ctx->from_rational(Rat(5, 4)).valuation() == -2);
  // ultrametric: cancellation raises the valuation
  const auto c = ctx->from_rational(3) + ctx->from_rational(5);
  CHECK(c.valuation() == 3);  // 8
}

TEST_CASE("inverse and precision accounting") {
  auto ctx = FieldContext::base(2, 64);
  const auto x = ctx->from_rational(Rat(12, 5));
  const auto ix = x.inverse();
  CHECK(ix.valuation() == -2);
  CHECK((x * ix - ctx->one()).is_zero());
  CHECK(ix.precision() == 64 - 2 * 2);  // prec - 2 v(x)
  // addition keeps the weaker precision
  const auto y = x.with_precision(10);
  CHECK((x + y).precision() == 10);
  CHECK_THROWS_AS((void)ctx->zero(20).inverse(),
                  DivisionByIndistinguishableZero);
  CHECK_THROWS_AS((void)ctx->zero(20).valuation(), IndistinguishableFromZero);
}

TEST_CASE("radical adjunction builds totally ramified towers") {
  auto ctx = FieldContext::base(2, 64);
  auto [ext, t] = adjoin_radical(ctx, ctx->from_rational(2), 2);
  CHECK(ext->ramification() == 2);
  CHECK(t.valuation() == Rat(1, 2));
  CHECK((t * t - ctx->from_rational(2).embed(ext)).is_zero());
  // a second level on top: u^2 = t, e = 4
  auto [ext2, u] = adjoin_radical(ext, t, 2);
  CHECK(ext2->ramification() == 4);
  CHECK(u.valuation() == Rat(1, 4));
  CHECK(ext2->extends(ctx));
  CHECK((u.pow(4) - ctx->from_rational(2).embed(ext2)).is_zero());
  // slope with gcd(v(a), d) > 1: irreducibility not established
  CHECK_THROWS_AS((void)adjoin_radical(ctx, ctx->from_rational(4), 2),
                  UnsupportedExtension);
}

TEST_CASE("deterministic sampling at a prescribed valuation") {
  auto ctx = FieldContext::base(2, 64);
  const auto x = padic::random_with_valuation(ctx, -3, 7);
  CHECK(x.valuation() == -3);
  CHECK(x.same_representation(padic::random_with_valuation(ctx, -3, 7)));
  CHECK(!x.same_representation(padic::random_with_valuation(ctx, -3, 8)));
  auto [ext, t] = adjoin_radical(ctx, ctx->from_rational(2), 2);
  CHECK(padic::random_with_valuation(ext, Rat(5, 2), 3).valuation() ==
        Rat(5, 2));
  CHECK_THROWS_AS(
      (void)padic::random_with_valuation(ctx, Rat(1, 2), 3),
      ValueGroupMismatch);
}

TEST_CASE("newton refinement finds 2-adic square roots") {
  auto ctx = FieldContext::base(2, 128);
  const auto seventeen = ctx->from_rational(17);
  auto F = [&](const PadicElement& x) { return x * x - seventeen; };
  auto dF = [&](const PadicElement& x) { return x + x; };
  const auto r = padic::newton_solve(F, dF, ctx->one(), 100);
  CHECK((r * r - seventeen).val_lb() >= 100);
  // Hensel precondition violated: v(F) <= 2 v(F')
  auto G = [&](const PadicElement& x) { return x * x - ctx->from_rational(3); };
  CHECK_THROWS_AS((void)padic::newton_solve(G, dF, ctx->one(), 100),
                  HenselConditionFailed);
}

TEST_CASE("context and element json round trips") {
  auto ctx = FieldContext::base(2, 64);
  auto [ext, t] = adjoin_radical(ctx, ctx->from_rational(2), 2);
  const auto x = t + ctx->from_rational(Rat(3, 7)).embed(ext);
  const auto j = x.to_json();
  const auto back = padic::element_from_json(j);
  CHECK(back.same_representation(x));
  CHECK(back.context()->ramification() == 2);
  CHECK(back.valuation() == x.valuation());
  CHECK(back.precision() == x.precision());
}

TEST_CASE("seed mixing is deterministic and spreads streams") {
  CHECK(padic::mix_seed(1, 2) == padic::mix_seed(1, 2));
  CHECK(padic::mix_seed(1, 2) != padic::mix_seed(1, 3));
  CHECK(padic::mix_seed(1, 2) != padic::mix_seed(2, 2));
}
