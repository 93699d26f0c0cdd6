#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"
#include "wander/family.hpp"

using namespace wander;
using padic::FieldContext;
using padic::PadicElement;

namespace {
const skeleton::RadiiConfig kDemo{2, {2, 4, 7, 12}, 0};

family::ParameterVector demo_params(long prec = 400) {
  return family::random_parameters(FieldContext::base(2, prec), kDemo, 42);
}
}  // namespace

TEST_CASE("random zeros respect the radii") {
  const auto c = demo_params();
  c.validate();
  for (int j = 1; j <= 4; ++j) CHECK(c.c_at(j).valuation() == -kDemo.q(j));
  // deterministic in the seed
  const auto c2 = demo_params();
  for (int j = 1; j <= 4; ++j)
    CHECK(c.c_at(j).same_representation(c2.c_at(j)));
}

TEST_CASE("evaluation follows the exact norm law") {
  const auto c = demo_params();
  const auto z1 = padic::random_with_valuation(c.ctx, 1, 5);
  const auto f1 = family::eval_f(c, z1);
  CHECK(f1.value.valuation() == 1);
  CHECK(f1.err_val > f1.value.valuation());
  const auto z3 = padic::random_with_valuation(c.ctx, -3, 5);
  CHECK(family::eval_f(c, z3).value.valuation() == -8);
  CHECK(family::eval_f(c, c.ctx->zero(100)).value.is_zero());
  // beyond the last configured radius the truncation error is uncontrolled
  CHECK_THROWS_AS(
      (void)family::eval_f(c, padic::random_with_valuation(c.ctx, -12, 5)),
      TailBoundUnavailable);
}

TEST_CASE("derivative and parameter-derivative valuations") {
  const auto c = demo_params();
  const auto z = padic::random_with_valuation(c.ctx, 1, 5);
  CHECK(family::eval_fprime(c, z).value.valuation() == 1);
  CHECK(family::eval_partial(c, z, 1).value.valuation() == 6);
}

TEST_CASE("partition classification") {
  const auto c = demo_params();
  CHECK(family::classify(c, padic::random_with_valuation(c.ctx, 1, 5)) ==
        synthesis::sym_B(0));
  CHECK(family::classify(
            c, c.c_at(1) + padic::random_with_valuation(c.ctx, -1, 5)) ==
        synthesis::sym_B(1));
  CHECK(family::classify(c, padic::random_with_valuation(c.ctx, -3, 5))
            .is_A());
}

TEST_CASE("repelling fixed point and inverse-branch distance law") {
  const auto c = demo_params();
  const auto w1 = family::fixed_point(c, 1, 200);
  CHECK((family::eval_f(c, w1).value - w1).val_lb() >= 200);
  CHECK(family::eval_fprime(c, w1).value.valuation() == -3);  // -Lambda_1
  CHECK((w1 - c.c_at(1)).valuation() == 1);  // -q_1 + Lambda_1
  const auto hs = family::inverse_orbit(c, 1, 5, 200);
  REQUIRE(hs.size() == 5);
  CHECK(hs[0].same_representation(c.c_at(1)));  // h(0) = c_1 exactly
  for (int i = 1; i <= 5; ++i)
    CHECK((hs[static_cast<size_t>(i - 1)] - w1).valuation() == -2 + 3 * i);
}

TEST_CASE("seed point via radical tower") {
  const auto c = demo_params();
  const auto sr = family::find_seed(c, 1, 1, 100);
  CHECK(sr.x.valuation() == Rat(1, 4));
  CHECK(sr.ctx->ramification() == 4);
  const auto it = family::itinerary(sr.params, sr.x, 7);
  REQUIRE(it.certified_steps == 7);
  CHECK(it.word[0] == synthesis::sym_B(0));
  CHECK(it.word[1].is_A());
  for (int i = 2; i < 7; ++i)
    CHECK(it.word[static_cast<size_t>(i)] == synthesis::sym_B(1));
}

TEST_CASE("seed extraction is limited to p = 2") {
  const skeleton::RadiiConfig cfg3 = skeleton::make_generic(3, 4, 2);
  const auto c3 =
      family::random_parameters(FieldContext::base(3, 200), cfg3, 7);
  CHECK_THROWS_AS((void)family::find_seed(c3, 1, 1, 50),
                  UnsupportedExtension);
}

TEST_CASE("one-parameter connection matches the log-arithmetic predictions") {
  const auto c = demo_params();
  const auto sr = family::find_seed(c, 1, 1, 100);
  const auto cr = family::connect_parameter(sr.params, sr.x, 1, 2, 1);
  CHECK(cr.steps_to_fixed == 2);
  CHECK(cr.dh_val == Rat(11, 2));
  CHECK(cr.dh_val == cr.predicted_dh_val);
  CHECK(cr.shift_val == Rat(-3, 2));
  CHECK(cr.shift_val == cr.predicted_shift_val);
  CHECK(cr.residual_val >= 40);
  CHECK(cr.within_threshold);
  // the connected orbit: B_0 A B_1 B_1 then B_0 ...
  const auto it = family::itinerary(cr.params, sr.x, 14);
  REQUIRE(it.certified_steps == 14);
  CHECK(it.word[0] == synthesis::sym_B(0));
  CHECK(it.word[1].is_A());
  CHECK(it.word[2] == synthesis::sym_B(1));
  CHECK(it.word[3] == synthesis::sym_B(1));
  for (int i = 4; i < 14; ++i)
    CHECK(it.word[static_cast<size_t>(i)] == synthesis::sym_B(0));
}

TEST_CASE("dropping a factor breaks the norm law") {
  auto c = demo_params();
  c.drop_factor = 2;
  // at radius beyond q_2 the missing factor changes the norm
  const auto z = padic::random_with_valuation(c.ctx, -5, 5);
  CHECK(family::eval_f(c, z).value.valuation() !=
        -skeleton::phi_log(kDemo, 5));
}

TEST_CASE("orbit jsonl stream") {
  const auto c = demo_params();
  const auto sr = family::find_seed(c, 1, 1, 100);
  const auto it = family::itinerary(sr.params, sr.x, 5);
  std::ostringstream os;
  family::write_orbit_jsonl(os, it, 5);
  std::istringstream is(os.str());
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("n") == n);
    CHECK(j.contains("v"));
    CHECK(j.contains("certified"));
    ++n;
  }
  CHECK(n == 5);
}
