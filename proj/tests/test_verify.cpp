#include <doctest.h>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"
#include "wander/verify.hpp"

using namespace wander;
using padic::FieldContext;

namespace {
const skeleton::RadiiConfig kDemo{2, {2, 4, 7, 12}, 0};

family::ParameterVector demo_params() {
  return family::random_parameters(FieldContext::base(2, 400), kDemo, 42);
}
}  // namespace

TEST_CASE("norm suite passes and the tampered control fails") {
  const auto c = demo_params();
  const auto rep = verify::verify_norms(c, 120, 7);
  CHECK(rep.passed());
  CHECK(rep.failures == 0);
  CHECK(rep.certified == rep.trials);
  CHECK(rep.worst_margin > 0);
  auto bad = c;
  bad.drop_factor = 2;
  CHECK(verify::verify_norms(bad, 40, 7).failures > 0);
}

TEST_CASE("perturbation suite and its preconditions") {
  const auto c = demo_params();
  const auto d = padic::random_with_valuation(c.ctx, -kDemo.q(3) + 2, 99);
  const auto c_alt = c.with_coordinate(3, c.c_at(3) + d);
  CHECK(verify::verify_perturbation(c, c_alt, 60, 8).passed());
  // identical vectors are rejected
  CHECK_THROWS_AS((void)verify::verify_perturbation(c, c, 10, 8),
                  OutOfConfiguredRange);
  // a perturbation at the full radius is rejected
  const auto big = padic::random_with_valuation(c.ctx, -kDemo.q(3), 99);
  const auto c_big = c.with_coordinate(3, c.c_at(3) + big);
  CHECK_THROWS_AS((void)verify::verify_perturbation(c, c_big, 10, 8),
                  OutOfConfiguredRange);
}

TEST_CASE("parameter-derivative suite") {
  const auto rep = verify::verify_partials(demo_params(), 24, 5, 9);
  CHECK(rep.passed());
  CHECK(rep.failures == 0);
}

TEST_CASE("micro stability suite with negative control") {
  const auto c = demo_params();
  const auto plan = synthesis::synthesize(kDemo, {Rat(0), Rat(0), Rat(0)}, 3);
  CHECK(verify::verify_stability_micro(c, plan, 30, 10).passed());
  const auto neg = verify::verify_stability_micro(c, plan, 10, 11, true);
  CHECK(neg.failures > 0);
}

TEST_CASE("uniform prefix law near the seed point") {
  const auto c = demo_params();
  const auto sr = family::find_seed(c, 1, 1, 100);
  const auto rep = verify::verify_uniform_prefix(sr.params, sr.x, 3, 30, 12);
  CHECK(rep.passed());
  CHECK(rep.worst_margin > 0);
}

TEST_CASE("report json carries the contract fields") {
  const auto rep = verify::verify_norms(demo_params(), 10, 3);
  const auto j = rep.to_json();
  CHECK(j.at("lemma") == "norms");
  CHECK(j.at("trials") == 10);
  CHECK(j.at("failures") == 0);
  CHECK(j.contains("worst_margin"));
  CHECK(j.at("seed") == 3);
}
