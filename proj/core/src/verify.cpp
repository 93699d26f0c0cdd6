#include "wander/verify.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"
#include "wander/skeleton.hpp"

namespace wander::verify {

using family::classify;
using family::eval_f;
using family::eval_fprime;
using family::eval_partial;
using family::ParameterVector;
using padic::mix_seed;
using padic::PadicElement;
using padic::random_with_valuation;

nlohmann::json CheckReport::to_json() const {
  return {{"lemma", lemma},
          {"trials", trials},
          {"failures", failures},
          {"worst_margin", rat_str(worst_margin)},
          {"seed", seed},
          {"certified", certified}};
}

namespace {

// Shared bookkeeping: equality checks count failures; strict-inequality
// checks additionally track the smallest margin seen.
struct Tally {
  CheckReport rep;
  bool first_margin = true;

  Tally(std::string lemma, std::uint64_t seed) {
    rep.lemma = std::move(lemma);
    rep.seed = seed;
  }
  void expect_equal(const Rat& got, const Rat& want) {
    if (got != want) ++rep.failures;
  }
  void expect_margin(const Rat& margin) {  // pass iff margin > 0
    if (!(margin > 0)) ++rep.failures;
    if (first_margin || margin < rep.worst_margin) {
      rep.worst_margin = margin;
      first_margin = false;
    }
  }
  void trial(bool certified_trial) {
    ++rep.trials;
    if (certified_trial) ++rep.certified;
  }
};

// A point of B_j at distance p^{-(q_j - off)} (valuation -q_j + off)
// from the zero c_j.
PadicElement sample_in_disk(const ParameterVector& c, int j, long off,
                            std::uint64_t s) {
  return c.c_at(j) +
         random_with_valuation(c.ctx, -c.cfg.q(j) + off, mix_seed(s, 91));
}

// A point with exact valuation vz that classifies as A or B_0 (resampled
// away from the small disks B_j around the zeros).
PadicElement sample_off_disks(const ParameterVector& c, const Rat& vz,
                              std::uint64_t s) {
  PadicElement z = random_with_valuation(c.ctx, vz, s);
  for (int retry = 0; classify(c, z).b >= 1 && retry < 16; ++retry)
    z = random_with_valuation(c.ctx, vz, mix_seed(s, 700 + retry));
  return z;
}

}  // namespace

CheckReport verify_norms(const ParameterVector& c, long trials,
                         std::uint64_t seed) {
  Tally t("norms", seed);
  const auto& cfg = c.cfg;
  const int J = cfg.horizon();

  // Sampled valuations for the A / B_0 laws: the integers in (-q_J + 2, 2]
  // except the exact sphere radii -q_j, where (for p = 2) the whole sphere
  // sits inside B_j and no A-point exists.
  std::vector<long> vzs;
  for (long v = 2; v > 2 - rat_floor(cfg.q(J)).get_si(); --v) {
    bool on_zero_sphere = false;
    for (int j = 1; j <= J; ++j)
      if (Rat(v) == -cfg.q(j)) on_zero_sphere = true;
    if (!on_zero_sphere) vzs.push_back(v);
  }

  for (long i = 0; i < trials; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));

    // -- A and B_0: norm law, derivative laws, mean value -----------------
    const Rat vz = vzs[static_cast<size_t>(i) % vzs.size()];
    const PadicElement z = sample_off_disks(c, vz, s);
    const auto fz = eval_f(c, z);
    t.expect_equal(fz.value.valuation(), -skeleton::phi_log(cfg, -vz));
    t.expect_margin(fz.err_val - fz.value.valuation());  // tail negligible
    const auto fpz = eval_fprime(c, z);
    if (vz > 0) {
      // on B_0 the dominant derivative term is exactly p * f / (p z):
      t.expect_equal(fpz.value.valuation(), fz.value.valuation() - vz + 1);
      // mean value: v(z - w) > v(z) + 1/(p-1) forces the exact first-order
      // law v(f(z) - f(w)) = v(f'(z)) + v(z - w).
      const PadicElement w =
          z + random_with_valuation(c.ctx, vz + 2, mix_seed(s, 2));
      const auto fw = eval_f(c, w);
      t.expect_equal((fz.value - fw.value).valuation(),
                     fpz.value.valuation() + (z - w).valuation());
    } else {
      // on A only the logarithmic-derivative bound is asserted:
      // v(f'/f) >= min(1 + v(z), -v(z)).
      const Rat bound = std::min(Rat(1 + vz), Rat(-vz));
      t.expect_margin(fpz.value.valuation() - fz.value.valuation() - bound +
                      1);
    }

    // -- B_j: multiplier law and isometry-with-expansion ------------------
    // (j < J: at v(z) = -q_J the truncation tail is not controlled)
    if (J >= 2) {
      const int j =
          1 + static_cast<int>(i % static_cast<unsigned long>(J - 1));
      const long off = 1 + static_cast<long>(i % 3);
      const PadicElement zb = sample_in_disk(c, j, off, s);
      const auto fzb = eval_fprime(c, zb);
      t.expect_equal(fzb.value.valuation(), -skeleton::lambda_log(cfg, j));
      const PadicElement wb = sample_in_disk(c, j, off + 1, mix_seed(s, 3));
      t.expect_equal(
          (eval_f(c, zb).value - eval_f(c, wb).value).valuation(),
          Rat((zb - wb).valuation() - skeleton::lambda_log(cfg, j)));
    }

    t.trial(true);
  }
  return t.rep;
}

CheckReport verify_perturbation(const ParameterVector& c,
                                const ParameterVector& c_alt, long trials,
                                std::uint64_t seed) {
  Tally t("perturbation", seed);
  const auto& cfg = c.cfg;
  int j = 0;
  for (int i = 1; i <= cfg.horizon(); ++i) {
    if (!(c.c_at(i) - c_alt.c_at(i)).is_zero()) {
      if (j != 0)
        throw OutOfConfiguredRange(
            "parameter vectors differ in more than one coordinate");
      j = i;
    }
  }
  if (j == 0)
    throw OutOfConfiguredRange("parameter vectors are indistinguishable");
  const Rat vdc = (c_alt.c_at(j) - c.c_at(j)).valuation();
  if (!(vdc > -cfg.q(j)))
    throw OutOfConfiguredRange("perturbation at or above the radius R_" +
                               std::to_string(j));

  // sampled sup of -v(df) per disk index, for the monotonicity check
  std::map<int, Rat> sup_log;

  for (long i = 0; i < trials; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));

    // exact first-variation law on B_k, k < j:
    // v(f_alt(z) - f(z)) = v(d_j f(z)) + v(c_alt_j - c_j)
    if (j >= 2) {
      const int k =
          1 + static_cast<int>(i % static_cast<unsigned long>(j - 1));
      const PadicElement zb = sample_in_disk(c, k, 1 + (i % 3), s);
      const PadicElement df = eval_f(c_alt, zb).value - eval_f(c, zb).value;
      t.expect_equal(df.valuation(),
                     eval_partial(c, zb, j).value.valuation() + vdc);
      if (auto it = sup_log.find(k);
          it == sup_log.end() || -df.valuation() > it->second)
        sup_log[k] = -df.valuation();
    }

    // strict smallness below radius R_{j-1}: v(df) > v(f) = -phi(-v(z))
    const long span = (j >= 2 ? rat_floor(cfg.q(j - 1)).get_si() : 0) + 2;
    const Rat vz = 2 - static_cast<long>(i % static_cast<unsigned long>(span));
    const PadicElement z = sample_off_disks(c, vz, mix_seed(s, 5));
    const PadicElement dfz = eval_f(c_alt, z).value - eval_f(c, z).value;
    t.expect_margin(dfz.val_lb() - (-skeleton::phi_log(cfg, -vz)));

    t.trial(true);
  }

  // the sampled sup of |df| over B_k must not decrease in k
  Rat prev;
  bool have_prev = false;
  for (const auto& [k, lg] : sup_log) {
    if (have_prev) t.expect_margin(Rat(lg - prev + 1));
    prev = lg;
    have_prev = true;
  }
  return t.rep;
}

CheckReport verify_partials(const ParameterVector& c, long samples,
                            int orbit_len, std::uint64_t seed) {
  Tally t("partials", seed);
  const auto& cfg = c.cfg;
  const int J = cfg.horizon();
  const long D = rat_floor(Rat(c.ctx->working_precision() / 4)).get_si();
  mpz_class pD;
  mpz_pow_ui(pD.get_mpz_t(),
             mpz_class(static_cast<long>(c.ctx->p())).get_mpz_t(),
             static_cast<unsigned long>(D));
  const PadicElement delta = c.ctx->from_rational(Rat(pD));

  auto fd_partial = [&](const ParameterVector& pv, int j,
                        const PadicElement& z, int N) {
    const ParameterVector shifted =
        pv.with_coordinate(j, pv.c_at(j) + delta.embed(pv.ctx));
    PadicElement a = z, b = z;
    for (int n = 0; n < N; ++n) {
      a = eval_f(pv, a).value;
      b = eval_f(shifted, b).value;
    }
    return (b - a) / delta.embed(pv.ctx);
  };

  for (long i = 0; i < samples; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
    const int j = 1 + static_cast<int>(i % static_cast<unsigned long>(J));

    // single application at a B_0 point: v(d_j f) = v(z) + v(f) + 2 q_j,
    // and the finite difference agrees with the closed form
    const Rat vz = 1 + static_cast<long>(i % 2);
    const PadicElement z = random_with_valuation(c.ctx, vz, s);
    const Rat vf = eval_f(c, z).value.valuation();
    t.expect_equal(fd_partial(c, j, z, 1).valuation(), vz + vf + 2 * cfg.q(j));
    t.expect_equal(eval_partial(c, z, j).value.valuation(),
                   vz + vf + 2 * cfg.q(j));

    // N-fold composition along the orbit at the fixed radius (v = 1 for
    // p = 2): every orbit point keeps v(z_n) = 1, the last-step term
    // dominates, and v(d_j f^{oN}) = -(phi^N + phi^{N-1})(-1) + 2 q_j.
    const int N = 2 + static_cast<int>(i % static_cast<unsigned long>(
                                           std::max(1, orbit_len - 1)));
    const int jj = std::max(2, j);
    const PadicElement z1 = random_with_valuation(c.ctx, 1, mix_seed(s, 7));
    Rat ph = -1, ph_prev = -1;
    for (int n = 0; n < N; ++n) {
      ph_prev = ph;
      ph = skeleton::phi_log(cfg, ph);
    }
    t.expect_equal(fd_partial(c, jj, z1, N).valuation(),
                   -(ph + ph_prev) + 2 * cfg.q(jj));

    t.trial(true);
  }

  // micro-seed orbit law: with x such that f^{o(1+n_1)}(x) = w_1,
  // v(d_j f^{o(1+n_1+l')}(x)) = -q_1 - sigma_1 + 2 q_j - l' * Lambda_1
  {
    const int n1 = static_cast<int>(skeleton::compute_n(cfg, 1));
    const auto seedres =
        family::find_seed(c, 1, n1, Rat(c.ctx->working_precision() / 4));
    const int j = std::min(3, J);
    for (int lp = 1; lp <= 2; ++lp) {
      const PadicElement fd =
          fd_partial(seedres.params, j, seedres.x, 1 + n1 + lp);
      const Rat want = -cfg.q(1) - skeleton::s_log(cfg, 1) + 2 * cfg.q(j) -
                       lp * skeleton::lambda_log(cfg, 1);
      t.expect_equal(fd.valuation(), want);
      t.trial(true);
    }
  }
  return t.rep;
}

CheckReport verify_stability_micro(const ParameterVector& c,
                                   const synthesis::StagePlan& plan,
                                   long trials, std::uint64_t seed,
                                   bool negative_control) {
  Tally t("stability", seed);
  const auto& cfg = c.cfg;
  const int n1 = static_cast<int>(plan.n_at(1));
  const int prefix_len = 1 + n1 + 1;  // B_0 A^{n_1} B_1

  const auto seedres =
      family::find_seed(c, 1, n1, Rat(c.ctx->working_precision() / 4));
  const auto base = family::itinerary(seedres.params, seedres.x, prefix_len);
  if (base.certified_steps < prefix_len)
    throw PrecisionExhausted("micro-seed prefix not fully certified");

  for (long i = 0; i < trials; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
    ParameterVector pv = seedres.params;
    if (negative_control) {
      // a full unit of the radius R_1: the stability threshold is breached
      pv = pv.with_coordinate(
          1, pv.c_at(1) + random_with_valuation(pv.ctx, -cfg.q(1), s));
    } else if (i % 2 == 0) {
      // coordinate 2 only, one unit below its radius
      pv = pv.with_coordinate(
          2, pv.c_at(2) + random_with_valuation(pv.ctx, -cfg.q(2) + 1, s));
    } else {
      // every coordinate beyond the current stage at once
      for (int jj = 2; jj <= cfg.horizon(); ++jj)
        pv = pv.with_coordinate(
            jj, pv.c_at(jj) + random_with_valuation(pv.ctx, -cfg.q(jj) + 1,
                                                    mix_seed(s, 40 + jj)));
    }
    const auto it = family::itinerary(pv, seedres.x, prefix_len);
    const bool same =
        it.certified_steps == prefix_len && it.word == base.word;
    if (!same) ++t.rep.failures;
    t.trial(it.certified_steps == prefix_len || !same);
  }
  return t.rep;
}

CheckReport verify_uniform_prefix(const ParameterVector& c,
                                  const PadicElement& x, int prefix_len,
                                  long trials, std::uint64_t seed) {
  Tally t("uniform", seed);
  const ParameterVector pv =
      (x.context() == c.ctx) ? c : c.embed(x.context());
  const auto base = family::itinerary(pv, x, prefix_len);
  if (base.certified_steps < prefix_len)
    throw PrecisionExhausted("reference prefix not fully certified");

  // decompose the prefix: B_0^m A^n B_k ...
  int m = 0, n = 0, k = 0;
  {
    size_t i = 0;
    while (i < base.word.size() && base.word[i] == synthesis::sym_B(0)) {
      ++m;
      ++i;
    }
    while (i < base.word.size() && base.word[i].is_A()) {
      ++n;
      ++i;
    }
    if (i < base.word.size() && base.word[i].b >= 1) k = base.word[i].b;
  }

  const Rat rho = skeleton::varrho_log(c.cfg.p);       // -1/(p-1)
  const Rat sep = Rat(rat_floor(Rat(-2 * rho)) + 1);   // > 2/(p-1), integral

  for (long i = 0; i < trials; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
    const PadicElement z = x + random_with_valuation(pv.ctx, sep, s);
    const auto it = family::itinerary(pv, z, prefix_len);
    if (it.certified_steps < prefix_len || it.word != base.word)
      ++t.rep.failures;

    // wild-excursion derivative bound over the first m + n steps:
    // v((f^{o(m+n)})'(z)) > m - q_k - 1/(p-1)
    if (k >= 1 && m + n >= 1) {
      PadicElement w = z;
      Rat chain = 0;
      for (int step = 0; step < m + n; ++step) {
        chain += eval_fprime(pv, w).value.valuation();
        w = eval_f(pv, w).value;
      }
      t.expect_margin(Rat(chain - (m - c.cfg.q(k)) - rho));
    }
    t.trial(it.certified_steps == prefix_len);
  }
  return t.rep;
}

}  // namespace wander::verify
