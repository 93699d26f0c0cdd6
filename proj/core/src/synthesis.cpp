#include "wander/synthesis.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "wander/errors.hpp"

namespace wander::synthesis {

using skeleton::compute_n;
using skeleton::lambda_log;
using skeleton::phi_inv_log;
using skeleton::phi_log;
using skeleton::s_log;
using skeleton::varrho_log;

void StagePlan::reindex() {
  L.assign(static_cast<size_t>(K), 0);
  M.assign(static_cast<size_t>(K), 0);
  N.assign(static_cast<size_t>(K), 0);
  for (int k = 1; k <= K; ++k) {
    long Lk = (k == 1) ? 0 : N_at(k - 1) + l_at(k);
    L[static_cast<size_t>(k) - 1] = Lk;
    M[static_cast<size_t>(k) - 1] = Lk + m_at(k);
    N[static_cast<size_t>(k) - 1] = Lk + m_at(k) + n_at(k);
  }
}

void StagePlan::validate() const {
  const auto K_ = static_cast<size_t>(K);
  if (K < 1 || m.size() < K_ || l.size() < K_ || n.size() < K_ ||
      e.size() < K_ || L.size() < K_ || M.size() < K_ || N.size() < K_)
    throw IncompletePlan("stage plan incomplete through K=" + std::to_string(K));
  for (long v : m)
    if (v < 1) throw IncompletePlan("m_j must be >= 1");
  for (long v : l)
    if (v < 1) throw IncompletePlan("l_j must be >= 1");
}

ItineraryWord build_word(const StagePlan& plan, int k) {
  if (k < 1 || k > plan.K) throw IncompletePlan("truncation index out of range");
  ItineraryWord w;
  for (int j = 1; j <= k; ++j) {
    if (j > 1) w.insert(w.end(), static_cast<size_t>(plan.l_at(j)), sym_B(j - 1));
    w.insert(w.end(), static_cast<size_t>(plan.m_at(j)), sym_B(0));
    w.insert(w.end(), static_cast<size_t>(plan.n_at(j)), sym_A());
  }
  w.push_back(sym_B(k));
  return w;
}

std::vector<Margin> check_inequalities(const RadiiConfig& cfg,
                                       const StagePlan& plan) {
  plan.validate();
  const int K = plan.K;
  if (cfg.horizon() < K + 1)
    throw IncompletePlan("config horizon must be >= K+1");
  const Rat rho = varrho_log(cfg.p);
  const Rat inv_p1 = -rho;  // 1/(p-1)

  std::vector<Margin> out;
  for (int k = 1; k <= K; ++k) {
    Rat lhs = inv_p1 + cfg.q(k) - plan.m_at(k) +
              Rat(plan.l_at(k + 1)) * lambda_log(cfg, k);
    out.push_back({"sci", 0, k, -lhs});
  }
  for (int k = 3; k <= K; ++k)
    for (int j = 2; j < k; ++j) {
      Rat rhs = Rat(k - j) * rho + 2 * cfg.q(k) - cfg.q(j - 1) -
                s_log(cfg, j - 1) - Rat(plan.l_at(j)) * lambda_log(cfg, j - 1);
      out.push_back({"stability", j, k, rhs - plan.e_at(k)});
    }
  for (int j = 2; j <= K; ++j) {
    Rat lhs = 2 * inv_p1 + cfg.q(j - 1) + s_log(cfg, j - 1) +
              Rat(plan.l_at(j)) * lambda_log(cfg, j - 1) - plan.m_at(j);
    out.push_back({"transversality", j, 0, -lhs});
  }
  for (int k = 1; k <= K; ++k) {
    Rat lhs = 1 + inv_p1 + 2 * cfg.q(k + 1) - s_log(cfg, k) -
              Rat(plan.l_at(k + 1)) * lambda_log(cfg, k);
    out.push_back({"connecting", 0, k, plan.e_at(k + 1) - lhs});
  }
  return out;
}

StagePlan synthesize(const RadiiConfig& cfg,
                     const std::vector<LogRadius>& eps_bar_logs, int K) {
  if (cfg.horizon() < K + 1)
    throw HorizonExceeded("synthesis through K=" + std::to_string(K) +
                          " needs horizon >= " + std::to_string(K + 1));
  if (static_cast<int>(eps_bar_logs.size()) < K)
    throw HorizonExceeded("eps_bar must cover stages 2..K+1");
  const Rat rho = varrho_log(cfg.p);
  const Rat inv_p1 = -rho;

  StagePlan plan;
  plan.K = K;
  for (int k = 1; k <= K; ++k) plan.n.push_back(compute_n(cfg, k));
  plan.e.resize(static_cast<size_t>(K));
  plan.l.resize(static_cast<size_t>(K));

  auto ebar = [&](int k) { return eps_bar_logs[static_cast<size_t>(k) - 2]; };
  auto set_e = [&](int k, const Rat& v) { plan.e[static_cast<size_t>(k) - 2] = v; };
  auto set_l = [&](int k, long v) { plan.l[static_cast<size_t>(k) - 2] = v; };

  for (int k = 1; k <= K; ++k) {
    if (k == 1) {
      set_e(2, std::min(ebar(2), Rat(0)));
    } else {
      // e_{k+1} = min(ebar, stability bounds for (j, k+1)) - 1
      Rat bound = ebar(k + 1);
      for (int j = 2; j <= k; ++j) {
        Rat b = Rat(k + 1 - j) * rho + 2 * cfg.q(k + 1) - cfg.q(j - 1) -
                s_log(cfg, j - 1) - Rat(plan.l_at(j)) * lambda_log(cfg, j - 1);
        bound = std::min(bound, b);
      }
      set_e(k + 1, bound - 1);
    }
    // minimal l with 1 + 1/(p-1) + 2 q_{k+1} - sigma_k - l Lambda_k < e_{k+1}
    Rat t = (1 + inv_p1 + 2 * cfg.q(k + 1) - s_log(cfg, k) - plan.e_at(k + 1)) /
            lambda_log(cfg, k);
    long l = rat_floor(t).get_si() + 1;
    set_l(k + 1, std::max(1L, l));
  }

  for (int k = 1; k <= K; ++k) {
    Rat t = inv_p1 + cfg.q(k) + Rat(plan.l_at(k + 1)) * lambda_log(cfg, k);
    if (k >= 2) {
      Rat t2 = 2 * inv_p1 + cfg.q(k - 1) + s_log(cfg, k - 1) +
               Rat(plan.l_at(k)) * lambda_log(cfg, k - 1);
      t = std::max(t, t2);
    }
    plan.m.push_back(std::max(1L, rat_floor(t).get_si() + 1));
  }

  plan.reindex();
  plan.validate();
  return plan;
}

std::vector<TraceEntry> radius_trace(const RadiiConfig& cfg,
                                     const StagePlan& plan, int k) {
  plan.validate();
  if (k < 1 || k > plan.K) throw IncompletePlan("trace stage out of range");
  const Rat rho = varrho_log(cfg.p);
  std::vector<TraceEntry> trace;

  for (int j = 1; j <= k; ++j) {
    const long mj = plan.m_at(j), nj = plan.n_at(j);
    // backward chain: vals[i] = phi^{-(mj+nj-i)}(q_j), vals[mj+nj] = q_j
    std::vector<Rat> vals(static_cast<size_t>(mj + nj + 1));
    vals.back() = cfg.q(j);
    for (long i = mj + nj - 1; i >= 0; --i)
      vals[static_cast<size_t>(i)] = phi_inv_log(cfg, vals[static_cast<size_t>(i) + 1]);

    const bool wild = !(vals.front() < rho);
    const long Lj = plan.L_at(j);
    for (long i = 0; i < mj + nj; ++i) {
      const Rat& v = vals[static_cast<size_t>(i)];
      if (i < mj) {
        if (!(v < 0))
          throw InconsistentPlan("forced B_0 value is not below radius 1");
      } else if (v < 0) {
        throw InconsistentPlan("forced A value is below radius 1");
      }
      trace.push_back({Lj + i, -1, v, i == 0 && wild});
    }
    // expanding excursion: |z| = R_j while the orbit stays inside B_j
    const long Nj = plan.N_at(j);
    const long span = (j < k) ? plan.l_at(j + 1) : 1;
    for (long i = 0; i < span; ++i)
      trace.push_back({Nj + i, j, cfg.q(j), false});
  }
  return trace;
}

nlohmann::json to_json(const StagePlan& plan) {
  nlohmann::json e = nlohmann::json::array();
  for (const auto& x : plan.e) e.push_back(rat_str(x));
  return {{"K", plan.K}, {"m", plan.m}, {"l", plan.l}, {"n", plan.n},
          {"e", e},      {"L", plan.L}, {"M", plan.M}, {"N", plan.N}};
}

StagePlan plan_from_json(const nlohmann::json& j) {
  StagePlan plan;
  plan.K = j.at("K").get<int>();
  plan.m = j.at("m").get<std::vector<long>>();
  plan.l = j.at("l").get<std::vector<long>>();
  plan.n = j.at("n").get<std::vector<long>>();
  for (const auto& s : j.at("e")) plan.e.push_back(rat_parse(s.get<std::string>()));
  plan.reindex();
  plan.validate();
  return plan;
}

}  // namespace wander::synthesis
