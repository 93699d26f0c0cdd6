#pragma once

// Itinerary words and the synthesis of the sequences (e_j, l_j, m_j)
// satisfying the four inequality families, entirely in exact log-scale
// arithmetic. Margins are exact rationals; a plan passes iff every margin
// is strictly positive.

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wander/rational.hpp"
#include "wander/skeleton.hpp"

namespace wander::synthesis {

using skeleton::RadiiConfig;

// One symbol of the itinerary alphabet {A, B_0, B_1, ...}.
// b < 0 encodes A, b = j >= 0 encodes B_j.
struct Symbol {
  int b = -1;
  bool is_A() const { return b < 0; }
  bool operator==(const Symbol&) const = default;
  std::string str() const { return b < 0 ? "A" : "B" + std::to_string(b); }
};
inline Symbol sym_A() { return Symbol{-1}; }
inline Symbol sym_B(int j) { return Symbol{j}; }

using ItineraryWord = std::vector<Symbol>;

// Per-stage data m_k, l_{k+1}, n_k, e-logs and the derived indices.
// Vectors are 0-based carriers for 1-based stage data:
//   m[k-1] = m_k   (1 <= k <= K)
//   l[k-2] = l_k   (2 <= k <= K+1)
//   n[k-1] = n_k
//   e[k-2] = e_k = log_p(eps_k)   (2 <= k <= K+1)
//   L[k-1], M[k-1], N[k-1] = L_k, M_k, N_k
struct StagePlan {
  int K = 0;
  std::vector<long> m, l, n;
  std::vector<LogRadius> e;
  std::vector<long> L, M, N;

  long m_at(int k) const { return m.at(static_cast<size_t>(k) - 1); }
  long l_at(int k) const { return l.at(static_cast<size_t>(k) - 2); }
  long n_at(int k) const { return n.at(static_cast<size_t>(k) - 1); }
  const LogRadius& e_at(int k) const { return e.at(static_cast<size_t>(k) - 2); }
  long L_at(int k) const { return L.at(static_cast<size_t>(k) - 1); }
  long M_at(int k) const { return M.at(static_cast<size_t>(k) - 1); }
  long N_at(int k) const { return N.at(static_cast<size_t>(k) - 1); }

  // Recompute L/M/N from m, l, n.
  void reindex();
  void validate() const;  // throws IncompletePlan
};

// The k-th truncation: B_0^{m_1} A^{n_1} B_1^{l_2} ... B_0^{m_k} A^{n_k} B_k.
// Its length is N_k + 1.
ItineraryWord build_word(const StagePlan& plan, int k);

// One inequality instance, with its exact margin (right side - left side).
struct Margin {
  std::string family;  // "sci" | "stability" | "transversality" | "connecting"
  int j = 0;           // 0 when the family has a single index
  int k = 0;
  Rat value;
};

// Evaluates all four families over the applicable index ranges:
//   sci(k), 1 <= k <= K;  stability(j,k), 2 <= j < k <= K;
//   transversality(j), 2 <= j <= K;  connecting(k), 1 <= k <= K.
std::vector<Margin> check_inequalities(const RadiiConfig& cfg,
                                       const StagePlan& plan);

// Deterministic synthesis following the recursion: e_2 = min(ebar_2, 0);
// then per stage the minimal l making the connecting inequality strict and
// (for later stages) e = min(ebar, stability bounds) - 1; finally minimal m.
// eps_bar_logs[i] = log_p of the allowed eps bound for stage i+2.
StagePlan synthesize(const RadiiConfig& cfg,
                     const std::vector<LogRadius>& eps_bar_logs, int K);

// One entry of the forced log-radius trace along the truncated word.
struct TraceEntry {
  long step = 0;
  int in_disk = -1;     // j >= 1 when the point sits in B_j, else -1
  LogRadius value;      // log |z| (equals q_j while inside B_j)
  bool wild_flag = false;  // set on entry steps with r_j >= varrho_log
};

// Forced log-absolute values of every orbit point of a point with itinerary
// alpha^(k). Throws InconsistentPlan if a forced value leaves its prescribed
// partition element.
std::vector<TraceEntry> radius_trace(const RadiiConfig& cfg,
                                     const StagePlan& plan, int k);

nlohmann::json to_json(const StagePlan& plan);
StagePlan plan_from_json(const nlohmann::json& j);

}  // namespace wander::synthesis
