#pragma once

// Orchestration behind the command-line tool: certificate emission,
// sampled lemma verification with JSON reports, and the micro-scale
// connecting demo. All commands are deterministic functions of their
// options; rationals are serialized as "num/den" strings, never floats.
//
// Exit codes: 0 success, 2 precondition error, 3 verification failure,
// 4 numeric exhaustion. On error a structured {"error": ...} JSON is
// written to the output file.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace wander::commands {

struct Options {
  unsigned long prime = 2;
  int horizon = 12;        // J: number of log-radii
  int stages = 10;         // K: number of certified stages
  std::string eps_bar = "0";  // log_p of the per-stage epsilon bound
  long trials = 200;
  std::uint64_t seed = 1;
  std::string lemma = "all";  // norms|perturbation|partials|stability|uniform|all
  std::string out;            // output file; per-command default when empty
  int drop_factor = 0;        // > 0: tampered negative control
  long precision = 400;       // working absolute precision
};

// make_generic -> synthesize -> check_inequalities -> radius_trace;
// writes certificate.json. Exit 0 iff every margin is > 0 and every stage
// trace is consistent.
int cmd_certify(const Options& opt, std::ostream& log);

// Dispatches to the verify module per `lemma`; writes report.json.
// Exit 0 iff zero failures and every trial certified.
int cmd_verify(const Options& opt, std::ostream& log);

// Micro plan (m_1 = 1, n_1 per the transition time, k = 1, l = 2): random
// zeros, seed point, one-parameter connection, and the certified itinerary
// B_0 A^{n_1} B_1^2 B_0^10 of the connected orbit; writes transcript.json.
// Exit 0 iff the measured perturbation and derivative valuations equal
// their log-arithmetic predictions and the prefix is fully certified.
int cmd_connect_demo(const Options& opt, std::ostream& log);

}  // namespace wander::commands
