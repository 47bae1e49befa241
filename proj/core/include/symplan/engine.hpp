#pragma once

// Bound iteration over an external SMT-LIB solver.

#include "symplan/encoders.hpp"

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace symplan {

struct SolverConfig {
  // run through /bin/sh; reads SMT-LIB on stdin, answers on stdout
  std::string command = "z3 -in -smt2";
  double timeout_seconds = 0;  // per query, 0 = none
  bool incremental = false;
};

class SolverSpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawAnswer {
  bool timed_out = false;
  std::string output;
  std::string errors;
  int exit_status = 0;
  double seconds = 0;
};

// One solver process per call: write the script, close stdin, collect stdout.
// The process group is killed when the timeout expires.
RawAnswer run_query(const SolverConfig& cfg, const std::string& smtlib);

// Kills every solver process group still running. Async-signal-safe, meant for
// SIGINT/SIGTERM handlers so an interrupted run leaves no solver behind.
void kill_active_solvers() noexcept;

// A long-lived solver process driven line by line, used for push/pop solving.
class SolverSession {
 public:
  explicit SolverSession(const SolverConfig& cfg);
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  void send(const std::string& text);
  // Sends `text` followed by an echo and returns everything printed before the
  // echo comes back. On timeout the process is killed and nullopt returned.
  std::optional<std::string> exchange(const std::string& text, double timeout_seconds);
  bool alive() const { return pid_ > 0; }

 private:
  void kill_process();

  int pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::string buffer_;
  std::uint64_t counter_ = 0;
};

enum class Schedule { Linear, Geometric };

struct SolveOptions {
  std::uint32_t start_bound = 1;
  std::uint32_t max_bound = 20;
  Schedule schedule = Schedule::Linear;
  bool abort_on_unknown = false;
  // replay decoded plans before reporting them
  bool validate = true;
  std::optional<std::string> dump_dir;  // bound_<n>.smt2 files
  std::function<void(const std::string&)> log;
};

enum class QueryStatus { Sat, Unsat, Unknown, Timeout };
std::string to_string(QueryStatus s);

struct BoundStats {
  std::uint32_t bound = 0;
  QueryStatus status = QueryStatus::Unknown;
  std::size_t num_vars = 0;
  std::size_t num_assertions = 0;
  std::size_t auxiliaries = 0;
  std::array<std::size_t, kNumRoles> role_counts{};
  double encode_seconds = 0;
  double solve_seconds = 0;
  std::size_t defaulted_vars = 0;
};

struct PlanResult {
  enum class Outcome { Plan, Exhausted, Timeout, Unknown };
  Outcome outcome = Outcome::Exhausted;
  std::optional<Plan> plan;  // validated
  std::uint32_t bound = 0;   // bound of the plan, or last bound tried
  std::vector<BoundStats> stats;
};

std::string to_string(PlanResult::Outcome o);

// Bounds visited by a schedule: start, then +1 or doubling, up to max inclusive.
std::vector<std::uint32_t> bound_sequence(const SolveOptions& options);

PlanResult solve(const Problem& p, const EncodingOptions& encoding, const SolveOptions& options,
                 const SolverConfig& cfg);

std::string result_json(const PlanResult& r, const Problem& p, const EncodingOptions& encoding);

}  // namespace symplan
