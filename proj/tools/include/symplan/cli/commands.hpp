#pragma once

#include "symplan/cli/generators.hpp"
#include "symplan/encoders.hpp"
#include "symplan/engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace symplan::cli {

enum ExitCode : int { kPlanFound = 0, kExhausted = 1, kError = 2, kTimeout = 3 };

// Either one native .nplan.json file, or a PDDL domain plus problem.
struct InputFiles {
  std::string first;
  std::optional<std::string> problem;
};

Problem load_problem(const InputFiles& in);

struct EncodingFlags {
  std::string encoding = "pattern";
  std::optional<std::string> pattern_file;
  std::optional<std::string> order_file;
  std::uint64_t seed = 0;
  bool second_execution_check = true;
};

// Pattern / order come from the file if given, otherwise from the ARPG.
EncodingOptions make_encoding(const Problem& p, const EncodingFlags& flags, std::ostream& err);

struct SolveFlags {
  InputFiles input;
  EncodingFlags encoding;
  SolveOptions solve;
  SolverConfig solver;
  std::optional<std::string> plan_out;
};

struct ValidateFlags {
  InputFiles input;
  std::string plan_file;
};

struct EncodeFlags {
  InputFiles input;
  EncodingFlags encoding;
  std::uint32_t bound = 1;
  std::optional<std::string> dump_dir;
  std::optional<std::string> pattern_out;
};

struct GenerateFlags {
  std::string family;
  TwoRobotsSpec two_robots;
  LineExchangeSpec line_exchange;
  std::string out_dir = ".";
};

int cmd_solve(const SolveFlags& f, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateFlags& f, std::ostream& out, std::ostream& err);
int cmd_encode(const EncodeFlags& f, std::ostream& out, std::ostream& err);
int cmd_stats(const EncodeFlags& f, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateFlags& f, std::ostream& out, std::ostream& err);

// Full command line (args[0] is the program name). Errors become exit code 2.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symplan::cli
