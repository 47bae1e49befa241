#include "symplan/cli/commands.hpp"

#include "symplan/analysis.hpp"
#include "symplan/native_format.hpp"
#include "symplan/pddl.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace symplan::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text)
{
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

Problem load_problem(const InputFiles& in)
{
  if (!in.problem) return read_native_problem(read_file(in.first));
  auto domain = pddl::parse_domain(read_file(in.first));
  return pddl::ground(domain, read_file(*in.problem));
}

EncodingOptions make_encoding(const Problem& p, const EncodingFlags& flags, std::ostream& err)
{
  auto kind = parse_encoding_kind(flags.encoding);
  if (!kind) throw EncodingError("unknown encoding '" + flags.encoding + "'");
  EncodingOptions opt;
  opt.kind = *kind;
  opt.second_execution_check = flags.second_execution_check;
  if (opt.kind == EncodingKind::Pattern) {
    opt.sequence = flags.pattern_file ? parse_pattern(read_file(*flags.pattern_file), p) : arpg_pattern(p, flags.seed);
    if (!opt.sequence.is_complete(p.actions.size()))
      err << "warning: pattern does not contain every action; completeness is not guaranteed\n";
  } else if (opt.kind == EncodingKind::R2E) {
    opt.sequence = flags.order_file ? parse_pattern(read_file(*flags.order_file), p) : arpg_pattern(p, flags.seed);
  }
  return opt;
}

int cmd_solve(const SolveFlags& f, std::ostream& out, std::ostream& err)
{
  Problem p = load_problem(f.input);
  EncodingOptions enc = make_encoding(p, f.encoding, err);
  SolveOptions opts = f.solve;
  opts.log = [&err](const std::string& line) { err << line << '\n'; };
  PlanResult r = solve(p, enc, opts, f.solver);
  if (r.plan && f.plan_out) write_file(*f.plan_out, format_plan(*r.plan, p));
  out << result_json(r, p, enc) << '\n';
  switch (r.outcome) {
    case PlanResult::Outcome::Plan: return kPlanFound;
    case PlanResult::Outcome::Exhausted: return kExhausted;
    case PlanResult::Outcome::Timeout:
    case PlanResult::Outcome::Unknown: return kTimeout;
  }
  return kError;
}

int cmd_validate(const ValidateFlags& f, std::ostream& out, std::ostream&)
{
  Problem p = load_problem(f.input);
  Plan plan = parse_plan(read_file(f.plan_file), p);
  ValidationReport report = validate_plan(p, plan);
  out << report_to_json(report, p) << '\n';
  return report.valid ? 0 : 1;
}

int cmd_encode(const EncodeFlags& f, std::ostream& out, std::ostream& err)
{
  Problem p = load_problem(f.input);
  EncodingOptions enc = make_encoding(p, f.encoding, err);
  EncodedBound b = assemble_bound(p, enc, f.bound);
  fs::path dir = f.dump_dir.value_or(".");
  fs::path file = dir / ("bound_" + std::to_string(f.bound) + ".smt2");
  write_file(file, b.smtlib());
  if (f.pattern_out) write_file(*f.pattern_out, format_pattern(enc.sequence, p));
  auto j = nlohmann::ordered_json::parse(stats_json(b));
  j["smt_file"] = file.string();
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_stats(const EncodeFlags& f, std::ostream& out, std::ostream& err)
{
  Problem p = load_problem(f.input);
  EncodingOptions enc = make_encoding(p, f.encoding, err);
  out << stats_json(assemble_bound(p, enc, f.bound)) << '\n';
  return 0;
}

int cmd_generate(const GenerateFlags& f, std::ostream& out, std::ostream&)
{
  GeneratedInstance inst;
  if (f.family == "two-robots") inst = generate(f.two_robots);
  else if (f.family == "line-exchange") inst = generate(f.line_exchange);
  else throw InvalidSpec("unknown family '" + f.family + "'");
  fs::path dir = f.out_dir;
  write_file(dir / "domain.pddl", inst.domain);
  write_file(dir / "problem.pddl", inst.problem);
  nlohmann::ordered_json j;
  j["domain"] = (dir / "domain.pddl").string();
  j["problem"] = (dir / "problem.pddl").string();
  out << j.dump(2) << '\n';
  return 0;
}

namespace {

void add_input(CLI::App* cmd, std::vector<std::string>& files)
{
  cmd->add_option("files", files, "native .nplan.json file, or PDDL domain and problem")
      ->required()
      ->expected(1, 2)
      ->check(CLI::ExistingFile);
}

void take_input(InputFiles& in, const std::vector<std::string>& files)
{
  in.first = files.at(0);
  if (files.size() > 1) in.problem = files[1];
}

void add_encoding(CLI::App* cmd, EncodingFlags& e)
{
  cmd->add_option("--encoding", e.encoding, "standard, rolled, r2e or pattern")
      ->check(CLI::IsMember({"standard", "rolled", "r2e", "pattern"}))
      ->capture_default_str();
  cmd->add_option("--pattern-file", e.pattern_file, "pattern, one action name per line")->check(CLI::ExistingFile);
  cmd->add_option("--order-file", e.order_file, "total order for r2e, one action name per line")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", e.seed, "seed for ARPG tie-breaking")->capture_default_str();
  cmd->add_flag("!--no-second-execution-check", e.second_execution_check,
                "drop the extra precondition check on the second rolled execution");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app("Numeric planning as SMT with rolled-up action repetitions", "symplan");
  app.require_subcommand(1);

  SolveFlags solve_f;
  std::vector<std::string> solve_files;
  std::string schedule = "linear";
  auto* solve_cmd = app.add_subcommand("solve", "search for a plan over increasing bounds");
  add_input(solve_cmd, solve_files);
  add_encoding(solve_cmd, solve_f.encoding);
  solve_cmd->add_option("--start-bound", solve_f.solve.start_bound)->capture_default_str();
  solve_cmd->add_option("--max-bound", solve_f.solve.max_bound)->capture_default_str();
  solve_cmd->add_option("--schedule", schedule)->check(CLI::IsMember({"linear", "geometric"}))->capture_default_str();
  solve_cmd->add_option("--timeout-per-bound", solve_f.solver.timeout_seconds, "seconds, 0 = none")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve_cmd->add_option("--solver-cmd", solve_f.solver.command, "SMT-LIB solver reading stdin")->capture_default_str();
  solve_cmd->add_flag("--incremental", solve_f.solver.incremental, "keep one solver process across bounds");
  solve_cmd->add_flag("--abort-on-unknown", solve_f.solve.abort_on_unknown, "stop at the first unknown or timeout");
  solve_cmd->add_option("--dump-smt", solve_f.solve.dump_dir, "write bound_<n>.smt2 files here");
  solve_cmd->add_option("--plan-out", solve_f.plan_out, "write the plan here");
  solve_cmd->add_flag("--validate,!--no-validate", solve_f.solve.validate, "replay the plan before reporting it");

  ValidateFlags validate_f;
  std::vector<std::string> validate_files;
  auto* validate_cmd = app.add_subcommand("validate", "check a plan against a problem");
  validate_cmd->add_option("--plan", validate_f.plan_file, "plan file")->required()->check(CLI::ExistingFile);
  add_input(validate_cmd, validate_files);

  EncodeFlags encode_f;
  std::vector<std::string> encode_files;
  auto* encode_cmd = app.add_subcommand("encode", "write the formula for one bound");
  add_input(encode_cmd, encode_files);
  add_encoding(encode_cmd, encode_f.encoding);
  encode_cmd->add_option("--bound", encode_f.bound)->capture_default_str();
  encode_cmd->add_option("--dump-smt", encode_f.dump_dir, "output directory (default: current)");
  encode_cmd->add_option("--pattern-out", encode_f.pattern_out, "write the pattern or order used");

  EncodeFlags stats_f;
  std::vector<std::string> stats_files;
  auto* stats_cmd = app.add_subcommand("stats", "formula size for one bound");
  add_input(stats_cmd, stats_files);
  add_encoding(stats_cmd, stats_f.encoding);
  stats_cmd->add_option("--bound", stats_f.bound)->capture_default_str();

  GenerateFlags gen_f;
  auto* gen_cmd = app.add_subcommand("generate", "write a benchmark domain and problem");
  gen_cmd->add_option("family", gen_f.family)->required()->check(CLI::IsMember({"two-robots", "line-exchange"}));
  gen_cmd->add_option("--xi", gen_f.two_robots.xi, "two-robots: initial distance")->capture_default_str();
  gen_cmd->add_option("--robots", gen_f.line_exchange.robots, "line-exchange: number of robots")
      ->capture_default_str();
  gen_cmd->add_option("--segment", gen_f.line_exchange.segment, "line-exchange: segment length")
      ->capture_default_str();
  long long items = 1;
  gen_cmd->add_option("--items", items, "number of items to hand over")->capture_default_str();
  gen_cmd->add_option("--out-dir", gen_f.out_dir)->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*solve_cmd) {
      take_input(solve_f.input, solve_files);
      solve_f.solve.schedule = schedule == "geometric" ? Schedule::Geometric : Schedule::Linear;
      return cmd_solve(solve_f, out, err);
    }
    if (*validate_cmd) {
      take_input(validate_f.input, validate_files);
      return cmd_validate(validate_f, out, err);
    }
    if (*encode_cmd) {
      take_input(encode_f.input, encode_files);
      return cmd_encode(encode_f, out, err);
    }
    if (*stats_cmd) {
      take_input(stats_f.input, stats_files);
      return cmd_stats(stats_f, out, err);
    }
    if (*gen_cmd) {
      gen_f.two_robots.q = items;
      gen_f.line_exchange.q = items;
      return cmd_generate(gen_f, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace symplan::cli
