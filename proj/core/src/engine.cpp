#include "symplan/engine.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace symplan {

std::string to_string(QueryStatus s)
{
  switch (s) {
    case QueryStatus::Sat: return "sat";
    case QueryStatus::Unsat: return "unsat";
    case QueryStatus::Unknown: return "unknown";
    case QueryStatus::Timeout: return "timeout";
  }
  return "?";
}

std::string to_string(PlanResult::Outcome o)
{
  switch (o) {
    case PlanResult::Outcome::Plan: return "plan";
    case PlanResult::Outcome::Exhausted: return "exhausted";
    case PlanResult::Outcome::Timeout: return "timeout";
    case PlanResult::Outcome::Unknown: return "unknown";
  }
  return "?";
}

std::vector<std::uint32_t> bound_sequence(const SolveOptions& options)
{
  std::vector<std::uint32_t> out;
  std::uint64_t n = options.start_bound;
  while (n <= options.max_bound) {
    out.push_back(static_cast<std::uint32_t>(n));
    if (options.schedule == Schedule::Linear) ++n;
    else n = n == 0 ? 1 : 2 * n;
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void write_dump(const std::string& dir, std::uint32_t n, const std::string& text)
{
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / ("bound_" + std::to_string(n) + ".smt2"), std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write SMT dump into " + dir);
}

struct Answer {
  QueryStatus status = QueryStatus::Unknown;
  Model model;
};

Answer from_parsed(const SolverAnswer& a)
{
  switch (a.verdict) {
    case Verdict::Sat: return {QueryStatus::Sat, a.model};
    case Verdict::Unsat: return {QueryStatus::Unsat, {}};
    case Verdict::Unknown: return {QueryStatus::Unknown, {}};
  }
  return {};
}

// Keeps one solver process alive across bounds: steps are asserted once, the
// goal of each bound lives inside a push/pop frame.
class Incremental {
 public:
  Incremental(const Problem& p, const EncodingOptions& enc, const SolverConfig& cfg, std::uint32_t first)
      : p_(p), enc_(enc), cfg_(cfg)
  {
    // the step structure repeats, so one step already fixes the logic
    EncodedBound probe = assemble_bound(p, enc, std::max<std::uint32_t>(first, 1));
    printer_.emplace(probe.logic());
  }

  Answer query(std::uint32_t n)
  {
    if (!session_ || !session_->alive()) restart();
    while (steps_ < n) session_->send(record(encode_step(p_, enc_, steps_++)));
    std::string frame = "(push 1)\n";
    for (const auto& a : encode_goal(p_, n).assertions) frame += printer_->assertion(a.term);
    auto verdict = session_->exchange(frame + "(check-sat)\n", cfg_.timeout_seconds);
    if (!verdict) return {QueryStatus::Timeout, {}};
    std::string text = *verdict;
    if (text.substr(0, text.find_first_of(" \r\n")) == "sat") {
      auto model = session_->exchange("(get-model)\n", cfg_.timeout_seconds);
      if (!model) return {QueryStatus::Timeout, {}};
      text += *model;
    }
    session_->send("(pop 1)\n");
    return from_parsed(parse_model(text, decls_));
  }

 private:
  // a killed session is rebuilt from everything asserted so far
  void restart()
  {
    session_ = std::make_unique<SolverSession>(cfg_);
    if (script_.empty()) record(encode_init(p_));
    session_->send(printer_->header() + script_);
  }

  std::string record(const Fragment& f)
  {
    std::string body;
    for (const auto& d : f.decls) body += printer_->declaration(d);
    for (const auto& a : f.assertions) body += printer_->assertion(a.term);
    decls_.insert(decls_.end(), f.decls.begin(), f.decls.end());
    script_ += body;
    return body;
  }

  const Problem& p_;
  const EncodingOptions& enc_;
  const SolverConfig& cfg_;
  std::optional<SmtPrinter> printer_;
  std::unique_ptr<SolverSession> session_;
  std::vector<VarDecl> decls_;
  std::string script_;
  std::uint32_t steps_ = 0;
};

}  // namespace

PlanResult solve(const Problem& p, const EncodingOptions& encoding, const SolveOptions& options,
                 const SolverConfig& cfg)
{
  check_options(p, encoding);
  auto log = [&](const std::string& line) {
    if (options.log) options.log(line);
  };
  PlanResult result;
  bool saw_timeout = false, saw_unknown = false;
  const auto bounds = bound_sequence(options);
  std::unique_ptr<Incremental> incremental;
  if (cfg.incremental && !bounds.empty())
    incremental = std::make_unique<Incremental>(p, encoding, cfg, bounds.front());

  for (std::uint32_t n : bounds) {
    BoundStats st;
    st.bound = n;
    auto t0 = Clock::now();
    EncodedBound enc = assemble_bound(p, encoding, n);
    std::string script;
    if (!cfg.incremental || options.dump_dir) script = enc.smtlib();
    st.encode_seconds = since(t0);
    st.num_vars = enc.num_vars();
    st.num_assertions = enc.num_assertions();
    st.auxiliaries = enc.auxiliaries;
    st.role_counts = enc.role_counts;
    if (options.dump_dir) write_dump(*options.dump_dir, n, script);

    auto t1 = Clock::now();
    Answer answer;
    if (incremental) {
      answer = incremental->query(n);
    } else {
      RawAnswer raw = run_query(cfg, script);
      if (raw.timed_out) answer.status = QueryStatus::Timeout;
      else answer = from_parsed(parse_model(raw.output, enc.decls));
    }
    st.solve_seconds = since(t1);
    st.status = answer.status;
    st.defaulted_vars = answer.model.defaulted.size();
    result.stats.push_back(st);
    result.bound = n;
    log("bound " + std::to_string(n) + ": " + to_string(answer.status) + " (" + std::to_string(st.num_vars) +
        " vars, " + std::to_string(st.num_assertions) + " assertions, " + std::to_string(st.solve_seconds) + " s)");

    switch (answer.status) {
      case QueryStatus::Sat:
        result.plan = options.validate ? decode(p, encoding, n, answer.model)
                                       : extract_plan(p, encoding, n, answer.model);
        result.outcome = PlanResult::Outcome::Plan;
        return result;
      case QueryStatus::Unsat: break;
      case QueryStatus::Timeout:
        saw_timeout = true;
        if (options.abort_on_unknown) {
          result.outcome = PlanResult::Outcome::Timeout;
          return result;
        }
        break;
      case QueryStatus::Unknown:
        saw_unknown = true;
        if (options.abort_on_unknown) {
          result.outcome = PlanResult::Outcome::Unknown;
          return result;
        }
        break;
    }
  }
  result.outcome = saw_timeout   ? PlanResult::Outcome::Timeout
                   : saw_unknown ? PlanResult::Outcome::Unknown
                                 : PlanResult::Outcome::Exhausted;
  return result;
}

std::string result_json(const PlanResult& r, const Problem& p, const EncodingOptions& encoding)
{
  using json = nlohmann::ordered_json;
  json j;
  j["outcome"] = to_string(r.outcome);
  j["encoding"] = to_string(encoding.kind);
  j["bound"] = r.bound;
  if (r.plan) {
    j["plan_length"] = r.plan->length();
    json steps = json::array();
    for (const auto& s : r.plan->steps()) steps.push_back({{"action", p.action(s.action).name}, {"count", s.count}});
    j["plan"] = steps;
  } else {
    j["plan"] = nullptr;
  }
  json bounds = json::array();
  for (const auto& s : r.stats) {
    json b;
    b["bound"] = s.bound;
    b["status"] = to_string(s.status);
    b["num_vars"] = s.num_vars;
    b["num_assertions"] = s.num_assertions;
    b["auxiliary_vars"] = s.auxiliaries;
    json roles = json::object();
    for (std::size_t k = 0; k < kNumRoles; ++k) roles[to_string(static_cast<Role>(k))] = s.role_counts[k];
    b["per_role_counts"] = roles;
    b["defaulted_vars"] = s.defaulted_vars;
    b["encode_seconds"] = s.encode_seconds;
    b["solve_seconds"] = s.solve_seconds;
    bounds.push_back(b);
  }
  j["bounds"] = bounds;
  return j.dump(2);
}

}  // namespace symplan
