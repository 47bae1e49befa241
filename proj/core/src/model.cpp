#include "symplan/model.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <sstream>

namespace symplan {

LinearExpr::LinearExpr(Rational constant) : constant_(std::move(constant)) {}

LinearExpr LinearExpr::variable(NumVar var, const Rational& coeff)
{
  LinearExpr e;
  e.add_term(var, coeff);
  return e;
}

Rational LinearExpr::coefficient(NumVar var) const
{
  auto it = terms_.find(var);
  return it == terms_.end() ? Rational(0) : it->second;
}

void LinearExpr::add_term(NumVar var, const Rational& coeff)
{
  if (coeff == 0) return;
  auto [it, inserted] = terms_.emplace(var, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& other)
{
  for (const auto& [var, coeff] : other.terms_) add_term(var, coeff);
  constant_ += other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other)
{
  for (const auto& [var, coeff] : other.terms_) add_term(var, -coeff);
  constant_ -= other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(const Rational& factor)
{
  if (factor == 0) {
    terms_.clear();
    constant_ = 0;
    return *this;
  }
  for (auto& [var, coeff] : terms_) coeff *= factor;
  constant_ *= factor;
  return *this;
}

NumCondition compare(const LinearExpr& lhs, Relation rel, const LinearExpr& rhs)
{
  switch (rel) {
    case Relation::Ge: return {lhs - rhs, Cmp::Ge};
    case Relation::Gt: return {lhs - rhs, Cmp::Gt};
    case Relation::Eq: return {lhs - rhs, Cmp::Eq};
    case Relation::Le: return {rhs - lhs, Cmp::Ge};
    case Relation::Lt: return {rhs - lhs, Cmp::Gt};
  }
  throw ModelError("unknown relation");
}

NumEffect increase(NumVar var, const LinearExpr& delta)
{
  return {var, LinearExpr::variable(var) + delta};
}

const BoolEffect* Action::effect_on(BoolVar var) const
{
  for (const auto& e : eff)
    if (auto* b = std::get_if<BoolEffect>(&e); b && b->var == var) return b;
  return nullptr;
}

const NumEffect* Action::effect_on(NumVar var) const
{
  for (const auto& e : eff)
    if (auto* n = std::get_if<NumEffect>(&e); n && n->var == var) return n;
  return nullptr;
}

GoalFormula GoalFormula::leaf(Condition c)
{
  GoalFormula g;
  g.kind = Kind::Atom;
  g.atom = std::move(c);
  return g;
}

GoalFormula GoalFormula::conjunction(std::vector<GoalFormula> parts)
{
  GoalFormula g;
  g.kind = Kind::And;
  g.children = std::move(parts);
  return g;
}

GoalFormula GoalFormula::disjunction(std::vector<GoalFormula> parts)
{
  GoalFormula g;
  g.kind = Kind::Or;
  g.children = std::move(parts);
  return g;
}

GoalFormula GoalFormula::negation(GoalFormula inner)
{
  GoalFormula g;
  g.kind = Kind::Not;
  g.children.push_back(std::move(inner));
  return g;
}

bool State::operator<(const State& other) const
{
  if (bools != other.bools) return bools < other.bools;
  return nums < other.nums;
}

namespace {

template <typename Var>
std::optional<Var> find_index(const std::vector<std::string>& names, const std::string& name)
{
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return Var{static_cast<std::uint32_t>(i)};
  return std::nullopt;
}

void check_expr(const LinearExpr& e, const Problem& p, const std::string& where)
{
  for (const auto& [var, coeff] : e.terms())
    if (var.index >= p.num_nums())
      throw ModelError(where + ": undeclared numeric variable #" + std::to_string(var.index));
}

void check_condition(const Condition& c, const Problem& p, const std::string& where)
{
  if (auto* b = std::get_if<BoolCondition>(&c)) {
    if (b->var.index >= p.num_bools())
      throw ModelError(where + ": undeclared boolean variable #" + std::to_string(b->var.index));
  } else {
    check_expr(std::get<NumCondition>(c).expr, p, where);
  }
}

void check_goal(const GoalFormula& g, const Problem& p)
{
  if (g.kind == GoalFormula::Kind::Atom) {
    if (!g.atom) throw ModelError("goal atom without condition");
    check_condition(*g.atom, p, "goal");
    return;
  }
  if (g.kind == GoalFormula::Kind::Not && g.children.size() != 1)
    throw ModelError("goal negation must have exactly one operand");
  for (const auto& child : g.children) check_goal(child, p);
}

}  // namespace

std::optional<ActionId> Problem::find_action(const std::string& name) const
{
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i].name == name) return ActionId{static_cast<std::uint32_t>(i)};
  return std::nullopt;
}

std::optional<BoolVar> Problem::find_bool(const std::string& name) const
{
  return find_index<BoolVar>(bool_names, name);
}

std::optional<NumVar> Problem::find_num(const std::string& name) const
{
  return find_index<NumVar>(num_names, name);
}

void Problem::check() const
{
  if (init.bools.size() != num_bools() || init.nums.size() != num_nums())
    throw ModelError("initial state must assign every variable exactly once");
  std::set<std::string> seen;
  for (const auto& n : bool_names)
    if (!seen.insert(n).second) throw ModelError("duplicate variable name '" + n + "'");
  for (const auto& n : num_names)
    if (!seen.insert(n).second) throw ModelError("duplicate variable name '" + n + "'");

  for (const auto& a : actions) {
    const std::string where = "action '" + a.name + "'";
    for (const auto& c : a.pre) check_condition(c, *this, where);
    std::set<std::uint32_t> bool_targets, num_targets;
    for (const auto& e : a.eff) {
      if (auto* b = std::get_if<BoolEffect>(&e)) {
        if (b->var.index >= num_bools()) throw ModelError(where + ": undeclared effect target");
        if (!bool_targets.insert(b->var.index).second)
          throw ModelError(where + ": variable '" + bool_names[b->var.index] +
                           "' assigned more than once");
      } else {
        const auto& n = std::get<NumEffect>(e);
        if (n.var.index >= num_nums()) throw ModelError(where + ": undeclared effect target");
        check_expr(n.rhs, *this, where);
        if (!num_targets.insert(n.var.index).second)
          throw ModelError(where + ": variable '" + num_names[n.var.index] +
                           "' assigned more than once");
      }
    }
  }
  for (const auto& g : goals) check_goal(g, *this);
}

NotExecutable::NotExecutable(std::string action, std::string condition)
    : ModelError("action '" + action + "' not executable: " + condition),
      action_(std::move(action)),
      condition_(std::move(condition))
{
}

Rational eval(const State& s, const LinearExpr& e)
{
  Rational value = e.constant();
  for (const auto& [var, coeff] : e.terms()) {
    if (var.index >= s.nums.size())
      throw ModelError("unknown numeric variable #" + std::to_string(var.index));
    value += coeff * s.nums[var.index];
  }
  return value;
}

bool holds(const State& s, const Condition& c)
{
  if (auto* b = std::get_if<BoolCondition>(&c)) {
    if (b->var.index >= s.bools.size())
      throw ModelError("unknown boolean variable #" + std::to_string(b->var.index));
    return s.bools[b->var.index] == b->value;
  }
  const auto& n = std::get<NumCondition>(c);
  Rational v = eval(s, n.expr);
  switch (n.op) {
    case Cmp::Ge: return v >= 0;
    case Cmp::Gt: return v > 0;
    case Cmp::Eq: return v == 0;
  }
  return false;
}

bool holds(const State& s, const GoalFormula& g)
{
  switch (g.kind) {
    case GoalFormula::Kind::Atom: return holds(s, *g.atom);
    case GoalFormula::Kind::And:
      for (const auto& c : g.children)
        if (!holds(s, c)) return false;
      return true;
    case GoalFormula::Kind::Or:
      for (const auto& c : g.children)
        if (holds(s, c)) return true;
      return false;
    case GoalFormula::Kind::Not: return !holds(s, g.children.at(0));
  }
  return false;
}

std::optional<std::size_t> first_failing_precondition(const State& s, const Action& a)
{
  for (std::size_t i = 0; i < a.pre.size(); ++i)
    if (!holds(s, a.pre[i])) return i;
  return std::nullopt;
}

State apply(const State& s, const Action& a, const Problem* names)
{
  if (auto failed = first_failing_precondition(s, a)) {
    std::string text = names ? to_string(a.pre[*failed], *names)
                             : "precondition #" + std::to_string(*failed);
    throw NotExecutable(a.name, text);
  }
  State next = s;
  for (const auto& e : a.eff) {
    if (auto* b = std::get_if<BoolEffect>(&e)) {
      next.bools.at(b->var.index) = b->value;
    } else {
      const auto& n = std::get<NumEffect>(e);
      next.nums.at(n.var.index) = eval(s, n.rhs);
    }
  }
  return next;
}

void Plan::append(ActionId action, std::uint64_t count)
{
  if (count == 0) throw ModelError("plan repetition counts must be positive");
  if (!steps_.empty() && steps_.back().action == action) {
    steps_.back().count += count;
    return;
  }
  steps_.push_back({action, count});
}

std::uint64_t Plan::length() const
{
  std::uint64_t total = 0;
  for (const auto& s : steps_) total += s.count;
  return total;
}

std::vector<ActionId> Plan::flatten() const
{
  std::vector<ActionId> flat;
  for (const auto& s : steps_)
    for (std::uint64_t k = 0; k < s.count; ++k) flat.push_back(s.action);
  return flat;
}

ValidationReport validate_plan(const Problem& p, const Plan& plan)
{
  ValidationReport report;
  State s = p.init;
  std::uint64_t index = 0;
  for (const auto& step : plan.steps()) {
    if (step.action.index >= p.actions.size()) {
      report.failing_step = index;
      report.failing_condition = "unknown action #" + std::to_string(step.action.index);
      report.final_state = s;
      return report;
    }
    const Action& a = p.action(step.action);
    for (std::uint64_t k = 0; k < step.count; ++k, ++index) {
      if (auto failed = first_failing_precondition(s, a)) {
        report.failing_step = index;
        report.failing_action = a.name;
        report.failing_condition = to_string(a.pre[*failed], p);
        report.final_state = s;
        return report;
      }
      s = apply(s, a);
    }
  }
  for (std::size_t g = 0; g < p.goals.size(); ++g)
    if (!holds(s, p.goals[g])) report.unmet_goals.push_back(g);
  report.valid = report.unmet_goals.empty();
  report.final_state = std::move(s);
  return report;
}

std::string to_string(const LinearExpr& e, const Problem& p)
{
  std::ostringstream out;
  bool first = true;
  for (const auto& [var, coeff] : e.terms()) {
    Rational mag = abs(coeff);
    if (first) {
      if (coeff < 0) out << "-";
    } else {
      out << (coeff < 0 ? " - " : " + ");
    }
    if (mag != 1) out << to_string(mag) << "*";
    out << (var.index < p.num_nums() ? p.num_names[var.index] : "#" + std::to_string(var.index));
    first = false;
  }
  if (first) {
    out << to_string(e.constant());
  } else if (e.constant() != 0) {
    out << (e.constant() < 0 ? " - " : " + ") << to_string(abs(e.constant()));
  }
  return out.str();
}

std::string to_string(const Condition& c, const Problem& p)
{
  if (auto* b = std::get_if<BoolCondition>(&c)) {
    std::string name = b->var.index < p.num_bools() ? p.bool_names[b->var.index]
                                                    : "#" + std::to_string(b->var.index);
    return name + " = " + (b->value ? "true" : "false");
  }
  const auto& n = std::get<NumCondition>(c);
  const char* op = n.op == Cmp::Ge ? " >= 0" : n.op == Cmp::Gt ? " > 0" : " = 0";
  return to_string(n.expr, p) + op;
}

std::string to_string(const GoalFormula& g, const Problem& p)
{
  switch (g.kind) {
    case GoalFormula::Kind::Atom: return to_string(*g.atom, p);
    case GoalFormula::Kind::Not: return "not (" + to_string(g.children.at(0), p) + ")";
    case GoalFormula::Kind::And:
    case GoalFormula::Kind::Or: {
      if (g.children.empty()) return g.kind == GoalFormula::Kind::And ? "true" : "false";
      std::string sep = g.kind == GoalFormula::Kind::And ? " and " : " or ";
      std::string out = "(";
      for (std::size_t i = 0; i < g.children.size(); ++i) {
        if (i) out += sep;
        out += to_string(g.children[i], p);
      }
      return out + ")";
    }
  }
  return {};
}

Plan parse_plan(const std::string& text, const Problem& p)
{
  Plan plan;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);

    auto space = line.find_first_of(" \t");
    if (space == std::string::npos)
      throw ModelError("plan line " + std::to_string(line_no) + ": expected '<count> <action>'");
    std::string count_text = line.substr(0, space);
    std::string name = line.substr(line.find_first_not_of(" \t", space));
    std::uint64_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoull(count_text, &used);
      if (used != count_text.size()) throw std::invalid_argument(count_text);
    } catch (const std::exception&) {
      throw ModelError("plan line " + std::to_string(line_no) + ": bad count '" + count_text + "'");
    }
    if (count == 0)
      throw ModelError("plan line " + std::to_string(line_no) + ": count must be positive");
    auto id = p.find_action(name);
    if (!id) throw ModelError("plan line " + std::to_string(line_no) + ": unknown action '" + name + "'");
    plan.append(*id, count);
  }
  return plan;
}

std::string format_plan(const Plan& plan, const Problem& p)
{
  std::string out;
  for (const auto& s : plan.steps())
    out += std::to_string(s.count) + " " + p.action(s.action).name + "\n";
  return out;
}

std::string report_to_json(const ValidationReport& report, const Problem& p)
{
  nlohmann::ordered_json j;
  j["valid"] = report.valid;
  j["failing_step"] = report.failing_step ? nlohmann::ordered_json(*report.failing_step)
                                          : nlohmann::ordered_json(nullptr);
  j["failing_action"] = report.failing_action.empty() ? nlohmann::ordered_json(nullptr)
                                                      : nlohmann::ordered_json(report.failing_action);
  j["failing_condition"] = report.failing_condition.empty()
                               ? nlohmann::ordered_json(nullptr)
                               : nlohmann::ordered_json(report.failing_condition);
  auto unmet = nlohmann::ordered_json::array();
  for (auto g : report.unmet_goals) unmet.push_back(to_string(p.goals.at(g), p));
  j["unmet_goals"] = unmet;
  nlohmann::ordered_json state = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < report.final_state.bools.size() && i < p.num_bools(); ++i)
    state[p.bool_names[i]] = static_cast<bool>(report.final_state.bools[i]);
  for (std::size_t i = 0; i < report.final_state.nums.size() && i < p.num_nums(); ++i)
    state[p.num_names[i]] = to_string(report.final_state.nums[i]);
  j["final_state"] = state;
  return j.dump(2);
}

}  // namespace symplan
