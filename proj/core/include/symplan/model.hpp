#pragma once

// Ground numeric planning problems and their execution semantics.

#include "symplan/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace symplan {

struct BoolVar {
  std::uint32_t index = 0;
  auto operator<=>(const BoolVar&) const = default;
};

struct NumVar {
  std::uint32_t index = 0;
  auto operator<=>(const NumVar&) const = default;
};

struct ActionId {
  std::uint32_t index = 0;
  auto operator<=>(const ActionId&) const = default;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sum of coeff * var + constant over numeric variables, zero coefficients never stored
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(Rational constant);
  static LinearExpr variable(NumVar var, const Rational& coeff = 1);

  const std::map<NumVar, Rational>& terms() const { return terms_; }
  const Rational& constant() const { return constant_; }
  Rational coefficient(NumVar var) const;
  bool mentions(NumVar var) const { return terms_.contains(var); }
  bool is_constant() const { return terms_.empty(); }

  void add_term(NumVar var, const Rational& coeff);
  void add_constant(const Rational& value) { constant_ += value; }

  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(const Rational& factor);
  friend LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs) { return lhs += rhs; }
  friend LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs) { return lhs -= rhs; }
  friend LinearExpr operator*(LinearExpr lhs, const Rational& rhs) { return lhs *= rhs; }
  LinearExpr operator-() const { return *this * Rational(-1); }

  bool operator==(const LinearExpr& other) const = default;

 private:
  std::map<NumVar, Rational> terms_;
  Rational constant_ = 0;
};

enum class Cmp { Ge, Gt, Eq };

struct BoolCondition {
  BoolVar var;
  bool value = true;
  bool operator==(const BoolCondition&) const = default;
};

// expr ⊵ 0
struct NumCondition {
  LinearExpr expr;
  Cmp op = Cmp::Ge;
  bool operator==(const NumCondition&) const = default;
};

using Condition = std::variant<BoolCondition, NumCondition>;

// Surface comparison operators, normalized into NumCondition by compare().
enum class Relation { Lt, Le, Eq, Ge, Gt };
NumCondition compare(const LinearExpr& lhs, Relation rel, const LinearExpr& rhs);

struct BoolEffect {
  BoolVar var;
  bool value = true;
  bool operator==(const BoolEffect&) const = default;
};

struct NumEffect {
  NumVar var;
  LinearExpr rhs;
  bool operator==(const NumEffect&) const = default;
};

using Effect = std::variant<BoolEffect, NumEffect>;

// var += delta, stored as var := var + delta
NumEffect increase(NumVar var, const LinearExpr& delta);

struct Action {
  std::string name;
  std::vector<Condition> pre;
  std::vector<Effect> eff;

  const BoolEffect* effect_on(BoolVar var) const;
  const NumEffect* effect_on(NumVar var) const;
  bool assigns(BoolVar var) const { return effect_on(var) != nullptr; }
  bool assigns(NumVar var) const { return effect_on(var) != nullptr; }
};

// Propositional combination of conditions.
struct GoalFormula {
  enum class Kind { Atom, And, Or, Not };
  Kind kind = Kind::And;
  std::optional<Condition> atom;
  std::vector<GoalFormula> children;

  static GoalFormula leaf(Condition c);
  static GoalFormula conjunction(std::vector<GoalFormula> parts);
  static GoalFormula disjunction(std::vector<GoalFormula> parts);
  static GoalFormula negation(GoalFormula inner);
};

struct State {
  std::vector<bool> bools;
  std::vector<Rational> nums;

  bool operator==(const State&) const = default;
  bool operator<(const State& other) const;
};

struct Problem {
  std::vector<std::string> bool_names;
  std::vector<std::string> num_names;
  std::vector<Action> actions;
  State init;
  std::vector<GoalFormula> goals;

  std::size_t num_bools() const { return bool_names.size(); }
  std::size_t num_nums() const { return num_names.size(); }
  const Action& action(ActionId id) const { return actions.at(id.index); }

  std::optional<ActionId> find_action(const std::string& name) const;
  std::optional<BoolVar> find_bool(const std::string& name) const;
  std::optional<NumVar> find_num(const std::string& name) const;

  // Throws ModelError when an invariant (declared variables, total init,
  // single assignment per action) is broken.
  void check() const;
};

class NotExecutable : public ModelError {
 public:
  NotExecutable(std::string action, std::string condition);
  const std::string& action() const { return action_; }
  const std::string& condition() const { return condition_; }

 private:
  std::string action_;
  std::string condition_;
};

Rational eval(const State& s, const LinearExpr& e);
bool holds(const State& s, const Condition& c);
bool holds(const State& s, const GoalFormula& g);

// Index of the first precondition of `a` that fails in `s`.
std::optional<std::size_t> first_failing_precondition(const State& s, const Action& a);

// Simultaneous effect application; throws NotExecutable.
State apply(const State& s, const Action& a, const Problem* names = nullptr);

struct PlanStep {
  ActionId action;
  std::uint64_t count = 1;
  bool operator==(const PlanStep&) const = default;
};

// Sequence of actions with positive repetition counts; adjacent steps on the
// same action are merged.
class Plan {
 public:
  Plan() = default;
  void append(ActionId action, std::uint64_t count = 1);
  const std::vector<PlanStep>& steps() const { return steps_; }
  std::uint64_t length() const;
  std::vector<ActionId> flatten() const;
  bool empty() const { return steps_.empty(); }
  bool operator==(const Plan&) const = default;

 private:
  std::vector<PlanStep> steps_;
};

struct ValidationReport {
  bool valid = false;
  // index into the flattened action sequence
  std::optional<std::uint64_t> failing_step;
  std::string failing_action;
  std::string failing_condition;
  std::vector<std::size_t> unmet_goals;
  State final_state;
};

ValidationReport validate_plan(const Problem& p, const Plan& plan);

std::string to_string(const LinearExpr& e, const Problem& p);
std::string to_string(const Condition& c, const Problem& p);
std::string to_string(const GoalFormula& g, const Problem& p);

// Plan text: one "<count> <action-name>" per line, '#' or ';' comments.
Plan parse_plan(const std::string& text, const Problem& p);
std::string format_plan(const Plan& plan, const Problem& p);

std::string report_to_json(const ValidationReport& report, const Problem& p);

}  // namespace symplan
