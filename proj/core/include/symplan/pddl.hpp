#pragma once

// PDDL 2.1 level-2 reader (typed STRIPS + linear numeric fluents) and grounder.

#include "symplan/model.hpp"
#include "symplan/sexpr.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symplan::pddl {

class UnsupportedFeature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GroundingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonLinearExpression : public GroundingError {
 public:
  using GroundingError::GroundingError;
};

class UntypedObject : public GroundingError {
 public:
  using GroundingError::GroundingError;
};

struct TypedName {
  std::string name;
  std::string type;
  bool operator==(const TypedName&) const = default;
};

struct Signature {
  std::string name;
  std::vector<TypedName> params;
  bool operator==(const Signature&) const = default;
};

struct NumTerm {
  enum class Kind { Number, Fluent, Add, Sub, Mul, Div, Neg };
  Kind kind = Kind::Number;
  Rational value = 0;
  std::string name;
  std::vector<std::string> args;
  std::vector<NumTerm> children;
  bool operator==(const NumTerm&) const = default;
};

struct Formula {
  enum class Kind { And, Or, Not, Imply, Atom, Compare, ObjectEq };
  Kind kind = Kind::And;
  std::string name;
  std::vector<std::string> args;
  Relation rel = Relation::Eq;
  std::vector<NumTerm> terms;
  std::vector<Formula> children;
  bool operator==(const Formula&) const = default;
};

struct EffectSpec {
  enum class Kind { Add, Delete, Assign, Increase, Decrease };
  Kind kind = Kind::Add;
  std::string name;
  std::vector<std::string> args;
  NumTerm value;
  bool operator==(const EffectSpec&) const = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::optional<Formula> precondition;
  std::vector<EffectSpec> effects;
  bool operator==(const ActionSchema&) const = default;
};

struct LiftedDomain {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypedName> types;  // name with parent type
  std::vector<TypedName> constants;
  std::vector<Signature> predicates;
  std::vector<Signature> functions;
  std::vector<ActionSchema> actions;
  bool operator==(const LiftedDomain&) const = default;

  bool has_typing() const;
};

struct InitFluent {
  std::string name;
  std::vector<std::string> args;
  Rational value;
};

struct LiftedProblem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<std::pair<std::string, std::vector<std::string>>> init_atoms;
  std::vector<InitFluent> init_fluents;
  std::optional<Formula> goal;
};

LiftedDomain parse_domain(std::string_view text);
LiftedProblem parse_problem(std::string_view text);
std::string print_domain(const LiftedDomain& domain);

struct GroundingTable {
  std::map<std::string, std::vector<std::string>> objects_by_type;
  std::map<std::string, BoolVar> atoms;
  std::map<std::string, NumVar> fluents;
};

struct GroundResult {
  Problem problem;
  GroundingTable table;
};

GroundResult ground_problem(const LiftedDomain& domain, const LiftedProblem& problem);
Problem ground(const LiftedDomain& domain, std::string_view problem_text);

// "(name a b)" or "name" for nullary atoms and actions.
std::string ground_name(const std::string& name, const std::vector<std::string>& args);

}  // namespace symplan::pddl
