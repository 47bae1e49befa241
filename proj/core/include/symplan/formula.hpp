#pragma once

// Solver-agnostic term IR, SMT-LIB v2 printing and model parsing.

#include "symplan/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace symplan {

enum class Sort { Bool, Int, Real };

enum class Op { Var, Num, BoolLit, Add, Sub, Neg, Mul, Ge, Gt, Eq, Not, And, Or, Implies, Iff, Ite };

class SortError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Immutable, shared term tree. Constructors fold literals and drop neutral
// elements, nothing more, so the printed shape stays predictable.
class Term {
 public:
  Term();  // the literal true

  static Term var(const std::string& name, Sort sort);
  static Term number(const Rational& value);
  static Term boolean(bool value);

  Op op() const;
  Sort sort() const;
  const std::string& name() const;
  const Rational& value() const;
  bool bool_value() const;
  const std::vector<Term>& args() const;

  bool is_numeral() const { return op() == Op::Num; }
  bool is_numeral(const Rational& v) const { return is_numeral() && value() == v; }
  bool is_true() const { return op() == Op::BoolLit && bool_value(); }
  bool is_false() const { return op() == Op::BoolLit && !bool_value(); }
  bool is_numeric() const { return sort() != Sort::Bool; }

  struct Node;

 private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term make(Op op, Sort sort, std::vector<Term> args);
  std::shared_ptr<const Node> node_;

  friend Term sum(std::vector<Term> parts);
  friend Term operator-(const Term& a, const Term& b);
  friend Term operator-(const Term& a);
  friend Term operator*(const Term& a, const Term& b);
  friend Term ge(const Term& a, const Term& b);
  friend Term gt(const Term& a, const Term& b);
  friend Term eq(const Term& a, const Term& b);
  friend Term lnot(const Term& a);
  friend Term land(std::vector<Term> parts);
  friend Term lor(std::vector<Term> parts);
  friend Term implies(const Term& a, const Term& b);
  friend Term iff(const Term& a, const Term& b);
  friend Term ite(const Term& c, const Term& a, const Term& b);
};

Term sum(std::vector<Term> parts);
inline Term operator+(const Term& a, const Term& b) { return sum({a, b}); }
Term operator-(const Term& a, const Term& b);
Term operator-(const Term& a);
Term operator*(const Term& a, const Term& b);
Term ge(const Term& a, const Term& b);
Term gt(const Term& a, const Term& b);
inline Term le(const Term& a, const Term& b) { return ge(b, a); }
inline Term lt(const Term& a, const Term& b) { return gt(b, a); }
Term eq(const Term& a, const Term& b);
Term lnot(const Term& a);
Term land(std::vector<Term> parts);
Term lor(std::vector<Term> parts);
Term implies(const Term& a, const Term& b);
Term iff(const Term& a, const Term& b);
Term ite(const Term& c, const Term& a, const Term& b);

// true when the term contains a product of two non-literal operands
bool is_nonlinear(const Term& t);

using Value = std::variant<bool, Rational>;
Value evaluate(const Term& t, const std::function<Value(const std::string&)>& lookup);

// Where a declared symbol comes from. Positions index the action bank of a
// step: action ids for standard/rolled/r2e, occurrence indices for patterns.
struct StateVarOrigin {
  std::uint32_t step = 0;
  bool numeric = false;
  std::uint32_t index = 0;
  bool operator==(const StateVarOrigin&) const = default;
};
struct ActionVarOrigin {
  std::uint32_t step = 0;
  std::uint32_t position = 0;
  bool operator==(const ActionVarOrigin&) const = default;
};
struct AuxVarOrigin {
  std::uint32_t step = 0;
  std::uint32_t position = 0;
  std::uint32_t index = 0;  // numeric variable
  bool operator==(const AuxVarOrigin&) const = default;
};
struct ChainVarOrigin {
  std::uint32_t step = 0;
  std::uint32_t action = 0;
  bool numeric = false;
  std::uint32_t index = 0;
  bool operator==(const ChainVarOrigin&) const = default;
};
using VarOrigin = std::variant<StateVarOrigin, ActionVarOrigin, AuxVarOrigin, ChainVarOrigin>;

std::string mangle(const VarOrigin& origin);
std::optional<VarOrigin> demangle(const std::string& name);

struct VarDecl {
  std::string name;
  Sort sort = Sort::Real;
  VarOrigin origin;
  std::string comment;  // printed next to the declaration

  Term term() const { return Term::var(name, sort); }
};

VarDecl make_decl(const VarOrigin& origin, Sort sort, std::string comment = {});

// QF_LRA unless integer symbols or products show up.
std::string choose_logic(const std::vector<VarDecl>& decls, const std::vector<Term>& assertions);

// Printing pieces, shared by the one-shot and the incremental drivers.
class SmtPrinter {
 public:
  explicit SmtPrinter(std::string logic);
  const std::string& logic() const { return logic_; }

  std::string header() const;
  std::string declaration(const VarDecl& d) const;
  std::string assertion(const Term& t) const;
  std::string term(const Term& t) const;

 private:
  void print(std::string& out, const Term& t, Sort want) const;
  void numeral(std::string& out, const Rational& v, Sort want) const;

  std::string logic_;
  bool numerals_are_real_;
};

// Whole script: options, logic, declarations, assertions, (check-sat), (get-model).
// Throws std::logic_error on duplicate declaration names.
std::string print_smtlib(const std::vector<VarDecl>& decls, const std::vector<Term>& assertions,
                         const std::optional<std::string>& logic = std::nullopt);

class SolverProtocolError : public std::runtime_error {
 public:
  SolverProtocolError(const std::string& message, std::string raw);
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

struct Model {
  std::map<std::string, Value> values;
  // declared symbols the solver left out, filled with 0 / false
  std::vector<std::string> defaulted;

  bool boolean(const std::string& name) const;
  Rational number(const std::string& name) const;
};

enum class Verdict { Sat, Unsat, Unknown };

struct SolverAnswer {
  Verdict verdict = Verdict::Unknown;
  Model model;  // only for Sat
};

// Reads "sat" followed by a model, "unsat" or "unknown". Trailing (error ...)
// lines are tolerated after unsat/unknown, since get-model then fails.
SolverAnswer parse_model(const std::string& output, const std::vector<VarDecl>& decls);

// Value of a model term such as "(- (/ 1.0 2.0))".
std::optional<Rational> parse_value_text(const std::string& text);

}  // namespace symplan
