#pragma once

// Bounded encodings of a planning problem: standard, rolled-up, R2E (chained
// Boolean actions along a total order) and pattern encodings.

#include "symplan/analysis.hpp"
#include "symplan/formula.hpp"
#include "symplan/model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace symplan {

enum class EncodingKind { Standard, Rolled, R2E, Pattern };

std::string to_string(EncodingKind kind);
std::optional<EncodingKind> parse_encoding_kind(const std::string& text);

struct EncodingOptions {
  EncodingKind kind = EncodingKind::Pattern;
  // The total order for R2E, or the pattern. Ignored by standard/rolled.
  Pattern sequence;
  // Also check a rolled precondition at the second execution when the action
  // simply assigns a variable the precondition reads. Without it the first
  // execution can leave a state that is off the line checked by a>1.
  bool second_execution_check = true;
};

class EncodingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Role { Init, Pre, Eff, Frame, Mutex, Amo, Goal, Domain };
inline constexpr std::size_t kNumRoles = 8;
std::string to_string(Role role);

struct Assertion {
  Role role;
  Term term;
};

// Declarations and assertions contributed by one slice (X_0 + init, step i, goal).
struct Fragment {
  std::vector<VarDecl> decls;
  std::vector<Assertion> assertions;
  std::size_t auxiliaries = 0;

  void add(Role role, const Term& t);  // drops literal true
  void append(const Fragment& other);
};

// Name and term of the copy of a state variable at `step`.
Term state_term(const Problem& p, std::uint32_t step, BoolVar v);
Term state_term(const Problem& p, std::uint32_t step, NumVar v);
std::vector<Term> bool_terms(const Problem& p, std::uint32_t step);
std::vector<Term> num_terms(const Problem& p, std::uint32_t step);

// Linear expression over the given numeric terms.
Term lift(const LinearExpr& e, const std::vector<Term>& nums);
Term lift(const Condition& c, const std::vector<Term>& bools, const std::vector<Term>& nums);
Term lift(const GoalFormula& g, const std::vector<Term>& bools, const std::vector<Term>& nums);

// psi[a]: the value of psi at the last of `a_var` consecutive executions of `a`,
// expressed over the values `nums` before the first one.
Term psi_sub_a(const LinearExpr& psi, const Action& a, const Term& a_var, const std::vector<Term>& nums);
// psi at the second execution.
Term psi_second(const LinearExpr& psi, const Action& a, const std::vector<Term>& nums);
// Whether psi reads a variable that `a` simply assigns.
bool reads_simple_assignment(const LinearExpr& psi, const Action& a);

// Values of all state variables after a pattern prefix.
struct SymbolicValue {
  std::vector<Term> bools;
  std::vector<Term> nums;
};

// sigma for the pattern prefix; `action_vars[k]` is the variable of occurrence k
// and `aux(k, v)` the auxiliary for a general assignment of v at occurrence k.
SymbolicValue sigma(const Problem& p, const Pattern& prefix, const SymbolicValue& start,
                    const std::vector<Term>& action_vars,
                    const std::function<Term(std::size_t, NumVar)>& aux);

Fragment encode_init(const Problem& p);
Fragment encode_goal(const Problem& p, std::uint32_t n);
// Transition from X_step to X_{step+1}, including the declarations of the
// step's action bank, its auxiliaries and X_{step+1}.
Fragment encode_step(const Problem& p, const EncodingOptions& options, std::uint32_t step);

struct EncodedBound {
  EncodingKind kind = EncodingKind::Pattern;
  std::uint32_t bound = 0;
  Pattern sequence;
  std::vector<VarDecl> decls;
  std::vector<Term> assertions;
  std::vector<Role> roles;
  std::array<std::size_t, kNumRoles> role_counts{};
  std::size_t auxiliaries = 0;

  std::size_t num_vars() const { return decls.size(); }
  std::size_t num_assertions() const { return assertions.size(); }
  std::size_t count(Role r) const { return role_counts[static_cast<std::size_t>(r)]; }
  std::string smtlib(const std::optional<std::string>& logic = std::nullopt) const;
  std::string logic() const { return choose_logic(decls, assertions); }
};

// Throws EncodingError when the R2E order is not a permutation of the actions.
void check_options(const Problem& p, const EncodingOptions& options);

EncodedBound assemble_bound(const Problem& p, const EncodingOptions& options, std::uint32_t n);

// {"bound", "num_vars", "num_assertions", "auxiliary_vars", "per_role_counts"}
std::string stats_json(const EncodedBound& b);

class DecodeSoundnessError : public std::runtime_error {
 public:
  DecodeSoundnessError(const std::string& message, Plan plan, ValidationReport report);
  const Plan& plan() const { return plan_; }
  const ValidationReport& report() const { return report_; }

 private:
  Plan plan_;
  ValidationReport report_;
};

// Plan read off a model without validation.
Plan extract_plan(const Problem& p, const EncodingOptions& options, std::uint32_t n, const Model& model);
// extract_plan followed by validate_plan; throws DecodeSoundnessError.
Plan decode(const Problem& p, const EncodingOptions& options, std::uint32_t n, const Model& model);

}  // namespace symplan
