#pragma once

// Static analysis of ground problems: effect taxonomy, rolling eligibility,
// mutex pairs, and pattern computation from an asymptotic relaxed planning graph.

#include "symplan/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symplan {

struct EffectClass {
  enum class Kind { BooleanAssignment, LinearIncrement, SimpleAssignment, SelfInterfering };
  Kind kind = Kind::BooleanAssignment;
  // LinearIncrement: the delta psi of v := v + psi. General assignments: the rhs.
  LinearExpr expr;

  bool is_general() const { return kind == Kind::SimpleAssignment || kind == Kind::SelfInterfering; }
};

EffectClass classify_effect(const Action& a, const Effect& e);
bool eligible_for_rolling(const Action& a);

// Unordered pairs, stored with first < second, sorted.
std::vector<std::pair<ActionId, ActionId>> mutex_pairs(const Problem& p);

// Closed interval; nullopt bounds are infinite.
struct Interval {
  std::optional<Rational> lo;
  std::optional<Rational> hi;

  static Interval point(const Rational& v) { return {v, v}; }
  static Interval everything() { return {}; }
  bool operator==(const Interval&) const = default;
};

struct BoolReach {
  bool can_be_true = false;
  bool can_be_false = false;
  bool operator==(const BoolReach&) const = default;
};

struct IntervalState {
  std::vector<BoolReach> bools;
  std::vector<Interval> nums;
  bool operator==(const IntervalState&) const = default;

  static IntervalState from(const State& s);
};

Interval interval_of(const IntervalState& s, const LinearExpr& e);
bool maybe_holds(const IntervalState& s, const Condition& c);

struct ArpgLayer {
  IntervalState state;
  std::vector<ActionId> actions;  // sorted by id
};

std::vector<ArpgLayer> arpg_layers(const Problem& p);

class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<ActionId> occurrences) : occurrences_(std::move(occurrences)) {}

  const std::vector<ActionId>& occurrences() const { return occurrences_; }
  std::size_t size() const { return occurrences_.size(); }
  bool empty() const { return occurrences_.empty(); }
  const ActionId& operator[](std::size_t i) const { return occurrences_.at(i); }
  void push_back(ActionId a) { occurrences_.push_back(a); }

  bool is_simple() const;
  bool is_complete(std::size_t num_actions) const;
  // A total order (simple, complete) that is a subsequence of this pattern.
  bool is_compatible_order(const Pattern& order, std::size_t num_actions) const;
  bool operator==(const Pattern&) const = default;

 private:
  std::vector<ActionId> occurrences_;
};

// Actions by first ARPG layer; seeded shuffle inside a layer; unreachable
// actions last in id order.
Pattern arpg_pattern(const Problem& p, std::uint64_t seed);

// One action name per line.
Pattern parse_pattern(const std::string& text, const Problem& p);
std::string format_pattern(const Pattern& pattern, const Problem& p);

}  // namespace symplan
