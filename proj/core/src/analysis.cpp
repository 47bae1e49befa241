#include "symplan/analysis.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace symplan {

namespace {

std::set<NumVar> numeric_targets(const Action& a)
{
  std::set<NumVar> out;
  for (const auto& e : a.eff)
    if (auto* n = std::get_if<NumEffect>(&e)) out.insert(n->var);
  return out;
}

bool mentions_any(const LinearExpr& e, const std::set<NumVar>& vars)
{
  for (const auto& [var, coeff] : e.terms())
    if (vars.contains(var)) return true;
  return false;
}

}  // namespace

EffectClass classify_effect(const Action& a, const Effect& e)
{
  if (std::holds_alternative<BoolEffect>(e)) return {EffectClass::Kind::BooleanAssignment, {}};
  const auto& n = std::get<NumEffect>(e);
  const auto assigned = numeric_targets(a);
  if (n.rhs.coefficient(n.var) == 1) {
    LinearExpr delta = n.rhs - LinearExpr::variable(n.var);
    if (!mentions_any(delta, assigned)) return {EffectClass::Kind::LinearIncrement, delta};
  }
  if (!mentions_any(n.rhs, assigned)) return {EffectClass::Kind::SimpleAssignment, n.rhs};
  return {EffectClass::Kind::SelfInterfering, n.rhs};
}

bool eligible_for_rolling(const Action& a)
{
  for (const auto& c : a.pre) {
    auto* b = std::get_if<BoolCondition>(&c);
    if (!b) continue;
    if (const BoolEffect* eff = a.effect_on(b->var); eff && eff->value != b->value) return false;
  }
  bool has_increment = false;
  for (const auto& e : a.eff) {
    auto kind = classify_effect(a, e).kind;
    if (kind == EffectClass::Kind::SelfInterfering) return false;
    if (kind == EffectClass::Kind::LinearIncrement) has_increment = true;
  }
  return has_increment;
}

namespace {

// Does a1 interfere with a2 in the direction a1 -> a2 (clauses (a) and (b))?
bool interferes(const Action& a1, const Action& a2)
{
  for (const auto& c : a1.pre) {
    auto* b = std::get_if<BoolCondition>(&c);
    if (!b) continue;
    if (const BoolEffect* eff = a2.effect_on(b->var); eff && eff->value != b->value) return true;
  }
  for (const auto& e : a1.eff) {
    auto* n = std::get_if<NumEffect>(&e);
    if (!n) continue;
    const NumVar v = n->var;
    for (const auto& c : a2.pre)
      if (auto* nc = std::get_if<NumCondition>(&c); nc && nc->expr.mentions(v)) return true;
    for (const auto& e2 : a2.eff)
      if (auto* n2 = std::get_if<NumEffect>(&e2); n2 && (n2->var == v || n2->rhs.mentions(v))) return true;
  }
  return false;
}

}  // namespace

std::vector<std::pair<ActionId, ActionId>> mutex_pairs(const Problem& p)
{
  std::vector<std::pair<ActionId, ActionId>> out;
  for (std::uint32_t i = 0; i < p.actions.size(); ++i)
    for (std::uint32_t j = i + 1; j < p.actions.size(); ++j)
      if (interferes(p.actions[i], p.actions[j]) || interferes(p.actions[j], p.actions[i]))
        out.emplace_back(ActionId{i}, ActionId{j});
  return out;
}

IntervalState IntervalState::from(const State& s)
{
  IntervalState out;
  for (bool b : s.bools) out.bools.push_back({b, !b});
  for (const auto& v : s.nums) out.nums.push_back(Interval::point(v));
  return out;
}

Interval interval_of(const IntervalState& s, const LinearExpr& e)
{
  Interval out = Interval::point(e.constant());
  for (const auto& [var, coeff] : e.terms()) {
    const Interval& x = s.nums.at(var.index);
    const auto& low = coeff > 0 ? x.lo : x.hi;
    const auto& high = coeff > 0 ? x.hi : x.lo;
    if (out.lo && low) *out.lo += coeff * *low;
    else out.lo.reset();
    if (out.hi && high) *out.hi += coeff * *high;
    else out.hi.reset();
  }
  return out;
}

bool maybe_holds(const IntervalState& s, const Condition& c)
{
  if (auto* b = std::get_if<BoolCondition>(&c)) {
    const BoolReach& r = s.bools.at(b->var.index);
    return b->value ? r.can_be_true : r.can_be_false;
  }
  const auto& n = std::get<NumCondition>(c);
  Interval range = interval_of(s, n.expr);
  switch (n.op) {
    case Cmp::Ge: return !range.hi || *range.hi >= 0;
    case Cmp::Gt: return !range.hi || *range.hi > 0;
    case Cmp::Eq: return (!range.lo || *range.lo <= 0) && (!range.hi || *range.hi >= 0);
  }
  return false;
}

namespace {

void hull_into(Interval& target, const Interval& extra)
{
  if (target.lo && (!extra.lo || *extra.lo < *target.lo)) target.lo = extra.lo;
  if (target.hi && (!extra.hi || *extra.hi > *target.hi)) target.hi = extra.hi;
}

IntervalState extend(const IntervalState& s, const Problem& p, const std::vector<ActionId>& actions)
{
  IntervalState next = s;
  for (ActionId id : actions) {
    const Action& a = p.action(id);
    for (const auto& e : a.eff) {
      if (auto* b = std::get_if<BoolEffect>(&e)) {
        (b->value ? next.bools[b->var.index].can_be_true : next.bools[b->var.index].can_be_false) = true;
        continue;
      }
      const auto& n = std::get<NumEffect>(e);
      EffectClass cls = classify_effect(a, e);
      Interval& target = next.nums[n.var.index];
      if (cls.kind == EffectClass::Kind::LinearIncrement) {
        // repeated application drives the bound to infinity in every direction the delta can point
        Interval delta = interval_of(s, cls.expr);
        if (!delta.hi || *delta.hi > 0) target.hi.reset();
        if (!delta.lo || *delta.lo < 0) target.lo.reset();
      } else {
        hull_into(target, interval_of(s, cls.expr));
      }
    }
  }
  return next;
}

// Bounds that moved without any new action being enabled are pushed to
// infinity, which bounds the number of layers.
void widen(IntervalState& next, const IntervalState& prev)
{
  for (std::size_t i = 0; i < next.nums.size(); ++i) {
    if (next.nums[i].lo != prev.nums[i].lo) next.nums[i].lo.reset();
    if (next.nums[i].hi != prev.nums[i].hi) next.nums[i].hi.reset();
  }
}

std::vector<ActionId> applicable(const IntervalState& s, const Problem& p)
{
  std::vector<ActionId> out;
  for (std::uint32_t i = 0; i < p.actions.size(); ++i) {
    const Action& a = p.actions[i];
    if (std::all_of(a.pre.begin(), a.pre.end(), [&](const Condition& c) { return maybe_holds(s, c); }))
      out.push_back(ActionId{i});
  }
  return out;
}

}  // namespace

std::vector<ArpgLayer> arpg_layers(const Problem& p)
{
  std::vector<ArpgLayer> layers;
  IntervalState s = IntervalState::from(p.init);
  const std::size_t limit = 2 * (p.actions.size() + 2 * p.num_nums() + 2 * p.num_bools()) + 4;
  while (layers.size() <= limit) {
    std::vector<ActionId> actions = applicable(s, p);
    if (!layers.empty() && layers.back().actions == actions && layers.back().state == s) break;
    const bool no_new_actions = !layers.empty() && layers.back().actions == actions;
    layers.push_back({s, actions});
    IntervalState next = extend(s, p, actions);
    if (no_new_actions) widen(next, s);
    s = std::move(next);
  }
  return layers;
}

bool Pattern::is_simple() const
{
  std::set<ActionId> seen;
  for (ActionId a : occurrences_)
    if (!seen.insert(a).second) return false;
  return true;
}

bool Pattern::is_complete(std::size_t num_actions) const
{
  std::set<ActionId> seen(occurrences_.begin(), occurrences_.end());
  for (std::uint32_t i = 0; i < num_actions; ++i)
    if (!seen.contains(ActionId{i})) return false;
  return true;
}

bool Pattern::is_compatible_order(const Pattern& order, std::size_t num_actions) const
{
  if (!order.is_simple() || !order.is_complete(num_actions) || order.size() != num_actions) return false;
  std::size_t k = 0;
  for (ActionId a : occurrences_)
    if (k < order.size() && order[k] == a) ++k;
  return k == order.size();
}

Pattern arpg_pattern(const Problem& p, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::vector<bool> placed(p.actions.size(), false);
  Pattern pattern;
  for (const auto& layer : arpg_layers(p)) {
    std::vector<ActionId> block;
    for (ActionId a : layer.actions)
      if (!placed[a.index]) block.push_back(a);
    // Fisher-Yates with a fixed reduction so patterns are identical across standard libraries
    for (std::size_t i = block.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(block[i - 1], block[j]);
    }
    for (ActionId a : block) {
      placed[a.index] = true;
      pattern.push_back(a);
    }
  }
  for (std::uint32_t i = 0; i < p.actions.size(); ++i)
    if (!placed[i]) pattern.push_back(ActionId{i});
  return pattern;
}

Pattern parse_pattern(const std::string& text, const Problem& p)
{
  Pattern pattern;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto comment = line.find(';'); comment != std::string::npos) line.erase(comment);
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    auto end = line.find_last_not_of(" \t\r");
    std::string name = line.substr(begin, end - begin + 1);
    auto id = p.find_action(name);
    if (!id) throw ModelError("pattern line " + std::to_string(line_no) + ": unknown action '" + name + "'");
    pattern.push_back(*id);
  }
  return pattern;
}

std::string format_pattern(const Pattern& pattern, const Problem& p)
{
  std::string out;
  for (ActionId a : pattern.occurrences()) out += p.action(a).name + "\n";
  return out;
}

}  // namespace symplan
