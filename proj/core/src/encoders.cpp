#include "symplan/encoders.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace symplan {

std::string to_string(EncodingKind kind)
{
  switch (kind) {
    case EncodingKind::Standard: return "standard";
    case EncodingKind::Rolled: return "rolled";
    case EncodingKind::R2E: return "r2e";
    case EncodingKind::Pattern: return "pattern";
  }
  return "?";
}

std::optional<EncodingKind> parse_encoding_kind(const std::string& text)
{
  for (auto k : {EncodingKind::Standard, EncodingKind::Rolled, EncodingKind::R2E, EncodingKind::Pattern})
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::string to_string(Role role)
{
  static const char* names[] = {"init", "pre", "eff", "frame", "mutex", "amo", "goal", "domain"};
  return names[static_cast<std::size_t>(role)];
}

void Fragment::add(Role role, const Term& t)
{
  if (t.is_true()) return;
  assertions.push_back({role, t});
}

void Fragment::append(const Fragment& other)
{
  decls.insert(decls.end(), other.decls.begin(), other.decls.end());
  assertions.insert(assertions.end(), other.assertions.begin(), other.assertions.end());
  auxiliaries += other.auxiliaries;
}

Term state_term(const Problem&, std::uint32_t step, BoolVar v)
{
  return Term::var(mangle(StateVarOrigin{step, false, v.index}), Sort::Bool);
}

Term state_term(const Problem&, std::uint32_t step, NumVar v)
{
  return Term::var(mangle(StateVarOrigin{step, true, v.index}), Sort::Real);
}

std::vector<Term> bool_terms(const Problem& p, std::uint32_t step)
{
  std::vector<Term> out;
  for (std::uint32_t i = 0; i < p.num_bools(); ++i) out.push_back(state_term(p, step, BoolVar{i}));
  return out;
}

std::vector<Term> num_terms(const Problem& p, std::uint32_t step)
{
  std::vector<Term> out;
  for (std::uint32_t i = 0; i < p.num_nums(); ++i) out.push_back(state_term(p, step, NumVar{i}));
  return out;
}

Term lift(const LinearExpr& e, const std::vector<Term>& nums)
{
  std::vector<Term> parts;
  for (const auto& [var, coeff] : e.terms()) parts.push_back(Term::number(coeff) * nums.at(var.index));
  parts.push_back(Term::number(e.constant()));
  return sum(std::move(parts));
}

namespace {

Term compare_zero(const Term& lhs, Cmp op)
{
  const Term zero = Term::number(0);
  switch (op) {
    case Cmp::Ge: return ge(lhs, zero);
    case Cmp::Gt: return gt(lhs, zero);
    case Cmp::Eq: return eq(lhs, zero);
  }
  throw std::logic_error("bad comparison");
}

Term positive(const Term& count) { return gt(count, Term::number(0)); }
Term zero(const Term& count) { return eq(count, Term::number(0)); }
Term many(const Term& count) { return gt(count, Term::number(1)); }
Term at_most_once(const Term& count) { return lor({zero(count), eq(count, Term::number(1))}); }

}  // namespace

Term lift(const Condition& c, const std::vector<Term>& bools, const std::vector<Term>& nums)
{
  if (auto* b = std::get_if<BoolCondition>(&c)) {
    const Term& v = bools.at(b->var.index);
    return b->value ? v : lnot(v);
  }
  const auto& n = std::get<NumCondition>(c);
  return compare_zero(lift(n.expr, nums), n.op);
}

Term lift(const GoalFormula& g, const std::vector<Term>& bools, const std::vector<Term>& nums)
{
  std::vector<Term> parts;
  for (const auto& child : g.children) parts.push_back(lift(child, bools, nums));
  switch (g.kind) {
    case GoalFormula::Kind::Atom: return lift(*g.atom, bools, nums);
    case GoalFormula::Kind::And: return land(std::move(parts));
    case GoalFormula::Kind::Or: return lor(std::move(parts));
    case GoalFormula::Kind::Not: return lnot(parts.at(0));
  }
  throw std::logic_error("bad goal formula");
}

Term psi_sub_a(const LinearExpr& psi, const Action& a, const Term& a_var, const std::vector<Term>& nums)
{
  std::vector<Term> subst = nums;
  for (const auto& e : a.eff) {
    auto* n = std::get_if<NumEffect>(&e);
    if (!n || !psi.mentions(n->var)) continue;
    EffectClass cls = classify_effect(a, e);
    switch (cls.kind) {
      case EffectClass::Kind::LinearIncrement:
        subst[n->var.index] = nums[n->var.index] + (a_var - Term::number(1)) * lift(cls.expr, nums);
        break;
      case EffectClass::Kind::SimpleAssignment: subst[n->var.index] = lift(cls.expr, nums); break;
      default: throw std::logic_error("psi[a] over a self-interfering assignment of " + a.name);
    }
  }
  return lift(psi, subst);
}

Term psi_second(const LinearExpr& psi, const Action& a, const std::vector<Term>& nums)
{
  return psi_sub_a(psi, a, Term::number(2), nums);
}

bool reads_simple_assignment(const LinearExpr& psi, const Action& a)
{
  for (const auto& e : a.eff) {
    auto* n = std::get_if<NumEffect>(&e);
    if (n && psi.mentions(n->var) && classify_effect(a, e).kind == EffectClass::Kind::SimpleAssignment)
      return true;
  }
  return false;
}

namespace {

// count x t, with a count known to be 0 or 1 kept out of products.
Term scaled(const Term& count, const Term& t, bool capped)
{
  if (capped && !t.is_numeral()) return ite(positive(count), t, Term::number(0));
  return count * t;
}

// Values after `count` executions of `a` starting from `prev`.
SymbolicValue advance(const Action& a, const Term& count, bool capped, const SymbolicValue& prev,
                      const std::function<Term(NumVar)>& aux)
{
  SymbolicValue next = prev;
  for (const auto& e : a.eff) {
    if (auto* b = std::get_if<BoolEffect>(&e)) {
      const Term& before = prev.bools[b->var.index];
      next.bools[b->var.index] = b->value ? lor({before, positive(count)}) : land({before, zero(count)});
      continue;
    }
    const auto& n = std::get<NumEffect>(e);
    EffectClass cls = classify_effect(a, e);
    if (cls.kind == EffectClass::Kind::LinearIncrement)
      next.nums[n.var.index] = prev.nums[n.var.index] + scaled(count, lift(cls.expr, prev.nums), capped);
    else
      next.nums[n.var.index] = aux(n.var);
  }
  return next;
}

// pre^R / pre^< shaped preconditions of one action (or occurrence): the Boolean
// part as one implication, each numeric condition as its own.
void add_preconditions(Fragment& f, const Action& a, const Term& guard, const Term& count, bool rolls,
                       const Term& roll_var, bool second_check, const std::vector<Term>& bools,
                       const std::vector<Term>& nums)
{
  std::vector<Term> boolean;
  for (const auto& c : a.pre)
    if (std::holds_alternative<BoolCondition>(c)) boolean.push_back(lift(c, bools, nums));
  if (!boolean.empty()) f.add(Role::Pre, implies(guard, land(std::move(boolean))));
  for (const auto& c : a.pre) {
    auto* n = std::get_if<NumCondition>(&c);
    if (!n) continue;
    f.add(Role::Pre, implies(guard, lift(c, bools, nums)));
    if (!rolls) continue;
    f.add(Role::Pre, implies(many(count), compare_zero(psi_sub_a(n->expr, a, roll_var, nums), n->op)));
    if (second_check && reads_simple_assignment(n->expr, a))
      f.add(Role::Pre, implies(many(count), compare_zero(psi_second(n->expr, a, nums), n->op)));
  }
}

std::string at(const std::string& what, std::uint32_t step) { return what + " @" + std::to_string(step); }

void declare_next_state(Fragment& f, const Problem& p, std::uint32_t step)
{
  for (std::uint32_t i = 0; i < p.num_bools(); ++i)
    f.decls.push_back(make_decl(StateVarOrigin{step, false, i}, Sort::Bool, at(p.bool_names[i], step)));
  for (std::uint32_t i = 0; i < p.num_nums(); ++i)
    f.decls.push_back(make_decl(StateVarOrigin{step, true, i}, Sort::Real, at(p.num_names[i], step)));
}

Term action_var(std::uint32_t step, std::uint32_t pos, Sort sort)
{
  return Term::var(mangle(ActionVarOrigin{step, pos}), sort);
}

Fragment rolled_step(const Problem& p, const EncodingOptions& options, std::uint32_t step)
{
  const bool standard = options.kind == EncodingKind::Standard;
  Fragment f;
  const auto X = bool_terms(p, step);
  const auto Xn = num_terms(p, step);
  const auto Y = bool_terms(p, step + 1);
  const auto Yn = num_terms(p, step + 1);

  std::vector<Term> acts;
  for (std::uint32_t i = 0; i < p.actions.size(); ++i) {
    f.decls.push_back(make_decl(ActionVarOrigin{step, i}, Sort::Int, at(p.actions[i].name, step)));
    acts.push_back(action_var(step, i, Sort::Int));
  }
  for (const auto& a : acts) f.add(Role::Domain, ge(a, Term::number(0)));

  for (std::uint32_t i = 0; i < p.actions.size(); ++i) {
    const Action& a = p.actions[i];
    const bool eligible = eligible_for_rolling(a);
    const bool capped = standard || !eligible;
    const Term& count = acts[i];
    // with a <= 1 asserted, a>1 guards are vacuous and a may be read as 1 behind them
    const Term roll_var = capped ? Term::number(1) : count;
    add_preconditions(f, a, positive(count), count, eligible, roll_var, options.second_execution_check, X, Xn);

    std::vector<Term> post;
    for (const auto& e : a.eff) {
      if (auto* b = std::get_if<BoolEffect>(&e)) {
        post.push_back(b->value ? Y[b->var.index] : lnot(Y[b->var.index]));
        continue;
      }
      const auto& n = std::get<NumEffect>(e);
      EffectClass cls = classify_effect(a, e);
      Term value = cls.kind == EffectClass::Kind::LinearIncrement
                       ? Xn[n.var.index] + (capped ? lift(cls.expr, Xn) : count * lift(cls.expr, Xn))
                       : lift(n.rhs, Xn);
      post.push_back(eq(Yn[n.var.index], value));
    }
    if (!post.empty()) f.add(Role::Eff, implies(positive(count), land(std::move(post))));
  }

  for (std::uint32_t v = 0; v < p.num_bools(); ++v) {
    std::vector<Term> idle;
    for (std::uint32_t i = 0; i < p.actions.size(); ++i)
      if (p.actions[i].assigns(BoolVar{v})) idle.push_back(zero(acts[i]));
    f.add(Role::Frame, implies(land(std::move(idle)), iff(Y[v], X[v])));
  }
  for (std::uint32_t v = 0; v < p.num_nums(); ++v) {
    std::vector<Term> idle;
    for (std::uint32_t i = 0; i < p.actions.size(); ++i)
      if (p.actions[i].assigns(NumVar{v})) idle.push_back(zero(acts[i]));
    f.add(Role::Frame, implies(land(std::move(idle)), eq(Yn[v], Xn[v])));
  }

  for (const auto& [a1, a2] : mutex_pairs(p))
    f.add(Role::Mutex, lor({zero(acts[a1.index]), zero(acts[a2.index])}));

  for (std::uint32_t i = 0; i < p.actions.size(); ++i)
    if (!eligible_for_rolling(p.actions[i])) f.add(Role::Amo, at_most_once(acts[i]));
  if (standard)
    for (const auto& a : acts) f.add(Role::Amo, at_most_once(a));

  declare_next_state(f, p, step + 1);
  return f;
}

Fragment r2e_step(const Problem& p, const EncodingOptions& options, std::uint32_t step)
{
  Fragment f;
  std::vector<Term> bools = bool_terms(p, step);
  std::vector<Term> nums = num_terms(p, step);
  const auto Y = bool_terms(p, step + 1);
  const auto Yn = num_terms(p, step + 1);

  for (std::uint32_t i = 0; i < p.actions.size(); ++i)
    f.decls.push_back(make_decl(ActionVarOrigin{step, i}, Sort::Bool, at(p.actions[i].name, step)));

  for (ActionId id : options.sequence.occurrences()) {
    const Action& a = p.action(id);
    const Term act = action_var(step, id.index, Sort::Bool);

    std::vector<Term> pre;
    for (const auto& c : a.pre) pre.push_back(lift(c, bools, nums));
    if (!pre.empty()) f.add(Role::Pre, implies(act, land(std::move(pre))));

    std::vector<Term> taken, skipped;
    auto next_bools = bools;
    auto next_nums = nums;
    for (const auto& e : a.eff) {
      if (auto* b = std::get_if<BoolEffect>(&e)) {
        ChainVarOrigin o{step, id.index, false, b->var.index};
        f.decls.push_back(make_decl(o, Sort::Bool, at(p.bool_names[b->var.index] + "^" + a.name, step)));
        Term c = Term::var(mangle(o), Sort::Bool);
        taken.push_back(b->value ? c : lnot(c));
        skipped.push_back(iff(c, bools[b->var.index]));
        next_bools[b->var.index] = c;
      } else {
        const auto& n = std::get<NumEffect>(e);
        ChainVarOrigin o{step, id.index, true, n.var.index};
        f.decls.push_back(make_decl(o, Sort::Real, at(p.num_names[n.var.index] + "^" + a.name, step)));
        Term c = Term::var(mangle(o), Sort::Real);
        taken.push_back(eq(c, lift(n.rhs, nums)));
        skipped.push_back(eq(c, nums[n.var.index]));
        next_nums[n.var.index] = c;
      }
      ++f.auxiliaries;
    }
    if (!taken.empty()) {
      f.add(Role::Eff, implies(act, land(std::move(taken))));
      f.add(Role::Eff, implies(lnot(act), land(std::move(skipped))));
    }
    bools = std::move(next_bools);
    nums = std::move(next_nums);
  }

  for (std::uint32_t v = 0; v < p.num_bools(); ++v) f.add(Role::Frame, iff(Y[v], bools[v]));
  for (std::uint32_t v = 0; v < p.num_nums(); ++v) f.add(Role::Frame, eq(Yn[v], nums[v]));
  declare_next_state(f, p, step + 1);
  return f;
}

Fragment pattern_step(const Problem& p, const EncodingOptions& options, std::uint32_t step)
{
  Fragment f;
  const Pattern& pattern = options.sequence;
  const auto Y = bool_terms(p, step + 1);
  const auto Yn = num_terms(p, step + 1);
  SymbolicValue cur{bool_terms(p, step), num_terms(p, step)};

  std::vector<Term> acts;
  for (std::uint32_t k = 0; k < pattern.size(); ++k) {
    f.decls.push_back(make_decl(ActionVarOrigin{step, k}, Sort::Int, at(p.action(pattern[k]).name, step)));
    acts.push_back(action_var(step, k, Sort::Int));
  }
  for (const auto& a : acts) f.add(Role::Domain, ge(a, Term::number(0)));

  for (std::uint32_t k = 0; k < pattern.size(); ++k) {
    const Action& a = p.action(pattern[k]);
    const Term& count = acts[k];
    const bool eligible = eligible_for_rolling(a);
    add_preconditions(f, a, positive(count), count, eligible, count, options.second_execution_check, cur.bools,
                      cur.nums);

    std::map<NumVar, Term> aux;
    for (const auto& e : a.eff) {
      auto* n = std::get_if<NumEffect>(&e);
      if (!n || !classify_effect(a, e).is_general()) continue;
      AuxVarOrigin o{step, k, n->var.index};
      f.decls.push_back(
          make_decl(o, Sort::Real, at(p.num_names[n->var.index] + "^" + std::to_string(k) + ":" + a.name, step)));
      Term h = Term::var(mangle(o), Sort::Real);
      f.add(Role::Eff, implies(zero(count), eq(h, cur.nums[n->var.index])));
      f.add(Role::Eff, implies(positive(count), eq(h, lift(n->rhs, cur.nums))));
      aux.emplace(n->var, h);
      ++f.auxiliaries;
    }
    if (!eligible) f.add(Role::Amo, at_most_once(count));
    cur = advance(a, count, !eligible, cur, [&](NumVar v) { return aux.at(v); });
  }

  for (std::uint32_t v = 0; v < p.num_bools(); ++v) f.add(Role::Frame, iff(Y[v], cur.bools[v]));
  for (std::uint32_t v = 0; v < p.num_nums(); ++v) f.add(Role::Frame, eq(Yn[v], cur.nums[v]));
  declare_next_state(f, p, step + 1);
  return f;
}

}  // namespace

SymbolicValue sigma(const Problem& p, const Pattern& prefix, const SymbolicValue& start,
                    const std::vector<Term>& action_vars, const std::function<Term(std::size_t, NumVar)>& aux)
{
  SymbolicValue cur = start;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    const Action& a = p.action(prefix[k]);
    cur = advance(a, action_vars.at(k), !eligible_for_rolling(a), cur, [&](NumVar v) { return aux(k, v); });
  }
  return cur;
}

Fragment encode_init(const Problem& p)
{
  Fragment f;
  declare_next_state(f, p, 0);
  const auto X = bool_terms(p, 0);
  const auto Xn = num_terms(p, 0);
  for (std::uint32_t v = 0; v < p.num_bools(); ++v) f.add(Role::Init, p.init.bools[v] ? X[v] : lnot(X[v]));
  for (std::uint32_t v = 0; v < p.num_nums(); ++v) f.add(Role::Init, eq(Xn[v], Term::number(p.init.nums[v])));
  return f;
}

Fragment encode_goal(const Problem& p, std::uint32_t n)
{
  Fragment f;
  const auto X = bool_terms(p, n);
  const auto Xn = num_terms(p, n);
  for (const auto& g : p.goals) {
    f.add(Role::Goal, lift(g, X, Xn));
  }
  return f;
}

void check_options(const Problem& p, const EncodingOptions& options)
{
  for (ActionId a : options.sequence.occurrences())
    if (a.index >= p.actions.size()) throw EncodingError("sequence mentions an unknown action");
  if (options.kind == EncodingKind::R2E &&
      (!options.sequence.is_simple() || !options.sequence.is_complete(p.actions.size())))
    throw EncodingError("the R2E order must list every action exactly once");
}

Fragment encode_step(const Problem& p, const EncodingOptions& options, std::uint32_t step)
{
  switch (options.kind) {
    case EncodingKind::Standard:
    case EncodingKind::Rolled: return rolled_step(p, options, step);
    case EncodingKind::R2E: return r2e_step(p, options, step);
    case EncodingKind::Pattern: return pattern_step(p, options, step);
  }
  throw std::logic_error("bad encoding kind");
}

EncodedBound assemble_bound(const Problem& p, const EncodingOptions& options, std::uint32_t n)
{
  check_options(p, options);
  Fragment all = encode_init(p);
  for (std::uint32_t i = 0; i < n; ++i) all.append(encode_step(p, options, i));
  all.append(encode_goal(p, n));

  EncodedBound b;
  b.kind = options.kind;
  b.bound = n;
  b.sequence = options.sequence;
  b.decls = std::move(all.decls);
  b.auxiliaries = all.auxiliaries;
  for (auto& a : all.assertions) {
    b.assertions.push_back(a.term);
    b.roles.push_back(a.role);
    ++b.role_counts[static_cast<std::size_t>(a.role)];
  }
  return b;
}

std::string EncodedBound::smtlib(const std::optional<std::string>& logic_hint) const
{
  return print_smtlib(decls, assertions, logic_hint);
}

std::string stats_json(const EncodedBound& b)
{
  nlohmann::ordered_json j;
  j["encoding"] = to_string(b.kind);
  j["bound"] = b.bound;
  j["num_vars"] = b.num_vars();
  j["num_assertions"] = b.num_assertions();
  j["auxiliary_vars"] = b.auxiliaries;
  nlohmann::ordered_json roles = nlohmann::ordered_json::object();
  for (std::size_t r = 0; r < kNumRoles; ++r) roles[to_string(static_cast<Role>(r))] = b.role_counts[r];
  j["per_role_counts"] = roles;
  return j.dump();
}

DecodeSoundnessError::DecodeSoundnessError(const std::string& message, Plan plan, ValidationReport report)
    : std::runtime_error(message), plan_(std::move(plan)), report_(std::move(report))
{
}

namespace {

std::uint64_t count_of(const Model& model, const std::string& name)
{
  Rational v = model.number(name);
  if (!is_integer(v) || v < 0) throw std::runtime_error("action variable " + name + " is not a natural number");
  if (!v.get_num().fits_ulong_p()) throw std::runtime_error("action count of " + name + " is too large");
  return v.get_num().get_ui();
}

}  // namespace

Plan extract_plan(const Problem& p, const EncodingOptions& options, std::uint32_t n, const Model& model)
{
  Plan plan;
  for (std::uint32_t i = 0; i < n; ++i) {
    switch (options.kind) {
      case EncodingKind::Standard:
      case EncodingKind::Rolled:
        for (std::uint32_t a = 0; a < p.actions.size(); ++a)
          if (auto k = count_of(model, mangle(ActionVarOrigin{i, a}))) plan.append(ActionId{a}, k);
        break;
      case EncodingKind::R2E:
        for (ActionId a : options.sequence.occurrences())
          if (model.boolean(mangle(ActionVarOrigin{i, a.index}))) plan.append(a, 1);
        break;
      case EncodingKind::Pattern:
        for (std::uint32_t k = 0; k < options.sequence.size(); ++k)
          if (auto c = count_of(model, mangle(ActionVarOrigin{i, k}))) plan.append(options.sequence[k], c);
        break;
    }
  }
  return plan;
}

Plan decode(const Problem& p, const EncodingOptions& options, std::uint32_t n, const Model& model)
{
  Plan plan = extract_plan(p, options, n, model);
  ValidationReport report = validate_plan(p, plan);
  if (!report.valid)
    throw DecodeSoundnessError("decoded " + to_string(options.kind) + " plan at bound " + std::to_string(n) +
                                   " is invalid",
                               plan, report);
  return plan;
}

}  // namespace symplan
