#include "symplan/formula.hpp"

#include <charconv>

namespace symplan {

struct Term::Node {
  Op op = Op::BoolLit;
  Sort sort = Sort::Bool;
  std::string name;
  Rational value = 0;
  bool flag = true;
  std::vector<Term> args;
};

namespace {

Sort join(Sort a, Sort b)
{
  if (a == Sort::Bool || b == Sort::Bool) throw SortError("boolean operand in arithmetic");
  return (a == Sort::Real || b == Sort::Real) ? Sort::Real : Sort::Int;
}

void require_bool(const Term& t)
{
  if (t.sort() != Sort::Bool) throw SortError("numeric operand in a boolean connective");
}

void require_numeric(const Term& t)
{
  if (t.sort() == Sort::Bool) throw SortError("boolean operand in arithmetic");
}

}  // namespace

Term::Term() : Term(boolean(true)) {}

Term Term::var(const std::string& name, Sort sort)
{
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->sort = sort;
  n->name = name;
  return Term(std::move(n));
}

Term Term::number(const Rational& value)
{
  auto n = std::make_shared<Node>();
  n->op = Op::Num;
  n->sort = is_integer(value) ? Sort::Int : Sort::Real;
  n->value = value;
  return Term(std::move(n));
}

Term Term::boolean(bool value)
{
  static const Term t = [] {
    auto n = std::make_shared<Node>();
    n->flag = true;
    return Term(std::shared_ptr<const Node>(std::move(n)));
  }();
  static const Term f = [] {
    auto n = std::make_shared<Node>();
    n->flag = false;
    return Term(std::shared_ptr<const Node>(std::move(n)));
  }();
  return value ? t : f;
}

Term Term::make(Op op, Sort sort, std::vector<Term> args)
{
  auto n = std::make_shared<Node>();
  n->op = op;
  n->sort = sort;
  n->args = std::move(args);
  return Term(std::move(n));
}

Op Term::op() const { return node_->op; }
Sort Term::sort() const { return node_->sort; }
const std::string& Term::name() const { return node_->name; }
const Rational& Term::value() const { return node_->value; }
bool Term::bool_value() const { return node_->flag; }
const std::vector<Term>& Term::args() const { return node_->args; }

Term sum(std::vector<Term> parts)
{
  std::vector<Term> kept;
  Rational constant = 0;
  bool any_constant = false;
  Sort sort = Sort::Int;
  for (auto& t : parts) {
    require_numeric(t);
    sort = join(sort, t.sort());
    if (t.is_numeral()) {
      constant += t.value();
      any_constant = true;
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (any_constant && constant != 0) kept.push_back(Term::number(constant));
  if (kept.empty()) return Term::number(0);
  if (kept.size() == 1) return kept.front();
  return Term::make(Op::Add, sort, std::move(kept));
}

Term operator-(const Term& a, const Term& b)
{
  Sort sort = join(a.sort(), b.sort());
  if (a.is_numeral() && b.is_numeral()) return Term::number(a.value() - b.value());
  if (b.is_numeral(0)) return a;
  if (a.is_numeral(0)) return -b;
  return Term::make(Op::Sub, sort, {a, b});
}

Term operator-(const Term& a)
{
  require_numeric(a);
  if (a.is_numeral()) return Term::number(-a.value());
  if (a.op() == Op::Neg) return a.args().front();
  return Term::make(Op::Neg, a.sort(), {a});
}

Term operator*(const Term& a, const Term& b)
{
  Sort sort = join(a.sort(), b.sort());
  if (a.is_numeral() && b.is_numeral()) return Term::number(a.value() * b.value());
  if (a.is_numeral(0) || b.is_numeral(0)) return Term::number(0);
  if (a.is_numeral(1)) return b;
  if (b.is_numeral(1)) return a;
  if (a.is_numeral(-1)) return -b;
  if (b.is_numeral(-1)) return -a;
  return Term::make(Op::Mul, sort, {a, b});
}

Term ge(const Term& a, const Term& b)
{
  join(a.sort(), b.sort());
  if (a.is_numeral() && b.is_numeral()) return Term::boolean(a.value() >= b.value());
  return Term::make(Op::Ge, Sort::Bool, {a, b});
}

Term gt(const Term& a, const Term& b)
{
  join(a.sort(), b.sort());
  if (a.is_numeral() && b.is_numeral()) return Term::boolean(a.value() > b.value());
  return Term::make(Op::Gt, Sort::Bool, {a, b});
}

Term eq(const Term& a, const Term& b)
{
  join(a.sort(), b.sort());
  if (a.is_numeral() && b.is_numeral()) return Term::boolean(a.value() == b.value());
  return Term::make(Op::Eq, Sort::Bool, {a, b});
}

Term lnot(const Term& a)
{
  require_bool(a);
  if (a.op() == Op::BoolLit) return Term::boolean(!a.bool_value());
  if (a.op() == Op::Not) return a.args().front();
  return Term::make(Op::Not, Sort::Bool, {a});
}

Term land(std::vector<Term> parts)
{
  std::vector<Term> kept;
  for (auto& t : parts) {
    require_bool(t);
    if (t.is_false()) return t;
    if (!t.is_true()) kept.push_back(std::move(t));
  }
  if (kept.empty()) return Term::boolean(true);
  if (kept.size() == 1) return kept.front();
  return Term::make(Op::And, Sort::Bool, std::move(kept));
}

Term lor(std::vector<Term> parts)
{
  std::vector<Term> kept;
  for (auto& t : parts) {
    require_bool(t);
    if (t.is_true()) return t;
    if (!t.is_false()) kept.push_back(std::move(t));
  }
  if (kept.empty()) return Term::boolean(false);
  if (kept.size() == 1) return kept.front();
  return Term::make(Op::Or, Sort::Bool, std::move(kept));
}

Term implies(const Term& a, const Term& b)
{
  require_bool(a);
  require_bool(b);
  if (a.is_true()) return b;
  if (a.is_false() || b.is_true()) return Term::boolean(true);
  if (b.is_false()) return lnot(a);
  return Term::make(Op::Implies, Sort::Bool, {a, b});
}

Term iff(const Term& a, const Term& b)
{
  require_bool(a);
  require_bool(b);
  if (a.op() == Op::BoolLit && b.op() == Op::BoolLit) return Term::boolean(a.bool_value() == b.bool_value());
  return Term::make(Op::Iff, Sort::Bool, {a, b});
}

Term ite(const Term& c, const Term& a, const Term& b)
{
  require_bool(c);
  if (c.is_true()) return a;
  if (c.is_false()) return b;
  Sort sort = a.sort() == Sort::Bool && b.sort() == Sort::Bool ? Sort::Bool : join(a.sort(), b.sort());
  return Term::make(Op::Ite, sort, {c, a, b});
}

bool is_nonlinear(const Term& t)
{
  if (t.op() == Op::Mul && !t.args()[0].is_numeral() && !t.args()[1].is_numeral()) return true;
  for (const auto& a : t.args())
    if (is_nonlinear(a)) return true;
  return false;
}

Value evaluate(const Term& t, const std::function<Value(const std::string&)>& lookup)
{
  auto num = [&](const Term& x) { return std::get<Rational>(evaluate(x, lookup)); };
  auto bit = [&](const Term& x) { return std::get<bool>(evaluate(x, lookup)); };
  const auto& a = t.args();
  switch (t.op()) {
    case Op::Var: return lookup(t.name());
    case Op::Num: return t.value();
    case Op::BoolLit: return t.bool_value();
    case Op::Add: {
      Rational s = 0;
      for (const auto& x : a) s += num(x);
      return s;
    }
    case Op::Sub: return Rational(num(a[0]) - num(a[1]));
    case Op::Neg: return Rational(-num(a[0]));
    case Op::Mul: return Rational(num(a[0]) * num(a[1]));
    case Op::Ge: return num(a[0]) >= num(a[1]);
    case Op::Gt: return num(a[0]) > num(a[1]);
    case Op::Eq: return num(a[0]) == num(a[1]);
    case Op::Not: return !bit(a[0]);
    case Op::And:
      for (const auto& x : a)
        if (!bit(x)) return false;
      return true;
    case Op::Or:
      for (const auto& x : a)
        if (bit(x)) return true;
      return false;
    case Op::Implies: return !bit(a[0]) || bit(a[1]);
    case Op::Iff: return bit(a[0]) == bit(a[1]);
    case Op::Ite: return bit(a[0]) ? evaluate(a[1], lookup) : evaluate(a[2], lookup);
  }
  throw std::logic_error("unreachable term kind");
}

std::string mangle(const VarOrigin& origin)
{
  auto tag = [](bool numeric) { return numeric ? "n" : "b"; };
  return std::visit(
      [&](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        const std::string step = std::to_string(o.step);
        if constexpr (std::is_same_v<T, StateVarOrigin>)
          return "s_" + step + "_" + tag(o.numeric) + std::to_string(o.index);
        else if constexpr (std::is_same_v<T, ActionVarOrigin>)
          return "a_" + step + "_" + std::to_string(o.position);
        else if constexpr (std::is_same_v<T, AuxVarOrigin>)
          return "h_" + step + "_" + std::to_string(o.position) + "_n" + std::to_string(o.index);
        else
          return "c_" + step + "_" + std::to_string(o.action) + "_" + tag(o.numeric) + std::to_string(o.index);
      },
      origin);
}

namespace {

// Splits "x_1_2_n3" at '_' and checks that every piece is non-empty.
std::vector<std::string> pieces(const std::string& name)
{
  std::vector<std::string> out(1);
  for (char c : name) {
    if (c == '_') out.emplace_back();
    else out.back() += c;
  }
  return out;
}

std::optional<std::uint32_t> number_piece(const std::string& s)
{
  if (s.empty() || (s.size() > 1 && s[0] == '0')) return std::nullopt;
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// "n3" / "b3"
std::optional<std::pair<bool, std::uint32_t>> var_piece(const std::string& s, bool allow_bool = true)
{
  if (s.size() < 2 || (s[0] != 'n' && !(allow_bool && s[0] == 'b'))) return std::nullopt;
  auto idx = number_piece(s.substr(1));
  if (!idx) return std::nullopt;
  return std::pair{s[0] == 'n', *idx};
}

}  // namespace

std::optional<VarOrigin> demangle(const std::string& name)
{
  auto p = pieces(name);
  if (p.size() < 3 || p[0].size() != 1) return std::nullopt;
  auto step = number_piece(p[1]);
  if (!step) return std::nullopt;
  switch (p[0][0]) {
    case 's': {
      auto v = var_piece(p[2]);
      if (p.size() != 3 || !v) return std::nullopt;
      return StateVarOrigin{*step, v->first, v->second};
    }
    case 'a': {
      auto pos = number_piece(p[2]);
      if (p.size() != 3 || !pos) return std::nullopt;
      return ActionVarOrigin{*step, *pos};
    }
    case 'h': {
      if (p.size() != 4) return std::nullopt;
      auto pos = number_piece(p[2]);
      auto v = var_piece(p[3], false);
      if (!pos || !v) return std::nullopt;
      return AuxVarOrigin{*step, *pos, v->second};
    }
    case 'c': {
      if (p.size() != 4) return std::nullopt;
      auto act = number_piece(p[2]);
      auto v = var_piece(p[3]);
      if (!act || !v) return std::nullopt;
      return ChainVarOrigin{*step, *act, v->first, v->second};
    }
    default: return std::nullopt;
  }
}

VarDecl make_decl(const VarOrigin& origin, Sort sort, std::string comment)
{
  return VarDecl{mangle(origin), sort, origin, std::move(comment)};
}

}  // namespace symplan
