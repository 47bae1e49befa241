#include "symplan/formula.hpp"
#include "symplan/sexpr.hpp"

#include <set>

namespace symplan {

std::string choose_logic(const std::vector<VarDecl>& decls, const std::vector<Term>& assertions)
{
  bool ints = false;
  bool reals = false;
  for (const auto& d : decls) {
    ints = ints || d.sort == Sort::Int;
    reals = reals || d.sort == Sort::Real;
  }
  bool nonlinear = false;
  for (const auto& a : assertions)
    if (is_nonlinear(a)) {
      nonlinear = true;
      break;
    }
  std::string arith = ints ? (reals ? "IRA" : "IA") : "RA";
  return std::string("QF_") + (nonlinear ? "N" : "L") + arith;
}

SmtPrinter::SmtPrinter(std::string logic) : logic_(std::move(logic))
{
  // In the pure real logics numerals denote reals; elsewhere reals need a decimal point.
  numerals_are_real_ = logic_.find('I', 3) == std::string::npos;
}

std::string SmtPrinter::header() const
{
  return "(set-option :produce-models true)\n(set-logic " + logic_ + ")\n";
}

namespace {

const char* sort_name(Sort s)
{
  switch (s) {
    case Sort::Bool: return "Bool";
    case Sort::Int: return "Int";
    case Sort::Real: return "Real";
  }
  return "?";
}

}  // namespace

std::string SmtPrinter::declaration(const VarDecl& d) const
{
  std::string out = "(declare-fun " + d.name + " () " + sort_name(d.sort) + ")";
  if (!d.comment.empty()) out += " ; " + d.comment;
  return out + "\n";
}

std::string SmtPrinter::assertion(const Term& t) const
{
  std::string out = "(assert ";
  print(out, t, Sort::Bool);
  return out + ")\n";
}

std::string SmtPrinter::term(const Term& t) const
{
  std::string out;
  print(out, t, t.sort());
  return out;
}

void SmtPrinter::numeral(std::string& out, const Rational& v, Sort want) const
{
  const bool real = want == Sort::Real && !numerals_are_real_;
  auto digits = [&](const mpz_class& z) {
    std::string s = z.get_str();
    return real ? s + ".0" : s;
  };
  const bool negative = v < 0;
  Rational mag = abs(v);
  std::string body = is_integer(mag) ? digits(mag.get_num())
                                     : "(/ " + digits(mag.get_num()) + " " + digits(mag.get_den()) + ")";
  out += negative ? "(- " + body + ")" : body;
}

void SmtPrinter::print(std::string& out, const Term& t, Sort want) const
{
  const auto& a = t.args();
  auto nary = [&](const char* head, Sort arg_sort) {
    out += "(";
    out += head;
    for (const auto& x : a) {
      out += ' ';
      print(out, x, arg_sort);
    }
    out += ')';
  };
  auto numeric_sort = [&](const Term& x, const Term& y) {
    return (x.sort() == Sort::Real || y.sort() == Sort::Real) ? Sort::Real : Sort::Int;
  };
  switch (t.op()) {
    case Op::Var:
      if (t.sort() == Sort::Int && want == Sort::Real) out += "(to_real " + t.name() + ")";
      else out += t.name();
      return;
    case Op::Num: numeral(out, t.value(), want == Sort::Bool ? t.sort() : want); return;
    case Op::BoolLit: out += t.bool_value() ? "true" : "false"; return;
    case Op::Add:
    case Op::Sub:
    case Op::Neg:
    case Op::Mul:
    case Op::Ite:
      if (t.sort() == Sort::Int && want == Sort::Real) {
        out += "(to_real ";
        print(out, t, Sort::Int);
        out += ')';
        return;
      }
      break;
    default: break;
  }
  switch (t.op()) {
    case Op::Add: nary("+", t.sort()); return;
    case Op::Sub: nary("-", t.sort()); return;
    case Op::Neg: nary("-", t.sort()); return;
    case Op::Mul: nary("*", t.sort()); return;
    case Op::Ge: nary(">=", numeric_sort(a[0], a[1])); return;
    case Op::Gt: nary(">", numeric_sort(a[0], a[1])); return;
    case Op::Eq: nary("=", numeric_sort(a[0], a[1])); return;
    case Op::Not: nary("not", Sort::Bool); return;
    case Op::And: nary("and", Sort::Bool); return;
    case Op::Or: nary("or", Sort::Bool); return;
    case Op::Implies: nary("=>", Sort::Bool); return;
    case Op::Iff: nary("=", Sort::Bool); return;
    case Op::Ite:
      out += "(ite ";
      print(out, a[0], Sort::Bool);
      out += ' ';
      print(out, a[1], t.sort());
      out += ' ';
      print(out, a[2], t.sort());
      out += ')';
      return;
    default: throw std::logic_error("unprintable term");
  }
}

std::string print_smtlib(const std::vector<VarDecl>& decls, const std::vector<Term>& assertions,
                         const std::optional<std::string>& logic)
{
  SmtPrinter printer(logic ? *logic : choose_logic(decls, assertions));
  std::string out = printer.header();
  std::set<std::string> seen;
  for (const auto& d : decls) {
    if (!seen.insert(d.name).second) throw std::logic_error("duplicate SMT symbol " + d.name);
    out += printer.declaration(d);
  }
  for (const auto& t : assertions) out += printer.assertion(t);
  out += "(check-sat)\n(get-model)\n";
  return out;
}

SolverProtocolError::SolverProtocolError(const std::string& message, std::string raw)
    : std::runtime_error(message), raw_(std::move(raw))
{
}

bool Model::boolean(const std::string& name) const
{
  auto it = values.find(name);
  if (it == values.end()) return false;
  if (auto* b = std::get_if<bool>(&it->second)) return *b;
  throw std::logic_error("model value of " + name + " is not Boolean");
}

Rational Model::number(const std::string& name) const
{
  auto it = values.find(name);
  if (it == values.end()) return 0;
  if (auto* r = std::get_if<Rational>(&it->second)) return *r;
  throw std::logic_error("model value of " + name + " is not numeric");
}

namespace {

std::optional<Rational> value_of(const SExpr& e)
{
  if (e.is_atom()) return parse_rational(e.atom);
  if (e.size() == 2 && e[0].is_atom("-")) {
    auto v = value_of(e[1]);
    if (v) *v = -*v;
    return v;
  }
  if (e.size() == 2 && e[0].is_atom("to_real")) return value_of(e[1]);
  if (e.size() == 3 && e[0].is_atom("/")) {
    auto p = value_of(e[1]);
    auto q = value_of(e[2]);
    if (!p || !q || *q == 0) return std::nullopt;
    return Rational(*p / *q);
  }
  return std::nullopt;
}

}  // namespace

std::optional<Rational> parse_value_text(const std::string& text)
{
  try {
    auto exprs = parse_sexprs(text);
    if (exprs.size() != 1) return std::nullopt;
    return value_of(exprs.front());
  } catch (const SyntaxError&) {
    return std::nullopt;
  }
}

SolverAnswer parse_model(const std::string& output, const std::vector<VarDecl>& decls)
{
  std::vector<SExpr> exprs;
  try {
    exprs = parse_sexprs(output);
  } catch (const SyntaxError& e) {
    throw SolverProtocolError(std::string("unreadable solver output: ") + e.what(), output);
  }
  if (exprs.empty() || !exprs.front().is_atom())
    throw SolverProtocolError("solver output does not start with a verdict", output);

  SolverAnswer answer;
  const std::string& verdict = exprs.front().atom;
  if (verdict == "unsat") {
    answer.verdict = Verdict::Unsat;
    return answer;
  }
  if (verdict == "unknown") {
    answer.verdict = Verdict::Unknown;
    return answer;
  }
  if (verdict != "sat") throw SolverProtocolError("unexpected verdict '" + verdict + "'", output);
  answer.verdict = Verdict::Sat;

  std::map<std::string, Sort> declared;
  for (const auto& d : decls) declared.emplace(d.name, d.sort);

  if (exprs.size() < 2 || !exprs[1].is_list)
    throw SolverProtocolError("sat verdict without a model", output);
  const SExpr& model = exprs[1];
  std::size_t first = model.size() > 0 && model[0].is_atom("model") ? 1 : 0;
  if (model.size() > 0 && model[0].is_atom("error"))
    throw SolverProtocolError("solver error: " + model.str(), output);
  for (std::size_t i = first; i < model.size(); ++i) {
    const SExpr& def = model[i];
    if (!def.is_list || def.size() != 5 || !def[0].is_atom("define-fun") || !def[1].is_atom())
      throw SolverProtocolError("unexpected model entry " + def.str(), output);
    // solver-internal helpers carry parameters or unknown names
    if (!def[2].is_list || def[2].size() != 0) continue;
    auto it = declared.find(def[1].atom);
    if (it == declared.end()) continue;
    const SExpr& body = def[4];
    if (it->second == Sort::Bool) {
      if (!body.is_atom("true") && !body.is_atom("false"))
        throw SolverProtocolError("non-Boolean value for " + it->first, output);
      answer.model.values[it->first] = body.atom == "true";
    } else {
      auto v = value_of(body);
      if (!v) throw SolverProtocolError("cannot read value of " + it->first + ": " + body.str(), output);
      if (it->second == Sort::Int && !is_integer(*v))
        throw SolverProtocolError("fractional value for integer " + it->first, output);
      answer.model.values[it->first] = *v;
    }
  }
  for (const auto& d : decls) {
    if (answer.model.values.contains(d.name)) continue;
    answer.model.defaulted.push_back(d.name);
    if (d.sort == Sort::Bool) answer.model.values[d.name] = false;
    else answer.model.values[d.name] = Rational(0);
  }
  return answer;
}

}  // namespace symplan
