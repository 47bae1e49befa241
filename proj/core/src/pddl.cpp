#include "symplan/pddl.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace symplan::pddl {

namespace {

const std::set<std::string> kSupportedRequirements = {
    ":strips", ":typing", ":fluents", ":numeric-fluents", ":negative-preconditions", ":equality"};

[[noreturn]] void fail(const SExpr& at, const std::string& message)
{
  throw SyntaxError(message, at.line, at.column);
}

const std::string& atom_of(const SExpr& e, const char* what)
{
  if (!e.is_atom()) fail(e, std::string("expected ") + what);
  return e.atom;
}

bool is_number(const std::string& s)
{
  return parse_rational(s).has_value();
}

bool is_variable(const std::string& s) { return !s.empty() && s.front() == '?'; }

// name* [- type name*]*
std::vector<TypedName> parse_typed_list(const SExpr& list, std::size_t from, const std::string& default_type)
{
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = from; i < list.size(); ++i) {
    const SExpr& item = list[i];
    if (item.is_atom("-")) {
      if (i + 1 >= list.size()) fail(item, "missing type after '-'");
      const SExpr& type = list[i + 1];
      if (type.is_list) throw UnsupportedFeature("'either' types are not supported");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = type.atom;
      pending = 0;
      ++i;
      continue;
    }
    out.push_back({atom_of(item, "name"), default_type});
    ++pending;
  }
  return out;
}

std::vector<std::string> atom_args(const SExpr& list, std::size_t from)
{
  std::vector<std::string> out;
  for (std::size_t i = from; i < list.size(); ++i) out.push_back(atom_of(list[i], "argument"));
  return out;
}

// With no function table (problem files), every non-operator list in a
// numeric position is read as a fluent and checked later by the grounder.
class DomainReader {
 public:
  explicit DomainReader(const std::vector<Signature>* functions) : functions_(functions) {}

  bool is_function(const std::string& name) const
  {
    if (!functions_) return false;
    return std::any_of(functions_->begin(), functions_->end(),
                       [&](const Signature& s) { return s.name == name; });
  }

  NumTerm term(const SExpr& e) const
  {
    NumTerm t;
    if (e.is_atom()) {
      if (auto v = parse_rational(e.atom)) {
        t.kind = NumTerm::Kind::Number;
        t.value = *v;
        return t;
      }
      if (is_function(e.atom)) {
        t.kind = NumTerm::Kind::Fluent;
        t.name = e.atom;
        return t;
      }
      fail(e, "expected numeric expression, got '" + e.atom + "'");
    }
    if (e.size() == 0) fail(e, "empty numeric expression");
    const std::string& head = atom_of(e[0], "operator");
    if (head == "+" || head == "*" || head == "/" || head == "-") {
      if (e.size() < 2) fail(e, "operator '" + head + "' needs operands");
      if (head == "-" && e.size() == 2) {
        t.kind = NumTerm::Kind::Neg;
        t.children.push_back(term(e[1]));
        return t;
      }
      if ((head == "-" || head == "/") && e.size() != 3) fail(e, "operator '" + head + "' is binary");
      t.kind = head == "+" ? NumTerm::Kind::Add
             : head == "*" ? NumTerm::Kind::Mul
             : head == "/" ? NumTerm::Kind::Div
                           : NumTerm::Kind::Sub;
      for (std::size_t i = 1; i < e.size(); ++i) t.children.push_back(term(e[i]));
      return t;
    }
    if (functions_ && !is_function(head)) fail(e, "unknown function '" + head + "'");
    t.kind = NumTerm::Kind::Fluent;
    t.name = head;
    t.args = atom_args(e, 1);
    return t;
  }

  Formula formula(const SExpr& e) const
  {
    Formula f;
    if (!e.is_list) fail(e, "expected formula");
    if (e.size() == 0) {
      f.kind = Formula::Kind::And;
      return f;
    }
    const std::string& head = atom_of(e[0], "formula head");
    if (head == "and" || head == "or") {
      f.kind = head == "and" ? Formula::Kind::And : Formula::Kind::Or;
      for (std::size_t i = 1; i < e.size(); ++i) f.children.push_back(formula(e[i]));
      return f;
    }
    if (head == "not") {
      if (e.size() != 2) fail(e, "'not' takes one operand");
      f.kind = Formula::Kind::Not;
      f.children.push_back(formula(e[1]));
      return f;
    }
    if (head == "imply") {
      if (e.size() != 3) fail(e, "'imply' takes two operands");
      f.kind = Formula::Kind::Imply;
      f.children.push_back(formula(e[1]));
      f.children.push_back(formula(e[2]));
      return f;
    }
    if (head == "exists" || head == "forall")
      throw UnsupportedFeature("quantified formulas are not supported");
    static const std::map<std::string, Relation> relations = {
        {"<", Relation::Lt}, {"<=", Relation::Le}, {"=", Relation::Eq},
        {">=", Relation::Ge}, {">", Relation::Gt}};
    if (auto it = relations.find(head); it != relations.end()) {
      if (e.size() != 3) fail(e, "comparison takes two operands");
      if (head == "=" && e[1].is_atom() && e[2].is_atom() && !is_number(e[1].atom) &&
          !is_number(e[2].atom) && !is_function(e[1].atom) && !is_function(e[2].atom)) {
        f.kind = Formula::Kind::ObjectEq;
        f.args = {e[1].atom, e[2].atom};
        return f;
      }
      f.kind = Formula::Kind::Compare;
      f.rel = it->second;
      f.terms.push_back(term(e[1]));
      f.terms.push_back(term(e[2]));
      return f;
    }
    f.kind = Formula::Kind::Atom;
    f.name = head;
    f.args = atom_args(e, 1);
    return f;
  }

  void effects(const SExpr& e, std::vector<EffectSpec>& out) const
  {
    if (!e.is_list) fail(e, "expected effect");
    if (e.size() == 0) return;
    const std::string& head = atom_of(e[0], "effect head");
    if (head == "and") {
      for (std::size_t i = 1; i < e.size(); ++i) effects(e[i], out);
      return;
    }
    if (head == "forall" || head == "when")
      throw UnsupportedFeature("conditional and quantified effects are not supported");
    if (head == "scale-up" || head == "scale-down")
      throw UnsupportedFeature("'" + head + "' effects are not supported");
    EffectSpec spec;
    if (head == "not") {
      if (e.size() != 2 || !e[1].is_list || e[1].size() == 0) fail(e, "malformed delete effect");
      spec.kind = EffectSpec::Kind::Delete;
      spec.name = atom_of(e[1][0], "predicate");
      spec.args = atom_args(e[1], 1);
      out.push_back(std::move(spec));
      return;
    }
    if (head == "increase" || head == "decrease" || head == "assign") {
      if (e.size() != 3) fail(e, "'" + head + "' takes a fluent and a value");
      spec.kind = head == "increase" ? EffectSpec::Kind::Increase
                : head == "decrease" ? EffectSpec::Kind::Decrease
                                     : EffectSpec::Kind::Assign;
      NumTerm target = term(e[1]);
      if (target.kind != NumTerm::Kind::Fluent) fail(e[1], "effect target must be a fluent");
      spec.name = target.name;
      spec.args = target.args;
      spec.value = term(e[2]);
      out.push_back(std::move(spec));
      return;
    }
    spec.kind = EffectSpec::Kind::Add;
    spec.name = head;
    spec.args = atom_args(e, 1);
    out.push_back(std::move(spec));
  }

  ActionSchema action(const SExpr& e) const
  {
    ActionSchema a;
    if (e.size() < 2) fail(e, "malformed action");
    a.name = atom_of(e[1], "action name");
    for (std::size_t i = 2; i < e.size(); i += 2) {
      const std::string& key = atom_of(e[i], "action keyword");
      if (i + 1 >= e.size()) fail(e[i], "missing value for " + key);
      const SExpr& value = e[i + 1];
      if (key == ":parameters") {
        if (!value.is_list) fail(value, "expected parameter list");
        a.params = parse_typed_list(value, 0, "object");
      } else if (key == ":precondition") {
        a.precondition = formula(value);
      } else if (key == ":effect") {
        effects(value, a.effects);
      } else {
        fail(e[i], "unknown action keyword " + key);
      }
    }
    return a;
  }

 private:
  const std::vector<Signature>* functions_;
};

Signature parse_signature(const SExpr& e)
{
  if (!e.is_list || e.size() == 0) fail(e, "expected (name params...)");
  Signature s;
  s.name = atom_of(e[0], "name");
  s.params = parse_typed_list(e, 1, "object");
  return s;
}

}  // namespace

bool LiftedDomain::has_typing() const
{
  return std::find(requirements.begin(), requirements.end(), ":typing") != requirements.end();
}

LiftedDomain parse_domain(std::string_view text)
{
  auto top = parse_sexprs(text, {.comment = ';', .lowercase = true});
  if (top.size() != 1 || !top[0].is_list || top[0].size() < 2 || !top[0][0].is_atom("define"))
    throw SyntaxError("expected (define (domain ...) ...)", 1, 1);
  const SExpr& def = top[0];
  LiftedDomain d;
  if (!def[1].is_list || def[1].size() != 2 || !def[1][0].is_atom("domain"))
    fail(def[1], "expected (domain <name>)");
  d.name = atom_of(def[1][1], "domain name");
  DomainReader reader(&d.functions);

  for (std::size_t i = 2; i < def.size(); ++i) {
    const SExpr& section = def[i];
    if (!section.is_list || section.size() == 0) fail(section, "expected domain section");
    const std::string& key = atom_of(section[0], "section keyword");
    if (key == ":requirements") {
      for (std::size_t k = 1; k < section.size(); ++k) {
        const std::string& req = atom_of(section[k], "requirement");
        if (!kSupportedRequirements.contains(req))
          throw UnsupportedFeature("unsupported requirement " + req);
        d.requirements.push_back(req);
      }
    } else if (key == ":types") {
      d.types = parse_typed_list(section, 1, "object");
    } else if (key == ":constants") {
      d.constants = parse_typed_list(section, 1, "object");
    } else if (key == ":predicates") {
      for (std::size_t k = 1; k < section.size(); ++k) d.predicates.push_back(parse_signature(section[k]));
    } else if (key == ":functions") {
      for (std::size_t k = 1; k < section.size(); ++k) {
        if (section[k].is_atom("-")) {
          if (k + 1 >= section.size() || !section[k + 1].is_atom("number"))
            throw UnsupportedFeature("only numeric functions are supported");
          ++k;
          continue;
        }
        d.functions.push_back(parse_signature(section[k]));
      }
    } else if (key == ":action") {
      d.actions.push_back(reader.action(section));
    } else if (key == ":durative-action" || key == ":derived" || key == ":process" ||
               key == ":event" || key == ":constraints") {
      throw UnsupportedFeature("unsupported domain section " + key);
    } else {
      fail(section, "unknown domain section " + key);
    }
  }
  return d;
}

LiftedProblem parse_problem(std::string_view text)
{
  auto top = parse_sexprs(text, {.comment = ';', .lowercase = true});
  if (top.size() != 1 || !top[0].is_list || top[0].size() < 2 || !top[0][0].is_atom("define"))
    throw SyntaxError("expected (define (problem ...) ...)", 1, 1);
  const SExpr& def = top[0];
  LiftedProblem p;
  if (!def[1].is_list || def[1].size() != 2 || !def[1][0].is_atom("problem"))
    fail(def[1], "expected (problem <name>)");
  p.name = atom_of(def[1][1], "problem name");

  for (std::size_t i = 2; i < def.size(); ++i) {
    const SExpr& section = def[i];
    if (!section.is_list || section.size() == 0) fail(section, "expected problem section");
    const std::string& key = atom_of(section[0], "section keyword");
    if (key == ":domain") {
      p.domain_name = atom_of(section.size() > 1 ? section[1] : section[0], "domain name");
    } else if (key == ":objects") {
      p.objects = parse_typed_list(section, 1, "object");
    } else if (key == ":init") {
      for (std::size_t k = 1; k < section.size(); ++k) {
        const SExpr& fact = section[k];
        if (!fact.is_list || fact.size() == 0) fail(fact, "expected init fact");
        if (fact[0].is_atom("=")) {
          if (fact.size() != 3 || !fact[1].is_list || fact[1].size() == 0 || !fact[2].is_atom())
            fail(fact, "expected (= (fluent args) number)");
          auto value = parse_rational(fact[2].atom);
          if (!value) fail(fact[2], "expected number");
          p.init_fluents.push_back({atom_of(fact[1][0], "function"), atom_args(fact[1], 1), *value});
        } else if (fact[0].is_atom("not")) {
          continue;  // closed world
        } else {
          p.init_atoms.emplace_back(atom_of(fact[0], "predicate"), atom_args(fact, 1));
        }
      }
    } else if (key == ":goal") {
      if (section.size() != 2) fail(section, "expected one goal formula");
      p.goal = DomainReader(nullptr).formula(section[1]);
    } else if (key == ":metric") {
      continue;  // optimization criteria are ignored
    } else if (key == ":constraints") {
      throw UnsupportedFeature("problem constraints are not supported");
    } else {
      fail(section, "unknown problem section " + key);
    }
  }
  return p;
}

namespace {

std::string print_typed(const std::vector<TypedName>& list, bool typed)
{
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ' ';
    out += list[i].name;
    if (typed && (i + 1 == list.size() || list[i + 1].type != list[i].type))
      out += " - " + list[i].type;
  }
  return out;
}

std::string print_term(const NumTerm& t)
{
  switch (t.kind) {
    case NumTerm::Kind::Number: {
      if (is_integer(t.value)) return to_string(t.value);
      return "(/ " + t.value.get_num().get_str() + " " + t.value.get_den().get_str() + ")";
    }
    case NumTerm::Kind::Fluent: {
      std::string out = "(" + t.name;
      for (const auto& a : t.args) out += " " + a;
      return out + ")";
    }
    case NumTerm::Kind::Neg: return "(- " + print_term(t.children[0]) + ")";
    default: break;
  }
  const char* op = t.kind == NumTerm::Kind::Add ? "+"
                 : t.kind == NumTerm::Kind::Sub ? "-"
                 : t.kind == NumTerm::Kind::Mul ? "*"
                                                : "/";
  std::string out = std::string("(") + op;
  for (const auto& c : t.children) out += " " + print_term(c);
  return out + ")";
}

std::string print_formula(const Formula& f)
{
  auto join_args = [](const std::string& head, const std::vector<std::string>& args) {
    std::string out = "(" + head;
    for (const auto& a : args) out += " " + a;
    return out + ")";
  };
  switch (f.kind) {
    case Formula::Kind::Atom: return join_args(f.name, f.args);
    case Formula::Kind::ObjectEq: return join_args("=", f.args);
    case Formula::Kind::Compare: {
      static const char* names[] = {"<", "<=", "=", ">=", ">"};
      return std::string("(") + names[static_cast<int>(f.rel)] + " " + print_term(f.terms[0]) + " " +
             print_term(f.terms[1]) + ")";
    }
    default: break;
  }
  std::string head = f.kind == Formula::Kind::And ? "and"
                   : f.kind == Formula::Kind::Or  ? "or"
                   : f.kind == Formula::Kind::Not ? "not"
                                                  : "imply";
  std::string out = "(" + head;
  for (const auto& c : f.children) out += " " + print_formula(c);
  return out + ")";
}

std::string print_effect(const EffectSpec& e)
{
  auto atom = [&] {
    std::string out = "(" + e.name;
    for (const auto& a : e.args) out += " " + a;
    return out + ")";
  };
  switch (e.kind) {
    case EffectSpec::Kind::Add: return atom();
    case EffectSpec::Kind::Delete: return "(not " + atom() + ")";
    case EffectSpec::Kind::Assign: return "(assign " + atom() + " " + print_term(e.value) + ")";
    case EffectSpec::Kind::Increase: return "(increase " + atom() + " " + print_term(e.value) + ")";
    case EffectSpec::Kind::Decrease: return "(decrease " + atom() + " " + print_term(e.value) + ")";
  }
  return {};
}

}  // namespace

std::string print_domain(const LiftedDomain& d)
{
  const bool typed = d.has_typing();
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& r : d.requirements) out << ' ' << r;
    out << ")\n";
  }
  if (!d.types.empty()) out << "  (:types " << print_typed(d.types, true) << ")\n";
  if (!d.constants.empty()) out << "  (:constants " << print_typed(d.constants, typed) << ")\n";
  auto signatures = [&](const char* key, const std::vector<Signature>& list, bool numeric) {
    if (list.empty()) return;
    out << "  (" << key;
    for (const auto& s : list) {
      out << "\n    (" << s.name;
      if (!s.params.empty()) out << ' ' << print_typed(s.params, typed);
      out << ')';
      if (numeric) out << " - number";
    }
    out << ")\n";
  };
  signatures(":predicates", d.predicates, false);
  signatures(":functions", d.functions, true);
  for (const auto& a : d.actions) {
    out << "  (:action " << a.name << "\n    :parameters (" << print_typed(a.params, typed) << ")\n";
    if (a.precondition) out << "    :precondition " << print_formula(*a.precondition) << "\n";
    out << "    :effect (and";
    for (const auto& e : a.effects) out << ' ' << print_effect(e);
    out << "))\n";
  }
  out << ")\n";
  return out.str();
}

std::string ground_name(const std::string& name, const std::vector<std::string>& args)
{
  if (args.empty()) return name;
  std::string out = "(" + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

struct GroundAtomRef {
  std::string key;
  std::size_t decl = 0;                 // predicate/function declaration index
  std::vector<std::size_t> arg_order;   // object indices, for stable ordering
};

// Formula over ground atoms, before variables are interned.
struct GFormula {
  enum class Kind { True, False, And, Or, Not, Atom, Compare };
  Kind kind = Kind::True;
  std::string atom;
  Relation rel = Relation::Eq;
  std::vector<NumTerm> terms;  // fluent args already substituted
  std::vector<GFormula> children;
};

struct GEffect {
  EffectSpec::Kind kind;
  std::string target;
  NumTerm value;
};

struct GAction {
  std::string name;
  GFormula pre;
  std::vector<GEffect> effects;
  bool pruned = false;
};

class Grounder {
 public:
  Grounder(const LiftedDomain& d, const LiftedProblem& p) : d_(d), p_(p) {}

  GroundResult run()
  {
    collect_objects();
    collect_init();
    instantiate_actions();
    GFormula goal = ground_goal();
    fold_statics(goal);
    return lower(goal);
  }

 private:
  const LiftedDomain& d_;
  const LiftedProblem& p_;

  std::vector<std::string> object_names_;
  std::map<std::string, std::string> object_type_;
  std::map<std::string, std::size_t> object_index_;
  std::map<std::string, std::string> type_parent_;
  GroundingTable table_;

  std::set<std::string> init_true_;
  std::map<std::string, Rational> init_values_;
  std::map<std::string, GroundAtomRef> atom_refs_;
  std::map<std::string, GroundAtomRef> fluent_refs_;
  std::vector<GAction> actions_;
  std::set<std::string> affected_atoms_;
  std::set<std::string> affected_fluents_;

  bool is_subtype(std::string type, const std::string& ancestor) const
  {
    for (std::size_t guard = 0; guard <= type_parent_.size() + 1; ++guard) {
      if (type == ancestor) return true;
      auto it = type_parent_.find(type);
      if (it == type_parent_.end()) return false;
      type = it->second;
    }
    return false;
  }

  bool known_type(const std::string& type) const
  {
    return type == "object" || type_parent_.contains(type);
  }

  void collect_objects()
  {
    for (const auto& t : d_.types) type_parent_[t.name] = t.type;
    auto add = [&](const TypedName& o) {
      if (d_.has_typing() && !known_type(o.type))
        throw UntypedObject("object '" + o.name + "' has undeclared type '" + o.type + "'");
      if (object_type_.contains(o.name)) return;
      object_index_[o.name] = object_names_.size();
      object_names_.push_back(o.name);
      object_type_[o.name] = o.type;
    };
    for (const auto& c : d_.constants) add(c);
    for (const auto& o : p_.objects) add(o);

    std::set<std::string> all_types = {"object"};
    for (const auto& t : d_.types) all_types.insert(t.name);
    for (const auto& type : all_types) {
      auto& bucket = table_.objects_by_type[type];
      for (const auto& o : object_names_)
        if (is_subtype(object_type_[o], type)) bucket.push_back(o);
    }
  }

  std::size_t predicate_index(const std::string& name, std::size_t arity, bool numeric) const
  {
    const auto& list = numeric ? d_.functions : d_.predicates;
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i].name == name) {
        if (list[i].params.size() != arity)
          throw GroundingError("'" + name + "' used with " + std::to_string(arity) +
                               " arguments, declared with " + std::to_string(list[i].params.size()));
        return i;
      }
    throw GroundingError(std::string(numeric ? "undeclared function '" : "undeclared predicate '") +
                         name + "'");
  }

  std::string intern(const std::string& name, const std::vector<std::string>& args, bool numeric)
  {
    std::size_t decl = predicate_index(name, args.size(), numeric);
    std::string key = ground_name(name, args);
    auto& refs = numeric ? fluent_refs_ : atom_refs_;
    if (!refs.contains(key)) {
      GroundAtomRef ref{key, decl, {}};
      for (const auto& a : args) {
        auto it = object_index_.find(a);
        if (it == object_index_.end()) throw UntypedObject("unknown object '" + a + "'");
        ref.arg_order.push_back(it->second);
      }
      refs.emplace(key, std::move(ref));
    }
    return key;
  }

  void collect_init()
  {
    for (const auto& [name, args] : p_.init_atoms) init_true_.insert(intern(name, args, false));
    for (const auto& f : p_.init_fluents) init_values_[intern(f.name, f.args, true)] = f.value;
  }

  using Binding = std::map<std::string, std::string>;

  std::string resolve(const std::string& arg, const Binding& b) const
  {
    if (is_variable(arg)) {
      auto it = b.find(arg);
      if (it == b.end()) throw GroundingError("unbound parameter '" + arg + "'");
      return it->second;
    }
    if (!object_type_.contains(arg)) throw UntypedObject("unknown object '" + arg + "'");
    return arg;
  }

  std::vector<std::string> resolve_all(const std::vector<std::string>& args, const Binding& b) const
  {
    std::vector<std::string> out;
    for (const auto& a : args) out.push_back(resolve(a, b));
    return out;
  }

  NumTerm substitute(const NumTerm& t, const Binding& b)
  {
    NumTerm out = t;
    if (t.kind == NumTerm::Kind::Fluent) {
      out.args = resolve_all(t.args, b);
      out.name = intern(t.name, out.args, true);
      out.args.clear();
    }
    out.children.clear();
    for (const auto& c : t.children) out.children.push_back(substitute(c, b));
    return out;
  }

  GFormula ground_formula(const Formula& f, const Binding& b)
  {
    GFormula g;
    switch (f.kind) {
      case Formula::Kind::And:
      case Formula::Kind::Or:
        g.kind = f.kind == Formula::Kind::And ? GFormula::Kind::And : GFormula::Kind::Or;
        for (const auto& c : f.children) g.children.push_back(ground_formula(c, b));
        return g;
      case Formula::Kind::Not:
        g.kind = GFormula::Kind::Not;
        g.children.push_back(ground_formula(f.children[0], b));
        return g;
      case Formula::Kind::Imply: {
        g.kind = GFormula::Kind::Or;
        GFormula neg;
        neg.kind = GFormula::Kind::Not;
        neg.children.push_back(ground_formula(f.children[0], b));
        g.children.push_back(std::move(neg));
        g.children.push_back(ground_formula(f.children[1], b));
        return g;
      }
      case Formula::Kind::ObjectEq:
        g.kind = resolve(f.args[0], b) == resolve(f.args[1], b) ? GFormula::Kind::True
                                                                : GFormula::Kind::False;
        return g;
      case Formula::Kind::Atom:
        g.kind = GFormula::Kind::Atom;
        g.atom = intern(f.name, resolve_all(f.args, b), false);
        return g;
      case Formula::Kind::Compare:
        g.kind = GFormula::Kind::Compare;
        g.rel = f.rel;
        for (const auto& t : f.terms) g.terms.push_back(substitute(t, b));
        return g;
    }
    return g;
  }

  void instantiate_actions()
  {
    for (const auto& schema : d_.actions) {
      std::vector<const std::vector<std::string>*> domains;
      for (const auto& param : schema.params) {
        const std::string type = d_.has_typing() ? param.type : "object";
        if (!known_type(type))
          throw UntypedObject("parameter " + param.name + " of '" + schema.name +
                              "' has undeclared type '" + type + "'");
        domains.push_back(&table_.objects_by_type[type]);
      }
      std::vector<std::size_t> choice(domains.size(), 0);
      bool empty = std::any_of(domains.begin(), domains.end(), [](auto* d) { return d->empty(); });
      while (!empty) {
        Binding b;
        std::vector<std::string> args;
        for (std::size_t i = 0; i < domains.size(); ++i) {
          b[schema.params[i].name] = (*domains[i])[choice[i]];
          args.push_back((*domains[i])[choice[i]]);
        }
        GAction a;
        a.name = ground_name(schema.name, args);
        if (schema.precondition) a.pre = ground_formula(*schema.precondition, b);
        for (const auto& e : schema.effects) {
          GEffect ge{e.kind, {}, {}};
          bool numeric = e.kind != EffectSpec::Kind::Add && e.kind != EffectSpec::Kind::Delete;
          ge.target = intern(e.name, resolve_all(e.args, b), numeric);
          if (numeric) ge.value = substitute(e.value, b);
          a.effects.push_back(std::move(ge));
        }
        actions_.push_back(std::move(a));

        // odometer over parameter domains
        std::size_t k = domains.size();
        while (k > 0) {
          --k;
          if (++choice[k] < domains[k]->size()) break;
          choice[k] = 0;
          if (k == 0) {
            empty = true;
          }
        }
        if (domains.empty()) break;
      }
    }
  }

  GFormula ground_goal()
  {
    if (!p_.goal) return {};
    return ground_formula(*p_.goal, {});
  }

  // Constant folding ------------------------------------------------------

  struct UndefinedFluent {
    std::string name;
  };

  std::optional<Rational> static_value(const NumTerm& t) const
  {
    switch (t.kind) {
      case NumTerm::Kind::Number: return t.value;
      case NumTerm::Kind::Fluent: {
        if (affected_fluents_.contains(t.name)) return std::nullopt;
        auto it = init_values_.find(t.name);
        if (it == init_values_.end()) throw UndefinedFluent{t.name};
        return it->second;
      }
      default: break;
    }
    std::vector<Rational> vals;
    for (const auto& c : t.children) {
      auto v = static_value(c);
      if (!v) return std::nullopt;
      vals.push_back(*v);
    }
    Rational r = vals[0];
    switch (t.kind) {
      case NumTerm::Kind::Neg: return -r;
      case NumTerm::Kind::Add:
        for (std::size_t i = 1; i < vals.size(); ++i) r += vals[i];
        return r;
      case NumTerm::Kind::Sub: return r - vals[1];
      case NumTerm::Kind::Mul:
        for (std::size_t i = 1; i < vals.size(); ++i) r *= vals[i];
        return r;
      case NumTerm::Kind::Div:
        if (vals[1] == 0) throw GroundingError("division by zero");
        return r / vals[1];
      default: return std::nullopt;
    }
  }

  void fold(GFormula& f) const
  {
    switch (f.kind) {
      case GFormula::Kind::True:
      case GFormula::Kind::False: return;
      case GFormula::Kind::Atom:
        if (!affected_atoms_.contains(f.atom))
          f.kind = init_true_.contains(f.atom) ? GFormula::Kind::True : GFormula::Kind::False;
        return;
      case GFormula::Kind::Compare: {
        std::optional<Rational> lhs, rhs;
        try {
          lhs = static_value(f.terms[0]);
          rhs = static_value(f.terms[1]);
        } catch (const UndefinedFluent&) {
          // comparisons over undefined fluents are false
          f.kind = GFormula::Kind::False;
          return;
        }
        if (lhs && rhs) {
          bool v = f.rel == Relation::Lt   ? *lhs < *rhs
                 : f.rel == Relation::Le   ? *lhs <= *rhs
                 : f.rel == Relation::Eq   ? *lhs == *rhs
                 : f.rel == Relation::Ge   ? *lhs >= *rhs
                                           : *lhs > *rhs;
          f.kind = v ? GFormula::Kind::True : GFormula::Kind::False;
          f.terms.clear();
        }
        return;
      }
      case GFormula::Kind::Not: {
        fold(f.children[0]);
        auto k = f.children[0].kind;
        if (k == GFormula::Kind::True || k == GFormula::Kind::False) {
          f.kind = k == GFormula::Kind::True ? GFormula::Kind::False : GFormula::Kind::True;
          f.children.clear();
        }
        return;
      }
      case GFormula::Kind::And:
      case GFormula::Kind::Or: {
        const bool is_and = f.kind == GFormula::Kind::And;
        const auto absorbing = is_and ? GFormula::Kind::False : GFormula::Kind::True;
        const auto neutral = is_and ? GFormula::Kind::True : GFormula::Kind::False;
        std::vector<GFormula> kept;
        for (auto& c : f.children) {
          fold(c);
          if (c.kind == absorbing) {
            f.kind = absorbing;
            f.children.clear();
            return;
          }
          if (c.kind != neutral) kept.push_back(std::move(c));
        }
        if (kept.empty()) {
          f.kind = neutral;
          f.children.clear();
        } else if (kept.size() == 1) {
          GFormula only = std::move(kept[0]);
          f = std::move(only);
        } else {
          f.children = std::move(kept);
        }
        return;
      }
    }
  }

  void compute_affected()
  {
    affected_atoms_.clear();
    affected_fluents_.clear();
    for (const auto& a : actions_) {
      if (a.pruned) continue;
      for (const auto& e : a.effects) {
        if (e.kind == EffectSpec::Kind::Add || e.kind == EffectSpec::Kind::Delete)
          affected_atoms_.insert(e.target);
        else
          affected_fluents_.insert(e.target);
      }
    }
  }

  void fold_statics(GFormula& goal)
  {
    // Pruning an action can turn more atoms static, so iterate to a fixpoint.
    while (true) {
      compute_affected();
      bool changed = false;
      for (auto& a : actions_) {
        if (a.pruned) continue;
        GFormula pre = a.pre;
        fold(pre);
        if (pre.kind == GFormula::Kind::False) {
          a.pruned = true;
          changed = true;
        }
      }
      if (!changed) break;
    }
    for (auto& a : actions_)
      if (!a.pruned) fold(a.pre);
    fold(goal);
  }

  // Lowering ---------------------------------------------------------------

  LinearExpr linear(const NumTerm& t) const
  {
    try {
      return lower_linear(t);
    } catch (const UndefinedFluent& u) {
      throw GroundingError("fluent " + u.name + " is never initialized");
    }
  }

  LinearExpr lower_linear(const NumTerm& t) const
  {
    if (auto v = static_value(t)) return LinearExpr(*v);
    switch (t.kind) {
      case NumTerm::Kind::Fluent: return LinearExpr::variable(table_.fluents.at(t.name));
      case NumTerm::Kind::Neg: return -lower_linear(t.children[0]);
      case NumTerm::Kind::Add: {
        LinearExpr sum;
        for (const auto& c : t.children) sum += lower_linear(c);
        return sum;
      }
      case NumTerm::Kind::Sub: return lower_linear(t.children[0]) - lower_linear(t.children[1]);
      case NumTerm::Kind::Mul: {
        LinearExpr product(1);
        bool have_variable = false;
        for (const auto& c : t.children) {
          if (auto v = static_value(c)) {
            product *= *v;
            continue;
          }
          if (have_variable) throw NonLinearExpression("product of two fluents is not linear");
          LinearExpr part = lower_linear(c);
          part *= product.constant();
          product = std::move(part);
          have_variable = true;
        }
        return product;
      }
      case NumTerm::Kind::Div: {
        auto divisor = static_value(t.children[1]);
        if (!divisor) throw NonLinearExpression("division by a fluent is not linear");
        if (*divisor == 0) throw GroundingError("division by zero");
        return lower_linear(t.children[0]) * (Rational(1) / *divisor);
      }
      default: break;
    }
    throw GroundingError("unexpected numeric term");
  }

  void lower_precondition(const GFormula& f, bool positive, std::vector<Condition>& out,
                          const std::string& action) const
  {
    switch (f.kind) {
      case GFormula::Kind::True:
        if (!positive) throw GroundingError("internal: unfolded constant");
        return;
      case GFormula::Kind::False: throw GroundingError("internal: statically false precondition");
      case GFormula::Kind::Atom:
        out.push_back(BoolCondition{table_.atoms.at(f.atom), positive});
        return;
      case GFormula::Kind::Not: lower_precondition(f.children[0], !positive, out, action); return;
      case GFormula::Kind::And:
        if (!positive)
          throw UnsupportedFeature("negated conjunction in precondition of " + action);
        for (const auto& c : f.children) lower_precondition(c, true, out, action);
        return;
      case GFormula::Kind::Or:
        throw UnsupportedFeature("disjunctive precondition in " + action);
      case GFormula::Kind::Compare: {
        Relation rel = f.rel;
        if (!positive) {
          switch (rel) {
            case Relation::Lt: rel = Relation::Ge; break;
            case Relation::Le: rel = Relation::Gt; break;
            case Relation::Ge: rel = Relation::Lt; break;
            case Relation::Gt: rel = Relation::Le; break;
            case Relation::Eq: throw UnsupportedFeature("negated numeric equality in " + action);
          }
        }
        out.push_back(compare(linear(f.terms[0]), rel, linear(f.terms[1])));
        return;
      }
    }
  }

  GoalFormula lower_goal(const GFormula& f) const
  {
    switch (f.kind) {
      case GFormula::Kind::True: return GoalFormula::conjunction({});
      case GFormula::Kind::False: return GoalFormula::disjunction({});
      case GFormula::Kind::Atom: return GoalFormula::leaf(BoolCondition{table_.atoms.at(f.atom), true});
      case GFormula::Kind::Not: return GoalFormula::negation(lower_goal(f.children[0]));
      case GFormula::Kind::Compare:
        return GoalFormula::leaf(compare(linear(f.terms[0]), f.rel, linear(f.terms[1])));
      case GFormula::Kind::And:
      case GFormula::Kind::Or: {
        std::vector<GoalFormula> parts;
        for (const auto& c : f.children) parts.push_back(lower_goal(c));
        return f.kind == GFormula::Kind::And ? GoalFormula::conjunction(std::move(parts))
                                             : GoalFormula::disjunction(std::move(parts));
      }
    }
    return {};
  }

  template <typename Var>
  void assign_ids(const std::set<std::string>& affected, const std::map<std::string, GroundAtomRef>& refs,
                  std::map<std::string, Var>& ids, std::vector<std::string>& names)
  {
    std::vector<const GroundAtomRef*> ordered;
    for (const auto& key : affected) ordered.push_back(&refs.at(key));
    std::sort(ordered.begin(), ordered.end(), [](const GroundAtomRef* a, const GroundAtomRef* b) {
      if (a->decl != b->decl) return a->decl < b->decl;
      return a->arg_order < b->arg_order;
    });
    for (const auto* ref : ordered) {
      ids[ref->key] = Var{static_cast<std::uint32_t>(names.size())};
      names.push_back(ref->key);
    }
  }

  GroundResult lower(const GFormula& goal)
  {
    GroundResult result;
    Problem& prob = result.problem;
    assign_ids(affected_atoms_, atom_refs_, table_.atoms, prob.bool_names);
    assign_ids(affected_fluents_, fluent_refs_, table_.fluents, prob.num_names);

    prob.init.bools.assign(prob.num_bools(), false);
    for (const auto& [key, var] : table_.atoms) prob.init.bools[var.index] = init_true_.contains(key);
    prob.init.nums.assign(prob.num_nums(), Rational(0));
    for (const auto& [key, var] : table_.fluents) {
      auto it = init_values_.find(key);
      if (it == init_values_.end()) throw GroundingError("fluent " + key + " is never initialized");
      prob.init.nums[var.index] = it->second;
    }

    for (const auto& ga : actions_) {
      if (ga.pruned) continue;
      Action a;
      a.name = ga.name;
      lower_precondition(ga.pre, true, a.pre, a.name);
      // PDDL applies deletes before adds; a variable both deleted and added ends up true.
      std::map<std::string, bool> bool_effects;
      for (const auto& e : ga.effects) {
        if (e.kind == EffectSpec::Kind::Add) bool_effects[e.target] = true;
        else if (e.kind == EffectSpec::Kind::Delete) bool_effects.try_emplace(e.target, false);
      }
      for (const auto& e : ga.effects) {
        if (e.kind == EffectSpec::Kind::Add || e.kind == EffectSpec::Kind::Delete) {
          auto it = bool_effects.find(e.target);
          if (it == bool_effects.end()) continue;
          a.eff.push_back(BoolEffect{table_.atoms.at(e.target), it->second});
          bool_effects.erase(it);
          continue;
        }
        NumVar var = table_.fluents.at(e.target);
        LinearExpr value = linear(e.value);
        switch (e.kind) {
          case EffectSpec::Kind::Increase: a.eff.push_back(increase(var, value)); break;
          case EffectSpec::Kind::Decrease: a.eff.push_back(increase(var, -value)); break;
          default: a.eff.push_back(NumEffect{var, value}); break;
        }
      }
      prob.actions.push_back(std::move(a));
    }
    if (goal.kind != GFormula::Kind::True) {
      if (goal.kind == GFormula::Kind::And) {
        for (const auto& c : goal.children) prob.goals.push_back(lower_goal(c));
      } else {
        prob.goals.push_back(lower_goal(goal));
      }
    }
    try {
      prob.check();
    } catch (const ModelError& e) {
      throw GroundingError(e.what());
    }
    result.table = table_;
    return result;
  }
};

}  // namespace

GroundResult ground_problem(const LiftedDomain& domain, const LiftedProblem& problem)
{
  if (!problem.domain_name.empty() && problem.domain_name != domain.name)
    throw GroundingError("problem is for domain '" + problem.domain_name + "', not '" + domain.name + "'");
  return Grounder(domain, problem).run();
}

Problem ground(const LiftedDomain& domain, std::string_view problem_text)
{
  return ground_problem(domain, parse_problem(problem_text)).problem;
}

}  // namespace symplan::pddl
