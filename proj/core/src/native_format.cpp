#include "symplan/native_format.hpp"

#include <nlohmann/json.hpp>

namespace symplan {

namespace {

using json = nlohmann::ordered_json;

Rational read_number(const json& j)
{
  if (j.is_number_integer()) return Rational(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    if (auto v = parse_rational(j.get<std::string>())) return *v;
  }
  throw ModelError("expected integer or rational string, got " + j.dump());
}

json write_number(const Rational& v)
{
  if (is_integer(v) && v.get_num().fits_slong_p()) return json(v.get_num().get_si());
  return json(to_string(v));
}

class Reader {
 public:
  explicit Reader(Problem& p) : p_(p) {}

  NumVar num(const std::string& name) const
  {
    if (auto v = p_.find_num(name)) return *v;
    throw ModelError("undeclared numeric variable '" + name + "'");
  }

  BoolVar boolean(const std::string& name) const
  {
    if (auto v = p_.find_bool(name)) return *v;
    throw ModelError("undeclared boolean variable '" + name + "'");
  }

  LinearExpr expr(const json& j) const
  {
    LinearExpr e;
    if (j.contains("coeffs"))
      for (const auto& [name, coeff] : j.at("coeffs").items()) e.add_term(num(name), read_number(coeff));
    if (j.contains("const")) e.add_constant(read_number(j.at("const")));
    return e;
  }

  Condition condition(const json& j) const
  {
    if (j.contains("bool")) return BoolCondition{boolean(j.at("bool").get<std::string>()), j.at("value").get<bool>()};
    static const std::map<std::string, Relation> ops = {
        {"<", Relation::Lt}, {"<=", Relation::Le}, {"=", Relation::Eq}, {">=", Relation::Ge}, {">", Relation::Gt}};
    auto it = ops.find(j.at("op").get<std::string>());
    if (it == ops.end()) throw ModelError("unknown comparison " + j.at("op").dump());
    return compare(expr(j.at("expr")), it->second, LinearExpr());
  }

  GoalFormula goal(const json& j) const
  {
    if (j.contains("and") || j.contains("or")) {
      std::vector<GoalFormula> parts;
      for (const auto& c : j.contains("and") ? j.at("and") : j.at("or")) parts.push_back(goal(c));
      return j.contains("and") ? GoalFormula::conjunction(std::move(parts))
                               : GoalFormula::disjunction(std::move(parts));
    }
    if (j.contains("not")) return GoalFormula::negation(goal(j.at("not")));
    return GoalFormula::leaf(condition(j));
  }

 private:
  Problem& p_;
};

json write_expr(const LinearExpr& e, const Problem& p)
{
  json j = json::object();
  json coeffs = json::object();
  for (const auto& [var, coeff] : e.terms()) coeffs[p.num_names.at(var.index)] = write_number(coeff);
  j["coeffs"] = coeffs;
  j["const"] = write_number(e.constant());
  return j;
}

json write_condition(const Condition& c, const Problem& p)
{
  if (auto* b = std::get_if<BoolCondition>(&c))
    return json{{"bool", p.bool_names.at(b->var.index)}, {"value", b->value}};
  const auto& n = std::get<NumCondition>(c);
  const char* op = n.op == Cmp::Ge ? ">=" : n.op == Cmp::Gt ? ">" : "=";
  return json{{"expr", write_expr(n.expr, p)}, {"op", op}};
}

json write_goal(const GoalFormula& g, const Problem& p)
{
  switch (g.kind) {
    case GoalFormula::Kind::Atom: return write_condition(*g.atom, p);
    case GoalFormula::Kind::Not: return json{{"not", write_goal(g.children.at(0), p)}};
    case GoalFormula::Kind::And:
    case GoalFormula::Kind::Or: {
      json parts = json::array();
      for (const auto& c : g.children) parts.push_back(write_goal(c, p));
      return json{{g.kind == GoalFormula::Kind::And ? "and" : "or", parts}};
    }
  }
  return {};
}

}  // namespace

Problem read_native_problem(std::string_view json_text)
{
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("malformed problem JSON: ") + e.what());
  }
  Problem p;
  try {
    for (const auto& n : j.value("bool_vars", json::array())) p.bool_names.push_back(n.get<std::string>());
    for (const auto& n : j.value("num_vars", json::array())) p.num_names.push_back(n.get<std::string>());
    Reader r(p);

    p.init.bools.assign(p.num_bools(), false);
    p.init.nums.assign(p.num_nums(), Rational(0));
    std::vector<bool> seen(p.num_bools() + p.num_nums(), false);
    for (const auto& [name, value] : j.at("init").items()) {
      if (auto b = p.find_bool(name)) {
        p.init.bools[b->index] = value.get<bool>();
        seen[b->index] = true;
      } else {
        NumVar v = r.num(name);
        p.init.nums[v.index] = read_number(value);
        seen[p.num_bools() + v.index] = true;
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw ModelError("initial state does not assign '" +
                         (i < p.num_bools() ? p.bool_names[i] : p.num_names[i - p.num_bools()]) + "'");

    for (const auto& ja : j.value("actions", json::array())) {
      Action a;
      a.name = ja.at("name").get<std::string>();
      for (const auto& c : ja.value("pre", json::array())) a.pre.push_back(r.condition(c));
      for (const auto& e : ja.value("eff", json::array())) {
        const std::string target = e.at("var").get<std::string>();
        if (e.contains("value")) {
          a.eff.push_back(BoolEffect{r.boolean(target), e.at("value").get<bool>()});
        } else if (e.contains("increase")) {
          a.eff.push_back(increase(r.num(target), r.expr(e.at("increase"))));
        } else {
          a.eff.push_back(NumEffect{r.num(target), r.expr(e.at("expr"))});
        }
      }
      p.actions.push_back(std::move(a));
    }
    for (const auto& g : j.value("goals", json::array())) p.goals.push_back(r.goal(g));
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed problem JSON: ") + e.what());
  }
  p.check();
  return p;
}

std::string write_native_problem(const Problem& p)
{
  json j;
  j["bool_vars"] = p.bool_names;
  j["num_vars"] = p.num_names;
  json init = json::object();
  for (std::size_t i = 0; i < p.num_bools(); ++i) init[p.bool_names[i]] = static_cast<bool>(p.init.bools[i]);
  for (std::size_t i = 0; i < p.num_nums(); ++i) init[p.num_names[i]] = write_number(p.init.nums[i]);
  j["init"] = init;
  json actions = json::array();
  for (const auto& a : p.actions) {
    json ja;
    ja["name"] = a.name;
    json pre = json::array();
    for (const auto& c : a.pre) pre.push_back(write_condition(c, p));
    ja["pre"] = pre;
    json eff = json::array();
    for (const auto& e : a.eff) {
      if (auto* b = std::get_if<BoolEffect>(&e)) {
        eff.push_back(json{{"var", p.bool_names.at(b->var.index)}, {"value", b->value}});
      } else {
        const auto& n = std::get<NumEffect>(e);
        eff.push_back(json{{"var", p.num_names.at(n.var.index)}, {"expr", write_expr(n.rhs, p)}});
      }
    }
    ja["eff"] = eff;
    actions.push_back(ja);
  }
  j["actions"] = actions;
  json goals = json::array();
  for (const auto& g : p.goals) goals.push_back(write_goal(g, p));
  j["goals"] = goals;
  return j.dump(2) + "\n";
}

}  // namespace symplan
