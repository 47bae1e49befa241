#include "symplan/cli/generators.hpp"

#include <sstream>

namespace symplan::cli {

GeneratedInstance generate(const TwoRobotsSpec& spec)
{
  if (spec.xi < 1 || spec.q < 1) throw InvalidSpec("two-robots needs positive X_I and Q");
  GeneratedInstance out;
  out.domain = R"((define (domain two-robots)
  (:requirements :numeric-fluents :negative-preconditions)
  (:predicates (p))
  (:functions (x_l) (x_r) (q_l) (q_r) (q))
  (:action lft_r
    :parameters ()
    :precondition (> (x_r) 0)
    :effect (decrease (x_r) 1))
  (:action rgt_r
    :parameters ()
    :precondition (not (p))
    :effect (increase (x_r) 1))
  (:action lft_l
    :parameters ()
    :precondition (not (p))
    :effect (decrease (x_l) 1))
  (:action rgt_l
    :parameters ()
    :precondition (< (x_l) 0)
    :effect (increase (x_l) 1))
  (:action conn
    :parameters ()
    :precondition (= (x_l) (x_r))
    :effect (p))
  (:action disc
    :parameters ()
    :precondition (p)
    :effect (not (p)))
  (:action exch
    :parameters ()
    :precondition (and (p) (>= (q_l) (q)) (>= (q_r) (- (q))))
    :effect (and (decrease (q_l) (q)) (increase (q_r) (q))))
  (:action lre
    :parameters ()
    :effect (assign (q) 1))
  (:action rle
    :parameters ()
    :effect (assign (q) (- 1))))
)";
  std::ostringstream p;
  p << "(define (problem two-robots-" << spec.xi << "-" << spec.q << ")\n"
    << "  (:domain two-robots)\n"
    << "  (:init (= (x_l) " << -spec.xi << ") (= (x_r) " << spec.xi << ") (= (q_l) " << spec.q
    << ") (= (q_r) 0) (= (q) 1))\n"
    << "  (:goal (and (= (q_l) 0) (= (q_r) " << spec.q << ") (= (x_l) " << -spec.xi << ") (= (x_r) "
    << spec.xi << "))))\n";
  out.problem = p.str();
  return out;
}

GeneratedInstance generate(const LineExchangeSpec& spec)
{
  if (spec.robots < 2) throw InvalidSpec("line-exchange needs at least two robots");
  if (spec.segment < 1) throw InvalidSpec("line-exchange needs a segment length of at least 1");
  if (spec.q < 1) throw InvalidSpec("line-exchange needs a positive number of items");
  GeneratedInstance out;
  out.domain = R"((define (domain line-exchange)
  (:requirements :typing :numeric-fluents :negative-preconditions)
  (:types robot)
  (:predicates (adjacent ?a ?b - robot) (connected ?a ?b - robot)
               (linked-left ?r - robot) (linked-right ?r - robot))
  (:functions (x ?r - robot) (lo ?r - robot) (hi ?r - robot) (q ?r - robot) (rate ?a ?b - robot))
  (:action move_left
    :parameters (?r - robot)
    :precondition (and (not (linked-right ?r)) (> (x ?r) (lo ?r)))
    :effect (decrease (x ?r) 1))
  (:action move_right
    :parameters (?r - robot)
    :precondition (and (not (linked-left ?r)) (< (x ?r) (hi ?r)))
    :effect (increase (x ?r) 1))
  (:action conn
    :parameters (?a ?b - robot)
    :precondition (and (adjacent ?a ?b) (= (x ?a) (x ?b)) (not (connected ?a ?b)))
    :effect (and (connected ?a ?b) (linked-right ?a) (linked-left ?b)))
  (:action disc
    :parameters (?a ?b - robot)
    :precondition (connected ?a ?b)
    :effect (and (not (connected ?a ?b)) (not (linked-right ?a)) (not (linked-left ?b))))
  (:action exch
    :parameters (?a ?b - robot)
    :precondition (and (connected ?a ?b) (>= (q ?a) (rate ?a ?b)) (>= (q ?b) (- (rate ?a ?b))))
    :effect (and (decrease (q ?a) (rate ?a ?b)) (increase (q ?b) (rate ?a ?b))))
  (:action lre
    :parameters (?a ?b - robot)
    :precondition (adjacent ?a ?b)
    :effect (assign (rate ?a ?b) 1))
  (:action rle
    :parameters (?a ?b - robot)
    :precondition (adjacent ?a ?b)
    :effect (assign (rate ?a ?b) (- 1))))
)";
  const long long n = spec.robots, d = spec.segment;
  auto r = [](long long i) { return "r" + std::to_string(i); };
  std::ostringstream p;
  p << "(define (problem line-exchange-" << n << "-" << d << "-" << spec.q << ")\n"
    << "  (:domain line-exchange)\n  (:objects";
  for (long long i = 1; i <= n; ++i) p << ' ' << r(i);
  p << " - robot)\n  (:init\n";
  for (long long i = 1; i <= n; ++i) {
    // robot i owns [(i-1)D, iD] and starts inside it
    p << "    (= (x " << r(i) << ") " << (i - 1) * d + d / 2 << ") (= (lo " << r(i) << ") " << (i - 1) * d
      << ") (= (hi " << r(i) << ") " << i * d << ") (= (q " << r(i) << ") " << (i == 1 ? spec.q : 0) << ")\n";
  }
  for (long long i = 1; i < n; ++i)
    p << "    (adjacent " << r(i) << ' ' << r(i + 1) << ") (= (rate " << r(i) << ' ' << r(i + 1) << ") 1)\n";
  p << "  )\n  (:goal (= (q " << r(n) << ") " << spec.q << ")))\n";
  out.problem = p.str();
  return out;
}

}  // namespace symplan::cli
