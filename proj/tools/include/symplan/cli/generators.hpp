#pragma once

// PDDL instance generators for the two benchmark families.

#include <stdexcept>
#include <string>

namespace symplan::cli {

struct GeneratedInstance {
  std::string domain;
  std::string problem;
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two robots on a line meet at the origin and hand over Q items.
struct TwoRobotsSpec {
  long long xi = 1;
  long long q = 1;
};

// N robots, each confined to its own segment of length D; the items start
// on the first robot and must end on the last. Layout in docs/line-exchange.md.
struct LineExchangeSpec {
  long long robots = 4;
  long long segment = 2;
  long long q = 1;
};

GeneratedInstance generate(const TwoRobotsSpec& spec);
GeneratedInstance generate(const LineExchangeSpec& spec);

}  // namespace symplan::cli
