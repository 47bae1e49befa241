#pragma once

#include "symplan/cli/generators.hpp"
#include "symplan/model.hpp"
#include "symplan/pddl.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace symplan::testing {

inline std::string data_path(const std::string& rel) { return std::string(SYMPLAN_TEST_DATA_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Problem ground_instance(const cli::GeneratedInstance& g)
{
  return pddl::ground(pddl::parse_domain(g.domain), g.problem);
}

inline Problem two_robots(long long xi = 1, long long q = 1) { return ground_instance(cli::generate(cli::TwoRobotsSpec{xi, q})); }

inline Problem line_exchange(long long n, long long d, long long q)
{
  return ground_instance(cli::generate(cli::LineExchangeSpec{n, d, q}));
}

inline Plan plan_of(const Problem& p, const std::string& text) { return parse_plan(text, p); }

inline ActionId act(const Problem& p, const std::string& name) { return *p.find_action(name); }
inline NumVar num(const Problem& p, const std::string& name) { return *p.find_num(name); }
inline BoolVar boolean(const Problem& p, const std::string& name) { return *p.find_bool(name); }

// fresh scratch directory under the system temp dir
inline std::filesystem::path scratch_dir(const std::string& tag)
{
  auto dir = std::filesystem::temp_directory_path() / ("symplan-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace symplan::testing
