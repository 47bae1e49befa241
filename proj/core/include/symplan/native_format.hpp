#pragma once

// The *.nplan.json format: a one-to-one JSON image of model::Problem.
// Schema documented in docs/nplan-format.md.

#include "symplan/model.hpp"

#include <string>
#include <string_view>

namespace symplan {

Problem read_native_problem(std::string_view json_text);
std::string write_native_problem(const Problem& p);

}  // namespace symplan
