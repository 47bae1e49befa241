#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace symplan {

// Exact rationals; every numeric state value and coefficient uses this type.
using Rational = mpq_class;

// Accepts "3", "-3", "1/2", "-0.25" and "1.5e2"-free decimals.
std::optional<Rational> parse_rational(std::string_view text);

// "p" or "p/q" in lowest terms.
std::string to_string(const Rational& value);

inline bool is_integer(const Rational& value) { return value.get_den() == 1; }

}  // namespace symplan
