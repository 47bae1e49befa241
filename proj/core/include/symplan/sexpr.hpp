#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symplan {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// S-expression tree shared by the PDDL reader and the solver-output reader.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  std::size_t size() const { return items.size(); }
  const SExpr& operator[](std::size_t i) const { return items.at(i); }
  // "(a b (c))" rendering, used in error messages.
  std::string str() const;
};

struct SExprOptions {
  char comment = ';';
  bool lowercase = false;  // PDDL is case-insensitive
};

// Parses every top-level expression of `text`.
std::vector<SExpr> parse_sexprs(std::string_view text, const SExprOptions& options = {});

}  // namespace symplan
