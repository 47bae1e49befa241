#include "symplan/sexpr.hpp"

#include <cctype>

namespace symplan {

SyntaxError::SyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column)
{
}

std::string SExpr::str() const
{
  if (!is_list) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].str();
  }
  return out + ")";
}

namespace {

class Reader {
 public:
  Reader(std::string_view text, const SExprOptions& options) : text_(text), options_(options) {}

  std::vector<SExpr> read_all()
  {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  std::string_view text_;
  SExprOptions options_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;

  void advance()
  {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space()
  {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == options_.comment) {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read()
  {
    SExpr e;
    e.line = line_;
    e.column = column_;
    char c = text_[pos_];
    if (c == ')') throw SyntaxError("unexpected ')'", line_, column_);
    if (c == '(') {
      e.is_list = true;
      advance();
      skip_space();
      while (true) {
        if (pos_ >= text_.size()) throw SyntaxError("unterminated list", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
        skip_space();
      }
      return e;
    }
    if (c == '"' || c == '|') {
      char close = c;
      advance();
      std::string value(1, c);
      while (true) {
        if (pos_ >= text_.size()) throw SyntaxError("unterminated literal", e.line, e.column);
        char d = text_[pos_];
        advance();
        value += d;
        if (d == close) {
          // "" is an escaped quote inside SMT-LIB strings
          if (close == '"' && pos_ < text_.size() && text_[pos_] == '"') {
            advance();
            continue;
          }
          break;
        }
      }
      e.atom = std::move(value);
      return e;
    }
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' ||
          d == options_.comment)
        break;
      e.atom += options_.lowercase ? static_cast<char>(std::tolower(static_cast<unsigned char>(d))) : d;
      advance();
    }
    return e;
  }
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text, const SExprOptions& options)
{
  return Reader(text, options).read_all();
}

}  // namespace symplan
