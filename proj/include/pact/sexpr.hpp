#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pact {

/// An SMT-LIB2 s-expression. Atoms keep their exact spelling, including
/// `|quoted|` symbols, string literals and `#b`/`#x` numerals.
struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool is_list = false;
  int line = 1;
  std::size_t begin = 0;  // byte offsets into the source text
  std::size_t end = 0;

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  std::size_t size() const { return items.size(); }
  const SExpr& operator[](std::size_t i) const { return items[i]; }
};

/// Reads a sequence of top-level s-expressions. `;` comments are skipped
/// and handed to an optional callback together with their line.
class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  /// Next top-level expression, or nullopt at end of input. Throws
  /// MalformedScript on unbalanced input.
  std::optional<SExpr> next();

  /// Comments seen so far, in order.
  const std::vector<std::pair<int, std::string>>& comments() const { return comments_; }

  int line() const { return line_; }

 private:
  void skip_space();
  SExpr read();
  std::string read_atom();

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::vector<std::pair<int, std::string>> comments_;
};

/// Parses every expression of `text`.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// Length of the first complete top-level expression in `buffer` (leading
/// whitespace included), or nullopt if more input is needed.
std::optional<std::size_t> complete_sexpr_length(std::string_view buffer);

std::string to_string(const SExpr& e);

}  // namespace pact
