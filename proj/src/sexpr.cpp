#include "pact/sexpr.hpp"

#include <cctype>

#include "pact/errors.hpp"

namespace pact {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

void SExprReader::skip_space() {
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (c == '\n') {
      ++line_;
      ++pos_;
    } else if (is_space(c)) {
      ++pos_;
    } else if (c == ';') {
      std::size_t start = pos_ + 1;
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      comments_.emplace_back(line_, std::string(text_.substr(start, pos_ - start)));
    } else {
      break;
    }
  }
}

std::string SExprReader::read_atom() {
  std::size_t start = pos_;
  char c = text_[pos_];
  if (c == '"') {
    ++pos_;
    for (;;) {
      if (pos_ >= text_.size()) throw MalformedScript(line_, "unterminated string literal");
      if (text_[pos_] == '\n') ++line_;
      if (text_[pos_] == '"') {
        // "" is an escaped quote inside a string literal
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
          pos_ += 2;
          continue;
        }
        ++pos_;
        break;
      }
      ++pos_;
    }
  } else if (c == '|') {
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '|') {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
    if (pos_ >= text_.size()) throw MalformedScript(line_, "unterminated quoted symbol");
    ++pos_;
  } else {
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (is_space(d) || d == '(' || d == ')' || d == ';' || d == '"' || d == '|') break;
      ++pos_;
    }
  }
  return std::string(text_.substr(start, pos_ - start));
}

SExpr SExprReader::read() {
  skip_space();
  if (pos_ >= text_.size()) throw MalformedScript(line_, "unexpected end of input");
  SExpr e;
  e.line = line_;
  e.begin = pos_;
  char c = text_[pos_];
  if (c == ')') throw MalformedScript(line_, "unbalanced ')'");
  if (c == '(') {
    int open_line = line_;
    e.is_list = true;
    ++pos_;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) {
        throw MalformedScript(open_line, "unbalanced '(' (no matching ')')");
      }
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      e.items.push_back(read());
    }
  } else {
    e.atom = read_atom();
  }
  e.end = pos_;
  return e;
}

std::optional<SExpr> SExprReader::next() {
  skip_space();
  if (pos_ >= text_.size()) return std::nullopt;
  return read();
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  SExprReader reader(text);
  std::vector<SExpr> out;
  while (auto e = reader.next()) out.push_back(std::move(*e));
  return out;
}

std::optional<std::size_t> complete_sexpr_length(std::string_view buffer) {
  std::size_t i = 0;
  while (i < buffer.size() && is_space(buffer[i])) ++i;
  if (i >= buffer.size()) return std::nullopt;
  if (buffer[i] != '(') {
    // atom: complete once a delimiter follows it
    bool in_bar = buffer[i] == '|';
    bool in_str = buffer[i] == '"';
    std::size_t j = i + 1;
    if (in_bar || in_str) {
      char close = in_bar ? '|' : '"';
      while (j < buffer.size() && buffer[j] != close) ++j;
      if (j >= buffer.size()) return std::nullopt;
      return j + 1;
    }
    while (j < buffer.size() && !is_space(buffer[j]) && buffer[j] != '(' && buffer[j] != ')') ++j;
    if (j >= buffer.size()) return std::nullopt;
    return j;
  }
  int depth = 0;
  bool in_str = false;
  bool in_bar = false;
  bool in_comment = false;
  for (std::size_t j = i; j < buffer.size(); ++j) {
    char c = buffer[j];
    if (in_comment) {
      if (c == '\n') in_comment = false;
    } else if (in_str) {
      if (c == '"') in_str = false;  // "" re-enters on the next char
    } else if (in_bar) {
      if (c == '|') in_bar = false;
    } else if (c == '"') {
      in_str = true;
    } else if (c == '|') {
      in_bar = true;
    } else if (c == ';') {
      in_comment = true;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0) return j + 1;
    }
  }
  return std::nullopt;
}

std::string to_string(const SExpr& e) {
  if (e.is_atom()) return e.atom;
  std::string out = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    out += to_string(e.items[i]);
  }
  out += ')';
  return out;
}

}  // namespace pact
