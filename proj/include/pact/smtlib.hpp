#pragma once

// Minimal SMT-LIB2 front end: variable declarations, projection sets and
// projected models. Everything else in an input script is carried through
// verbatim.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pact {

struct BitVecSort {
  unsigned width = 0;
  bool operator==(const BitVecSort&) const = default;
};

struct OtherSort {
  std::string text;
  bool operator==(const OtherSort&) const = default;
};

using Sort = std::variant<BitVecSort, OtherSort>;

struct SortedVar {
  std::string name;
  Sort sort;

  bool is_bitvec() const { return std::holds_alternative<BitVecSort>(sort); }
  /// Bit width; 0 for non-bitvector sorts.
  unsigned width() const {
    const auto* bv = std::get_if<BitVecSort>(&sort);
    return bv ? bv->width : 0;
  }
  bool operator==(const SortedVar&) const = default;
};

/// One top-level command of a script, kept as its original text.
struct ScriptCommand {
  std::string head;  // e.g. "assert", "declare-fun"
  std::string text;
  int line = 1;
  bool operator==(const ScriptCommand&) const = default;
};

struct SmtScript {
  std::string raw_text;
  std::vector<SortedVar> declarations;
  std::string logic;  // empty when the script has no set-logic
  std::vector<ScriptCommand> commands;
  /// Names listed in `; projected-vars: x y z` comments.
  std::vector<std::string> projection_hint;

  const SortedVar* find(std::string_view name) const;
  bool operator==(const SmtScript&) const = default;
};

/// Ordered set of bitvector variables the count is projected on.
class ProjectionSet {
 public:
  ProjectionSet() = default;
  /// Throws NonDiscreteProjection when a member is not a bitvector of
  /// width 1..64, InvalidParameters when empty or duplicated.
  explicit ProjectionSet(std::vector<SortedVar> vars);

  const std::vector<SortedVar>& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  const SortedVar& operator[](std::size_t i) const { return vars_[i]; }
  unsigned total_width() const { return total_width_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

 private:
  std::vector<SortedVar> vars_;
  unsigned total_width_ = 0;
};

/// Assignment to the projection variables, aligned with ProjectionSet order.
struct ProjectedModel {
  std::vector<std::uint64_t> values;
  bool operator==(const ProjectedModel&) const = default;
  auto operator<=>(const ProjectedModel&) const = default;
};

/// Negation of one projected model: `(not (and (= x v) ...))`.
struct BlockingClause {
  struct Equality {
    std::string name;
    unsigned width;
    std::uint64_t value;
  };
  std::vector<Equality> equalities;

  static BlockingClause of(const ProjectionSet& s, const ProjectedModel& m);
};

/// Extracts nullary declare-fun / declare-const declarations. Throws
/// MalformedScript with the offending line.
SmtScript parse_declarations(std::string script_text);

SmtScript read_script(const std::filesystem::path& path);

/// Throws UnknownVariable or NonDiscreteProjection. Order is preserved.
ProjectionSet resolve_projection(const SmtScript& script, std::span<const std::string> names);

/// Sidecar projection file: one name per line, `#` starts a comment.
std::vector<std::string> read_projection_file(const std::filesystem::path& path);

/// `x,y z` or `@file`.
std::vector<std::string> parse_projection_arg(std::string_view arg);

}  // namespace pact
