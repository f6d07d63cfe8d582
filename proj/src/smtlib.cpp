#include "pact/smtlib.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "pact/errors.hpp"
#include "pact/sexpr.hpp"

namespace pact {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view name) {
  if (name.size() >= 2 && name.front() == '|' && name.back() == '|') return name.substr(1, name.size() - 2);
  return name;
}

Sort read_sort(const SExpr& e, std::string_view text) {
  if (e.is_list && e.size() == 3 && e[0].is_atom("_") && e[1].is_atom("BitVec")) {
    if (!e[2].is_atom() || !all_digits(e[2].atom)) {
      throw MalformedScript(e.line, "bitvector width must be a numeral");
    }
    unsigned long width = 0;
    try {
      width = std::stoul(e[2].atom);
    } catch (const std::out_of_range&) {
      throw MalformedScript(e.line, "bitvector width out of range");
    }
    if (width == 0) throw MalformedScript(e.line, "bitvector width must be at least 1");
    return BitVecSort{static_cast<unsigned>(width)};
  }
  return OtherSort{std::string(text.substr(e.begin, e.end - e.begin))};
}

void split_names(std::string_view text, std::vector<std::string>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',')) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ',') ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
}

}  // namespace

const SortedVar* SmtScript::find(std::string_view name) const {
  for (const auto& v : declarations) {
    if (v.name == name || unquote(v.name) == unquote(name)) return &v;
  }
  return nullptr;
}

ProjectionSet::ProjectionSet(std::vector<SortedVar> vars) : vars_(std::move(vars)) {
  if (vars_.empty()) throw InvalidParameters("projection set must not be empty");
  std::unordered_set<std::string> seen;
  for (const auto& v : vars_) {
    if (!v.is_bitvec()) {
      throw NonDiscreteProjection("projection variable '" + v.name + "' is not a bitvector");
    }
    if (v.width() > 64) {
      throw NonDiscreteProjection("projection variable '" + v.name + "' is wider than 64 bits");
    }
    if (!seen.insert(v.name).second) {
      throw InvalidParameters("projection variable '" + v.name + "' listed twice");
    }
    total_width_ += v.width();
  }
}

std::optional<std::size_t> ProjectionSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name || unquote(vars_[i].name) == unquote(name)) return i;
  }
  return std::nullopt;
}

BlockingClause BlockingClause::of(const ProjectionSet& s, const ProjectedModel& m) {
  BlockingClause clause;
  clause.equalities.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    clause.equalities.push_back({s[i].name, s[i].width(), m.values.at(i)});
  }
  return clause;
}

SmtScript parse_declarations(std::string script_text) {
  SmtScript script;
  SExprReader reader(script_text);
  std::unordered_set<std::string> names;
  while (auto cmd = reader.next()) {
    if (!cmd->is_list || cmd->items.empty() || !cmd->items[0].is_atom()) {
      throw MalformedScript(cmd->line, "expected a command of the form (name ...)");
    }
    const std::string& head = cmd->items[0].atom;
    script.commands.push_back(
        {head, script_text.substr(cmd->begin, cmd->end - cmd->begin), cmd->line});

    if (head == "set-logic") {
      if (cmd->size() != 2 || !(*cmd)[1].is_atom()) throw MalformedScript(cmd->line, "unreadable set-logic");
      script.logic = (*cmd)[1].atom;
      continue;
    }
    const bool is_const = head == "declare-const";
    const bool is_fun = head == "declare-fun";
    if (!is_const && !is_fun) continue;

    const std::size_t arity = is_const ? 3 : 4;
    if (cmd->size() != arity || !(*cmd)[1].is_atom()) {
      throw MalformedScript(cmd->line, "unreadable " + head);
    }
    if (is_fun) {
      if (!(*cmd)[2].is_list) throw MalformedScript(cmd->line, "unreadable declare-fun argument list");
      if (!(*cmd)[2].items.empty()) continue;  // not nullary
    }
    SortedVar var{(*cmd)[1].atom, read_sort(cmd->items.back(), script_text)};
    if (!names.insert(std::string(unquote(var.name))).second) {
      throw MalformedScript(cmd->line, "duplicate declaration of '" + var.name + "'");
    }
    script.declarations.push_back(std::move(var));
  }
  for (const auto& [line, text] : reader.comments()) {
    std::string_view body = trim(text);
    constexpr std::string_view tag = "projected-vars:";
    if (body.substr(0, tag.size()) == tag) split_names(body.substr(tag.size()), script.projection_hint);
  }
  script.raw_text = std::move(script_text);
  return script;
}

SmtScript read_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_declarations(buf.str());
}

ProjectionSet resolve_projection(const SmtScript& script, std::span<const std::string> names) {
  if (names.empty()) throw InvalidParameters("empty projection set");
  std::vector<SortedVar> vars;
  vars.reserve(names.size());
  for (const auto& name : names) {
    const SortedVar* v = script.find(name);
    if (!v) throw UnknownVariable(name);
    if (!v->is_bitvec()) {
      throw NonDiscreteProjection("projection variable '" + name + "' has non-bitvector sort " +
                                  std::get<OtherSort>(v->sort).text);
    }
    vars.push_back(*v);
  }
  return ProjectionSet(std::move(vars));
}

std::vector<std::string> read_projection_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read projection file " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    split_names(body, names);
  }
  return names;
}

std::vector<std::string> parse_projection_arg(std::string_view arg) {
  if (!arg.empty() && arg.front() == '@') return read_projection_file(std::string(arg.substr(1)));
  std::vector<std::string> names;
  split_names(arg, names);
  return names;
}

}  // namespace pact
