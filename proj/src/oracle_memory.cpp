#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>

#include "pact/errors.hpp"
#include "pact/oracle.hpp"

namespace pact {

namespace {

std::string row_key(const std::uint64_t* values, std::size_t n) {
  return std::string(reinterpret_cast<const char*>(values), n * sizeof(std::uint64_t));
}

std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

}  // namespace

std::string_view to_string(SatResult r) {
  switch (r) {
    case SatResult::Sat:
      return "sat";
    case SatResult::Unsat:
      return "unsat";
    case SatResult::Unknown:
      return "unknown";
    case SatResult::Timeout:
      return "timeout";
  }
  return "?";
}

// Row-level evaluator for one hash constraint.
struct InMemoryOracle::CompiledHash {
  struct Term {
    std::size_t var;
    unsigned lo;
    std::uint64_t mask;
    std::uint64_t coef;
  };

  explicit CompiledHash(const HashConstraint& h) : family(h.family), source(&h) {
    if (family == HashFamily::Xor) {
      for (std::size_t i = 0; i < h.slices.size(); ++i) {
        if (!h.coefficients[i]) continue;
        const Slice& s = h.slices[i];
        if (xor_masks.size() <= s.var_index) xor_masks.resize(s.var_index + 1, 0);
        xor_masks[s.var_index] ^= std::uint64_t{1} << s.lo;
      }
    } else {
      for (std::size_t i = 0; i < h.slices.size(); ++i) {
        if (!h.coefficients[i]) continue;
        const Slice& s = h.slices[i];
        terms.push_back({s.var_index, s.lo, low_mask(s.width()), h.coefficients[i]});
      }
    }
  }

  bool matches(const std::uint64_t* row) const {
    const HashConstraint& h = *source;
    switch (family) {
      case HashFamily::Xor: {
        unsigned ones = 0;
        for (std::size_t v = 0; v < xor_masks.size(); ++v) ones += std::popcount(row[v] & xor_masks[v]);
        return (ones & 1) == h.target;
      }
      case HashFamily::Prime: {
        unsigned __int128 sum = *h.offset;
        for (const auto& t : terms) sum += static_cast<unsigned __int128>(t.coef) * ((row[t.var] >> t.lo) & t.mask);
        return static_cast<std::uint64_t>(sum % h.range) == h.target;
      }
      case HashFamily::Shift: {
        std::uint64_t sum = *h.offset;
        for (const auto& t : terms) sum += t.coef * ((row[t.var] >> t.lo) & t.mask);
        sum &= low_mask(h.widened_width);
        return ((sum >> (h.widened_width - h.exponent)) & low_mask(h.exponent)) == h.target;
      }
    }
    return false;
  }

  HashFamily family;
  const HashConstraint* source;
  std::vector<std::uint64_t> xor_masks;
  std::vector<Term> terms;
};

InMemoryOracle::InMemoryOracle(ProjectionSet projection, const std::vector<ProjectedModel>& solutions)
    : Oracle(std::move(projection)), width_(projection_.size()) {
  rows_.reserve(solutions.size() * width_);
  std::vector<std::uint32_t> members;
  for (const auto& m : solutions) {
    if (m.values.size() != width_) throw InvalidParameters("model does not match the projection set");
    for (std::size_t v = 0; v < width_; ++v) {
      if (m.values[v] > low_mask(projection_[v].width())) {
        throw InvalidParameters("model value exceeds the width of '" + projection_[v].name + "'");
      }
    }
    const auto id = static_cast<std::uint32_t>(members.size());
    if (!index_.emplace(row_key(m.values.data(), width_), id).second) continue;
    rows_.insert(rows_.end(), m.values.begin(), m.values.end());
    members.push_back(id);
  }
  universe_ = members.size();
  frames_.push_back({std::make_shared<const std::vector<std::uint32_t>>(std::move(members)), {}});
}

std::unique_ptr<InMemoryOracle> InMemoryOracle::of_values(const ProjectionSet& projection,
                                                          const std::vector<std::uint64_t>& values) {
  if (projection.size() != 1) throw InvalidParameters("of_values needs a single-variable projection");
  std::vector<ProjectedModel> models;
  models.reserve(values.size());
  for (auto v : values) models.push_back({{v}});
  return std::make_unique<InMemoryOracle>(projection, models);
}

ProjectedModel InMemoryOracle::row(std::uint32_t id) const {
  const auto* begin = rows_.data() + static_cast<std::size_t>(id) * width_;
  return {std::vector<std::uint64_t>(begin, begin + width_)};
}

SatResult InMemoryOracle::check_sat() {
  const auto start = std::chrono::steady_clock::now();
  ++stats_.check_sat_calls;
  last_model_.reset();
  const Frame& top = frames_.back();
  // first member that is not blocked; both lists are sorted
  auto b = top.blocked.begin();
  for (auto id : *top.members) {
    if (b != top.blocked.end() && *b == id) {
      ++b;
      continue;
    }
    last_model_ = id;
    break;
  }
  stats_.solver_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return last_model_ ? SatResult::Sat : SatResult::Unsat;
}

ProjectedModel InMemoryOracle::projected_model() {
  if (!last_model_) throw ProtocolError("projected_model requested without a preceding SAT answer");
  return row(*last_model_);
}

void InMemoryOracle::push() {
  frames_.push_back(frames_.back());
  ++depth_;
}

void InMemoryOracle::pop() {
  if (depth_ == 0) throw StackUnderflow();
  frames_.pop_back();
  --depth_;
  last_model_.reset();
}

void InMemoryOracle::add(const Constraint& c) {
  ++stats_.assertions_sent;
  last_model_.reset();
  if (const auto* h = std::get_if<HashConstraint>(&c)) {
    filter(*h);
  } else {
    block(std::get<BlockingClause>(c));
  }
}

void InMemoryOracle::filter(const HashConstraint& h) {
  for (const auto& s : h.slices) {
    if (s.var_index >= width_ || projection_[s.var_index].name != s.parent) {
      throw InvalidParameters("hash constraint refers to a variable outside the projection set");
    }
  }
  CompiledHash compiled(h);
  Frame& top = frames_.back();
  auto kept = std::make_shared<std::vector<std::uint32_t>>();
  auto b = top.blocked.begin();
  for (auto id : *top.members) {
    if (b != top.blocked.end() && *b == id) {
      ++b;
      continue;
    }
    if (compiled.matches(rows_.data() + static_cast<std::size_t>(id) * width_)) kept->push_back(id);
  }
  top.members = std::move(kept);
  top.blocked.clear();
}

void InMemoryOracle::block(const BlockingClause& c) {
  if (c.equalities.size() != width_) throw InvalidParameters("blocking clause must cover the projection set");
  std::vector<std::uint64_t> values(width_);
  for (std::size_t v = 0; v < width_; ++v) {
    if (c.equalities[v].name != projection_[v].name) {
      throw InvalidParameters("blocking clause variables out of projection order");
    }
    values[v] = c.equalities[v].value;
  }
  auto it = index_.find(row_key(values.data(), width_));
  if (it == index_.end()) return;
  const std::uint32_t id = it->second;
  Frame& top = frames_.back();
  if (!std::binary_search(top.members->begin(), top.members->end(), id)) return;
  auto pos = std::lower_bound(top.blocked.begin(), top.blocked.end(), id);
  if (pos == top.blocked.end() || *pos != id) top.blocked.insert(pos, id);
}

std::vector<ProjectedModel> InMemoryOracle::survivors() const {
  std::vector<ProjectedModel> out;
  const Frame& top = frames_.back();
  auto b = top.blocked.begin();
  for (auto id : *top.members) {
    if (b != top.blocked.end() && *b == id) {
      ++b;
      continue;
    }
    out.push_back(row(id));
  }
  return out;
}

}  // namespace pact
