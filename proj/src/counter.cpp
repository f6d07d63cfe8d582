#include "pact/counter.hpp"

#include <algorithm>
#include <cmath>

#include "pact/errors.hpp"

namespace pact {

Constants get_constants(double epsilon, double delta, HashFamily family, LogBase base) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw InvalidParameters("epsilon must be a positive number");
  if (!(delta > 0 && delta < 1)) throw InvalidParameters("delta must lie in (0, 1)");
  Constants c;
  const double inv = 1.0 + 1.0 / epsilon;
  c.thresh = static_cast<std::uint64_t>(std::ceil(1.0 + 9.84 * (1.0 + epsilon / (1.0 + epsilon)) * inv * inv));
  const double lg = base == LogBase::Two ? std::log2(3.0 / delta) : std::log(3.0 / delta);
  const double factor = family == HashFamily::Xor ? 17.0 : 23.0;
  c.itercount = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(factor * lg)));
  c.ell = family == HashFamily::Xor ? 1 : 4;
  return c;
}

std::uint64_t SaturatingCount::value() const {
  if (!n_) throw InvalidParameters("saturated cell has no exact count");
  return *n_;
}

void CellLedger::record(unsigned index, SaturatingCount c) {
  for (const auto& [i, other] : entries_) {
    if (i < index && other.is_exact() && c.is_saturated()) {
      throw CounterFailed("cell counts not monotone: C[" + std::to_string(i) + "] exact, C[" +
                          std::to_string(index) + "] saturated");
    }
    if (i > index && other.is_saturated() && c.is_exact()) {
      throw CounterFailed("cell counts not monotone: C[" + std::to_string(index) + "] exact, C[" +
                          std::to_string(i) + "] saturated");
    }
    if (other.is_exact() && c.is_exact() && (i < index ? c.value() > other.value() : i > index && c.value() < other.value())) {
      throw CounterFailed("cell counts not monotone at C[" + std::to_string(index) + "] against C[" +
                          std::to_string(i) + "]");
    }
  }
  entries_.insert_or_assign(index, c);
}

const SaturatingCount* CellLedger::find(unsigned index) const {
  auto it = entries_.find(index);
  return it == entries_.end() ? nullptr : &it->second;
}

unsigned CellLedger::highest_computed() const {
  return entries_.empty() ? 0 : entries_.rbegin()->first;
}

std::optional<unsigned> CellLedger::last_saturated() const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->second.is_saturated()) return it->first;
  }
  return std::nullopt;
}

std::optional<unsigned> CellLedger::first_exact_above() const {
  const auto lo = last_saturated();
  for (const auto& [i, c] : entries_) {
    if (c.is_exact() && (!lo || i > *lo)) return i;
  }
  return std::nullopt;
}

std::optional<unsigned> CellLedger::boundary() const {
  const auto lo = last_saturated();
  const auto hi = first_exact_above();
  if (lo && hi && *hi == *lo + 1) return hi;
  return std::nullopt;
}

unsigned next_index(const CellLedger& cells, unsigned max_index) {
  const SaturatingCount* c0 = cells.find(0);
  if (!c0 || c0->is_exact()) throw InvalidParameters("next_index needs a saturated C[0]");
  const unsigned lo = *cells.last_saturated();
  if (const auto hi = cells.first_exact_above()) {
    if (*hi == lo + 1) throw InvalidParameters("boundary already located");
    return lo + (*hi - lo) / 2;
  }
  if (lo >= max_index) {
    throw ExhaustedIndices("cell still saturated at the deepest index " + std::to_string(max_index));
  }
  return std::min(lo == 0 ? 1u : 2 * lo, max_index);
}

SaturatingCount saturating_counter(Oracle& oracle, std::uint64_t thresh) {
  const std::size_t depth = oracle.depth();
  oracle.push();
  try {
    std::uint64_t n = 0;
    bool saturated = true;
    while (n < thresh) {
      const SatResult r = oracle.check_sat();
      if (r == SatResult::Unsat) {
        saturated = false;
        break;
      }
      if (r == SatResult::Unknown) throw SolverUnknown("solver answered unknown during enumeration");
      if (r == SatResult::Timeout) throw OracleTimeout("solver query timed out");
      const ProjectedModel m = oracle.projected_model();
      oracle.add(BlockingClause::of(oracle.projection(), m));
      ++n;
    }
    oracle.pop();
    return saturated ? SaturatingCount::saturated() : SaturatingCount::exact(n);
  } catch (...) {
    try {
      while (oracle.depth() > depth) oracle.pop();
    } catch (...) {
    }
    throw;
  }
}

HashedCells::HashedCells(Oracle& oracle, std::uint64_t thresh, std::optional<Clock::time_point> deadline)
    : oracle_(oracle), thresh_(thresh), deadline_(deadline), base_depth_(oracle.depth()) {}

HashedCells::~HashedCells() {
  try {
    while (oracle_.depth() > base_depth_) oracle_.pop();
  } catch (...) {
  }
}

void HashedCells::sync(const std::vector<HashConstraint>& hashes, std::size_t n) {
  if (n > hashes.size()) throw InvalidParameters("hash prefix longer than the hash list");
  std::size_t common = 0;
  while (common < live_.size() && common < n && live_[common] == hashes[common]) ++common;
  while (live_.size() > common) {
    oracle_.pop();
    live_.pop_back();
  }
  for (std::size_t k = common; k < n; ++k) {
    oracle_.push();
    oracle_.add(hashes[k]);
    live_.push_back(hashes[k]);
  }
}

SaturatingCount HashedCells::count() {
  if (deadline_) {
    const auto left = *deadline_ - Clock::now();
    if (left <= Clock::duration::zero()) throw OracleTimeout("time budget exhausted");
    oracle_.set_query_timeout(std::chrono::duration<double>(left));
  }
  ++counts_;
  return saturating_counter(oracle_, thresh_);
}

RefineOutcome fix_last_hash(HashedCells& cells, const HashStack& stack, SaturatingCount cell,
                            const RefineParams& params, Rng& rng) {
  if (stack.empty()) throw EmptyStack();
  if (cell.is_saturated()) throw InvalidParameters("fix_last_hash needs an exact cell");
  RefineOutcome out;
  out.stack = stack;
  out.cell = cell;
  if (params.family == HashFamily::Xor) return out;

  out.status = RefineOutcome::Status::Refined;
  const ProjectionSet& s = cells.oracle().projection();
  unsigned exponent = stack.back().exponent;
  HashStack candidate = stack;
  while (exponent > 1) {
    exponent = params.mode == RefineMode::Decrement ? exponent - 1 : exponent / 2;
    candidate.replace_last(generate_hash(s, exponent, params.family, rng));
    ++out.candidates;
    const SaturatingCount c = cells.count(candidate.constraints(), candidate.size());
    if (c.is_saturated()) return out;
    out.stack = candidate;
    out.cell = c;
    ++out.replacements;
  }
  out.status = RefineOutcome::Status::Failed;
  return out;
}

BigCount get_count(SaturatingCount cell, const HashStack& stack) {
  return BigCount(cell.value()) * stack.cells();
}

BigCount find_median(std::vector<BigCount> values) {
  if (values.empty()) throw EmptyList();
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  return values[mid];
}

unsigned max_hash_index(HashFamily family, unsigned ell, unsigned total_width) {
  std::uint64_t p_min = 2;
  if (family == HashFamily::Prime) p_min = smallest_prime_above(std::uint64_t{1} << ell);
  if (family == HashFamily::Shift) p_min = std::uint64_t{1} << ell;
  const BigCount universe = BigCount(1) << total_width;
  BigCount power = 1;
  unsigned m = 0;
  while (power < universe) {
    power *= p_min;
    ++m;
  }
  return m + 1;
}

CountResult pact_count(Oracle& oracle, const CountOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  CountResult result;
  result.constants = get_constants(options.epsilon, options.delta, options.family, options.log_base);
  result.seed = options.seed;
  const ProjectionSet& s = oracle.projection();
  result.max_index = max_hash_index(options.family, result.constants.ell, s.total_width());

  auto finish = [&](HashedCells& cells) {
    cells.sync({}, 0);
    result.estimate = find_median(result.raw_estimates);
    result.stats = oracle.stats();
    result.saturating_calls = cells.counts();
    result.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
  };

  HashedCells cells(oracle, result.constants.thresh, options.deadline);
  const SaturatingCount c0 = cells.count();
  if (c0.is_exact()) {
    result.exact = true;
    result.raw_estimates.push_back(c0.value());
    return finish(cells);
  }

  Rng rng(options.seed);
  const RefineParams refine{options.family, result.constants.ell, options.refine};
  for (std::uint64_t iter = 0; iter < result.constants.itercount; ++iter) {
    IterationTrace trace;
    trace.attempts = 0;
    for (;;) {
      ++trace.attempts;
      Rng local = rng.split();
      HashStack hashes;
      CellLedger ledger;
      ledger.record(0, c0);

      const std::uint64_t before_search = cells.counts();
      std::optional<unsigned> b;
      while (!(b = ledger.boundary())) {
        const unsigned i = next_index(ledger, result.max_index);
        while (hashes.size() < i) hashes.push_back(generate_hash(s, result.constants.ell, options.family, local));
        ledger.record(i, cells.count(hashes.constraints(), i));
      }
      trace.boundary = *b;
      trace.search_probes = cells.counts() - before_search;

      const HashStack prefix = hashes.prefix(*b);
      const std::uint64_t before_refine = cells.counts();
      RefineOutcome outcome = fix_last_hash(cells, prefix, *ledger.find(*b), refine, local);
      trace.refine_probes = cells.counts() - before_refine;

      if (outcome.status == RefineOutcome::Status::Failed) {
        if (trace.attempts <= options.retry_budget) continue;
        if (options.on_failure == FailurePolicy::Abort) {
          throw CounterFailed("refinement failed " + std::to_string(trace.attempts) + " times in iteration " +
                              std::to_string(iter));
        }
        trace.fallback = true;
      }
      result.raw_estimates.push_back(get_count(outcome.cell, outcome.stack));
      break;
    }
    result.iterations.push_back(trace);
  }
  return finish(cells);
}

}  // namespace pact
