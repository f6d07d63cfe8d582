#pragma once

// Hashing-based projected approximate model counting.
//
// Each iteration conjoins a growing prefix of random hash constraints to the
// formula and looks for the boundary index i where the cell under the first
// i constraints holds fewer than `thresh` projected models while the cell
// under the first i-1 constraints does not. The estimate of an iteration is
// the boundary cell count times the number of cells; the result is the
// median over all iterations.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pact/hash.hpp"
#include "pact/oracle.hpp"
#include "pact/rng.hpp"

namespace pact {

enum class LogBase { Two, Natural };

/// How the last hash is coarsened during refinement: one exponent step at
/// a time (range halves per step), or exponent halving (l <- floor(l/2)).
enum class RefineMode { Decrement, Halve };

/// What to do once refinement keeps failing past the retry budget.
enum class FailurePolicy { Fallback, Abort };

struct Constants {
  std::uint64_t thresh = 0;
  std::uint64_t itercount = 0;
  unsigned ell = 1;
  bool operator==(const Constants&) const = default;
};

/// thresh = ceil(1 + 9.84 (1 + eps/(1+eps)) (1 + 1/eps)^2);
/// itercount = ceil(17 log(3/delta)) for Xor (l = 1), ceil(23 log(3/delta))
/// otherwise (l = 4). Throws InvalidParameters.
Constants get_constants(double epsilon, double delta, HashFamily family, LogBase base = LogBase::Two);

/// Result of a bounded enumeration: an exact count below the threshold, or
/// saturation.
class SaturatingCount {
 public:
  static SaturatingCount exact(std::uint64_t n) { return SaturatingCount(n); }
  static SaturatingCount saturated() { return SaturatingCount(std::nullopt); }

  bool is_saturated() const { return !n_; }
  bool is_exact() const { return n_.has_value(); }
  /// Throws InvalidParameters when saturated.
  std::uint64_t value() const;

  bool operator==(const SaturatingCount&) const = default;

 private:
  explicit SaturatingCount(std::optional<std::uint64_t> n) : n_(n) {}
  std::optional<std::uint64_t> n_;
};

/// Sparse map from hash-prefix length to the saturating count of that cell.
class CellLedger {
 public:
  /// Throws CounterFailed when the entry breaks monotonicity (an exact cell
  /// below a saturated one).
  void record(unsigned index, SaturatingCount c);
  const SaturatingCount* find(unsigned index) const;
  bool contains(unsigned index) const { return entries_.count(index) != 0; }
  bool empty() const { return entries_.empty(); }
  unsigned highest_computed() const;
  /// Largest saturated index, if any.
  std::optional<unsigned> last_saturated() const;
  /// Smallest exact index above every saturated one, if any.
  std::optional<unsigned> first_exact_above() const;
  /// Index i with C[i] exact and C[i-1] saturated, once located.
  std::optional<unsigned> boundary() const;
  const std::map<unsigned, SaturatingCount>& entries() const { return entries_; }

 private:
  std::map<unsigned, SaturatingCount> entries_;
};

/// Next prefix length to probe: doubles past the last saturated index
/// (1, 2, 4, ... capped at max_index) until an exact cell is seen, then
/// bisects between the last saturated and first exact index. Requires a
/// saturated C[0]; throws ExhaustedIndices when max_index is saturated.
unsigned next_index(const CellLedger& cells, unsigned max_index);

/// Enumerates projected models of the oracle's live assertions, blocking
/// each, until `thresh` are found (Saturated) or the solver says UNSAT.
/// Blocking clauses live in their own push/pop frame.
SaturatingCount saturating_counter(Oracle& oracle, std::uint64_t thresh);

/// Keeps an oracle's assertion stack equal to F plus a prefix of a hash
/// list, one push frame per hash, and counts cells under it.
class HashedCells {
 public:
  using Clock = std::chrono::steady_clock;

  HashedCells(Oracle& oracle, std::uint64_t thresh, std::optional<Clock::time_point> deadline = std::nullopt);
  ~HashedCells();
  HashedCells(const HashedCells&) = delete;
  HashedCells& operator=(const HashedCells&) = delete;

  /// Makes the live hashes equal to the first n of `hashes`.
  void sync(const std::vector<HashConstraint>& hashes, std::size_t n);
  /// Saturating count under the live hashes. Throws OracleTimeout once the
  /// deadline has passed.
  SaturatingCount count();
  /// Saturating count of F and the first n of `hashes`.
  SaturatingCount count(const std::vector<HashConstraint>& hashes, std::size_t n) {
    sync(hashes, n);
    return count();
  }

  std::uint64_t thresh() const { return thresh_; }
  std::uint64_t counts() const { return counts_; }
  Oracle& oracle() { return oracle_; }

 private:
  Oracle& oracle_;
  std::uint64_t thresh_;
  std::optional<Clock::time_point> deadline_;
  std::size_t base_depth_;
  std::vector<HashConstraint> live_;
  std::uint64_t counts_ = 0;
};

struct RefineParams {
  HashFamily family = HashFamily::Xor;
  unsigned ell = 1;
  RefineMode mode = RefineMode::Decrement;
};

struct RefineOutcome {
  enum class Status { Unchanged, Refined, Failed };
  Status status = Status::Unchanged;
  /// Hash stack and cell to estimate from. For Failed: the coarsest
  /// candidate that still gave an exact cell.
  HashStack stack;
  SaturatingCount cell = SaturatingCount::saturated();
  unsigned replacements = 0;
  unsigned candidates = 0;
};

/// Replaces the last hash of `stack` (length i, C[i] = `cell` exact and
/// C[i-1] saturated) by coarser ones while the cell stays exact. Returns
/// Unchanged for Xor, Refined with the coarsest exact replacement once a
/// candidate saturates, Failed when every candidate down to exponent 1
/// stayed exact.
RefineOutcome fix_last_hash(HashedCells& cells, const HashStack& stack, SaturatingCount cell,
                            const RefineParams& params, Rng& rng);

/// n times the number of cells of `stack`.
BigCount get_count(SaturatingCount cell, const HashStack& stack);

/// Lower median. Throws EmptyList.
BigCount find_median(std::vector<BigCount> values);

/// Deepest useful prefix length: smallest m with p_min^m >= 2^total_width,
/// plus one.
unsigned max_hash_index(HashFamily family, unsigned ell, unsigned total_width);

struct CountOptions {
  double epsilon = 0.8;
  double delta = 0.2;
  HashFamily family = HashFamily::Xor;
  std::uint64_t seed = 1;
  LogBase log_base = LogBase::Two;
  RefineMode refine = RefineMode::Decrement;
  unsigned retry_budget = 3;
  FailurePolicy on_failure = FailurePolicy::Fallback;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct IterationTrace {
  unsigned boundary = 0;
  std::uint64_t search_probes = 0;  // saturating counts to locate the boundary (last attempt)
  std::uint64_t refine_probes = 0;  // saturating counts inside fix_last_hash (last attempt)
  unsigned attempts = 1;
  bool fallback = false;
};

struct CountResult {
  BigCount estimate;
  bool exact = false;  // unhashed count was below thresh
  std::vector<BigCount> raw_estimates;
  Constants constants;
  std::uint64_t seed = 0;
  unsigned max_index = 0;
  QueryStats stats;
  std::uint64_t saturating_calls = 0;
  double wall_seconds = 0.0;
  std::vector<IterationTrace> iterations;
};

/// Approximate |Sol(F) projected on S| where F is whatever the oracle holds
/// and S its projection set.
CountResult pact_count(Oracle& oracle, const CountOptions& options);

}  // namespace pact
