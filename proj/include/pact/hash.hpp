#pragma once

// Pairwise-independent hash constraints over sliced bitvectors.
//
//   Hprime:  (sum_i a_i x_i + b) mod p = alpha,  p smallest prime > 2^l
//   Hshift:  bits [wbar-l, wbar) of (sum_i a_i x_i + b) mod 2^wbar = alpha
//   Hxor:    xor of the bits x_i with a_i = 1 = alpha
//
// Word-level families hash slices of width l; Hxor hashes single bits.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pact/rng.hpp"
#include "pact/smtlib.hpp"

namespace pact {

using BigCount = boost::multiprecision::cpp_int;

enum class HashFamily { Xor, Prime, Shift };

std::string_view to_string(HashFamily f);
/// Accepts "xor", "prime", "shift". Throws InvalidParameters.
HashFamily parse_family(std::string_view name);

/// Contiguous bit range [lo, hi) of one projection variable.
struct Slice {
  std::size_t var_index = 0;
  std::string parent;
  unsigned index = 0;
  unsigned lo = 0;
  unsigned hi = 0;

  unsigned width() const { return hi - lo; }
  bool operator==(const Slice&) const = default;
};

/// Slices of width `slice_width` from bit 0 upwards; the top slice of a
/// variable keeps its natural (narrower) width when slice_width does not
/// divide the variable width.
std::vector<Slice> slice_projection(const ProjectionSet& s, unsigned slice_width);

struct HashConstraint {
  HashFamily family = HashFamily::Xor;
  unsigned exponent = 1;  // l: range is 2^l (Shift), nextprime(2^l) (Prime), 2 (Xor)
  std::vector<Slice> slices;
  std::vector<std::uint64_t> coefficients;
  std::optional<std::uint64_t> offset;  // absent for Xor
  std::uint64_t range = 2;
  std::uint64_t target = 0;
  unsigned widened_width = 0;  // arithmetic width; 0 for Xor

  bool operator==(const HashConstraint&) const = default;
};

/// Checks the per-family invariants on a constraint.
bool well_formed(const HashConstraint& h);

unsigned prime_widened_width(unsigned exponent, std::uint64_t prime, const std::vector<Slice>& slices);
unsigned shift_widened_width(unsigned exponent, const std::vector<Slice>& slices);

/// Samples one constraint. Xor ignores `exponent` (always 1). Word-level
/// families accept exponents 1..32.
HashConstraint generate_hash(const ProjectionSet& s, unsigned exponent, HashFamily family, Rng& rng);

/// Hash value of `m` (not compared with the target).
std::uint64_t eval_hash(const HashConstraint& h, const ProjectedModel& m);

inline bool satisfies(const HashConstraint& h, const ProjectedModel& m) {
  return eval_hash(h, m) == h.target;
}

/// Deterministic Miller-Rabin, exact on all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Least prime strictly greater than n. Throws RangeExceeded when that
/// prime does not fit in 64 bits.
std::uint64_t smallest_prime_above(std::uint64_t n);

/// Cartesian product h_0 x h_1 x ... with exact cumulative ranges:
/// cumulative_ranges()[i] = product of the ranges of the first i constraints.
class HashStack {
 public:
  HashStack() : cumulative_{1} {}

  void push_back(HashConstraint h);
  /// Throws EmptyStack.
  void replace_last(HashConstraint h);
  void truncate(std::size_t n);
  HashStack prefix(std::size_t n) const;

  std::size_t size() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  const HashConstraint& operator[](std::size_t i) const { return constraints_[i]; }
  const HashConstraint& back() const { return constraints_.back(); }
  const std::vector<HashConstraint>& constraints() const { return constraints_; }
  const std::vector<BigCount>& cumulative_ranges() const { return cumulative_; }
  /// Number of cells of the whole stack.
  const BigCount& cells() const { return cumulative_.back(); }

 private:
  std::vector<HashConstraint> constraints_;
  std::vector<BigCount> cumulative_;
};

}  // namespace pact
