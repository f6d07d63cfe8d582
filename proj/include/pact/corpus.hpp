#pragma once

// Seeded generator of benchmark instances with known projected counts.
//
// Every instance constrains a projected bitvector x to a union of disjoint
// intervals; optionally a second projected variable z is bounded by
// (bvult z k), multiplying the count by k. Hybrid instances add a
// floating-point side condition on a non-projected variable, and a
// non-projected bitvector u tied to x can be added to make the projection
// non-trivial.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pact/smtlib.hpp"

namespace pact {

struct Interval {
  std::uint64_t lo = 0;  // inclusive
  std::uint64_t hi = 0;  // inclusive
  bool operator==(const Interval&) const = default;
};

struct InstanceSpec {
  std::string id;
  unsigned width = 8;         // width of x
  std::uint64_t count = 1;    // solutions for x
  unsigned pieces = 1;        // 1 renders as a single (bvult x count)
  std::optional<unsigned> z_width;
  std::uint64_t z_bound = 1;  // z < z_bound
  bool hybrid = false;
  bool shadow = false;        // non-projected u with u[0] = x[0]
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  InstanceSpec spec;
  std::vector<Interval> intervals;  // sorted, disjoint; the solutions of x
  std::string smt2;

  std::uint64_t known_count() const;
  std::vector<std::string> projection() const;
  /// All projected solutions in projection order. Intended for small counts.
  std::vector<ProjectedModel> solutions() const;
};

/// Throws InvalidParameters when the count does not fit the width.
GeneratedInstance generate_instance(const InstanceSpec& spec);

/// 30-style accuracy corpus: counts log-uniform in [min_count, max_count].
std::vector<InstanceSpec> accuracy_corpus(std::uint64_t seed, unsigned n = 30, std::uint64_t min_count = 100,
                                          std::uint64_t max_count = 5000);

/// Pure and hybrid instances with counts 20, 256 and 4096.
std::vector<InstanceSpec> smoke_corpus(std::uint64_t seed);

/// Writes <id>.smt2 per instance, instances.txt (one path per line) and
/// manifest.json (id, file, count, width, hybrid).
void write_corpus(const std::filesystem::path& dir, const std::vector<GeneratedInstance>& instances);

}  // namespace pact
