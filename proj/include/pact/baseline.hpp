#pragma once

// Exact projected counting by enumeration: find a model, block its
// projection, repeat until UNSAT.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>

#include "pact/oracle.hpp"

namespace pact {

struct BaselineOptions {
  std::optional<std::uint64_t> cap;  // stop after this many models
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct BaselineResult {
  enum class Status { Exact, TimedOut, Capped };
  Status status = Status::Exact;
  std::uint64_t count = 0;  // exact, or a lower bound unless Exact
  std::uint64_t models_enumerated = 0;
  QueryStats stats;
  double wall_seconds = 0.0;
};

std::string_view to_string(BaselineResult::Status s);

/// Counts the projected models of the oracle's live assertions. Blocking
/// clauses are retracted before returning. SolverUnknown and crashes
/// propagate; timeouts become TimedOut with the partial count.
BaselineResult enumerate_count(Oracle& oracle, const BaselineOptions& options = {});

}  // namespace pact
