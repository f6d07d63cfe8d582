#include "pact/baseline.hpp"

#include "pact/errors.hpp"

namespace pact {

std::string_view to_string(BaselineResult::Status s) {
  switch (s) {
    case BaselineResult::Status::Exact:
      return "exact";
    case BaselineResult::Status::TimedOut:
      return "timeout";
    case BaselineResult::Status::Capped:
      return "capped";
  }
  return "?";
}

BaselineResult enumerate_count(Oracle& oracle, const BaselineOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  BaselineResult out;
  const std::size_t depth = oracle.depth();
  oracle.push();
  try {
    for (;;) {
      if (options.cap && out.count >= *options.cap) {
        out.status = BaselineResult::Status::Capped;
        break;
      }
      if (options.deadline) {
        const auto left = *options.deadline - Clock::now();
        if (left <= Clock::duration::zero()) {
          out.status = BaselineResult::Status::TimedOut;
          break;
        }
        oracle.set_query_timeout(std::chrono::duration<double>(left));
      }
      const SatResult r = oracle.check_sat();
      if (r == SatResult::Unsat) break;
      if (r == SatResult::Timeout) {
        out.status = BaselineResult::Status::TimedOut;
        break;
      }
      if (r == SatResult::Unknown) throw SolverUnknown("solver answered unknown during enumeration");
      oracle.add(BlockingClause::of(oracle.projection(), oracle.projected_model()));
      ++out.count;
    }
    oracle.pop();
  } catch (...) {
    try {
      while (oracle.depth() > depth) oracle.pop();
    } catch (...) {
    }
    throw;
  }
  out.models_enumerated = out.count;
  out.stats = oracle.stats();
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace pact
