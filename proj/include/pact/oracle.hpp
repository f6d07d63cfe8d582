#pragma once

// Incremental satisfiability oracle used by the counter and the baseline.
//
// Two backends share one interface: SubprocessOracle talks SMT-LIB2 to an
// external solver over pipes, InMemoryOracle answers from an explicit
// finite set of projected models.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pact/hash.hpp"
#include "pact/smtlib.hpp"

namespace pact {

enum class SatResult { Sat, Unsat, Unknown, Timeout };

std::string_view to_string(SatResult r);

struct QueryStats {
  std::uint64_t check_sat_calls = 0;
  std::uint64_t assertions_sent = 0;
  double solver_seconds = 0.0;
};

using Constraint = std::variant<HashConstraint, BlockingClause>;

class Oracle {
 public:
  explicit Oracle(ProjectionSet projection) : projection_(std::move(projection)) {}
  virtual ~Oracle() = default;
  Oracle(const Oracle&) = delete;
  Oracle& operator=(const Oracle&) = delete;

  virtual SatResult check_sat() = 0;
  /// Model of the last SAT answer restricted to the projection set.
  virtual ProjectedModel projected_model() = 0;
  virtual void push() = 0;
  /// Throws StackUnderflow at depth 0.
  virtual void pop() = 0;
  virtual void add(const Constraint& c) = 0;
  /// Per-query wall-clock limit; nullopt disables it.
  virtual void set_query_timeout(std::optional<std::chrono::duration<double>> /*limit*/) {}

  std::size_t depth() const { return depth_; }
  const QueryStats& stats() const { return stats_; }
  const ProjectionSet& projection() const { return projection_; }

 protected:
  ProjectionSet projection_;
  QueryStats stats_;
  std::size_t depth_ = 0;
};

/// Oracle over an explicit solution set. Hash constraints and blocking
/// clauses are evaluated natively; the set itself plays the role of F.
class InMemoryOracle final : public Oracle {
 public:
  /// Duplicates are dropped; the first occurrence fixes iteration order.
  InMemoryOracle(ProjectionSet projection, const std::vector<ProjectedModel>& solutions);

  /// Convenience for single-variable projections.
  static std::unique_ptr<InMemoryOracle> of_values(const ProjectionSet& projection,
                                                   const std::vector<std::uint64_t>& values);

  SatResult check_sat() override;
  ProjectedModel projected_model() override;
  void push() override;
  void pop() override;
  void add(const Constraint& c) override;

  /// Models satisfying every live constraint, in iteration order.
  std::vector<ProjectedModel> survivors() const;
  std::size_t universe_size() const { return universe_; }

 private:
  struct CompiledHash;
  struct Frame {
    std::shared_ptr<const std::vector<std::uint32_t>> members;  // sorted row ids
    std::vector<std::uint32_t> blocked;                         // sorted subset of members
  };

  ProjectedModel row(std::uint32_t id) const;
  void filter(const HashConstraint& h);
  void block(const BlockingClause& c);

  std::size_t width_;  // values per row
  std::size_t universe_;
  std::vector<std::uint64_t> rows_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Frame> frames_;
  std::optional<std::uint32_t> last_model_;
};

struct SolverOptions {
  std::string command;
  std::optional<std::chrono::duration<double>> query_timeout;
  std::optional<std::filesystem::path> transcript;
};

/// `PACT_SOLVER_CMD` if set, else the first of cvc5, z3, bitwuzla found on
/// PATH (cvc5 preferred), else the cvc5 command line.
std::string default_solver_command();

/// True when the executable named by the first word of `command` exists.
bool solver_available(const std::string& command);

/// Incremental SMT-LIB2 session with one solver process. The input script
/// is replayed verbatim except for commands that would produce output or
/// end the session (check-sat, get-*, exit, ...).
class SubprocessOracle final : public Oracle {
 public:
  SubprocessOracle(const SmtScript& script, ProjectionSet projection, SolverOptions options);
  ~SubprocessOracle() override;

  SatResult check_sat() override;
  ProjectedModel projected_model() override;
  void push() override;
  void pop() override;
  void add(const Constraint& c) override;
  void set_query_timeout(std::optional<std::chrono::duration<double>> limit) override;

  /// Sends a raw assertion (already rendered).
  void assert_text(const std::string& assertion);

  /// Number of times the solver process was (re)started.
  unsigned launches() const { return launches_; }

 private:
  void launch();
  void shutdown(bool graceful);
  void replay();
  void send(const std::string& command);
  std::string read_response(std::optional<std::chrono::steady_clock::time_point> deadline);
  void expect_success(const std::string& command);
  [[noreturn]] void crashed(const std::string& what);
  void drain_stderr();

  SolverOptions options_;
  std::vector<std::string> prelude_;
  std::vector<std::vector<std::string>> frames_;  // assertions per push level
  int pid_ = -1;
  int to_solver_ = -1;
  int from_solver_ = -1;
  int solver_err_ = -1;
  std::string out_buffer_;
  std::string err_buffer_;
  std::ofstream transcript_;
  unsigned launches_ = 0;
};

}  // namespace pact
