#pragma once

// Run configuration, JSON result records, and the benchmark runner behind
// the command-line tool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pact/counter.hpp"
#include "pact/oracle.hpp"

namespace pact {

struct RunConfig {
  std::string mode = "count";  // count | baseline | bench
  std::vector<std::string> inputs;
  std::vector<std::string> projection;  // empty: <file>.proj, then the script's projected-vars comment
  double epsilon = 0.8;
  double delta = 0.2;
  HashFamily family = HashFamily::Xor;
  std::vector<HashFamily> bench_families;  // bench only; empty means {family}
  std::uint64_t seed = 1;
  std::string solver_command;  // empty: default_solver_command()
  double timeout = 3600.0;     // seconds per run
  std::string out;
  unsigned jobs = 1;
  std::optional<std::uint64_t> cap;  // baseline model cap
  LogBase log_base = LogBase::Two;
  RefineMode refine = RefineMode::Decrement;
  std::string transcript;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

struct ResultRecord {
  std::string instance;
  std::string mode;              // count | baseline
  std::string solver;            // e.g. pact-xor, baseline
  std::string status = "ok";     // ok | timeout | error
  std::optional<BigCount> estimate;  // count mode
  bool exact = false;                // count mode: early exit
  std::vector<BigCount> raw_estimates;
  std::optional<BigCount> count;     // baseline mode; a lower bound unless complete
  std::string count_status;          // baseline: exact | timeout | capped
  std::string message;
  QueryStats stats;
  std::uint64_t saturating_calls = 0;
  std::uint64_t fallbacks = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  RunConfig config;

  bool operator==(const ResultRecord& o) const;
};

nlohmann::json to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);
/// Record JSON with wall_seconds and stats.solver_seconds removed.
nlohmann::json without_timing(const ResultRecord& r);

/// Big integers become JSON numbers when they fit 64 bits, strings
/// otherwise.
nlohmann::json big_to_json(const BigCount& v);
BigCount big_from_json(const nlohmann::json& j);

/// Builds the oracle for one instance of a run.
using OracleFactory = std::function<std::unique_ptr<Oracle>(const std::filesystem::path& instance, const RunConfig&)>;

/// Names from config.projection, else <file>.proj, else the script's
/// projected-vars comment. Throws InvalidParameters when none applies.
std::vector<std::string> projection_names(const std::filesystem::path& instance, const SmtScript& script,
                                          const RunConfig& config);

/// Reads the script, resolves the projection and starts the solver.
OracleFactory subprocess_factory();

ResultRecord run_count(const RunConfig& config, const std::filesystem::path& instance,
                       const OracleFactory& factory = subprocess_factory());
ResultRecord run_baseline(const RunConfig& config, const std::filesystem::path& instance,
                          const OracleFactory& factory = subprocess_factory());

/// max(b/s, s/b) - 1; 0 when both are 0, infinity when exactly one is.
double error_metric(const BigCount& b, const BigCount& s);

struct CactusRow {
  std::string solver;
  std::size_t solved = 0;
  double time_s = 0.0;
};

struct AccuracyRow {
  std::string instance;
  std::string solver;
  BigCount exact;
  BigCount estimate;
  double error = 0.0;
};

struct BenchReport {
  std::vector<ResultRecord> records;  // instance order, baseline first
  std::vector<CactusRow> cactus;
  std::vector<AccuracyRow> accuracy;
};

/// Instance paths from a list file (one per line, '#' comments, relative to
/// the list's directory), or the .smt2 files themselves.
std::vector<std::filesystem::path> bench_instances(const std::vector<std::string>& inputs);

std::vector<CactusRow> cactus_table(const std::vector<ResultRecord>& records);
std::vector<AccuracyRow> accuracy_table(const std::vector<ResultRecord>& records);

/// Runs the baseline and every family on each instance, up to config.jobs at
/// a time. When config.out is set, writes records.jsonl, cactus.csv and
/// accuracy.csv into that directory.
BenchReport run_bench(const RunConfig& config, const OracleFactory& factory = subprocess_factory());

void write_cactus_csv(std::ostream& out, const std::vector<CactusRow>& rows);
void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows);

/// 0 ok, 2 timeout, 3 error.
int exit_code(const ResultRecord& r);

}  // namespace pact
