#include "pact/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "pact/baseline.hpp"
#include "pact/errors.hpp"

namespace pact {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string_view to_string(LogBase b) { return b == LogBase::Two ? "2" : "e"; }
std::string_view to_string(RefineMode m) { return m == RefineMode::Decrement ? "decrement" : "halve"; }

LogBase parse_log_base(const std::string& s) {
  if (s == "2") return LogBase::Two;
  if (s == "e") return LogBase::Natural;
  throw InvalidParameters("log base must be 2 or e");
}

RefineMode parse_refine(const std::string& s) {
  if (s == "decrement") return RefineMode::Decrement;
  if (s == "halve") return RefineMode::Halve;
  throw InvalidParameters("refine mode must be decrement or halve");
}

json stats_json(const QueryStats& s) {
  return {{"check_sat_calls", s.check_sat_calls},
          {"assertions_sent", s.assertions_sent},
          {"solver_seconds", s.solver_seconds}};
}

QueryStats stats_from_json(const json& j) {
  QueryStats s;
  s.check_sat_calls = j.at("check_sat_calls").get<std::uint64_t>();
  s.assertions_sent = j.at("assertions_sent").get<std::uint64_t>();
  s.solver_seconds = j.at("solver_seconds").get<double>();
  return s;
}

std::string solver_label(const ResultRecord& r) { return r.solver; }

bool solved(const ResultRecord& r) {
  if (r.status != "ok") return false;
  return r.mode == "count" ? r.estimate.has_value() : r.count_status == "exact";
}

template <typename Run>
ResultRecord guarded(ResultRecord record, Run&& run) {
  const auto start = Clock::now();
  try {
    run(record);
  } catch (const OracleTimeout& e) {
    record.status = "timeout";
    record.message = e.what();
  } catch (const std::exception& e) {
    record.status = "error";
    record.message = e.what();
  }
  record.wall_seconds = seconds_since(start);
  return record;
}

}  // namespace

json to_json(const RunConfig& c) {
  json families = json::array();
  for (auto f : c.bench_families) families.push_back(to_string(f));
  return {{"mode", c.mode},
          {"inputs", c.inputs},
          {"projection", c.projection},
          {"epsilon", c.epsilon},
          {"delta", c.delta},
          {"family", to_string(c.family)},
          {"bench_families", families},
          {"seed", c.seed},
          {"solver_command", c.solver_command},
          {"timeout", c.timeout},
          {"out", c.out},
          {"jobs", c.jobs},
          {"cap", c.cap ? json(*c.cap) : json(nullptr)},
          {"log_base", to_string(c.log_base)},
          {"refine", to_string(c.refine)},
          {"transcript", c.transcript}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.mode = j.at("mode").get<std::string>();
  c.inputs = j.at("inputs").get<std::vector<std::string>>();
  c.projection = j.at("projection").get<std::vector<std::string>>();
  c.epsilon = j.at("epsilon").get<double>();
  c.delta = j.at("delta").get<double>();
  c.family = parse_family(j.at("family").get<std::string>());
  for (const auto& f : j.at("bench_families")) c.bench_families.push_back(parse_family(f.get<std::string>()));
  c.seed = j.at("seed").get<std::uint64_t>();
  c.solver_command = j.at("solver_command").get<std::string>();
  c.timeout = j.at("timeout").get<double>();
  c.out = j.at("out").get<std::string>();
  c.jobs = j.at("jobs").get<unsigned>();
  if (!j.at("cap").is_null()) c.cap = j.at("cap").get<std::uint64_t>();
  c.log_base = parse_log_base(j.at("log_base").get<std::string>());
  c.refine = parse_refine(j.at("refine").get<std::string>());
  c.transcript = j.at("transcript").get<std::string>();
  return c;
}

json big_to_json(const BigCount& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return json(v.convert_to<std::uint64_t>());
  return json(v.str());
}

BigCount big_from_json(const json& j) {
  if (j.is_number_unsigned()) return BigCount(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigCount(j.get<std::int64_t>());
  if (j.is_string()) return BigCount(j.get<std::string>());
  throw InvalidParameters("expected an integer");
}

json to_json(const ResultRecord& r) {
  json raw = json::array();
  for (const auto& v : r.raw_estimates) raw.push_back(big_to_json(v));
  json j = {{"instance", r.instance},
            {"mode", r.mode},
            {"solver", r.solver},
            {"status", r.status},
            {"estimate", r.estimate ? big_to_json(*r.estimate) : json(nullptr)},
            {"exact", r.exact},
            {"raw_estimates", raw},
            {"count", r.count ? big_to_json(*r.count) : json(nullptr)},
            {"count_status", r.count_status},
            {"message", r.message},
            {"stats", stats_json(r.stats)},
            {"saturating_calls", r.saturating_calls},
            {"fallbacks", r.fallbacks},
            {"wall_seconds", r.wall_seconds},
            {"seed", r.seed},
            {"config", to_json(r.config)}};
  return j;
}

ResultRecord record_from_json(const json& j) {
  ResultRecord r;
  r.instance = j.at("instance").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.solver = j.at("solver").get<std::string>();
  r.status = j.at("status").get<std::string>();
  if (!j.at("estimate").is_null()) r.estimate = big_from_json(j.at("estimate"));
  r.exact = j.at("exact").get<bool>();
  for (const auto& v : j.at("raw_estimates")) r.raw_estimates.push_back(big_from_json(v));
  if (!j.at("count").is_null()) r.count = big_from_json(j.at("count"));
  r.count_status = j.at("count_status").get<std::string>();
  r.message = j.at("message").get<std::string>();
  r.stats = stats_from_json(j.at("stats"));
  r.saturating_calls = j.at("saturating_calls").get<std::uint64_t>();
  r.fallbacks = j.at("fallbacks").get<std::uint64_t>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config = config_from_json(j.at("config"));
  return r;
}

bool ResultRecord::operator==(const ResultRecord& o) const { return to_json(*this) == to_json(o); }

json without_timing(const ResultRecord& r) {
  json j = to_json(r);
  j.erase("wall_seconds");
  j["stats"].erase("solver_seconds");
  return j;
}

std::vector<std::string> projection_names(const std::filesystem::path& instance, const SmtScript& script,
                                          const RunConfig& config) {
  if (!config.projection.empty()) return config.projection;
  std::filesystem::path sidecar = instance;
  sidecar += ".proj";
  if (std::filesystem::exists(sidecar)) return read_projection_file(sidecar);
  if (!script.projection_hint.empty()) return script.projection_hint;
  throw InvalidParameters("no projection set for " + instance.string() +
                          " (use --project, a .proj file, or a '; projected-vars:' comment)");
}

OracleFactory subprocess_factory() {
  return [](const std::filesystem::path& instance, const RunConfig& config) -> std::unique_ptr<Oracle> {
    SmtScript script = read_script(instance);
    ProjectionSet projection = resolve_projection(script, projection_names(instance, script, config));
    SolverOptions options;
    options.command = config.solver_command.empty() ? default_solver_command() : config.solver_command;
    if (!config.transcript.empty()) options.transcript = config.transcript;
    return std::make_unique<SubprocessOracle>(script, std::move(projection), std::move(options));
  };
}

ResultRecord run_count(const RunConfig& config, const std::filesystem::path& instance, const OracleFactory& factory) {
  ResultRecord record;
  record.instance = instance.string();
  record.mode = "count";
  record.solver = "pact-" + std::string(to_string(config.family));
  record.seed = config.seed;
  record.config = config;
  record.config.mode = "count";
  return guarded(std::move(record), [&](ResultRecord& r) {
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(config.timeout));
    auto oracle = factory(instance, config);
    CountOptions options;
    options.epsilon = config.epsilon;
    options.delta = config.delta;
    options.family = config.family;
    options.seed = config.seed;
    options.log_base = config.log_base;
    options.refine = config.refine;
    options.deadline = deadline;
    try {
      CountResult result = pact_count(*oracle, options);
      r.estimate = result.estimate;
      r.exact = result.exact;
      r.raw_estimates = std::move(result.raw_estimates);
      r.saturating_calls = result.saturating_calls;
      for (const auto& t : result.iterations) r.fallbacks += t.fallback ? 1 : 0;
    } catch (...) {
      r.stats = oracle->stats();
      throw;
    }
    r.stats = oracle->stats();
  });
}

ResultRecord run_baseline(const RunConfig& config, const std::filesystem::path& instance,
                          const OracleFactory& factory) {
  ResultRecord record;
  record.instance = instance.string();
  record.mode = "baseline";
  record.solver = "baseline";
  record.seed = config.seed;
  record.config = config;
  record.config.mode = "baseline";
  return guarded(std::move(record), [&](ResultRecord& r) {
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(config.timeout));
    auto oracle = factory(instance, config);
    const BaselineResult result = enumerate_count(*oracle, {config.cap, deadline});
    r.count = result.count;
    r.count_status = to_string(result.status);
    r.stats = result.stats;
    if (result.status == BaselineResult::Status::TimedOut) {
      r.status = "timeout";
      r.message = "time budget exhausted after " + std::to_string(result.count) + " models";
    }
  });
}

double error_metric(const BigCount& b, const BigCount& s) {
  if (b == s) return 0.0;
  if (b == 0 || s == 0) return std::numeric_limits<double>::infinity();
  const auto bl = b.convert_to<long double>();
  const auto sl = s.convert_to<long double>();
  return static_cast<double>(std::max(bl / sl, sl / bl) - 1.0L);
}

std::vector<std::filesystem::path> bench_instances(const std::vector<std::string>& inputs) {
  std::vector<std::filesystem::path> out;
  for (const auto& input : inputs) {
    const std::filesystem::path path(input);
    if (path.extension() == ".smt2") {
      out.push_back(path);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot read instance list " + input);
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
      std::size_t first = 0;
      while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
      line.erase(0, first);
      if (line.empty()) continue;
      std::filesystem::path p(line);
      out.push_back(p.is_absolute() ? p : path.parent_path() / p);
    }
  }
  return out;
}

std::vector<CactusRow> cactus_table(const std::vector<ResultRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> times;
  for (const auto& r : records) {
    const std::string label = solver_label(r);
    if (!times.count(label)) order.push_back(label);
    auto& t = times[label];
    if (solved(r)) t.push_back(r.wall_seconds);
  }
  std::vector<CactusRow> rows;
  for (const auto& label : order) {
    auto& t = times[label];
    std::sort(t.begin(), t.end());
    for (std::size_t i = 0; i < t.size(); ++i) rows.push_back({label, i + 1, t[i]});
  }
  return rows;
}

std::vector<AccuracyRow> accuracy_table(const std::vector<ResultRecord>& records) {
  std::map<std::string, BigCount> exact;
  for (const auto& r : records) {
    if (r.mode == "baseline" && solved(r)) exact.emplace(r.instance, *r.count);
  }
  std::vector<AccuracyRow> rows;
  for (const auto& r : records) {
    if (r.mode != "count" || !solved(r)) continue;
    auto it = exact.find(r.instance);
    if (it == exact.end()) continue;
    rows.push_back({r.instance, r.solver, it->second, *r.estimate, error_metric(it->second, *r.estimate)});
  }
  return rows;
}

void write_cactus_csv(std::ostream& out, const std::vector<CactusRow>& rows) {
  out << "solver,solved,time_s\n";
  for (const auto& r : rows) out << r.solver << ',' << r.solved << ',' << r.time_s << '\n';
}

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRow>& rows) {
  out << "instance,solver,exact,estimate,error\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << r.solver << ',' << r.exact << ',' << r.estimate << ',' << r.error << '\n';
  }
}

BenchReport run_bench(const RunConfig& config, const OracleFactory& factory) {
  const auto instances = bench_instances(config.inputs);
  std::vector<HashFamily> families = config.bench_families;
  if (families.empty()) families.push_back(config.family);

  struct Task {
    std::filesystem::path instance;
    std::optional<HashFamily> family;  // nullopt: baseline
  };
  std::vector<Task> tasks;
  for (const auto& inst : instances) {
    tasks.push_back({inst, std::nullopt});
    for (auto f : families) tasks.push_back({inst, f});
  }

  std::ofstream jsonl;
  if (!config.out.empty()) {
    std::filesystem::create_directories(config.out);
    jsonl.open(std::filesystem::path(config.out) / "records.jsonl");
    if (!jsonl) throw Error("cannot write into " + config.out);
  }

  BenchReport report;
  report.records.resize(tasks.size());
  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
      RunConfig c = config;
      ResultRecord r;
      if (tasks[k].family) {
        c.family = *tasks[k].family;
        r = run_count(c, tasks[k].instance, factory);
      } else {
        r = run_baseline(c, tasks[k].instance, factory);
      }
      std::lock_guard lock(mutex);
      if (jsonl.is_open()) jsonl << to_json(r).dump() << '\n' << std::flush;
      report.records[k] = std::move(r);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(tasks.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }

  report.cactus = cactus_table(report.records);
  report.accuracy = accuracy_table(report.records);
  if (!config.out.empty()) {
    std::ofstream cactus(std::filesystem::path(config.out) / "cactus.csv");
    write_cactus_csv(cactus, report.cactus);
    std::ofstream accuracy(std::filesystem::path(config.out) / "accuracy.csv");
    write_accuracy_csv(accuracy, report.accuracy);
  }
  return report;
}

int exit_code(const ResultRecord& r) {
  if (r.status == "ok") return 0;
  if (r.status == "timeout") return 2;
  return 3;
}

}  // namespace pact
