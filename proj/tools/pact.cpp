// pact: approximate projected model counting for SMT-LIB2 formulas.
//
//   pact count    f.smt2 --project x,y [--family xor|prime|shift] ...
//   pact baseline f.smt2 --project x,y [--cap N]
//   pact bench    instances.txt --out dir [--families xor,prime,shift] [--jobs N]
//   pact gen-corpus --out dir [--kind accuracy|smoke]

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pact/corpus.hpp"
#include "pact/errors.hpp"
#include "pact/harness.hpp"

namespace {

struct Args {
  pact::RunConfig config;
  std::string project;
  std::string family = "xor";
  std::string families;
  std::string log_base = "2";
  std::string refine = "decrement";
  std::uint64_t cap = 0;
};

void add_run_options(CLI::App& cmd, Args& a, bool counting) {
  cmd.add_option("input", a.config.inputs, counting ? "SMT-LIB2 file" : "instance list or .smt2 files")->required();
  cmd.add_option("--project,-p", a.project, "projection variables: names separated by commas, or @file");
  cmd.add_option("--seed", a.config.seed, "random seed")->capture_default_str();
  cmd.add_option("--solver-cmd", a.config.solver_command, "solver command line (default: $PACT_SOLVER_CMD, cvc5, z3)");
  cmd.add_option("--timeout", a.config.timeout, "seconds per run")->capture_default_str();
  cmd.add_option("--transcript", a.config.transcript, "log the solver dialogue to this file");
  cmd.add_option("--epsilon", a.config.epsilon, "tolerance")->capture_default_str();
  cmd.add_option("--delta", a.config.delta, "confidence parameter")->capture_default_str();
  cmd.add_option("--family", a.family, "hash family: xor, prime or shift")->capture_default_str();
  cmd.add_option("--log-base", a.log_base, "logarithm base of the iteration count: 2 or e")->capture_default_str();
  cmd.add_option("--refine", a.refine, "last-hash refinement: decrement or halve")->capture_default_str();
  cmd.add_option("--cap", a.cap, "stop the baseline after this many models");
}

void finish_config(Args& a) {
  if (!a.project.empty()) a.config.projection = pact::parse_projection_arg(a.project);
  a.config.family = pact::parse_family(a.family);
  if (!a.families.empty()) {
    std::string_view rest = a.families;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      a.config.bench_families.push_back(pact::parse_family(rest.substr(0, comma)));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  if (a.log_base == "2") {
    a.config.log_base = pact::LogBase::Two;
  } else if (a.log_base == "e") {
    a.config.log_base = pact::LogBase::Natural;
  } else {
    throw pact::InvalidParameters("--log-base must be 2 or e");
  }
  if (a.refine == "decrement") {
    a.config.refine = pact::RefineMode::Decrement;
  } else if (a.refine == "halve") {
    a.config.refine = pact::RefineMode::Halve;
  } else {
    throw pact::InvalidParameters("--refine must be decrement or halve");
  }
  if (a.cap > 0) a.config.cap = a.cap;
}

int emit(const pact::ResultRecord& r, const std::string& out) {
  const std::string text = pact::to_json(r).dump();
  if (out.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "pact: cannot write " << out << '\n';
      return 3;
    }
    f << text << '\n';
  }
  if (r.status != "ok") std::cerr << "pact: " << r.status << ": " << r.message << '\n';
  return pact::exit_code(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate projected model counting for SMT formulas"};
  app.require_subcommand(1);

  Args args;
  auto* count = app.add_subcommand("count", "estimate the projected model count");
  add_run_options(*count, args, true);
  count->add_option("--out,-o", args.config.out, "write the JSON record here instead of stdout");

  auto* baseline = app.add_subcommand("baseline", "exact projected count by enumeration");
  add_run_options(*baseline, args, true);
  baseline->add_option("--out,-o", args.config.out, "write the JSON record here instead of stdout");

  auto* bench = app.add_subcommand("bench", "baseline and counter over a set of instances");
  add_run_options(*bench, args, false);
  bench->add_option("--out,-o", args.config.out, "output directory")->required();
  bench->add_option("--families", args.families, "hash families to run, comma separated");
  bench->add_option("--jobs,-j", args.config.jobs, "instances run concurrently")->capture_default_str();

  auto* gen = app.add_subcommand("gen-corpus", "write generated instances with known counts");
  std::string gen_out;
  std::string gen_kind = "accuracy";
  std::uint64_t gen_seed = 1;
  unsigned gen_n = 30;
  std::uint64_t gen_min = 100;
  std::uint64_t gen_max = 5000;
  gen->add_option("--out,-o", gen_out, "output directory")->required();
  gen->add_option("--kind", gen_kind, "accuracy or smoke")->capture_default_str();
  gen->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  gen->add_option("--n", gen_n, "number of instances (accuracy)")->capture_default_str();
  gen->add_option("--min-count", gen_min, "smallest count (accuracy)")->capture_default_str();
  gen->add_option("--max-count", gen_max, "largest count (accuracy)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    if (gen->parsed()) {
      std::vector<pact::InstanceSpec> specs;
      if (gen_kind == "accuracy") {
        specs = pact::accuracy_corpus(gen_seed, gen_n, gen_min, gen_max);
      } else if (gen_kind == "smoke") {
        specs = pact::smoke_corpus(gen_seed);
      } else {
        throw pact::InvalidParameters("--kind must be accuracy or smoke");
      }
      std::vector<pact::GeneratedInstance> instances;
      for (const auto& s : specs) instances.push_back(pact::generate_instance(s));
      pact::write_corpus(gen_out, instances);
      std::cout << "wrote " << instances.size() << " instances to " << gen_out << '\n';
      return 0;
    }

    finish_config(args);
    if (count->parsed() || baseline->parsed()) {
      if (args.config.inputs.size() != 1) throw pact::InvalidParameters("expected exactly one input file");
      args.config.mode = count->parsed() ? "count" : "baseline";
      const auto record = count->parsed() ? pact::run_count(args.config, args.config.inputs[0])
                                          : pact::run_baseline(args.config, args.config.inputs[0]);
      return emit(record, args.config.out);
    }

    args.config.mode = "bench";
    const auto report = pact::run_bench(args.config);
    int failures = 0;
    for (const auto& r : report.records) failures += r.status == "ok" ? 0 : 1;
    std::cout << report.records.size() << " runs, " << failures << " not ok; results in " << args.config.out << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "pact: " << e.what() << '\n';
    return 3;
  }
}
