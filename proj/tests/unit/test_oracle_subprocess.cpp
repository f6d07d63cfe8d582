#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pact/baseline.hpp"
#include "pact/counter.hpp"
#include "pact/errors.hpp"
#include "pact/oracle.hpp"
#include "pact/render.hpp"

using namespace pact;

namespace {

bool have_solver() { return solver_available(default_solver_command()); }

SubprocessOracle open(const std::string& text, std::vector<std::string> names, std::string command = "") {
  auto script = parse_declarations(text);
  auto projection = resolve_projection(script, names);
  SolverOptions options;
  options.command = command.empty() ? default_solver_command() : command;
  return SubprocessOracle(script, std::move(projection), options);
}

// Minimal stand-in solver: answers success to everything and reacts to
// check-sat according to its argument.
std::string fake_solver(const std::string& on_check_sat) {
  const auto path = std::filesystem::temp_directory_path() / ("pact_fake_solver_" + on_check_sat + ".sh");
  std::ofstream f(path);
  f << "#!/bin/sh\n"
       "while IFS= read -r line; do\n"
       "  case \"$line\" in\n"
       "    *check-sat*)\n";
  if (on_check_sat == "hang") f << "      sleep 30 ;;\n";
  if (on_check_sat == "unknown") f << "      echo unknown ;;\n";
  if (on_check_sat == "die") f << "      exit 1 ;;\n";
  if (on_check_sat == "garbage") f << "      echo maybe ;;\n";
  f << "    *exit*) exit 0 ;;\n"
       "    *) echo success ;;\n"
       "  esac\n"
       "done\n";
  f.close();
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  return path.string();
}

const char* kSmall = "(declare-const x (_ BitVec 4))";

}  // namespace

TEST_CASE("fake solver: timeout restarts and replays") {
  auto o = open(kSmall, {"x"}, fake_solver("hang"));
  o.push();
  o.add(BlockingClause::of(o.projection(), {{5}}));
  o.set_query_timeout(std::chrono::milliseconds(200));
  const auto start = std::chrono::steady_clock::now();
  CHECK(o.check_sat() == SatResult::Timeout);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
  CHECK(o.launches() == 2);
  CHECK(o.depth() == 1);
  o.pop();
  CHECK(o.depth() == 0);
}

TEST_CASE("fake solver: unknown is reported, and fatal for counting") {
  auto o = open(kSmall, {"x"}, fake_solver("unknown"));
  CHECK(o.check_sat() == SatResult::Unknown);
  CHECK_THROWS_AS(saturating_counter(o, 10), SolverUnknown);
  CHECK(o.depth() == 0);
}

TEST_CASE("fake solver: crashes and protocol violations") {
  auto dies = open(kSmall, {"x"}, fake_solver("die"));
  CHECK_THROWS_AS(dies.check_sat(), SolverCrashed);
  auto babbles = open(kSmall, {"x"}, fake_solver("garbage"));
  CHECK_THROWS_AS(babbles.check_sat(), SolverCrashed);
  CHECK_THROWS_AS(open(kSmall, {"x"}, "/nonexistent/solver-binary"), SolverCrashed);
}

TEST_CASE("real solver: basic queries" * doctest::skip(!have_solver())) {
  auto unsat = open("(declare-const x (_ BitVec 4))(assert false)", {"x"});
  CHECK(unsat.check_sat() == SatResult::Unsat);

  auto five = open("(declare-const x (_ BitVec 4))(assert (= x #b0101))", {"x"});
  REQUIRE(five.check_sat() == SatResult::Sat);
  CHECK(five.projected_model() == ProjectedModel{{5}});

  auto wide = open("(declare-const x (_ BitVec 64))(assert (= x #xfffffffffffffffe))", {"x"});
  REQUIRE(wide.check_sat() == SatResult::Sat);
  CHECK(wide.projected_model() == ProjectedModel{{0xfffffffffffffffeULL}});
  CHECK(wide.stats().check_sat_calls == 1);
}

TEST_CASE("real solver: baseline examples" * doctest::skip(!have_solver())) {
  auto bvult = open("(declare-const x (_ BitVec 4))(assert (bvult x #b0101))", {"x"});
  auto r = enumerate_count(bvult);
  CHECK(r.status == BaselineResult::Status::Exact);
  CHECK(r.count == 5);
  CHECK(bvult.depth() == 0);

  auto none = open("(declare-const x (_ BitVec 4))(assert false)", {"x"});
  CHECK(enumerate_count(none).count == 0);

  auto hybrid = open(
      "(set-logic QF_BVLRA)(declare-const x (_ BitVec 4))(declare-const y Real)"
      "(assert (bvult x #b0011))(assert (> y 0.0))",
      {"x"});
  CHECK(enumerate_count(hybrid).count == 3);

  auto capped = open("(declare-const x (_ BitVec 8))", {"x"});
  auto c = enumerate_count(capped, {std::uint64_t{10}, std::nullopt});
  CHECK(c.status == BaselineResult::Status::Capped);
  CHECK(c.count == 10);
}

TEST_CASE("real solver: eval_hash agrees with the rendered constraint" * doctest::skip(!have_solver())) {
  const std::string decls = "(declare-const a (_ BitVec 11))(declare-const b (_ BitVec 5))";
  auto o = open(decls, {"a", "b"});
  Rng rng(17);
  for (int trial = 0; trial < 12; ++trial) {
    const auto family = static_cast<HashFamily>(trial % 3);
    auto h = generate_hash(o.projection(), 1 + static_cast<unsigned>(rng.below(5)), family, rng);
    const ProjectedModel m{{rng.bits(11), rng.bits(5)}};
    const std::uint64_t value = eval_hash(h, m);
    o.push();
    o.assert_text("(assert (and (= a " + bin_literal(m.values[0], 11) + ") (= b " + bin_literal(m.values[1], 5) +
                  ")))");
    h.target = value;
    o.push();
    o.add(h);
    CHECK_MESSAGE(o.check_sat() == SatResult::Sat, render_assertion(h));
    o.pop();
    h.target = (value + 1) % h.range;
    o.push();
    o.add(h);
    CHECK_MESSAGE(o.check_sat() == SatResult::Unsat, render_assertion(h));
    o.pop();
    o.pop();
  }
}

TEST_CASE("real solver: agrees with the in-memory oracle on hashed cells" * doctest::skip(!have_solver())) {
  const std::string text =
      "(declare-const x (_ BitVec 9))(declare-const y (_ BitVec 3))"
      "(assert (bvult x #b001100100))(assert (not (= y #b101)))";
  auto solver = open(text, {"x", "y"});
  std::vector<ProjectedModel> models;
  for (std::uint64_t x = 0; x < 100; ++x) {
    for (std::uint64_t y = 0; y < 8; ++y) {
      if (y != 5) models.push_back({{x, y}});
    }
  }
  InMemoryOracle memory(solver.projection(), models);
  CHECK(enumerate_count(solver).count == 700);

  Rng rng(2);
  for (auto family : {HashFamily::Xor, HashFamily::Prime, HashFamily::Shift}) {
    const auto h1 = generate_hash(solver.projection(), 3, family, rng);
    const auto h2 = generate_hash(solver.projection(), 2, family, rng);
    for (Oracle* o : {static_cast<Oracle*>(&solver), static_cast<Oracle*>(&memory)}) {
      o->push();
      o->add(h1);
      o->add(h2);
    }
    const auto a = enumerate_count(solver);
    const auto b = enumerate_count(memory);
    CHECK(a.count == b.count);
    CHECK(saturating_counter(solver, 20) == saturating_counter(memory, 20));
    solver.pop();
    memory.pop();
  }
}
