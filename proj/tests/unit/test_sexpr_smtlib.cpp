#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include "pact/errors.hpp"
#include "pact/hash.hpp"
#include "pact/render.hpp"
#include "pact/sexpr.hpp"
#include "pact/smtlib.hpp"

using namespace pact;

TEST_CASE("sexpr reader: atoms, lists, comments, quoted symbols") {
  SExprReader r("; head\n(assert (= |a b| #b01)) ; tail\n(check-sat)\n\"str\"\"ing\"");
  auto e1 = r.next();
  REQUIRE(e1);
  CHECK(e1->is_list);
  CHECK(e1->items[1][1].atom == "|a b|");
  CHECK(e1->items[1][2].atom == "#b01");
  CHECK(e1->line == 2);
  auto e2 = r.next();
  REQUIRE(e2);
  CHECK(e2->items[0].is_atom("check-sat"));
  auto e3 = r.next();
  REQUIRE(e3);
  CHECK(e3->atom == "\"str\"\"ing\"");
  CHECK_FALSE(r.next());
  REQUIRE(r.comments().size() == 2);
  CHECK(r.comments()[0].first == 1);
}

TEST_CASE("sexpr reader rejects unbalanced input") {
  CHECK_THROWS_AS(parse_sexprs("(assert (= x y)"), MalformedScript);
  CHECK_THROWS_AS(parse_sexprs("x)"), MalformedScript);
}

TEST_CASE("complete_sexpr_length finds the first full expression") {
  CHECK_FALSE(complete_sexpr_length("  ((x #b0"));
  CHECK(complete_sexpr_length("  ((x #b01))\nrest") == std::size_t{12});
  CHECK(complete_sexpr_length("sat\n") == std::size_t{3});
  CHECK_FALSE(complete_sexpr_length("sa"));
}

TEST_CASE("parse_declarations maps declarations") {
  auto s = parse_declarations("(declare-const x (_ BitVec 8))");
  REQUIRE(s.declarations.size() == 1);
  CHECK(s.declarations[0].name == "x");
  CHECK(s.declarations[0].width() == 8);

  auto t = parse_declarations("(declare-fun y () Float32)(declare-const x (_ BitVec 4))");
  REQUIRE(t.declarations.size() == 2);
  CHECK(t.declarations[0].name == "y");
  CHECK(std::get<OtherSort>(t.declarations[0].sort).text == "Float32");
  CHECK(t.declarations[1].width() == 4);

  CHECK_THROWS_AS(parse_declarations("(declare-const x (_ BitVec 0))"), MalformedScript);
}

TEST_CASE("parse_declarations details") {
  SUBCASE("non-nullary functions are not variables") {
    auto s = parse_declarations("(declare-fun f ((_ BitVec 4)) (_ BitVec 4))(declare-fun g () (_ BitVec 2))");
    REQUIRE(s.declarations.size() == 1);
    CHECK(s.declarations[0].name == "g");
  }
  SUBCASE("duplicates and bad syntax report the line") {
    try {
      parse_declarations("(declare-const x (_ BitVec 4))\n(declare-const x (_ BitVec 4))");
      FAIL("expected MalformedScript");
    } catch (const MalformedScript& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_declarations("(declare-const x)"), MalformedScript);
    CHECK_THROWS_AS(parse_declarations("x"), MalformedScript);
  }
  SUBCASE("logic, commands and projection hint") {
    auto s = parse_declarations(
        "; projected-vars: a, b\n(set-logic QF_BV)\n(declare-const a (_ BitVec 3))\n(declare-const b (_ BitVec 5))\n"
        "(assert (bvult a #b011))\n(check-sat)\n");
    CHECK(s.logic == "QF_BV");
    CHECK(s.commands.size() == 5);
    CHECK(s.commands[3].text == "(assert (bvult a #b011))");
    CHECK(s.projection_hint == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("pure") {
    const std::string text = "(declare-const x (_ BitVec 8))(assert true)";
    CHECK(parse_declarations(text) == parse_declarations(text));
  }
}

TEST_CASE("resolve_projection") {
  auto s = parse_declarations("(declare-const x (_ BitVec 8))(declare-const y Real)(declare-const w (_ BitVec 3))");
  std::vector<std::string> xs{"x"};
  auto p = resolve_projection(s, xs);
  CHECK(p.size() == 1);
  CHECK(p.total_width() == 8);

  std::vector<std::string> order{"w", "x"};
  auto q = resolve_projection(s, order);
  CHECK(q[0].name == "w");
  CHECK(q[1].name == "x");
  CHECK(q.total_width() == 11);
  CHECK(q.index_of("x") == std::size_t{1});

  std::vector<std::string> z{"z"};
  CHECK_THROWS_AS(resolve_projection(s, z), UnknownVariable);
  std::vector<std::string> y{"y"};
  CHECK_THROWS_AS(resolve_projection(s, y), NonDiscreteProjection);
  std::vector<std::string> none;
  CHECK_THROWS_AS(resolve_projection(s, none), InvalidParameters);
  std::vector<std::string> twice{"x", "x"};
  CHECK_THROWS_AS(resolve_projection(s, twice), InvalidParameters);

  auto wide = parse_declarations("(declare-const big (_ BitVec 65))");
  std::vector<std::string> b{"big"};
  CHECK_THROWS_AS(resolve_projection(wide, b), NonDiscreteProjection);
}

TEST_CASE("projection arguments and sidecar files") {
  CHECK(parse_projection_arg("x,y z") == std::vector<std::string>{"x", "y", "z"});
  const auto path = std::filesystem::temp_directory_path() / "pact_unit_proj.txt";
  {
    std::ofstream f(path);
    f << "# projection\nx\ny  # second\n\n";
  }
  CHECK(parse_projection_arg("@" + path.string()) == std::vector<std::string>{"x", "y"});
  std::filesystem::remove(path);
}

TEST_CASE("render_assertion: spec serializations") {
  auto s = parse_declarations("(declare-const x (_ BitVec 4))");
  std::vector<std::string> xs{"x"};
  auto p = resolve_projection(s, xs);

  HashConstraint h;
  h.family = HashFamily::Xor;
  h.slices = slice_projection(p, 1);
  h.coefficients = {1, 0, 1, 0};
  h.target = 1;
  CHECK(render_assertion(h) == "(assert (= (bvxor ((_ extract 0 0) x) ((_ extract 2 2) x)) #b1))");

  BlockingClause c = BlockingClause::of(p, ProjectedModel{{5}});
  CHECK(render_assertion(c) == "(assert (not (= x #b0101)))");

  HashConstraint q;
  q.family = HashFamily::Prime;
  q.exponent = 4;
  q.range = 17;
  q.slices = slice_projection(p, 4);
  q.coefficients = {3};
  q.offset = 2;
  q.target = 6;
  q.widened_width = prime_widened_width(4, 17, q.slices);
  CHECK(well_formed(q));
  const std::string text = render_assertion(q);
  CHECK(text.find("bvurem") != std::string::npos);
  CHECK(text.find("bvmul") != std::string::npos);
  CHECK(text.find(bin_literal(17, q.widened_width)) != std::string::npos);
  CHECK(text.find(bin_literal(6, q.widened_width)) != std::string::npos);
  CHECK(text.find(bin_literal(3, q.widened_width)) != std::string::npos);
}

TEST_CASE("rendered assertions are balanced and use only declared symbols") {
  auto s = parse_declarations("(declare-const a (_ BitVec 7))(declare-const b (_ BitVec 10))");
  std::vector<std::string> names{"a", "b"};
  auto p = resolve_projection(s, names);
  const std::vector<std::string> allowed = {
      "assert", "=", "not", "and", "bvxor", "bvadd", "bvmul", "bvurem", "_", "extract", "zero_extend", "a", "b"};
  Rng rng(5);
  for (auto family : {HashFamily::Xor, HashFamily::Prime, HashFamily::Shift}) {
    for (unsigned ell : {1u, 2u, 3u, 4u}) {
      const auto h = generate_hash(p, ell, family, rng);
      const auto exprs = parse_sexprs(render_assertion(h));
      REQUIRE(exprs.size() == 1);
      std::vector<const SExpr*> todo{&exprs[0]};
      while (!todo.empty()) {
        const SExpr* e = todo.back();
        todo.pop_back();
        if (e->is_list) {
          for (const auto& c : e->items) todo.push_back(&c);
          continue;
        }
        const bool literal = e->atom.rfind("#b", 0) == 0;
        const bool numeral = !e->atom.empty() && std::isdigit(static_cast<unsigned char>(e->atom[0]));
        const bool known = std::find(allowed.begin(), allowed.end(), e->atom) != allowed.end();
        CHECK_MESSAGE((literal || numeral || known), e->atom);
      }
    }
  }
}

TEST_CASE("bin_literal") {
  CHECK(bin_literal(5, 4) == "#b0101");
  CHECK(bin_literal(0, 1) == "#b0");
  CHECK(bin_literal(~std::uint64_t{0}, 64) == "#b" + std::string(64, '1'));
}
