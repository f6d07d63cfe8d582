#include <doctest.h>

#include <algorithm>
#include <map>

#include "pact/errors.hpp"
#include "pact/hash.hpp"

using namespace pact;

namespace {

ProjectionSet vars(std::initializer_list<std::pair<const char*, unsigned>> list) {
  std::vector<SortedVar> v;
  for (const auto& [name, width] : list) v.push_back({name, BitVecSort{width}});
  return ProjectionSet(std::move(v));
}

// trial division, independent of the Miller-Rabin implementation
bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t trial_next_prime(std::uint64_t n) {
  for (std::uint64_t k = n + 1;; ++k) {
    if (trial_prime(k)) return k;
  }
}

HashConstraint manual(HashFamily f, unsigned exponent, std::uint64_t range, std::vector<Slice> slices,
                      std::vector<std::uint64_t> a, std::optional<std::uint64_t> b, unsigned wbar) {
  HashConstraint h;
  h.family = f;
  h.exponent = exponent;
  h.range = range;
  h.slices = std::move(slices);
  h.coefficients = std::move(a);
  h.offset = b;
  h.widened_width = wbar;
  return h;
}

}  // namespace

TEST_CASE("slice_projection") {
  auto s8 = slice_projection(vars({{"x", 8}}), 4);
  REQUIRE(s8.size() == 2);
  CHECK(s8[0].lo == 0);
  CHECK(s8[0].hi == 4);
  CHECK(s8[1].lo == 4);
  CHECK(s8[1].hi == 8);

  auto s10 = slice_projection(vars({{"x", 10}}), 4);
  REQUIRE(s10.size() == 3);
  CHECK(s10[2].lo == 8);
  CHECK(s10[2].width() == 2);

  auto s1 = slice_projection(vars({{"x", 1}}), 4);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].width() == 1);

  auto two = slice_projection(vars({{"a", 3}, {"b", 2}}), 1);
  REQUIRE(two.size() == 5);
  CHECK(two[3].var_index == 1);
  CHECK(two[3].parent == "b");
  CHECK(two[3].index == 0);
  CHECK_THROWS_AS(slice_projection(vars({{"x", 4}}), 0), InvalidParameters);
}

TEST_CASE("primes agree with trial division") {
  CHECK(smallest_prime_above(16) == 17);
  CHECK(smallest_prime_above(256) == 257);
  CHECK(smallest_prime_above(2) == 3);
  for (std::uint64_t n = 0; n < 5000; ++n) CHECK(is_prime(n) == trial_prime(n));
  for (unsigned ell = 1; ell <= 24; ++ell) {
    const std::uint64_t n = std::uint64_t{1} << ell;
    CHECK(smallest_prime_above(n) == trial_next_prime(n));
  }
  CHECK(is_prime(18446744073709551557ULL));  // largest 64-bit prime
  CHECK_FALSE(is_prime(3215031751ULL));      // strong pseudoprime to bases 2, 3, 5, 7
  CHECK_FALSE(is_prime(18446744073709551615ULL));
  CHECK(smallest_prime_above(std::uint64_t{1} << 32) == 4294967311ULL);
  CHECK_THROWS_AS(smallest_prime_above(18446744073709551557ULL), RangeExceeded);
}

TEST_CASE("generate_hash instantiates each family") {
  Rng rng(11);
  SUBCASE("xor over three bits") {
    auto h = generate_hash(vars({{"x", 3}}), 1, HashFamily::Xor, rng);
    CHECK(h.range == 2);
    CHECK(h.slices.size() == 3);
    CHECK_FALSE(h.offset);
    CHECK(h.target < 2);
    CHECK(well_formed(h));
  }
  SUBCASE("prime over BitVec(4)") {
    auto h = generate_hash(vars({{"x", 4}}), 4, HashFamily::Prime, rng);
    CHECK(h.range == 17);
    CHECK(h.slices.size() == 1);
    CHECK(h.coefficients[0] < 17);
    CHECK(*h.offset < 17);
    CHECK(h.target < 17);
    CHECK(well_formed(h));
  }
  SUBCASE("shift over BitVec(4), l = 2") {
    auto h = generate_hash(vars({{"x", 4}}), 2, HashFamily::Shift, rng);
    CHECK(h.range == 4);
    CHECK(h.widened_width == 4);  // two slices of width 2
    CHECK(h.slices.size() == 2);
    CHECK(well_formed(h));
  }
  SUBCASE("bad exponents") {
    CHECK_THROWS_AS(generate_hash(vars({{"x", 4}}), 0, HashFamily::Prime, rng), InvalidParameters);
    CHECK_THROWS_AS(generate_hash(vars({{"x", 4}}), 33, HashFamily::Shift, rng), InvalidParameters);
  }
  SUBCASE("same seed, same draws") {
    Rng a(99), b(99);
    auto p = vars({{"x", 13}, {"y", 7}});
    for (auto f : {HashFamily::Xor, HashFamily::Prime, HashFamily::Shift}) {
      CHECK(generate_hash(p, 3, f, a) == generate_hash(p, 3, f, b));
    }
  }
}

TEST_CASE("eval_hash examples") {
  auto p = vars({{"x", 3}});
  auto prime = manual(HashFamily::Prime, 2, 5, slice_projection(p, 3), {2}, 1, 8);
  CHECK(eval_hash(prime, {{3}}) == 2);

  auto q = vars({{"x", 4}});
  auto shift = manual(HashFamily::Shift, 2, 4, slice_projection(q, 4), {5}, 3, 8);
  CHECK(eval_hash(shift, {{9}}) == 0);

  auto x = manual(HashFamily::Xor, 1, 2, slice_projection(p, 1), {1, 0, 1}, std::nullopt, 0);
  CHECK(eval_hash(x, {{0b011}}) == 1);
}

TEST_CASE("HashStack cumulative ranges") {
  auto p = vars({{"x", 4}});
  Rng rng(1);
  auto h2 = generate_hash(p, 1, HashFamily::Xor, rng);
  auto h17 = generate_hash(p, 4, HashFamily::Prime, rng);
  auto h5 = generate_hash(p, 2, HashFamily::Prime, rng);
  REQUIRE(h5.range == 5);

  HashStack a;
  a.push_back(h2);
  a.push_back(h2);
  CHECK(a.cumulative_ranges() == std::vector<BigCount>{1, 2, 4});

  HashStack b;
  b.push_back(h17);
  CHECK(b.cumulative_ranges() == std::vector<BigCount>{1, 17});
  b.replace_last(h5);
  CHECK(b.cumulative_ranges() == std::vector<BigCount>{1, 5});

  HashStack c;
  for (int i = 0; i < 3; ++i) c.push_back(h2);
  CHECK(c.cumulative_ranges() == std::vector<BigCount>{1, 2, 4, 8});
  CHECK(c.prefix(1).cells() == 2);
  c.truncate(0);
  CHECK(c.cells() == 1);

  HashStack empty;
  CHECK_THROWS_AS(empty.replace_last(h2), EmptyStack);

  HashStack big;
  for (int i = 0; i < 40; ++i) big.push_back(generate_hash(p, 32, HashFamily::Prime, rng));
  BigCount expected = 1;
  for (int i = 0; i < 40; ++i) expected *= BigCount(4294967311ULL);
  CHECK(big.cells() == expected);
}

TEST_CASE("Hprime with p = 5, d = 1 is exactly pairwise independent") {
  auto p = vars({{"x", 3}});
  std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>, int> hits;
  for (std::uint64_t a = 0; a < 5; ++a) {
    for (std::uint64_t b = 0; b < 5; ++b) {
      auto h = manual(HashFamily::Prime, 2, 5, slice_projection(p, 3), {a}, b, 8);
      for (std::uint64_t x1 = 0; x1 < 5; ++x1) {
        for (std::uint64_t x2 = 0; x2 < 5; ++x2) {
          if (x1 != x2) ++hits[{x1, x2, eval_hash(h, {{x1}}), eval_hash(h, {{x2}})}];
        }
      }
    }
  }
  for (std::uint64_t x1 = 0; x1 < 5; ++x1) {
    for (std::uint64_t x2 = 0; x2 < 5; ++x2) {
      if (x1 == x2) continue;
      for (std::uint64_t i1 = 0; i1 < 5; ++i1) {
        for (std::uint64_t i2 = 0; i2 < 5; ++i2) CHECK(hits[{x1, x2, i1, i2}] == 1);
      }
    }
  }
}

TEST_CASE("Hshift with wbar = 2w is exactly pairwise independent on 3-bit inputs") {
  // w = 3, l = 2, wbar = 6: each (i1, i2) pair must be hit by 4096 / 16 (a, b) draws
  auto p = vars({{"x", 3}});
  const unsigned wbar = shift_widened_width(2, slice_projection(p, 3));
  REQUIRE(wbar == 6);
  for (std::uint64_t x1 = 0; x1 < 8; ++x1) {
    for (std::uint64_t x2 = x1 + 1; x2 < 8; ++x2) {
      std::map<std::pair<std::uint64_t, std::uint64_t>, int> hits;
      for (std::uint64_t a = 0; a < 64; ++a) {
        for (std::uint64_t b = 0; b < 64; ++b) {
          auto h = manual(HashFamily::Shift, 2, 4, slice_projection(p, 3), {a}, b, wbar);
          ++hits[{eval_hash(h, {{x1}}), eval_hash(h, {{x2}})}];
        }
      }
      REQUIRE(hits.size() == 16);
      for (const auto& [k, n] : hits) CHECK(n == 256);
    }
  }
}

TEST_CASE("Hshift over two 2-bit slices with wbar = 4 is exactly pairwise independent") {
  auto p = vars({{"x", 4}});
  const auto slices = slice_projection(p, 2);
  REQUIRE(shift_widened_width(2, slices) == 4);
  std::vector<std::vector<std::uint64_t>> values(16, std::vector<std::uint64_t>(4096));
  for (std::uint64_t d = 0; d < 4096; ++d) {
    auto h = manual(HashFamily::Shift, 2, 4, slices, {d & 15, (d >> 4) & 15}, d >> 8, 4);
    for (std::uint64_t x = 0; x < 16; ++x) values[x][d] = eval_hash(h, {{x}});
  }
  for (std::uint64_t x1 = 0; x1 < 16; ++x1) {
    for (std::uint64_t x2 = x1 + 1; x2 < 16; ++x2) {
      std::map<std::pair<std::uint64_t, std::uint64_t>, int> hits;
      for (std::uint64_t d = 0; d < 4096; ++d) ++hits[{values[x1][d], values[x2][d]}];
      REQUIRE(hits.size() == 16);
      for (const auto& [k, n] : hits) CHECK(n == 256);
    }
  }
}

TEST_CASE("Hxor splits every nonzero coefficient vector evenly") {
  auto p = vars({{"x", 10}});
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto h = generate_hash(p, 1, HashFamily::Xor, rng);
    if (std::all_of(h.coefficients.begin(), h.coefficients.end(), [](auto a) { return a == 0; })) continue;
    std::uint64_t ones = 0;
    for (std::uint64_t x = 0; x < 1024; ++x) ones += eval_hash(h, {{x}});
    CHECK(ones == 512);
  }
}

TEST_CASE("widened arithmetic cannot overflow") {
  Rng rng(8);
  auto p = vars({{"x", 64}, {"y", 17}, {"z", 1}});
  for (unsigned ell = 1; ell <= 32; ++ell) {
    auto h = generate_hash(p, ell, HashFamily::Prime, rng);
    BigCount worst = h.range - 1;
    for (const auto& s : h.slices) worst += BigCount(h.range - 1) * ((BigCount(1) << s.width()) - 1);
    CHECK(worst < (BigCount(1) << h.widened_width));
    CHECK(h.widened_width >= 2 * ell + h.slices.size());
    CHECK(well_formed(h));

    auto s = generate_hash(p, ell, HashFamily::Shift, rng);
    CHECK(well_formed(s));
    CHECK(s.widened_width <= 64);
  }
}

TEST_CASE("eval_hash handles full 64-bit values") {
  auto p = vars({{"x", 64}});
  Rng rng(2);
  auto h = generate_hash(p, 4, HashFamily::Prime, rng);
  // reference: reduce each term separately
  const std::uint64_t x = ~std::uint64_t{0} - 12345;
  BigCount sum = *h.offset;
  for (std::size_t i = 0; i < h.slices.size(); ++i) {
    sum += BigCount(h.coefficients[i]) * ((x >> h.slices[i].lo) & 0xF);
  }
  CHECK(BigCount(eval_hash(h, {{x}})) == sum % h.range);
}

TEST_CASE("family names") {
  CHECK(parse_family("xor") == HashFamily::Xor);
  CHECK(parse_family("prime") == HashFamily::Prime);
  CHECK(parse_family("shift") == HashFamily::Shift);
  CHECK(to_string(HashFamily::Shift) == "shift");
  CHECK_THROWS_AS(parse_family("md5"), InvalidParameters);
}
