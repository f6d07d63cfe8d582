#include "pact/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pact/errors.hpp"
#include "pact/render.hpp"
#include "pact/rng.hpp"

namespace pact {

namespace {

std::uint64_t space(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << width;
}

// k sorted points drawn uniformly with replacement from [0, bound]
std::vector<std::uint64_t> sorted_draws(Rng& rng, std::size_t k, std::uint64_t bound) {
  std::vector<std::uint64_t> out(k);
  for (auto& v : out) v = bound == ~std::uint64_t{0} ? rng.bits(64) : rng.below(bound + 1);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Interval> place_intervals(const InstanceSpec& spec) {
  if (spec.pieces <= 1) return {{0, spec.count - 1}};
  Rng rng(spec.seed);
  const unsigned k = static_cast<unsigned>(std::min<std::uint64_t>(spec.pieces, spec.count));

  // piece sizes: k-1 distinct cuts in [1, count-1]
  std::vector<std::uint64_t> cuts;
  while (cuts.size() + 1 < k) {
    const std::uint64_t c = 1 + rng.below(spec.count - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(spec.count);

  // free space split into k+1 gaps
  const std::uint64_t free = space(spec.width) - spec.count;
  std::vector<std::uint64_t> marks = sorted_draws(rng, k, free);

  std::vector<Interval> out;
  std::uint64_t pos = 0;
  std::uint64_t prev_mark = 0;
  for (unsigned j = 0; j < k; ++j) {
    pos += marks[j] - prev_mark;
    prev_mark = marks[j];
    const std::uint64_t size = cuts[j + 1] - cuts[j];
    out.push_back({pos, pos + size - 1});
    pos += size;
  }
  return out;
}

std::string interval_formula(const std::vector<Interval>& intervals, unsigned width) {
  std::ostringstream out;
  auto one = [&](const Interval& iv) {
    std::ostringstream f;
    if (iv.lo == iv.hi) {
      f << "(= x " << bin_literal(iv.lo, width) << ")";
    } else if (iv.lo == 0) {
      f << "(bvule x " << bin_literal(iv.hi, width) << ")";
    } else {
      f << "(and (bvuge x " << bin_literal(iv.lo, width) << ") (bvule x " << bin_literal(iv.hi, width) << "))";
    }
    return f.str();
  };
  if (intervals.size() == 1) return one(intervals.front());
  out << "(or";
  for (const auto& iv : intervals) out << "\n    " << one(iv);
  out << ")";
  return out.str();
}

}  // namespace

std::uint64_t GeneratedInstance::known_count() const {
  std::uint64_t n = 0;
  for (const auto& iv : intervals) n += iv.hi - iv.lo + 1;
  return spec.z_width ? n * spec.z_bound : n;
}

std::vector<std::string> GeneratedInstance::projection() const {
  if (spec.z_width) return {"x", "z"};
  return {"x"};
}

std::vector<ProjectedModel> GeneratedInstance::solutions() const {
  std::vector<ProjectedModel> out;
  out.reserve(known_count());
  for (const auto& iv : intervals) {
    for (std::uint64_t v = iv.lo;; ++v) {
      if (spec.z_width) {
        for (std::uint64_t z = 0; z < spec.z_bound; ++z) out.push_back({{v, z}});
      } else {
        out.push_back({{v}});
      }
      if (v == iv.hi) break;
    }
  }
  return out;
}

GeneratedInstance generate_instance(const InstanceSpec& spec) {
  if (spec.width == 0 || spec.width > 63) throw InvalidParameters("instance width must be in 1..63");
  if (spec.count == 0 || spec.count > space(spec.width)) {
    throw InvalidParameters("instance count must be in 1..2^width");
  }
  if (spec.z_width && (*spec.z_width == 0 || *spec.z_width > 32 || spec.z_bound == 0 ||
                       spec.z_bound > space(*spec.z_width))) {
    throw InvalidParameters("z bound must be in 1..2^z_width");
  }

  GeneratedInstance g;
  g.spec = spec;
  g.intervals = place_intervals(spec);

  std::ostringstream s;
  s << "; generated instance " << spec.id << ", projected count " << g.known_count() << "\n";
  s << "; projected-vars: x" << (spec.z_width ? " z" : "") << "\n";
  s << "(set-logic " << (spec.hybrid ? "QF_BVFP" : "QF_BV") << ")\n";
  s << "(declare-fun x () (_ BitVec " << spec.width << "))\n";
  if (spec.z_width) s << "(declare-fun z () (_ BitVec " << *spec.z_width << "))\n";
  if (spec.shadow) s << "(declare-fun u () (_ BitVec 8))\n";
  if (spec.hybrid) s << "(declare-fun y () (_ FloatingPoint 8 24))\n";

  if (spec.count < space(spec.width)) {
    if (g.intervals.size() == 1 && g.intervals[0].lo == 0) {
      s << "(assert (bvult x " << bin_literal(spec.count, spec.width) << "))\n";
    } else {
      s << "(assert " << interval_formula(g.intervals, spec.width) << ")\n";
    }
  }
  if (spec.z_width && spec.z_bound < space(*spec.z_width)) {
    s << "(assert (bvult z " << bin_literal(spec.z_bound, *spec.z_width) << "))\n";
  }
  if (spec.shadow) s << "(assert (= ((_ extract 0 0) u) ((_ extract 0 0) x)))\n";
  if (spec.hybrid) s << "(assert (fp.gt y (_ +zero 8 24)))\n";
  s << "(check-sat)\n";
  g.smt2 = s.str();
  return g;
}

std::vector<InstanceSpec> accuracy_corpus(std::uint64_t seed, unsigned n, std::uint64_t min_count,
                                          std::uint64_t max_count) {
  if (min_count == 0 || min_count > max_count) throw InvalidParameters("bad corpus count range");
  Rng rng(seed);
  const unsigned widths[] = {12, 14, 16, 20, 24};
  std::vector<InstanceSpec> out;
  for (unsigned i = 0; i < n; ++i) {
    InstanceSpec spec;
    spec.id = "acc" + std::to_string(i);
    spec.seed = rng.bits(64);
    const double t = static_cast<double>(rng.below(1u << 20)) / static_cast<double>(1u << 20);
    const double lg = std::log(static_cast<double>(min_count)) +
                      t * (std::log(static_cast<double>(max_count)) - std::log(static_cast<double>(min_count)));
    std::uint64_t target = std::clamp<std::uint64_t>(std::llround(std::exp(lg)), min_count, max_count);
    spec.width = widths[rng.below(std::size(widths))];
    spec.pieces = 1 + static_cast<unsigned>(rng.below(6));
    if (i % 3 == 2 && target >= 2 * min_count) {
      // second projected variable carries a factor of 2..4
      spec.z_width = 3;
      spec.z_bound = 2 + rng.below(3);
      target = std::max<std::uint64_t>(1, target / spec.z_bound);
    }
    spec.count = std::min(target, space(spec.width));
    spec.hybrid = i % 4 == 1;
    spec.shadow = i % 5 == 3;
    out.push_back(spec);
  }
  return out;
}

std::vector<InstanceSpec> smoke_corpus(std::uint64_t seed) {
  std::vector<InstanceSpec> out;
  const std::pair<unsigned, std::uint64_t> shapes[] = {{8, 20}, {12, 256}, {16, 4096}};
  Rng rng(seed);
  for (bool hybrid : {false, true}) {
    for (const auto& [width, count] : shapes) {
      InstanceSpec spec;
      spec.id = std::string(hybrid ? "hybrid" : "bv") + "_w" + std::to_string(width) + "_c" + std::to_string(count);
      spec.width = width;
      spec.count = count;
      spec.pieces = hybrid ? 1 : 3;
      spec.hybrid = hybrid;
      spec.shadow = hybrid;
      spec.seed = rng.bits(64);
      out.push_back(spec);
    }
  }
  return out;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<GeneratedInstance>& instances) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = nlohmann::json::array();
  std::ofstream list(dir / "instances.txt");
  if (!list) throw Error("cannot write " + (dir / "instances.txt").string());
  for (const auto& g : instances) {
    const std::string file = g.spec.id + ".smt2";
    std::ofstream out(dir / file);
    if (!out) throw Error("cannot write " + (dir / file).string());
    out << g.smt2;
    list << file << "\n";
    manifest.push_back({{"id", g.spec.id},
                        {"file", file},
                        {"count", g.known_count()},
                        {"width", g.spec.width},
                        {"projection", g.projection()},
                        {"hybrid", g.spec.hybrid}});
  }
  std::ofstream m(dir / "manifest.json");
  if (!m) throw Error("cannot write " + (dir / "manifest.json").string());
  m << manifest.dump(2) << "\n";
}

}  // namespace pact
