#include "pact/hash.hpp"

#include <algorithm>
#include <bit>

#include "pact/errors.hpp"

namespace pact {

namespace {

using u128 = unsigned __int128;

std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

std::uint64_t slice_value(const Slice& s, const ProjectedModel& m) {
  return (m.values.at(s.var_index) >> s.lo) & low_mask(s.width());
}

unsigned bit_length(const BigCount& v) {
  return v == 0 ? 0 : static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
}

constexpr unsigned kMaxWordExponent = 32;

}  // namespace

std::string_view to_string(HashFamily f) {
  switch (f) {
    case HashFamily::Xor:
      return "xor";
    case HashFamily::Prime:
      return "prime";
    case HashFamily::Shift:
      return "shift";
  }
  return "?";
}

HashFamily parse_family(std::string_view name) {
  if (name == "xor") return HashFamily::Xor;
  if (name == "prime") return HashFamily::Prime;
  if (name == "shift") return HashFamily::Shift;
  throw InvalidParameters("unknown hash family '" + std::string(name) + "' (expected xor, prime or shift)");
}

std::vector<Slice> slice_projection(const ProjectionSet& s, unsigned slice_width) {
  if (slice_width == 0) throw InvalidParameters("slice width must be positive");
  std::vector<Slice> out;
  for (std::size_t v = 0; v < s.size(); ++v) {
    const unsigned w = s[v].width();
    const unsigned count = (w + slice_width - 1) / slice_width;
    for (unsigned i = 0; i < count; ++i) {
      out.push_back({v, s[v].name, i, i * slice_width, std::min((i + 1) * slice_width, w)});
    }
  }
  return out;
}

unsigned prime_widened_width(unsigned exponent, std::uint64_t prime, const std::vector<Slice>& slices) {
  // 2w + d, widened further if the exact worst case needs more bits
  BigCount worst = 0;
  for (const auto& s : slices) worst += BigCount(prime - 1) * BigCount(low_mask(s.width()));
  worst += prime - 1;
  const unsigned base = 2 * exponent + static_cast<unsigned>(slices.size());
  return std::max(base, bit_length(worst));
}

unsigned shift_widened_width(unsigned exponent, const std::vector<Slice>& slices) {
  unsigned w = 0;
  for (const auto& s : slices) w = std::max(w, s.width());
  return std::max(2 * w, w + exponent - 1);
}

bool well_formed(const HashConstraint& h) {
  if (h.coefficients.size() != h.slices.size() || h.target >= h.range) return false;
  for (const auto& s : h.slices) {
    if (s.width() == 0) return false;
  }
  switch (h.family) {
    case HashFamily::Xor:
      if (h.range != 2 || h.offset || h.exponent != 1) return false;
      for (const auto& s : h.slices) {
        if (s.width() != 1) return false;
      }
      return std::all_of(h.coefficients.begin(), h.coefficients.end(), [](auto a) { return a <= 1; });
    case HashFamily::Prime: {
      if (!h.offset || !is_prime(h.range) || *h.offset >= h.range) return false;
      if (h.range != smallest_prime_above(std::uint64_t{1} << h.exponent)) return false;
      if (h.widened_width < prime_widened_width(h.exponent, h.range, h.slices)) return false;
      return std::all_of(h.coefficients.begin(), h.coefficients.end(), [&](auto a) { return a < h.range; });
    }
    case HashFamily::Shift: {
      if (!h.offset || h.range != (std::uint64_t{1} << h.exponent)) return false;
      unsigned w = 0;
      for (const auto& s : h.slices) w = std::max(w, s.width());
      if (h.widened_width > 64 || h.widened_width < w + h.exponent - 1 || h.widened_width < h.exponent) {
        return false;
      }
      const std::uint64_t lim = low_mask(h.widened_width);
      if (*h.offset > lim) return false;
      return std::all_of(h.coefficients.begin(), h.coefficients.end(), [&](auto a) { return a <= lim; });
    }
  }
  return false;
}

HashConstraint generate_hash(const ProjectionSet& s, unsigned exponent, HashFamily family, Rng& rng) {
  HashConstraint h;
  h.family = family;
  switch (family) {
    case HashFamily::Xor:
      h.exponent = 1;
      h.range = 2;
      h.slices = slice_projection(s, 1);
      h.coefficients.reserve(h.slices.size());
      for (std::size_t i = 0; i < h.slices.size(); ++i) h.coefficients.push_back(rng.bits(1));
      h.target = rng.bits(1);
      return h;
    case HashFamily::Prime:
    case HashFamily::Shift:
      break;
  }
  if (exponent == 0 || exponent > kMaxWordExponent) {
    throw InvalidParameters("hash exponent must be in 1.." + std::to_string(kMaxWordExponent));
  }
  h.exponent = exponent;
  h.slices = slice_projection(s, exponent);
  h.coefficients.reserve(h.slices.size());
  if (family == HashFamily::Prime) {
    h.range = smallest_prime_above(std::uint64_t{1} << exponent);
    h.widened_width = prime_widened_width(exponent, h.range, h.slices);
    for (std::size_t i = 0; i < h.slices.size(); ++i) h.coefficients.push_back(rng.below(h.range));
    h.offset = rng.below(h.range);
  } else {
    h.range = std::uint64_t{1} << exponent;
    h.widened_width = shift_widened_width(exponent, h.slices);
    for (std::size_t i = 0; i < h.slices.size(); ++i) h.coefficients.push_back(rng.bits(h.widened_width));
    h.offset = rng.bits(h.widened_width);
  }
  h.target = rng.below(h.range);
  return h;
}

std::uint64_t eval_hash(const HashConstraint& h, const ProjectedModel& m) {
  switch (h.family) {
    case HashFamily::Xor: {
      std::uint64_t parity = 0;
      for (std::size_t i = 0; i < h.slices.size(); ++i) {
        if (h.coefficients[i]) parity ^= slice_value(h.slices[i], m);
      }
      return parity & 1;
    }
    case HashFamily::Prime: {
      u128 sum = h.offset.value_or(0);
      for (std::size_t i = 0; i < h.slices.size(); ++i) {
        sum += static_cast<u128>(h.coefficients[i]) * slice_value(h.slices[i], m);
      }
      return static_cast<std::uint64_t>(sum % h.range);
    }
    case HashFamily::Shift: {
      // wraps modulo 2^wbar, wbar <= 64
      std::uint64_t sum = h.offset.value_or(0);
      for (std::size_t i = 0; i < h.slices.size(); ++i) {
        sum += h.coefficients[i] * slice_value(h.slices[i], m);
      }
      sum &= low_mask(h.widened_width);
      return (sum >> (h.widened_width - h.exponent)) & low_mask(h.exponent);
    }
  }
  return 0;
}

void HashStack::push_back(HashConstraint h) {
  cumulative_.push_back(cumulative_.back() * h.range);
  constraints_.push_back(std::move(h));
}

void HashStack::replace_last(HashConstraint h) {
  if (constraints_.empty()) throw EmptyStack();
  constraints_.pop_back();
  cumulative_.pop_back();
  push_back(std::move(h));
}

void HashStack::truncate(std::size_t n) {
  if (n >= constraints_.size()) return;
  constraints_.resize(n);
  cumulative_.resize(n + 1);
}

HashStack HashStack::prefix(std::size_t n) const {
  HashStack out = *this;
  out.truncate(n);
  return out;
}

}  // namespace pact
