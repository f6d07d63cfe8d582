#include "pact/render.hpp"

#include <vector>

namespace pact {

namespace {

std::string extract(const Slice& s) {
  return "((_ extract " + std::to_string(s.hi - 1) + " " + std::to_string(s.lo) + ") " + s.parent + ")";
}

std::string fold(const std::string& op, const std::vector<std::string>& terms) {
  std::string acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) acc = "(" + op + " " + acc + " " + terms[i] + ")";
  return acc;
}

// sum_i a_i * zext(x_i) + b at the constraint's widened width
std::string linear_sum(const HashConstraint& h) {
  const unsigned wbar = h.widened_width;
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < h.slices.size(); ++i) {
    if (h.coefficients[i] == 0) continue;
    const Slice& s = h.slices[i];
    std::string x = extract(s);
    if (wbar > s.width()) x = "((_ zero_extend " + std::to_string(wbar - s.width()) + ") " + x + ")";
    terms.push_back("(bvmul " + bin_literal(h.coefficients[i], wbar) + " " + x + ")");
  }
  terms.push_back(bin_literal(h.offset.value_or(0), wbar));
  return fold("bvadd", terms);
}

}  // namespace

std::string bin_literal(std::uint64_t value, unsigned width) {
  std::string out = "#b";
  out.reserve(width + 2);
  for (unsigned i = width; i-- > 0;) out += (i < 64 && ((value >> i) & 1)) ? '1' : '0';
  return out;
}

std::string render_assertion(const HashConstraint& h) {
  switch (h.family) {
    case HashFamily::Xor: {
      std::vector<std::string> bits;
      for (std::size_t i = 0; i < h.slices.size(); ++i) {
        if (h.coefficients[i]) bits.push_back(extract(h.slices[i]));
      }
      std::string lhs = bits.empty() ? "#b0" : fold("bvxor", bits);
      return "(assert (= " + lhs + " " + bin_literal(h.target, 1) + "))";
    }
    case HashFamily::Prime: {
      const unsigned wbar = h.widened_width;
      return "(assert (= (bvurem " + linear_sum(h) + " " + bin_literal(h.range, wbar) + ") " +
             bin_literal(h.target, wbar) + "))";
    }
    case HashFamily::Shift: {
      const unsigned wbar = h.widened_width;
      return "(assert (= ((_ extract " + std::to_string(wbar - 1) + " " + std::to_string(wbar - h.exponent) +
             ") " + linear_sum(h) + ") " + bin_literal(h.target, h.exponent) + "))";
    }
  }
  return {};
}

std::string render_assertion(const BlockingClause& c) {
  std::vector<std::string> eqs;
  eqs.reserve(c.equalities.size());
  for (const auto& e : c.equalities) eqs.push_back("(= " + e.name + " " + bin_literal(e.value, e.width) + ")");
  if (eqs.size() == 1) return "(assert (not " + eqs.front() + "))";
  std::string conj = "(and";
  for (const auto& e : eqs) conj += " " + e;
  return "(assert (not " + conj + ")))";
}

}  // namespace pact
