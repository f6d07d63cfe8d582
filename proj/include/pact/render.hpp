#pragma once

#include <cstdint>
#include <string>

#include "pact/hash.hpp"
#include "pact/smtlib.hpp"

namespace pact {

/// `#b` literal of exactly `width` digits. value must fit in width bits.
std::string bin_literal(std::uint64_t value, unsigned width);

/// One `(assert ...)` form using QF_BV operators only.
std::string render_assertion(const HashConstraint& h);
std::string render_assertion(const BlockingClause& c);

}  // namespace pact
