#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace simrel {

/// Exact arbitrary-precision rational. All probabilities, rates, capacities,
/// flows and gamma values in this library are Rationals; there is no
/// floating-point fallback anywhere.
using Rational = mpq_class;

/// Canonicalised fraction. The two-argument mpq_class constructor does not
/// reduce, and GMP comparisons on unreduced values are undefined, so every
/// num/den construction must go through here.
inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses a nonnegative "a/b" fraction or decimal literal ("0.25", ".5", "3")
/// into an exact Rational. Returns nullopt on malformed input, negative
/// values, or zero denominators.
std::optional<Rational> parse_rational(std::string_view text);

/// Canonical text form: "a/b" with gcd(a,b)=1 and b>1, plain integer otherwise.
std::string to_string(const Rational& value);

} // namespace simrel
