#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ueval {

/// Arbitrary-precision rational used for confusion-matrix entries and grade
/// weights, so fractional tile updates such as 206/256 stay exact.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a plain decimal ("0.5", "1e-3" is rejected).
/// Decimals are converted exactly (0.125 -> 1/8).
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

/// "p/q" or "p" when the denominator is 1.
std::string to_string(const Rational& r);

}  // namespace ueval
