#include "uncertain_eval/rational.hpp"

#include <cctype>

#include "uncertain_eval/error.hpp"

namespace ueval {

namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

// Optional sign, digits, optional '.' and digits.
Rational parse_decimal(std::string_view s, std::string_view original) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
        throw ValidationError("not a number: '" + std::string(original) + "'");
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
        throw ValidationError("not a number: '" + std::string(original) + "'");

    cpp_int num = 0;
    cpp_int den = 1;
    for (char c : int_part) num = num * 10 + (c - '0');
    for (char c : frac_part) {
        num = num * 10 + (c - '0');
        den *= 10;
    }
    Rational r(num, den);
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text, text);
    const Rational num = parse_decimal(text.substr(0, slash), text);
    const Rational den = parse_decimal(text.substr(slash + 1), text);
    if (den == 0) throw ValidationError("zero denominator: '" + std::string(text) + "'");
    return num / den;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace ueval
