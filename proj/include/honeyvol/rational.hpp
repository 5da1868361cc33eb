#pragma once
// Exact arithmetic aliases and small helpers used across the library.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hv {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// Parse "p/q" or a plain decimal like "0.25" into an exact rational.
inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + s);
        return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s));
    bool neg = !s.empty() && s[0] == '-';
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    if (neg) digits = digits.substr(1);
    if (digits.empty()) throw std::invalid_argument("bad rational: " + s);
    Int num(digits);
    Int den = 1;
    for (size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    if (neg) num = -num;
    return Rat(num, den);
}

inline std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

}  // namespace hv
