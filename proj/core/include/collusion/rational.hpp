#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace collusion {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rational& q) { return numerator(q); }
inline BigInt rat_den(const Rational& q) { return denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// "p/q" when the denominator is not 1, bare integer text otherwise.
inline std::string rat_to_string(const Rational& q) {
    if (rat_den(q) == 1) return rat_num(q).str();
    return rat_num(q).str() + "/" + rat_den(q).str();
}

/// Accepts "p/q", "p", or "-p/q"; throws std::invalid_argument on junk.
inline Rational rat_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument("bad rational literal '" + s + "': " + e.what());
    }
}

inline BigInt big_lcm(const BigInt& a, const BigInt& b) {
    return boost::multiprecision::lcm(a, b);
}

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline BigInt pow_big(const BigInt& base, int exp) {
    BigInt r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Simplest rational within max_err of x, denominator capped at max_den
/// (Stern-Brocot walk). Used to recover exact equilibrium shares from a
/// floating-point solve.
Rational snap_to_rational(double x, std::int64_t max_den, double max_err);

}  // namespace collusion
