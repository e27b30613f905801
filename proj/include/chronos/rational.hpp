#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace chronos {

/// Exact rational number over 64-bit integers, always stored in lowest terms
/// with a positive denominator. Intermediate products are computed in 128 bits
/// and any result that does not fit back into 64 bits throws
/// std::overflow_error; nothing is ever rounded.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den) { assign(num, den); }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    Rational reciprocal() const {
        if (num_ == 0) throw std::domain_error("reciprocal of zero");
        return Rational(den_, num_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        const __int128 lhs = static_cast<__int128>(a.num_) * (b.den_ / g);
        const __int128 rhs = static_cast<__int128>(b.num_) * (a.den_ / g);
        const __int128 den = static_cast<__int128>(a.den_) * (b.den_ / g);
        return from_wide(lhs + rhs, den);
    }
    friend Rational operator-(const Rational& a) { return from_wide(-static_cast<__int128>(a.num_), a.den_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        // cross-reduce first so the product stays small when it can
        const std::int64_t g1 = std::gcd(a.num_, b.den_);
        const std::int64_t g2 = std::gcd(b.num_, a.den_);
        const std::int64_t s1 = g1 == 0 ? 1 : g1;
        const std::int64_t s2 = g2 == 0 ? 1 : g2;
        return from_wide(static_cast<__int128>(a.num_ / s1) * (b.num_ / s2),
                         static_cast<__int128>(a.den_ / s2) * (b.den_ / s1));
    }
    friend Rational operator/(const Rational& a, const Rational& b) { return a * b.reciprocal(); }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        return lhs <=> rhs;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    void assign(std::int64_t num, std::int64_t den) {
        if (den == 0) throw std::domain_error("rational with zero denominator");
        *this = from_wide(num, den);
    }

    static Rational from_wide(__int128 num, __int128 den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        __int128 a = num < 0 ? -num : num;
        __int128 b = den;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        const __int128 g = a == 0 ? 1 : a;
        num /= g;
        den /= g;
        constexpr __int128 lo = INT64_MIN;
        constexpr __int128 hi = INT64_MAX;
        if (num < lo || num > hi || den > hi) throw std::overflow_error("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(num);
        r.den_ = static_cast<std::int64_t>(den);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace chronos
