/**
 * @file core.hpp
 * @brief Shared scalar types: complex alias, mod-1 angles with an exact
 *        rational mode, circle distance, small hashing utilities.
 *
 * Angles parametrize unitary monodromy as exp(2*pi*i*theta). In exact mode
 * theta is a reduced fraction and resonance questions ("is this angle an
 * integer?") are decided arithmetically; in float mode they are decided
 * against a tolerance by the caller.
 */
#ifndef UEDA_CORE_HPP
#define UEDA_CORE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ueda {

using cplx = std::complex<double>;

inline constexpr const char* kVersion = "ueda 0.1.0";

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Default tolerances; every consumer accepts overrides.
struct Tolerances {
    double unitarity = 1e-12;       // ||T*T - I||_max for accepting a matrix as unitary
    double resonance = 1e-12;       // divisor modulus below which a mode counts as resonant (float mode)
    double obstruction = 1e-10;     // cocycle component above which an obstruction class is nonzero
    double residual = 1e-9;         // conjugacy residual accepted after normalization
    double cocycle = 1e-10;         // 1-cocycle identity violation accepted on input data
};

class invalid_input : public std::invalid_argument {
public:
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

inline long long gcd_ll(long long a, long long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace detail

/**
 * A point of the circle R/Z. Exact angles carry a reduced fraction p/q with
 * 0 <= p < q; float angles carry a double in [0,1). Arithmetic stays exact
 * while both operands are exact and falls back to float otherwise.
 */
class Angle {
public:
    Angle() : exact_(true), num_(0), den_(1), val_(0.0) {}

    static Angle from_fraction(long long p, long long q) {
        if (q == 0) throw invalid_input("Angle: zero denominator");
        if (q < 0) { p = -p; q = -q; }
        p %= q;
        if (p < 0) p += q;
        long long g = detail::gcd_ll(p, q);
        if (g > 1) { p /= g; q /= g; }
        Angle a;
        a.exact_ = true;
        a.num_ = p;
        a.den_ = q;
        a.val_ = static_cast<double>(p) / static_cast<double>(q);
        return a;
    }

    static Angle from_double(double x) {
        Angle a;
        a.exact_ = false;
        a.num_ = 0;
        a.den_ = 1;
        a.val_ = reduce_mod1(x);
        return a;
    }

    /// Accepts "p/q" or a decimal literal.
    static Angle parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            long long p = std::stoll(s.substr(0, slash));
            long long q = std::stoll(s.substr(slash + 1));
            return from_fraction(p, q);
        }
        return from_double(std::stod(s));
    }

    bool exact() const { return exact_; }
    double value() const { return val_; }
    long long numerator() const { return num_; }
    long long denominator() const { return den_; }

    bool is_zero() const { return exact_ ? num_ == 0 : val_ == 0.0; }

    Angle operator+(const Angle& o) const {
        if (exact_ && o.exact_) return add_exact(num_, den_, o.num_, o.den_);
        return from_double(val_ + o.val_);
    }
    Angle operator-(const Angle& o) const {
        if (exact_ && o.exact_) return add_exact(num_, den_, -o.num_, o.den_);
        return from_double(val_ - o.val_);
    }
    Angle negated() const {
        if (exact_) return from_fraction(-num_, den_);
        return from_double(-val_);
    }
    /// k * angle mod 1.
    Angle times(long long k) const {
        if (exact_) {
            __int128 p = static_cast<__int128>(k) * num_;
            __int128 q = den_;
            __int128 r = p % q;
            if (r < 0) r += q;
            __int128 g = gcd128(r, q);
            return from_fraction(static_cast<long long>(r / g), static_cast<long long>(q / g));
        }
        return from_double(static_cast<double>(k) * val_);
    }

    /// Distance to the nearest integer, as a double.
    double circle_distance_to_zero() const {
        double v = val_;
        return v <= 0.5 ? v : 1.0 - v;
    }

    cplx unit() const { return std::polar(1.0, kTwoPi * val_); }

    bool operator==(const Angle& o) const {
        if (exact_ && o.exact_) return num_ == o.num_ && den_ == o.den_;
        return val_ == o.val_;
    }

private:
    static double reduce_mod1(double x) {
        double f = x - std::floor(x);
        if (f >= 1.0) f = 0.0;  // guards the floor rounding edge
        return f;
    }
    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }
    static Angle add_exact(long long p1, long long q1, long long p2, long long q2) {
        __int128 q = static_cast<__int128>(q1) / detail::gcd_ll(q1, q2) * q2;
        __int128 p = static_cast<__int128>(p1) * (q / q1) + static_cast<__int128>(p2) * (q / q2);
        __int128 r = p % q;
        if (r < 0) r += q;
        __int128 g = gcd128(r, q);
        return from_fraction(static_cast<long long>(r / g), static_cast<long long>(q / g));
    }

    bool exact_;
    long long num_, den_;
    double val_;
};

/// Circle distance between two angles.
inline double circle_distance(const Angle& a, const Angle& b) {
    return (a - b).circle_distance_to_zero();
}

/**
 * Best rational approximation p/q of x with q <= max_den and |x - p/q| <= tol,
 * by the continued fraction of x. Returns nothing if no convergent qualifies.
 */
inline std::optional<std::pair<long long, long long>>
rational_reconstruct(double x, long long max_den, double tol) {
    double frac = x - std::floor(x);
    long long p0 = 1, q0 = 0;  // h_{-1}/k_{-1}
    long long p1 = static_cast<long long>(std::floor(frac)), q1 = 1;
    double rem = frac - std::floor(frac);
    for (int it = 0; it < 64; ++it) {
        if (std::abs(frac - static_cast<double>(p1) / static_cast<double>(q1)) <= tol)
            return std::make_pair(p1, q1);
        if (rem < 1e-18) break;
        double inv = 1.0 / rem;
        double a_f = std::floor(inv);
        if (a_f > 9.2e18) break;
        long long a = static_cast<long long>(a_f);
        rem = inv - a_f;
        long long p2 = a * p1 + p0;
        long long q2 = a * q1 + q0;
        if (q2 > max_den || q2 <= 0) break;
        p0 = p1; q0 = q1;
        p1 = p2; q1 = q2;
    }
    if (q1 <= max_den && std::abs(frac - static_cast<double>(p1) / static_cast<double>(q1)) <= tol)
        return std::make_pair(p1, q1);
    return std::nullopt;
}

/// FNV-1a, used to stamp reports with a config fingerprint.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

} // namespace ueda

#endif // UEDA_CORE_HPP
