/// Non-negative reals stored as log(value), for majorant shells that
/// outgrow double range. Supports exactly the operations the recursions
/// need: add, multiply, divide, compare.
#ifndef UEDA_LOGREAL_HPP
#define UEDA_LOGREAL_HPP

#include <cmath>
#include <limits>

#include "ueda/series.hpp"

namespace ueda {

class PositiveLog {
public:
    PositiveLog() : lg_(-std::numeric_limits<double>::infinity()) {}
    explicit PositiveLog(double value) {
        if (value < 0.0) throw invalid_input("PositiveLog: negative value");
        lg_ = value == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(value);
    }
    static PositiveLog from_log(double lg) {
        PositiveLog p;
        p.lg_ = lg;
        return p;
    }

    bool is_zero() const { return std::isinf(lg_) && lg_ < 0; }
    double log() const { return lg_; }
    double log10() const { return lg_ / 2.302585092994045684; }
    /// Value as double; +inf when out of range.
    double value() const { return is_zero() ? 0.0 : std::exp(lg_); }

    PositiveLog operator*(const PositiveLog& o) const {
        if (is_zero() || o.is_zero()) return PositiveLog();
        return from_log(lg_ + o.lg_);
    }
    PositiveLog operator/(const PositiveLog& o) const {
        if (o.is_zero()) throw invalid_input("PositiveLog: division by zero");
        if (is_zero()) return PositiveLog();
        return from_log(lg_ - o.lg_);
    }
    PositiveLog operator+(const PositiveLog& o) const {
        if (is_zero()) return o;
        if (o.is_zero()) return *this;
        double hi = lg_, lo = o.lg_;
        if (hi < lo) std::swap(hi, lo);
        return from_log(hi + std::log1p(std::exp(lo - hi)));
    }
    bool operator<(const PositiveLog& o) const { return lg_ < o.lg_; }
    bool operator==(const PositiveLog& o) const { return lg_ == o.lg_; }

private:
    double lg_;
};

template <>
struct coeff_traits<PositiveLog> {
    static bool is_zero(const PositiveLog& c) { return c.is_zero(); }
    static double norm(const PositiveLog& c) { return c.value(); }
    static PositiveLog scale(const PositiveLog& c, double s) {
        return c * PositiveLog(s);
    }
    static PositiveLog zero() { return PositiveLog(); }
    static PositiveLog one() { return PositiveLog(1.0); }
};

} // namespace ueda

#endif // UEDA_LOGREAL_HPP
