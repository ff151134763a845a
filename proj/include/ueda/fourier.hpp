/**
 * @file fourier.hpp
 * @brief Sparse trigonometric polynomials over Z^2, the coefficient ring of
 *        the elliptic model. A value sum_m c_m e^{2 pi i m.s} is stored as a
 *        sorted (mode, coefficient) list; exact-zero coefficients are pruned
 *        so structural zeros survive every operation. The single-chart model
 *        is the special case where only mode (0,0) ever appears.
 */
#ifndef UEDA_FOURIER_HPP
#define UEDA_FOURIER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ueda/core.hpp"
#include "ueda/series.hpp"

namespace ueda {

class FourierPoly {
public:
    using Mode = std::array<int, 2>;

    FourierPoly() = default;
    FourierPoly(const cplx& c) {  // implicit: constants embed into the ring
        if (c != cplx(0.0, 0.0)) terms_.push_back({{0, 0}, c});
    }
    explicit FourierPoly(double c) : FourierPoly(cplx(c, 0.0)) {}

    static FourierPoly harmonic(Mode m, const cplx& c) {
        FourierPoly p;
        if (c != cplx(0.0, 0.0)) p.terms_.push_back({m, c});
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Mode{0, 0});
    }
    cplx constant_part() const {
        for (const auto& [m, c] : terms_)
            if (m == Mode{0, 0}) return c;
        return cplx(0.0, 0.0);
    }
    const std::vector<std::pair<Mode, cplx>>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    cplx coefficient(Mode m) const {
        for (const auto& [mm, c] : terms_)
            if (mm == m) return c;
        return cplx(0.0, 0.0);
    }

    int max_abs_mode() const {
        int mx = 0;
        for (const auto& [m, c] : terms_)
            mx = std::max({mx, std::abs(m[0]), std::abs(m[1])});
        return mx;
    }

    void truncate_modes(int M) {
        std::erase_if(terms_, [&](const auto& t) {
            return std::abs(t.first[0]) > M || std::abs(t.first[1]) > M;
        });
    }

    /// l1 norm of the coefficients: a computable upper bound for the sup
    /// norm on the torus, exact for constants.
    double wiener_norm() const {
        double s = 0.0;
        for (const auto& [m, c] : terms_) s += std::abs(c);
        return s;
    }

    FourierPoly operator+(const FourierPoly& o) const { return merged(o, cplx(1.0, 0.0)); }
    FourierPoly operator-(const FourierPoly& o) const { return merged(o, cplx(-1.0, 0.0)); }

    FourierPoly operator*(const FourierPoly& o) const {
        FourierPoly out;
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_) {
                cplx c = ca * cb;
                if (c == cplx(0.0, 0.0)) continue;
                out.add_term({ma[0] + mb[0], ma[1] + mb[1]}, c);
            }
        return out;
    }

    FourierPoly operator*(const cplx& s) const {
        FourierPoly out;
        for (const auto& [m, c] : terms_) {
            cplx v = c * s;
            if (v != cplx(0.0, 0.0)) out.terms_.push_back({m, v});
        }
        return out;
    }
    FourierPoly operator*(double s) const { return (*this) * cplx(s, 0.0); }

    /// Pullback by s -> s + c: mode m picks up the phase e^{2 pi i m.c}.
    FourierPoly shifted(const std::array<double, 2>& c) const {
        FourierPoly out;
        for (const auto& [m, v] : terms_) {
            double phase = m[0] * c[0] + m[1] * c[1];
            cplx w = v * std::polar(1.0, kTwoPi * phase);
            if (w != cplx(0.0, 0.0)) out.terms_.push_back({m, w});
        }
        return out;
    }

    bool operator==(const FourierPoly& o) const { return terms_ == o.terms_; }

private:
    void add_term(Mode m, const cplx& c) {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const auto& t, const Mode& mm) { return t.first < mm; });
        if (it != terms_.end() && it->first == m) {
            it->second += c;
            if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
        } else {
            terms_.insert(it, {m, c});
        }
    }

    FourierPoly merged(const FourierPoly& o, const cplx& sign) const {
        FourierPoly out = *this;
        for (const auto& [m, c] : o.terms_) out.add_term(m, sign * c);
        return out;
    }

    std::vector<std::pair<Mode, cplx>> terms_;  // sorted by mode
};

template <>
struct coeff_traits<FourierPoly> {
    static bool is_zero(const FourierPoly& c) { return c.is_zero(); }
    static double norm(const FourierPoly& c) { return c.wiener_norm(); }
    static FourierPoly scale(const FourierPoly& c, double s) { return c * s; }
    static FourierPoly zero() { return FourierPoly(); }
    static FourierPoly one() { return FourierPoly(cplx(1.0, 0.0)); }
};

} // namespace ueda

#endif // UEDA_FOURIER_HPP
