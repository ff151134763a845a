/**
 * @file series.hpp
 * @brief Vector-valued multivariate power series truncated at a total degree.
 *
 * TruncatedSeries<C> keeps, for every multi-index alpha with |alpha| <= N, a
 * coefficient vector in C^m. Absent indices are zero and no operation ever
 * fabricates coefficients of degree > N. Storage is dense per degree shell
 * for r <= 4, N <= 16 and falls back to an ordered map above that; both
 * honor graded-lex iteration order.
 *
 * The coefficient type is a template parameter: std::complex<double> for
 * germ data, double for majorants, a Fourier-polynomial ring for the
 * elliptic model, a positive log-scale scalar for deep majorant shells.
 */
#ifndef UEDA_SERIES_HPP
#define UEDA_SERIES_HPP

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "ueda/core.hpp"
#include "ueda/multiindex.hpp"

namespace ueda {

template <class C>
struct coeff_traits {
    static bool is_zero(const C& c) { return c == C{}; }
    static double norm(const C& c) { return std::abs(c); }
    static C scale(const C& c, double s) { return c * s; }
    static C zero() { return C{}; }
    static C one() { return C(1); }
};

namespace detail {

/// Cached graded-lex shell listings, shared across all series of a shape.
inline const std::vector<MultiIndex>& shell_indices(int r, int n) {
    static std::map<std::pair<int, int>, std::unique_ptr<std::vector<MultiIndex>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(r, n);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto vec = std::make_unique<std::vector<MultiIndex>>(enumerate_multiindices(r, n));
        it = cache.emplace(key, std::move(vec)).first;
    }
    return *it->second;
}

} // namespace detail

template <class C>
class TruncatedSeries {
public:
    using coeff_type = C;

    TruncatedSeries() : r_(1), N_(0), m_(1), dense_(true) {}

    TruncatedSeries(int r, int N, int m)
        : r_(r), N_(N), m_(m), dense_(r <= 4 && N <= 16) {
        if (r < 1 || N < 0 || m < 1) throw invalid_input("TruncatedSeries: bad shape");
        if (dense_) shells_.resize(static_cast<size_t>(N) + 1);
    }

    int r() const { return r_; }
    int N() const { return N_; }
    int m() const { return m_; }
    bool dense_storage() const { return dense_; }

    static TruncatedSeries zero(int r, int N, int m) { return TruncatedSeries(r, N, m); }

    static TruncatedSeries constant(int r, int N, const std::vector<C>& value) {
        TruncatedSeries s(r, N, static_cast<int>(value.size()));
        MultiIndex o(std::vector<int>(static_cast<size_t>(r), 0));
        for (int c = 0; c < s.m_; ++c)
            if (!coeff_traits<C>::is_zero(value[static_cast<size_t>(c)]))
                s.set_coeff(o, c, value[static_cast<size_t>(c)]);
        return s;
    }

    /// w -> w, as an m = r vector series.
    static TruncatedSeries identity(int r, int N) {
        TruncatedSeries s(r, N, r);
        for (int lam = 0; lam < r; ++lam) {
            std::vector<int> e(static_cast<size_t>(r), 0);
            e[static_cast<size_t>(lam)] = 1;
            s.set_coeff(MultiIndex(std::move(e)), lam, coeff_traits<C>::one());
        }
        return s;
    }

    C coeff(const MultiIndex& alpha, int comp) const {
        int n = alpha.order();
        if (n > N_) return coeff_traits<C>::zero();
        if (dense_) {
            const auto& shell = shells_[static_cast<size_t>(n)];
            if (shell.empty()) return coeff_traits<C>::zero();
            size_t idx = static_cast<size_t>(shell_rank(alpha)) * static_cast<size_t>(m_) +
                         static_cast<size_t>(comp);
            return shell[idx];
        }
        auto it = sparse_.find(alpha);
        if (it == sparse_.end()) return coeff_traits<C>::zero();
        return it->second[static_cast<size_t>(comp)];
    }

    void set_coeff(const MultiIndex& alpha, int comp, C value) {
        slot(alpha, comp) = std::move(value);
    }

    void add_coeff(const MultiIndex& alpha, int comp, const C& value) {
        if (coeff_traits<C>::is_zero(value)) return;
        C& s = slot(alpha, comp);
        s = s + value;
    }

    /// Visits nonzero coefficients in graded-lex (then component) order.
    template <class F>
    void for_each_term(F&& f) const {
        if (dense_) {
            for (int n = 0; n <= N_; ++n) {
                const auto& shell = shells_[static_cast<size_t>(n)];
                if (shell.empty()) continue;
                const auto& idx = detail::shell_indices(r_, n);
                for (size_t k = 0; k < idx.size(); ++k)
                    for (int c = 0; c < m_; ++c) {
                        const C& v = shell[k * static_cast<size_t>(m_) + static_cast<size_t>(c)];
                        if (!coeff_traits<C>::is_zero(v)) f(idx[k], c, v);
                    }
            }
        } else {
            for (const auto& [alpha, vec] : sparse_)
                for (int c = 0; c < m_; ++c)
                    if (!coeff_traits<C>::is_zero(vec[static_cast<size_t>(c)]))
                        f(alpha, c, vec[static_cast<size_t>(c)]);
        }
    }

    /// Smallest degree with a nonzero coefficient; N+1 when empty.
    int valuation() const {
        int best = N_ + 1;
        for_each_term([&](const MultiIndex& a, int, const C&) {
            best = std::min(best, a.order());
        });
        return best;
    }

    double max_norm() const {
        double mx = 0.0;
        for_each_term([&](const MultiIndex&, int, const C& v) {
            mx = std::max(mx, coeff_traits<C>::norm(v));
        });
        return mx;
    }

    double shell_max_norm(int n) const {
        double mx = 0.0;
        for_each_term([&](const MultiIndex& a, int, const C& v) {
            if (a.order() == n) mx = std::max(mx, coeff_traits<C>::norm(v));
        });
        return mx;
    }

    TruncatedSeries component(int c) const {
        TruncatedSeries out(r_, N_, 1);
        for_each_term([&](const MultiIndex& a, int comp, const C& v) {
            if (comp == c) out.set_coeff(a, 0, v);
        });
        return out;
    }

    TruncatedSeries truncated(int N2) const {
        TruncatedSeries out(r_, N2, m_);
        for_each_term([&](const MultiIndex& a, int comp, const C& v) {
            if (a.order() <= N2) out.set_coeff(a, comp, v);
        });
        return out;
    }

private:
    C& slot(const MultiIndex& alpha, int comp) {
        int n = alpha.order();
        if (n > N_ || comp < 0 || comp >= m_ || alpha.size() != r_)
            throw invalid_input("TruncatedSeries: coefficient outside series shape");
        if (dense_) {
            auto& shell = shells_[static_cast<size_t>(n)];
            if (shell.empty())
                shell.assign(static_cast<size_t>(shell_size(r_, n)) * static_cast<size_t>(m_),
                             coeff_traits<C>::zero());
            return shell[static_cast<size_t>(shell_rank(alpha)) * static_cast<size_t>(m_) +
                         static_cast<size_t>(comp)];
        }
        auto it = sparse_.find(alpha);
        if (it == sparse_.end())
            it = sparse_.emplace(alpha, std::vector<C>(static_cast<size_t>(m_),
                                                       coeff_traits<C>::zero())).first;
        return it->second[static_cast<size_t>(comp)];
    }

    int r_, N_, m_;
    bool dense_;
    std::vector<std::vector<C>> shells_;
    std::map<MultiIndex, std::vector<C>> sparse_;
};

template <class C>
TruncatedSeries<C> add(const TruncatedSeries<C>& a, const TruncatedSeries<C>& b) {
    if (a.r() != b.r() || a.m() != b.m())
        throw invalid_input("series add: shape mismatch");
    TruncatedSeries<C> out(a.r(), std::min(a.N(), b.N()), a.m());
    a.for_each_term([&](const MultiIndex& al, int c, const C& v) {
        if (al.order() <= out.N()) out.add_coeff(al, c, v);
    });
    b.for_each_term([&](const MultiIndex& al, int c, const C& v) {
        if (al.order() <= out.N()) out.add_coeff(al, c, v);
    });
    return out;
}

template <class C>
TruncatedSeries<C> sub(const TruncatedSeries<C>& a, const TruncatedSeries<C>& b) {
    if (a.r() != b.r() || a.m() != b.m())
        throw invalid_input("series sub: shape mismatch");
    TruncatedSeries<C> out(a.r(), std::min(a.N(), b.N()), a.m());
    a.for_each_term([&](const MultiIndex& al, int c, const C& v) {
        if (al.order() <= out.N()) out.add_coeff(al, c, v);
    });
    b.for_each_term([&](const MultiIndex& al, int c, const C& v) {
        if (al.order() <= out.N()) out.add_coeff(al, c, C{} - v);
    });
    return out;
}

template <class C, class S>
TruncatedSeries<C> scale(const TruncatedSeries<C>& a, const S& s) {
    TruncatedSeries<C> out(a.r(), a.N(), a.m());
    a.for_each_term([&](const MultiIndex& al, int c, const C& v) {
        out.add_coeff(al, c, v * s);
    });
    return out;
}

template <class C>
TruncatedSeries<C> scale_double(const TruncatedSeries<C>& a, double s) {
    TruncatedSeries<C> out(a.r(), a.N(), a.m());
    a.for_each_term([&](const MultiIndex& al, int c, const C& v) {
        out.add_coeff(al, c, coeff_traits<C>::scale(v, s));
    });
    return out;
}

/// Product. One factor must be scalar (m = 1); it multiplies every component
/// of the other. Degrees above min(N_a, N_b) are discarded.
template <class C>
TruncatedSeries<C> mul(const TruncatedSeries<C>& a, const TruncatedSeries<C>& b) {
    if (a.r() != b.r()) throw invalid_input("series mul: variable count mismatch");
    if (a.m() != 1 && b.m() != 1)
        throw invalid_input("series mul: one factor must be scalar");
    const TruncatedSeries<C>& vec = (a.m() == 1) ? b : a;
    const TruncatedSeries<C>& sca = (a.m() == 1) ? a : b;
    int N = std::min(a.N(), b.N());
    TruncatedSeries<C> out(a.r(), N, vec.m());
    sca.for_each_term([&](const MultiIndex& al, int, const C& va) {
        int da = al.order();
        if (da > N) return;
        vec.for_each_term([&](const MultiIndex& be, int c, const C& vb) {
            if (da + be.order() > N) return;
            out.add_coeff(al + be, c, va * vb);
        });
    });
    return out;
}

template <class C>
TruncatedSeries<C> pow_series(const TruncatedSeries<C>& a, int k) {
    if (a.m() != 1) throw invalid_input("pow_series: scalar series required");
    TruncatedSeries<C> acc =
        TruncatedSeries<C>::constant(a.r(), a.N(), {coeff_traits<C>::one()});
    for (int i = 0; i < k; ++i) acc = mul(acc, a);
    return acc;
}

/**
 * Substitution outer(inner_1, ..., inner_k), k = outer.m-compatible variable
 * count. `inner` is one vector series with m = outer.r() components; every
 * component must have zero constant term, otherwise the composition would
 * need outer coefficients of unbounded degree.
 */
template <class C>
TruncatedSeries<C> compose(const TruncatedSeries<C>& outer, const TruncatedSeries<C>& inner) {
    if (inner.m() != outer.r())
        throw invalid_input("compose: inner component count must equal outer variable count");
    MultiIndex origin(std::vector<int>(static_cast<size_t>(inner.r()), 0));
    for (int c = 0; c < inner.m(); ++c)
        if (!coeff_traits<C>::is_zero(inner.coeff(origin, c)))
            throw invalid_input("compose: inner series has nonzero constant term");
    int N = std::min(outer.N(), inner.N());
    TruncatedSeries<C> out(inner.r(), N, outer.m());

    // Powers of each inner component, up to the largest useful exponent.
    std::vector<std::vector<TruncatedSeries<C>>> pw(static_cast<size_t>(outer.r()));
    for (int lam = 0; lam < outer.r(); ++lam) {
        auto comp = inner.component(lam).truncated(N);
        auto& v = pw[static_cast<size_t>(lam)];
        v.push_back(TruncatedSeries<C>::constant(inner.r(), N, {coeff_traits<C>::one()}));
        for (int k = 1; k <= N; ++k) v.push_back(mul(v.back(), comp));
    }

    outer.for_each_term([&](const MultiIndex& alpha, int c, const C& v) {
        if (alpha.order() > N) return;
        TruncatedSeries<C> term = pw[0][static_cast<size_t>(alpha[0])];
        for (int lam = 1; lam < outer.r(); ++lam)
            if (alpha[lam] > 0) term = mul(term, pw[static_cast<size_t>(lam)][static_cast<size_t>(alpha[lam])]);
        term.for_each_term([&](const MultiIndex& be, int, const C& tv) {
            out.add_coeff(be, c, v * tv);
        });
    });
    return out;
}

/**
 * Series reversion. `fwd` must have the shape w = u + (terms of degree >= 2)
 * with identity linear part; the result g satisfies fwd(g(w)) = w through
 * degree N, solved by the fixed-point iteration u <- w - F(u).
 */
template <class C>
TruncatedSeries<C> reverse(const TruncatedSeries<C>& fwd, double tol = 1e-12) {
    int r = fwd.r();
    if (fwd.m() != r) throw invalid_input("reverse: need a square (m = r) series");
    if (fwd.N() < 1) throw invalid_input("reverse: truncation degree must be >= 1");
    auto id = TruncatedSeries<C>::identity(r, fwd.N());
    auto higher = sub(fwd, id);
    // Reject constant terms and non-identity linear parts.
    double low = 0.0;
    higher.for_each_term([&](const MultiIndex& a, int, const C& v) {
        if (a.order() <= 1) low = std::max(low, coeff_traits<C>::norm(v));
    });
    if (low > tol)
        throw invalid_input("reverse: linear part is not the identity");

    TruncatedSeries<C> u = id;
    for (int it = 0; it < fwd.N(); ++it)
        u = sub(id, compose(higher, u));
    return u;
}

/// 1 / s for scalar s with invertible constant term, by Newton iteration.
template <class C>
TruncatedSeries<C> reciprocal(const TruncatedSeries<C>& s, const C& inv_c0) {
    if (s.m() != 1) throw invalid_input("reciprocal: scalar series required");
    auto z = TruncatedSeries<C>::constant(s.r(), s.N(), {inv_c0});
    auto two = TruncatedSeries<C>::constant(s.r(), s.N(),
                                            {coeff_traits<C>::one() + coeff_traits<C>::one()});
    int steps = 1;
    while ((1 << steps) < s.N() + 1) ++steps;
    for (int it = 0; it <= steps; ++it) z = mul(z, sub(two, mul(s, z)));
    return z;
}

/// exp of a scalar series with zero constant term.
template <class C>
TruncatedSeries<C> exp_series(const TruncatedSeries<C>& s) {
    if (s.m() != 1) throw invalid_input("exp_series: scalar series required");
    MultiIndex origin(std::vector<int>(static_cast<size_t>(s.r()), 0));
    if (!coeff_traits<C>::is_zero(s.coeff(origin, 0)))
        throw invalid_input("exp_series: constant term must vanish");
    auto acc = TruncatedSeries<C>::constant(s.r(), s.N(), {coeff_traits<C>::one()});
    auto term = acc;
    for (int k = 1; k <= s.N(); ++k) {
        term = scale_double(mul(term, s), 1.0 / k);
        acc = add(acc, term);
    }
    return acc;
}

} // namespace ueda

#endif // UEDA_SERIES_HPP
