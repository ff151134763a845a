/**
 * @file majorant.hpp
 * @brief The dominating series A(X) with constants (K, M, R), its
 *        epsilon-weighted variant, an implicit-function cross-check, and
 *        the one-variable diagonal bounds B_n, B-hat_n.
 *
 * A(X) = sum_{|alpha|>=2} A_alpha X^alpha solves
 *
 *   A = 2K A (Pi - 1) + 2KM (Pi - 1 - R(X^1+...+X^r + rA)),
 *   Pi = prod_lambda 1/(1 - R(X^lambda + A)),
 *
 * coefficient-matched degree by degree; the weighted variant replaces the
 * left side by sum eps^{-1}_{|alpha|-1} A_alpha X^alpha and drops K from the
 * right. The geometric factors are expanded by repeated truncated
 * multiplication, never in closed form, so shell n visibly depends only on
 * shells < n. All assembly is subtraction-free (the cancelled low-order
 * terms are dropped symbolically), which keeps every coefficient
 * non-negative and lets the same code run on a log-scale scalar when
 * doubles overflow.
 */
#ifndef UEDA_MAJORANT_HPP
#define UEDA_MAJORANT_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ueda/bundles.hpp"
#include "ueda/logreal.hpp"
#include "ueda/series.hpp"

namespace ueda {

class torsion_divisor_error : public std::runtime_error {
public:
    torsion_divisor_error(int n, const std::string& what)
        : std::runtime_error(what), index(n) {}
    int index;  // the shell whose weight eps^{-1}_{index-1} vanished
};

struct MajorantParams {
    double K = 1.0;  // cohomology-solution constant
    double M = 1.0;  // sup bound on |w|
    double R = 1.0;  // inverse polyradius
    int r = 1;       // variable count
    std::optional<EpsilonSequence> eps;

    void validate() const {
        if (K <= 0 || M <= 0 || R <= 0) throw invalid_input("MajorantParams: K, M, R must be positive");
        if (r < 1) throw invalid_input("MajorantParams: r must be >= 1");
        if (eps && eps->K != K)
            throw invalid_input("MajorantParams: epsilon sequence carries a different K");
    }
};

struct MajorantSeries {
    MajorantParams params;
    int N = 2;
    TruncatedSeries<double> coeffs;             // A_alpha, 2 <= |alpha| <= N
    bool log_space = false;                     // doubles overflowed; see log_coeffs
    TruncatedSeries<PositiveLog> log_coeffs;

    double coeff(const MultiIndex& alpha) const { return coeffs.coeff(alpha, 0); }

    /// B_n = sum_{|alpha| = n} A_alpha for n = 2..N (index n-2).
    std::vector<double> shell_sums() const {
        std::vector<double> B(static_cast<size_t>(N - 1), 0.0);
        if (!log_space) {
            coeffs.for_each_term([&](const MultiIndex& a, int, const double& v) {
                if (a.order() >= 2) B[static_cast<size_t>(a.order() - 2)] += v;
            });
        } else {
            std::vector<PositiveLog> acc(static_cast<size_t>(N - 1));
            log_coeffs.for_each_term([&](const MultiIndex& a, int, const PositiveLog& v) {
                if (a.order() >= 2) {
                    auto& s = acc[static_cast<size_t>(a.order() - 2)];
                    s = s + v;
                }
            });
            for (size_t i = 0; i < acc.size(); ++i) B[i] = acc[i].value();
        }
        return B;
    }
};

namespace detail {

template <class S>
TruncatedSeries<S> monomial_series(int r, int N, int lam) {
    TruncatedSeries<S> s(r, N, 1);
    std::vector<int> e(static_cast<size_t>(r), 0);
    e[static_cast<size_t>(lam)] = 1;
    s.set_coeff(MultiIndex(std::move(e)), 0, coeff_traits<S>::one());
    return s;
}

/// Degree-n coefficients of 2 A (Pi - 1) + 2M D with A filled below n.
/// D := Pi - 1 - sum_lambda S_lambda expanded without subtraction:
/// D = sum_lambda S_lambda^2 G_lambda + Q, where T = S G, L = sum T and Q
/// collects the products of two or more distinct T factors.
template <class S>
TruncatedSeries<S> majorant_rhs_core(const TruncatedSeries<S>& A, double M, double R,
                                     int n) {
    int r = A.r();
    auto An = A.truncated(n);
    auto one = TruncatedSeries<S>::constant(r, n, {coeff_traits<S>::one()});
    TruncatedSeries<S> L(r, n, 1), Q(r, n, 1), D(r, n, 1);
    for (int lam = 0; lam < r; ++lam) {
        auto Slam = scale_double(add(monomial_series<S>(r, n, lam), An), R);
        // geometric tail G = 1 + S + S^2 + ...
        auto G = one;
        auto p = one;
        for (int k = 1; k <= n; ++k) {
            p = mul(p, Slam);
            G = add(G, p);
        }
        auto T = mul(Slam, G);
        Q = add(add(Q, mul(Q, T)), mul(L, T));
        L = add(L, T);
        D = add(D, mul(mul(Slam, Slam), G));
    }
    D = add(D, Q);
    auto Pi_minus_1 = add(L, Q);
    return add(scale_double(mul(An, Pi_minus_1), 2.0),
               scale_double(D, 2.0 * M));
}

template <class S>
TruncatedSeries<S> compute_majorant(const MajorantParams& p, int N, bool weighted) {
    TruncatedSeries<S> A(p.r, N, 1);
    for (int n = 2; n <= N; ++n) {
        auto rhs = majorant_rhs_core<S>(A, p.M, p.R, n);
        double w_inv = 0.0;
        if (weighted) {
            w_inv = p.eps->inv(n - 1);
            if (w_inv == 0.0)
                throw torsion_divisor_error(
                    n, "weighted majorant: torsion divisor, eps^{-1}_" +
                           std::to_string(n - 1) + " = 0 (N_alpha trivial)");
        }
        for (const MultiIndex& alpha : ueda::detail::shell_indices(p.r, n)) {
            S v = rhs.coeff(alpha, 0);
            S out = weighted ? coeff_traits<S>::scale(v, 1.0 / w_inv)
                             : coeff_traits<S>::scale(v, p.K);
            A.set_coeff(alpha, 0, out);
        }
    }
    return A;
}

inline bool all_finite(const TruncatedSeries<double>& s) {
    bool ok = true;
    s.for_each_term([&](const MultiIndex&, int, const double& v) {
        if (!std::isfinite(v)) ok = false;
    });
    return ok;
}

} // namespace detail

inline MajorantSeries majorant_series_impl(const MajorantParams& params, int N, bool weighted) {
    params.validate();
    if (N < 2) throw invalid_input("majorant: N must be >= 2");
    if (weighted) {
        if (!params.eps) throw invalid_input("weighted majorant: epsilon sequence required");
        if (params.eps->n_max() < N - 1)
            throw invalid_input("weighted majorant: epsilon sequence shorter than N-1");
    } else if (params.eps) {
        throw invalid_input("plain majorant: epsilon sequence must not be attached");
    }
    MajorantSeries out;
    out.params = params;
    out.N = N;
    out.coeffs = detail::compute_majorant<double>(params, N, weighted);
    if (!detail::all_finite(out.coeffs)) {
        out.log_space = true;
        out.log_coeffs = detail::compute_majorant<PositiveLog>(params, N, weighted);
        TruncatedSeries<double> back(params.r, N, 1);
        out.log_coeffs.for_each_term([&](const MultiIndex& a, int, const PositiveLog& v) {
            back.set_coeff(a, 0, v.value());
        });
        out.coeffs = back;
    }
    return out;
}

/// The plain recursion; every A_alpha is strictly positive.
inline MajorantSeries majorant_series(const MajorantParams& params, int N) {
    return majorant_series_impl(params, N, false);
}

/// The eps-weighted recursion of the Diophantine case.
inline MajorantSeries weighted_majorant_series(const MajorantParams& params, int N) {
    return majorant_series_impl(params, N, true);
}

struct ImplicitCrossCheck {
    TruncatedSeries<double> a;   // Newton solution of P(X, a(X)) = 0, a(0) = 0
    double linear_coeff_at_0;    // coefficient of Y in P(0, Y); should be -1
    double max_abs_deviation = 0.0;
    double max_rel_deviation = 0.0;
};

/**
 * Independent route to the plain majorant: build the polynomial
 * P(X,Y) = -QY + 2KY(1-Q) + 2KM(Q(-1 - R sum X - rRY) + 1) with
 * Q = prod_lambda (1 - R(X^lambda + Y)), solve P(X, a(X)) = 0 by power-series
 * Newton from a = 0, and report the coefficientwise deviation from the
 * recursion output.
 */
inline ImplicitCrossCheck implicit_cross_check(const MajorantParams& params, int N) {
    params.validate();
    if (params.eps) throw invalid_input("implicit_cross_check: plain variant only");
    if (N < 2) throw invalid_input("implicit_cross_check: N must be >= 2");
    using TS = TruncatedSeries<double>;
    int r = params.r;
    double K = params.K, M = params.M, R = params.R;

    // Q(X,Y) as coefficients in Y: product of the factors (1 - R X^lambda) - R Y.
    std::vector<TS> qc{TS::constant(r, N, {1.0})};
    for (int lam = 0; lam < r; ++lam) {
        TS a0 = sub(TS::constant(r, N, {1.0}),
                    scale_double(detail::monomial_series<double>(r, N, lam), R));
        std::vector<TS> next(qc.size() + 1, TS(r, N, 1));
        for (size_t j = 0; j < qc.size(); ++j) {
            next[j] = add(next[j], mul(qc[j], a0));
            next[j + 1] = add(next[j + 1], scale_double(qc[j], -R));
        }
        qc = std::move(next);
    }

    // P as coefficients in Y, degree r+1.
    std::vector<TS> pc(qc.size() + 1, TS(r, N, 1));
    TS sumx(r, N, 1);
    for (int lam = 0; lam < r; ++lam)
        sumx = add(sumx, detail::monomial_series<double>(r, N, lam));
    TS minus_one_minus_RsumX =
        sub(TS::constant(r, N, {-1.0}), scale_double(sumx, R));
    for (size_t j = 0; j < qc.size(); ++j) {
        pc[j + 1] = add(pc[j + 1], scale_double(qc[j], -1.0));        // -Q Y
        pc[j + 1] = add(pc[j + 1], scale_double(qc[j], -2.0 * K));    // -2K Y Q
        pc[j] = add(pc[j], scale_double(mul(qc[j], minus_one_minus_RsumX), 2.0 * K * M));
        pc[j + 1] = add(pc[j + 1], scale_double(qc[j], -2.0 * K * M * r * R));
    }
    pc[1] = add(pc[1], TS::constant(r, N, {2.0 * K}));      // +2K Y
    pc[0] = add(pc[0], TS::constant(r, N, {2.0 * K * M}));  // +2KM

    auto eval_poly = [&](const std::vector<TS>& c, const TS& y) {
        TS acc = c.back();
        for (size_t j = c.size() - 1; j-- > 0;) acc = add(mul(acc, y), c[j]);
        return acc;
    };
    std::vector<TS> dpc;
    for (size_t j = 1; j < pc.size(); ++j)
        dpc.push_back(scale_double(pc[j], static_cast<double>(j)));

    TS a(r, N, 1);
    int steps = 1;
    while ((1 << steps) < N + 1) ++steps;
    for (int it = 0; it <= steps; ++it) {
        TS Pa = eval_poly(pc, a);
        TS dPa = eval_poly(dpc, a);
        MultiIndex origin(std::vector<int>(static_cast<size_t>(r), 0));
        double c0 = dPa.coeff(origin, 0);
        if (!(std::abs(c0) > 1e-14))
            throw std::runtime_error("implicit_cross_check: Newton step degenerate");
        a = sub(a, mul(Pa, reciprocal(dPa, 1.0 / c0)));
        // a(0) stays 0 up to rounding; re-pin it so valuation is structural
        a.set_coeff(origin, 0, 0.0);
    }
    {
        TS res = eval_poly(pc, a);
        if (res.max_norm() > 1e-6)
            throw std::runtime_error("implicit_cross_check: Newton iteration did not converge");
    }

    ImplicitCrossCheck out;
    out.a = a;
    // coefficient of Y in P(0, Y)
    MultiIndex origin(std::vector<int>(static_cast<size_t>(r), 0));
    out.linear_coeff_at_0 = pc[1].coeff(origin, 0);

    MajorantSeries rec = majorant_series(params, N);
    for (int n = 2; n <= N; ++n)
        for (const MultiIndex& alpha : ueda::detail::shell_indices(r, n)) {
            double va = rec.coeff(alpha);
            double vb = a.coeff(alpha, 0);
            double dev = std::abs(va - vb);
            out.max_abs_deviation = std::max(out.max_abs_deviation, dev);
            if (va != 0.0)
                out.max_rel_deviation = std::max(out.max_rel_deviation, dev / std::abs(va));
        }
    return out;
}

enum class DiagonalVariant { Plain, Hat };

struct DiagonalBounds {
    std::vector<double> B;          // B_n = shell sums, n = 2..N (index n-2)
    std::vector<double> B_hat;      // hat recursion output, same indexing
    bool hat_log_space = false;
    std::vector<double> B_hat_log10;  // populated alongside the log-space run
    /// 1 / (geometric mean of consecutive shell ratios over the last
    /// ceil(N/3) shells). A heuristic estimate, not a certificate.
    double radius_estimate = 0.0;
};

namespace detail {

/**
 * One-variable recursion for B-hat (and, with `drop_linear` = false, for the
 * diagonal B itself): with SB = R * Bhat,
 *   sum eps^{-1}_{n-1} Bhat_n Y^n = 2 Bhat W1 + 2M W2,
 *   W1 = sum_{k>=1} C(r+k-1,k) SB^k,  W2 = sum_{k>=2} C(r+k-1,k) SB^k.
 * The plain flavour multiplies by K instead of dividing by eps^{-1}.
 */
template <class S>
std::vector<S> hat_recursion(const MajorantParams& p, int N, bool hat_variant) {
    TruncatedSeries<S> B(1, N, 1);
    B.set_coeff(MultiIndex{1}, 0, coeff_traits<S>::one());  // B = Y + ...
    for (int n = 2; n <= N; ++n) {
        auto Bn = B.truncated(n);
        auto SB = scale_double(Bn, p.R);
        TruncatedSeries<S> W1(1, n, 1), W2(1, n, 1);
        auto pw = TruncatedSeries<S>::constant(1, n, {coeff_traits<S>::one()});
        for (int k = 1; k <= n; ++k) {
            pw = mul(pw, SB);
            double c = static_cast<double>(binomial(p.r + k - 1, k));
            auto t = scale_double(pw, c);
            W1 = add(W1, t);
            if (k >= 2) W2 = add(W2, t);
        }
        auto lhs_series = hat_variant
                              ? Bn
                              : [&] {  // B - Y, kept subtraction-free
                                    TruncatedSeries<S> t(1, n, 1);
                                    Bn.for_each_term([&](const MultiIndex& a, int, const S& v) {
                                        if (a.order() >= 2) t.set_coeff(a, 0, v);
                                    });
                                    return t;
                                }();
        auto rhs = add(scale_double(mul(lhs_series, W1), 2.0),
                       scale_double(W2, 2.0 * p.M));
        S v = rhs.coeff(MultiIndex{n}, 0);
        S out;
        if (p.eps) {
            double w_inv = p.eps->inv(n - 1);
            if (w_inv == 0.0)
                throw torsion_divisor_error(n, "diagonal recursion: torsion divisor at eps^{-1}_" +
                                                   std::to_string(n - 1));
            out = coeff_traits<S>::scale(v, 1.0 / w_inv);
        } else {
            out = coeff_traits<S>::scale(v, p.K);
        }
        B.set_coeff(MultiIndex{n}, 0, out);
    }
    std::vector<S> out;
    for (int n = 2; n <= N; ++n) out.push_back(B.coeff(MultiIndex{n}, 0));
    return out;
}

} // namespace detail

/**
 * Shell sums B_n of a computed majorant series; with the hat variant, also
 * the one-variable B-hat recursion (B-hat_n >= B_n) and a tail-ratio radius
 * estimate. Switches the hat recursion to log-scale arithmetic when doubles
 * overflow.
 */
inline DiagonalBounds diagonal_bounds(const MajorantSeries& series, DiagonalVariant variant) {
    DiagonalBounds out;
    out.B = series.shell_sums();
    if (variant == DiagonalVariant::Hat) {
        MajorantParams p = series.params;
        bool overflow = false;
        auto v = detail::hat_recursion<double>(p, series.N, true);
        for (double x : v)
            if (!std::isfinite(x)) overflow = true;
        if (!overflow) out.B_hat = v;
        if (overflow) {
            auto v = detail::hat_recursion<PositiveLog>(p, series.N, true);
            out.hat_log_space = true;
            for (const auto& x : v) {
                out.B_hat.push_back(x.value());
                out.B_hat_log10.push_back(x.log10());
            }
        }
    }
    const std::vector<double>& tail = (variant == DiagonalVariant::Hat && out.hat_log_space)
                                          ? out.B_hat_log10
                                          : out.B;
    int tail_len = (series.N + 2) / 3;
    double acc = 0.0;
    int cnt = 0;
    for (size_t i = tail.size() > static_cast<size_t>(tail_len)
                        ? tail.size() - static_cast<size_t>(tail_len)
                        : 1;
         i < tail.size(); ++i) {
        double ratio;
        if (variant == DiagonalVariant::Hat && out.hat_log_space)
            ratio = (tail[i] - tail[i - 1]) * 2.302585092994046;  // log10 -> ln of ratio
        else if (tail[i - 1] > 0.0 && std::isfinite(tail[i]) && std::isfinite(tail[i - 1]))
            ratio = std::log(tail[i] / tail[i - 1]);
        else
            continue;
        acc += ratio;
        ++cnt;
    }
    out.radius_estimate = cnt > 0 ? std::exp(-acc / cnt) : 0.0;
    return out;
}

} // namespace ueda

#endif // UEDA_MAJORANT_HPP
