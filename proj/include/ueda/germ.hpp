/**
 * @file germ.hpp
 * @brief Germ systems with unitary linear part: the computational stand-in
 *        for a codimension-r submanifold pair with unitary flat normal
 *        bundle.
 *
 * A generator encodes the relation  T (w o gamma) = w + sum_{|a|>=2} f_a w^a
 * together with the base action z -> z + c (+ optional w-dependent terms
 * sum g_mu w^mu). Coefficients are Fourier polynomials on the base torus;
 * the single-chart model is the constant-coefficient, shift-free case.
 *
 * Everything here is composition machinery: forward germ maps, pullback of
 * a coordinate change through a generator, conjugation by tangent-identity
 * changes, and generator powers for finite covers. The right-hand sides of
 * the degree-n coboundary equations are never written in closed form; they
 * fall out of these truncated compositions.
 */
#ifndef UEDA_GERM_HPP
#define UEDA_GERM_HPP

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ueda/core.hpp"
#include "ueda/fourier.hpp"
#include "ueda/series.hpp"
#include "ueda/symmetric_power.hpp"

namespace ueda {

using FSeries = TruncatedSeries<FourierPoly>;

struct GermGenerator {
    bool diagonal = true;
    std::vector<Angle> angles;    // diag(e^{2 pi i theta}) when diagonal; size r
    Eigen::MatrixXcd T;           // unitary r x r otherwise
    std::array<Angle, 2> shift{}; // base translation c
    FSeries f;                    // m = r; terms with 2 <= |alpha| <= N
    std::optional<FSeries> base_terms;  // m = 2; terms with |mu| >= 1

    bool has_base_terms() const { return base_terms && base_terms->max_norm() > 0.0; }

    Eigen::MatrixXcd weight(int r) const {
        if (!diagonal) return T;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(r, r);
        for (int i = 0; i < r; ++i) m(i, i) = angles[static_cast<size_t>(i)].unit();
        return m;
    }
};

struct GermSystem {
    int r = 1;
    int N = 2;
    bool exact_mode = false;
    std::vector<GermGenerator> generators;
    Tolerances tol;

    bool all_diagonal() const {
        for (const auto& g : generators)
            if (!g.diagonal) return false;
        return true;
    }

    void validate() const {
        if (r < 1 || N < 2) throw invalid_input("GermSystem: need r >= 1 and N >= 2");
        if (generators.empty()) throw invalid_input("GermSystem: no generators");
        for (const auto& g : generators) {
            if (g.diagonal) {
                if (static_cast<int>(g.angles.size()) != r)
                    throw invalid_input("GermSystem: generator angle count must be r");
                if (exact_mode)
                    for (const auto& a : g.angles)
                        if (!a.exact())
                            throw invalid_input("GermSystem: exact mode needs rational angles");
            } else {
                if (exact_mode)
                    throw invalid_input("GermSystem: exact mode requires diagonal generators");
                if (g.T.rows() != r || g.T.cols() != r)
                    throw invalid_input("GermSystem: linear part must be r x r");
                double defect = unitarity_defect(g.T);
                if (defect > tol.unitarity)
                    throw invalid_input("GermSystem: linear part not unitary, defect " +
                                        std::to_string(defect));
            }
            if (g.f.r() != r || g.f.m() != r || g.f.N() > N)
                throw invalid_input("GermSystem: f data shape mismatch");
            g.f.for_each_term([&](const MultiIndex& a, int, const FourierPoly&) {
                if (a.order() <= 1)
                    throw invalid_input("GermSystem: coefficient data below degree 2 at " +
                                        a.to_string());
            });
            if (g.base_terms) {
                if (g.base_terms->r() != r || g.base_terms->m() != 2)
                    throw invalid_input("GermSystem: base-term shape mismatch");
                g.base_terms->for_each_term([&](const MultiIndex& a, int, const FourierPoly&) {
                    if (a.order() < 1)
                        throw invalid_input("GermSystem: constant base term not allowed");
                });
            }
        }
    }
};

namespace detail {

/// T^{+/-1} applied to a vector series, phase-wise for diagonal generators.
inline FSeries apply_linear(const GermGenerator& gen, int r, const FSeries& x, bool inverse) {
    FSeries out(x.r(), x.N(), r);
    if (gen.diagonal) {
        x.for_each_term([&](const MultiIndex& a, int c, const FourierPoly& v) {
            const Angle& th = gen.angles[static_cast<size_t>(c)];
            cplx phase = inverse ? th.negated().unit() : th.unit();
            out.add_coeff(a, c, v * phase);
        });
        return out;
    }
    Eigen::MatrixXcd M = inverse ? gen.T.adjoint() : gen.T;
    x.for_each_term([&](const MultiIndex& a, int c, const FourierPoly& v) {
        for (int row = 0; row < r; ++row) {
            cplx t = M(row, c);
            if (t != cplx(0.0, 0.0)) out.add_coeff(a, row, v * t);
        }
    });
    return out;
}

/// The w-part of the germ map: w o gamma = T^{-1}(w + f(w)).
inline FSeries germ_forward_w(const GermGenerator& gen, int r, int N) {
    auto rel = add(FSeries::identity(r, N), gen.f.truncated(std::min(N, gen.f.N())));
    return apply_linear(gen, r, rel, true);
}

/**
 * Q(z + c + G(w), inner(w)): composition of a coefficient-carrying series
 * with a base shift. Constant base shifts act as mode phases; w-dependent
 * base terms G contribute the transcendental factor exp(2 pi i m.G(w)),
 * expanded as a truncated series. This is where the z_k(z_j, w_j)
 * dependence of coefficient functions enters the right-hand sides.
 */
inline FSeries compose_with_base(const FSeries& Q, const std::array<Angle, 2>& c,
                                 const FSeries* G, const FSeries& inner) {
    int N = std::min(Q.N(), inner.N());
    int r_out = inner.r();
    FSeries out(r_out, N, Q.m());

    // powers of the inner components
    std::vector<std::vector<FSeries>> pw(static_cast<size_t>(Q.r()));
    auto one = FSeries::constant(r_out, N, {coeff_traits<FourierPoly>::one()});
    for (int lam = 0; lam < Q.r(); ++lam) {
        auto comp = inner.component(lam).truncated(N);
        auto& v = pw[static_cast<size_t>(lam)];
        v.push_back(one);
        for (int k = 1; k <= N; ++k) v.push_back(mul(v.back(), comp));
    }

    bool with_G = G != nullptr && G->max_norm() > 0.0;
    std::array<double, 2> cval{c[0].value(), c[1].value()};
    std::map<std::array<int, 2>, FSeries> exp_cache;
    auto exp_factor = [&](const std::array<int, 2>& m) -> const FSeries& {
        auto it = exp_cache.find(m);
        if (it != exp_cache.end()) return it->second;
        // 2 pi i (m . G(w)) as a scalar series, then exp
        FSeries arg(r_out, N, 1);
        for (int d = 0; d < 2; ++d) {
            if (m[static_cast<size_t>(d)] == 0) continue;
            auto comp = G->component(d);
            comp.for_each_term([&](const MultiIndex& a, int, const FourierPoly& v) {
                arg.add_coeff(a, 0, v * cplx(0.0, kTwoPi * m[static_cast<size_t>(d)]));
            });
        }
        return exp_cache.emplace(m, exp_series(arg)).first->second;
    };

    // group Q's terms by monomial so each product of powers is built once
    std::map<MultiIndex, std::vector<std::pair<int, FourierPoly>>> by_index;
    Q.for_each_term([&](const MultiIndex& beta, int comp, const FourierPoly& q) {
        if (beta.order() <= N) by_index[beta].push_back({comp, q});
    });
    for (const auto& [beta, entries] : by_index) {
        FSeries mono = pw[0][static_cast<size_t>(beta[0])];
        for (int lam = 1; lam < Q.r(); ++lam)
            if (beta[lam] > 0)
                mono = mul(mono, pw[static_cast<size_t>(lam)][static_cast<size_t>(beta[lam])]);
        for (const auto& [comp, q] : entries) {
            FourierPoly q_shift = q.shifted(cval);
            if (!with_G) {
                mono.for_each_term([&](const MultiIndex& a, int, const FourierPoly& mv) {
                    out.add_coeff(a, comp, mv * q_shift);
                });
            } else {
                for (const auto& [m, qc] : q_shift.terms()) {
                    const FSeries& em = exp_factor(m);
                    auto scaled = mul(em, mono);
                    FourierPoly harm = FourierPoly::harmonic(m, qc);
                    scaled.for_each_term([&](const MultiIndex& a, int, const FourierPoly& mv) {
                        out.add_coeff(a, comp, mv * harm);
                    });
                }
            }
        }
    }
    return out;
}

} // namespace detail

/**
 * Residual T (u o gamma) - u per generator, for a candidate change
 * u = change(z, w) with identity linear part, as series in w through the
 * system truncation. A system of type n-1 shows its first nonzero shell at
 * degree n; that shell is the right-hand side of the degree-n coboundary
 * equation (up to sign).
 */
inline std::vector<FSeries> expand_relation(const GermSystem& system, const FSeries& change) {
    system.validate();
    if (change.N() > system.N)
        throw invalid_input("expand_relation: change degree exceeds the system truncation");
    if (change.r() != system.r || change.m() != system.r)
        throw invalid_input("expand_relation: change shape mismatch");
    {
        auto lin = sub(change.truncated(1), FSeries::identity(system.r, 1));
        if (lin.max_norm() > 1e-12)
            throw invalid_input("expand_relation: change must have identity linear part");
    }
    int N = change.N();
    std::vector<FSeries> out;
    out.reserve(system.generators.size());
    for (const auto& gen : system.generators) {
        FSeries w_k = detail::germ_forward_w(gen, system.r, N);
        const FSeries* G = gen.base_terms ? &*gen.base_terms : nullptr;
        FSeries u_k = detail::compose_with_base(change, gen.shift, G, w_k);
        out.push_back(sub(detail::apply_linear(gen, system.r, u_k, false), change));
    }
    return out;
}

/// A composed deck substitution: z -> z + c + G(w), w -> W(w).
struct GermMap {
    std::array<Angle, 2> c{};
    FSeries G;  // m = 2; may be all-zero
    FSeries W;  // m = r

    static GermMap identity_map(int r, int N) {
        GermMap m;
        m.G = FSeries(r, N, 2);
        m.W = FSeries::identity(r, N);
        return m;
    }
};

/// gamma_{gen} o inner.
inline GermMap apply_generator(const GermSystem& system, int gen_idx, const GermMap& inner) {
    const GermGenerator& gen = system.generators[static_cast<size_t>(gen_idx)];
    int N = inner.W.N();
    GermMap out;
    out.c = {inner.c[0] + gen.shift[0], inner.c[1] + gen.shift[1]};
    out.G = inner.G;
    if (gen.has_base_terms()) {
        // G(w') evaluated along the inner map
        FSeries g_in = detail::compose_with_base(*gen.base_terms, inner.c, &inner.G, inner.W);
        out.G = add(out.G, g_in);
    }
    FSeries psi = detail::germ_forward_w(gen, system.r, N);
    out.W = detail::compose_with_base(psi, inner.c, &inner.G, inner.W);
    return out;
}

/// The system whose generators are the d-th powers of the original ones
/// (the pullback to the degree-d cover in the torsion case).
inline GermSystem power_system(const GermSystem& system, int d) {
    system.validate();
    if (d < 1) throw invalid_input("power_system: d must be >= 1");
    GermSystem out = system;
    for (size_t gi = 0; gi < system.generators.size(); ++gi) {
        GermMap m = GermMap::identity_map(system.r, system.N);
        for (int k = 0; k < d; ++k) m = apply_generator(system, static_cast<int>(gi), m);
        GermGenerator& g = out.generators[gi];
        const GermGenerator& src = system.generators[gi];
        if (src.diagonal) {
            for (int i = 0; i < system.r; ++i)
                g.angles[static_cast<size_t>(i)] = src.angles[static_cast<size_t>(i)].times(d);
        } else {
            Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(system.r, system.r);
            for (int k = 0; k < d; ++k) P = src.T * P;
            g.T = P;
        }
        g.shift = m.c;
        // f_pow = T^d W_d - id
        GermGenerator powered = g;  // carries the d-th power linear part
        FSeries tw = detail::apply_linear(powered, system.r, m.W, false);
        FSeries f_new = sub(tw, FSeries::identity(system.r, system.N));
        // scrub the sub-quadratic dust so the result is a valid system
        FSeries f_clean(system.r, system.N, system.r);
        f_new.for_each_term([&](const MultiIndex& a, int c, const FourierPoly& v) {
            if (a.order() >= 2) f_clean.set_coeff(a, c, v);
        });
        g.f = f_clean;
        if (m.G.max_norm() > 0.0)
            g.base_terms = m.G;
        else
            g.base_terms.reset();
    }
    return out;
}

/**
 * Conjugation by a tangent-identity change of coordinates phi: the system
 * satisfied by w~ = phi(z, w). Used by the well-definedness checks: the
 * first nonvanishing obstruction level must not move.
 */
inline GermSystem conjugate_system(const GermSystem& system, const FSeries& phi) {
    system.validate();
    if (phi.r() != system.r || phi.m() != system.r || phi.N() > system.N)
        throw invalid_input("conjugate_system: change shape mismatch");
    FSeries phi_inv = reverse(phi);
    GermSystem out = system;
    for (size_t gi = 0; gi < system.generators.size(); ++gi) {
        const GermGenerator& gen = system.generators[gi];
        int N = system.N;
        FSeries w_k = detail::germ_forward_w(gen, system.r, N);
        const FSeries* G = gen.base_terms ? &*gen.base_terms : nullptr;
        // phi evaluated after the germ map, then pulled back through phi^{-1}
        FSeries a = detail::compose_with_base(phi, gen.shift, G, w_k);
        FSeries ta = detail::apply_linear(gen, system.r, a, false);
        FSeries b = compose(ta, phi_inv);
        FSeries f_new = sub(b, FSeries::identity(system.r, N));
        FSeries f_clean(system.r, N, system.r);
        double dust = 0.0;
        f_new.for_each_term([&](const MultiIndex& al, int c, const FourierPoly& v) {
            if (al.order() >= 2)
                f_clean.set_coeff(al, c, v);
            else
                dust = std::max(dust, v.wiener_norm());
        });
        if (dust > 1e-9)
            throw invalid_input("conjugate_system: conjugation produced a non-tangent system");
        out.generators[gi].f = f_clean;
        if (gen.base_terms) {
            out.generators[gi].base_terms = compose(*gen.base_terms, phi_inv);
        }
    }
    return out;
}

/// Conjugation by a constant invertible frame change M: w~ = M w, so the
/// linear parts become M T M^{-1} and f~ = M f(M^{-1} w~). The unvalidated
/// flavour also serves split_linear_part, whose input is deliberately
/// non-unitary.
inline GermSystem conjugate_linear_unchecked(const GermSystem& system, const Eigen::MatrixXcd& M) {
    if (M.rows() != system.r || M.cols() != system.r)
        throw invalid_input("conjugate_linear: M must be r x r");
    Eigen::MatrixXcd Minv = M.inverse();
    GermSystem out = system;
    out.exact_mode = false;
    for (size_t gi = 0; gi < system.generators.size(); ++gi) {
        const GermGenerator& gen = system.generators[gi];
        GermGenerator& g = out.generators[gi];
        g.diagonal = false;
        g.T = M * gen.weight(system.r) * Minv;
        g.angles.clear();
        // M^{-1} w~ as a linear vector series
        FSeries lin(system.r, system.N, system.r);
        for (int row = 0; row < system.r; ++row)
            for (int col = 0; col < system.r; ++col) {
                if (Minv(row, col) == cplx(0.0, 0.0)) continue;
                std::vector<int> e(static_cast<size_t>(system.r), 0);
                e[static_cast<size_t>(col)] = 1;
                lin.add_coeff(MultiIndex(std::move(e)), row, FourierPoly(Minv(row, col)));
            }
        FSeries fM = compose(gen.f, lin);
        FSeries out_f(system.r, system.N, system.r);
        fM.for_each_term([&](const MultiIndex& a, int c, const FourierPoly& v) {
            for (int row = 0; row < system.r; ++row) {
                cplx t = M(row, c);
                if (t != cplx(0.0, 0.0)) out_f.add_coeff(a, row, v * t);
            }
        });
        g.f = out_f;
        if (gen.base_terms) g.base_terms = compose(*gen.base_terms, lin);
    }
    return out;
}

inline GermSystem conjugate_linear(const GermSystem& system, const Eigen::MatrixXcd& M) {
    system.validate();
    return conjugate_linear_unchecked(system, M);
}

/// Largest coefficient discrepancy between gamma_i gamma_j and
/// gamma_j gamma_i over all generator pairs (w and base parts).
inline double commutator_violation(const GermSystem& system) {
    double worst = 0.0;
    int G = static_cast<int>(system.generators.size());
    for (int i = 0; i < G; ++i)
        for (int j = i + 1; j < G; ++j) {
            GermMap ij = apply_generator(system, i,
                                         apply_generator(system, j, GermMap::identity_map(system.r, system.N)));
            GermMap ji = apply_generator(system, j,
                                         apply_generator(system, i, GermMap::identity_map(system.r, system.N)));
            worst = std::max(worst, sub(ij.W, ji.W).max_norm());
            worst = std::max(worst, sub(ij.G, ji.G).max_norm());
        }
    return worst;
}

} // namespace ueda

#endif // UEDA_GERM_HPP
