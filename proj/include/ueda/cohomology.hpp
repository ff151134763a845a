/**
 * @file cohomology.hpp
 * @brief Twisted coboundary solvers delta F = h in two concrete models:
 *        constant-coefficient cochains on a finite nerve, and Fourier-mode
 *        group cochains for the elliptic model. Also the empirical solution
 *        norm constant K.
 *
 * Nerve model: unknowns live on vertices, (delta F)_{jk} = F_j - W_jk F_k
 * with a unitary weight per ordered edge; solvable right-hand sides get the
 * minimum-norm solution, unsolvable ones a cohomology-class representative.
 *
 * Group model: unknowns are Fourier polynomials, one equation per generator
 * F - W_g (F . shift_g) = h_g; mode m decouples into
 * (I - e^{2 pi i m.c_g} W_g) Fhat_m = hhat_{g,m}. The divisor at a mode is
 * 1 - (eigenvalue of W_g) e^{2 pi i m.c_g}; resonant modes with nonzero
 * right-hand side are the obstructions. Exact mode decides resonance from
 * rational angles, never from float comparisons.
 */
#ifndef UEDA_COHOMOLOGY_HPP
#define UEDA_COHOMOLOGY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ueda/core.hpp"
#include "ueda/fourier.hpp"

namespace ueda {

struct Nerve {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;         // ordered pairs (j, k)
    std::vector<std::array<int, 3>> triangles;      // ordered triples (j, k, l)

    int edge_index(int j, int k) const {
        for (size_t e = 0; e < edges.size(); ++e)
            if (edges[e].first == j && edges[e].second == k) return static_cast<int>(e);
        return -1;
    }

    void validate() const {
        std::set<std::pair<int, int>> seen;
        for (const auto& [j, k] : edges) {
            if (j < 0 || j >= vertex_count || k < 0 || k >= vertex_count)
                throw invalid_input("Nerve: edge references invalid vertex");
            if (!seen.insert({j, k}).second) throw invalid_input("Nerve: duplicate edge");
        }
        for (const auto& t : triangles) {
            for (int v : t)
                if (v < 0 || v >= vertex_count)
                    throw invalid_input("Nerve: triangle references invalid vertex");
            if (edge_index(t[0], t[1]) < 0 || edge_index(t[1], t[2]) < 0 ||
                edge_index(t[0], t[2]) < 0)
                throw invalid_input("Nerve: triangle is missing one of its edges");
        }
    }
};

struct GroupGenerator {
    // Weight: either a diagonal of angles (exact-capable) or a full matrix.
    bool diagonal = true;
    std::vector<Angle> angles;           // size s when diagonal
    Eigen::MatrixXcd W;                  // s x s when not diagonal
    std::array<Angle, 2> shift{};        // translation c; phases e^{2 pi i m.c}
    std::vector<FourierPoly> rhs;        // size s

    Eigen::MatrixXcd weight_matrix(int s) const {
        if (!diagonal) return W;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(s, s);
        for (int i = 0; i < s; ++i) m(i, i) = angles[static_cast<size_t>(i)].unit();
        return m;
    }
};

struct TwistedCochainProblem {
    enum class Model { Nerve, Group };
    Model model = Model::Group;
    int s = 1;  // fiber dimension

    // nerve model
    Nerve nerve;
    std::vector<Eigen::MatrixXcd> edge_weights;  // per edge, s x s
    std::vector<Eigen::VectorXcd> edge_rhs;      // per edge, length s

    // group model
    std::vector<GroupGenerator> generators;
    int max_modes = 1 << 20;  // input Fourier data must satisfy |m|_inf <= max_modes

    bool exact_mode = false;
    Tolerances tol;

    void validate() const {
        if (s < 1) throw invalid_input("TwistedCochainProblem: fiber dimension must be >= 1");
        if (model == Model::Nerve) {
            nerve.validate();
            if (edge_weights.size() != nerve.edges.size() || edge_rhs.size() != nerve.edges.size())
                throw invalid_input("TwistedCochainProblem: per-edge data count mismatch");
            for (const auto& W : edge_weights)
                if (W.rows() != s || W.cols() != s)
                    throw invalid_input("TwistedCochainProblem: weight dimension mismatch");
            for (const auto& h : edge_rhs)
                if (h.size() != s)
                    throw invalid_input("TwistedCochainProblem: rhs dimension mismatch");
            // multiplicative cocycle rule W_jk W_kl = W_jl on every triangle
            for (const auto& t : nerve.triangles) {
                const auto& Wjk = edge_weights[static_cast<size_t>(nerve.edge_index(t[0], t[1]))];
                const auto& Wkl = edge_weights[static_cast<size_t>(nerve.edge_index(t[1], t[2]))];
                const auto& Wjl = edge_weights[static_cast<size_t>(nerve.edge_index(t[0], t[2]))];
                double v = (Wjk * Wkl - Wjl).cwiseAbs().maxCoeff();
                if (v > tol.cocycle)
                    throw invalid_input("TwistedCochainProblem: edge weights break the cocycle rule");
            }
        } else {
            if (generators.empty())
                throw invalid_input("TwistedCochainProblem: group model needs generators");
            for (const auto& g : generators) {
                if (g.diagonal) {
                    if (static_cast<int>(g.angles.size()) != s)
                        throw invalid_input("TwistedCochainProblem: angle count mismatch");
                } else {
                    if (g.W.rows() != s || g.W.cols() != s)
                        throw invalid_input("TwistedCochainProblem: weight dimension mismatch");
                    if (exact_mode)
                        throw invalid_input(
                            "TwistedCochainProblem: exact mode requires diagonal angle weights");
                }
                if (static_cast<int>(g.rhs.size()) != s)
                    throw invalid_input("TwistedCochainProblem: rhs dimension mismatch");
                for (const auto& f : g.rhs)
                    if (f.max_abs_mode() > max_modes)
                        throw invalid_input("TwistedCochainProblem: rhs mode above the truncation");
            }
        }
    }
};

struct ObstructedMode {
    std::array<int, 2> m{0, 0};
    int component = 0;
    cplx value;  // class-representative entry
};

struct CochainSolution {
    enum class Status { Solved, Obstructed, Inconsistent };
    Status status = Status::Solved;
    // group model output
    std::vector<FourierPoly> cochain;
    // nerve model output
    std::vector<Eigen::VectorXcd> vertex_cochain;
    std::vector<Eigen::VectorXcd> edge_obstruction;  // residual class representative

    double residual_norm = 0.0;
    double sup_norm = 0.0;
    double smallest_divisor = std::numeric_limits<double>::infinity();
    int resonant_count = 0;
    double obstruction_norm = 0.0;
    std::vector<ObstructedMode> obstructions;
    double conditioning = 0.0;  // smallest divisor/singular value actually inverted

    bool solved() const { return status == Status::Solved; }
};

struct CocycleCheck {
    bool pass = true;
    double max_violation = 0.0;
    std::array<int, 3> worst_triangle{-1, -1, -1};
};

/// Twisted 1-cocycle identity h_jl = h_jk + W_jk h_kl on every triangle.
inline CocycleCheck cocycle_check(const TwistedCochainProblem& p) {
    if (p.model != TwistedCochainProblem::Model::Nerve)
        throw invalid_input("cocycle_check: nerve model expected");
    p.validate();
    CocycleCheck out;
    for (const auto& t : p.nerve.triangles) {
        const auto& hjk = p.edge_rhs[static_cast<size_t>(p.nerve.edge_index(t[0], t[1]))];
        const auto& hkl = p.edge_rhs[static_cast<size_t>(p.nerve.edge_index(t[1], t[2]))];
        const auto& hjl = p.edge_rhs[static_cast<size_t>(p.nerve.edge_index(t[0], t[2]))];
        const auto& Wjk = p.edge_weights[static_cast<size_t>(p.nerve.edge_index(t[0], t[1]))];
        double v = (hjk + Wjk * hkl - hjl).cwiseAbs().maxCoeff();
        if (v > out.max_violation) {
            out.max_violation = v;
            out.worst_triangle = t;
        }
    }
    out.pass = out.max_violation <= p.tol.cocycle;
    return out;
}

/**
 * Minimum-norm solve of F_j - W_jk F_k = h_jk over a nerve. Solvable systems
 * (residual below tolerance) return the pseudoinverse solution; otherwise
 * the residual projection ships as the obstruction-class representative.
 */
inline CochainSolution nerve_coboundary_solve(const TwistedCochainProblem& p) {
    if (p.model != TwistedCochainProblem::Model::Nerve)
        throw invalid_input("nerve_coboundary_solve: nerve model expected");
    p.validate();
    int s = p.s;
    long V = static_cast<long>(p.nerve.vertex_count) * s;
    long E = static_cast<long>(p.nerve.edges.size()) * s;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(E, V);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(E);
    for (size_t e = 0; e < p.nerve.edges.size(); ++e) {
        auto [j, k] = p.nerve.edges[e];
        for (int a = 0; a < s; ++a) {
            A(static_cast<long>(e) * s + a, static_cast<long>(j) * s + a) += 1.0;
            for (int c = 0; c < s; ++c)
                A(static_cast<long>(e) * s + a, static_cast<long>(k) * s + c) -=
                    p.edge_weights[e](a, c);
            b(static_cast<long>(e) * s + a) = p.edge_rhs[e](a);
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double cutoff = (sv.size() ? sv(0) : 0.0) * 1e-12;
    Eigen::VectorXcd y = svd.matrixU().adjoint() * b;
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(svd.matrixV().cols());
    CochainSolution sol;
    for (long i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) {
            z(i) = y(i) / sv(i);
            sol.conditioning = sv(i);
        }
    }
    Eigen::VectorXcd x = svd.matrixV() * z;
    Eigen::VectorXcd res = A * x - b;
    sol.residual_norm = res.cwiseAbs().maxCoeff();
    sol.sup_norm = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
    sol.vertex_cochain.reserve(static_cast<size_t>(p.nerve.vertex_count));
    for (int v = 0; v < p.nerve.vertex_count; ++v)
        sol.vertex_cochain.push_back(x.segment(static_cast<long>(v) * s, s));
    if (sol.residual_norm <= p.tol.obstruction) {
        sol.status = CochainSolution::Status::Solved;
    } else {
        sol.status = CochainSolution::Status::Obstructed;
        sol.obstruction_norm = sol.residual_norm;
        for (size_t e = 0; e < p.nerve.edges.size(); ++e)
            sol.edge_obstruction.push_back(-res.segment(static_cast<long>(e) * s, s));
    }
    return sol;
}

namespace detail {

/// Joint eigenbasis of a commuting unitary family: returns a unitary Q and
/// per-member diagonals; throws if the family fails to commute.
inline std::pair<Eigen::MatrixXcd, std::vector<Eigen::VectorXcd>>
joint_unitary_diagonalize(const std::vector<Eigen::MatrixXcd>& fam, double commute_tol = 1e-9) {
    long dim = fam.front().rows();
    for (size_t i = 0; i < fam.size(); ++i)
        for (size_t j = i + 1; j < fam.size(); ++j)
            if ((fam[i] * fam[j] - fam[j] * fam[i]).cwiseAbs().maxCoeff() > commute_tol)
                throw invalid_input("joint diagonalization: weights do not commute");
    std::mt19937_64 rng(0x10017u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(dim, dim);
        for (const auto& A : fam) B += cplx(uni(rng), uni(rng)) * A;
        Eigen::ComplexSchur<Eigen::MatrixXcd> schur(B);
        if (schur.info() != Eigen::Success) continue;
        Eigen::MatrixXcd Q = schur.matrixU();
        std::vector<Eigen::VectorXcd> diags;
        bool ok = true;
        for (const auto& A : fam) {
            Eigen::MatrixXcd M = Q.adjoint() * A * Q;
            double off = 0.0;
            for (long i = 0; i < dim; ++i)
                for (long j = 0; j < dim; ++j)
                    if (i != j) off = std::max(off, std::abs(M(i, j)));
            if (off > 1e-8) {
                ok = false;
                break;
            }
            diags.push_back(M.diagonal());
        }
        if (ok) return {Q, diags};
    }
    throw invalid_input("joint diagonalization: no generic combination found");
}

} // namespace detail

/**
 * Mode-by-mode solve in the group model. Non-diagonal commuting weights are
 * rotated into their joint eigenbasis first, so the divisor is always
 * 1 - (eigenvalue of W) e^{2 pi i m.c}. Resonant components with nonzero
 * right-hand side are reported as obstructions.
 */
inline CochainSolution mode_coboundary_solve(const TwistedCochainProblem& p) {
    if (p.model != TwistedCochainProblem::Model::Group)
        throw invalid_input("mode_coboundary_solve: group model expected");
    p.validate();
    int s = p.s;
    int G = static_cast<int>(p.generators.size());

    bool all_diagonal = true;
    for (const auto& g : p.generators) all_diagonal &= g.diagonal;

    // Rotate to a joint eigenbasis when needed.
    Eigen::MatrixXcd Q;
    std::vector<std::vector<cplx>> eigw(static_cast<size_t>(G));   // per generator, per comp
    std::vector<std::vector<Angle>> eigang(static_cast<size_t>(G));
    if (all_diagonal) {
        for (int g = 0; g < G; ++g) {
            eigang[static_cast<size_t>(g)] = p.generators[static_cast<size_t>(g)].angles;
            for (int c = 0; c < s; ++c)
                eigw[static_cast<size_t>(g)].push_back(
                    p.generators[static_cast<size_t>(g)].angles[static_cast<size_t>(c)].unit());
        }
    } else {
        std::vector<Eigen::MatrixXcd> fam;
        for (const auto& g : p.generators) fam.push_back(g.weight_matrix(s));
        auto [Qm, diags] = detail::joint_unitary_diagonalize(fam);
        Q = Qm;
        for (int g = 0; g < G; ++g)
            for (int c = 0; c < s; ++c)
                eigw[static_cast<size_t>(g)].push_back(diags[static_cast<size_t>(g)](c));
    }

    // Right-hand sides, rotated if needed, collected per mode.
    std::set<std::array<int, 2>> modes;
    std::vector<std::vector<FourierPoly>> rhs(static_cast<size_t>(G));
    for (int g = 0; g < G; ++g) {
        rhs[static_cast<size_t>(g)].resize(static_cast<size_t>(s));
        if (all_diagonal) {
            rhs[static_cast<size_t>(g)] = p.generators[static_cast<size_t>(g)].rhs;
        } else {
            for (int a = 0; a < s; ++a) {
                FourierPoly acc;
                for (int b = 0; b < s; ++b)
                    acc = acc + p.generators[static_cast<size_t>(g)].rhs[static_cast<size_t>(b)] *
                                    std::conj(Q(b, a));
                rhs[static_cast<size_t>(g)][static_cast<size_t>(a)] = acc;
            }
        }
        for (const auto& f : rhs[static_cast<size_t>(g)])
            for (const auto& [m, c] : f.terms()) modes.insert(m);
    }

    CochainSolution sol;
    sol.cochain.assign(static_cast<size_t>(s), FourierPoly());
    double res_norm = 0.0;
    for (const auto& m : modes) {
        for (int c = 0; c < s; ++c) {
            // divisors across generators for this (mode, component)
            std::vector<cplx> div(static_cast<size_t>(G));
            std::vector<bool> resonant(static_cast<size_t>(G));
            for (int g = 0; g < G; ++g) {
                const auto& gen = p.generators[static_cast<size_t>(g)];
                cplx phase = std::polar(
                    1.0, kTwoPi * (m[0] * gen.shift[0].value() + m[1] * gen.shift[1].value()));
                cplx d = cplx(1.0, 0.0) - eigw[static_cast<size_t>(g)][static_cast<size_t>(c)] * phase;
                if (p.exact_mode && all_diagonal) {
                    Angle zeta = eigang[static_cast<size_t>(g)][static_cast<size_t>(c)] +
                                 gen.shift[0].times(m[0]) + gen.shift[1].times(m[1]);
                    resonant[static_cast<size_t>(g)] = zeta.is_zero();
                    if (resonant[static_cast<size_t>(g)]) d = cplx(0.0, 0.0);
                } else {
                    resonant[static_cast<size_t>(g)] = std::abs(d) < p.tol.resonance;
                }
                div[static_cast<size_t>(g)] = d;
            }
            cplx num(0.0, 0.0);
            double den = 0.0;
            bool any_nonres = false;
            for (int g = 0; g < G; ++g) {
                if (resonant[static_cast<size_t>(g)]) continue;
                any_nonres = true;
                cplx h = rhs[static_cast<size_t>(g)][static_cast<size_t>(c)].coefficient(m);
                num += std::conj(div[static_cast<size_t>(g)]) * h;
                den += std::norm(div[static_cast<size_t>(g)]);
                sol.smallest_divisor =
                    std::min(sol.smallest_divisor, std::abs(div[static_cast<size_t>(g)]));
            }
            cplx F = any_nonres ? num / den : cplx(0.0, 0.0);
            if (any_nonres && den > 0.0)
                sol.conditioning = sol.conditioning == 0.0 ? std::sqrt(den)
                                                           : std::min(sol.conditioning, std::sqrt(den));
            double worst_here = 0.0;
            cplx worst_value(0.0, 0.0);
            for (int g = 0; g < G; ++g) {
                cplx h = rhs[static_cast<size_t>(g)][static_cast<size_t>(c)].coefficient(m);
                cplx r = div[static_cast<size_t>(g)] * F - h;
                res_norm = std::max(res_norm, std::abs(r));
                if (resonant[static_cast<size_t>(g)] && std::abs(h) > worst_here) {
                    worst_here = std::abs(h);
                    worst_value = h;
                }
            }
            bool all_res = !any_nonres;
            if (all_res) ++sol.resonant_count;
            if (all_res && worst_here > p.tol.obstruction) {
                sol.status = CochainSolution::Status::Obstructed;
                sol.obstructions.push_back({m, c, worst_value});
                sol.obstruction_norm = std::max(sol.obstruction_norm, worst_here);
            }
            if (F != cplx(0.0, 0.0))
                sol.cochain[static_cast<size_t>(c)] =
                    sol.cochain[static_cast<size_t>(c)] + FourierPoly::harmonic(m, F);
        }
    }

    // Rotate the solution back when we solved in the eigenbasis.
    if (!all_diagonal) {
        std::vector<FourierPoly> back(static_cast<size_t>(s));
        for (int a = 0; a < s; ++a) {
            FourierPoly acc;
            for (int b = 0; b < s; ++b) acc = acc + sol.cochain[static_cast<size_t>(b)] * Q(a, b);
            back[static_cast<size_t>(a)] = acc;
        }
        sol.cochain = std::move(back);
    }

    sol.residual_norm = res_norm;
    for (const auto& f : sol.cochain) sol.sup_norm = std::max(sol.sup_norm, f.wiener_norm());
    if (sol.status != CochainSolution::Status::Obstructed &&
        res_norm > p.tol.obstruction)
        sol.status = CochainSolution::Status::Inconsistent;
    return sol;
}

/// Pairwise group cocycle identity for commuting generators:
/// h_g + g.h_d must equal h_d + d.h_g, where (g.h)(s) = W_g h(s + c_g).
inline double group_pair_cocycle_violation(const TwistedCochainProblem& p) {
    if (p.model != TwistedCochainProblem::Model::Group)
        throw invalid_input("group cocycle check: group model expected");
    int s = p.s;
    int G = static_cast<int>(p.generators.size());
    auto act = [&](const GroupGenerator& g, const std::vector<FourierPoly>& h) {
        Eigen::MatrixXcd W = g.weight_matrix(s);
        std::vector<FourierPoly> shifted(static_cast<size_t>(s));
        for (int a = 0; a < s; ++a)
            shifted[static_cast<size_t>(a)] =
                h[static_cast<size_t>(a)].shifted({g.shift[0].value(), g.shift[1].value()});
        std::vector<FourierPoly> out(static_cast<size_t>(s));
        for (int a = 0; a < s; ++a) {
            FourierPoly acc;
            for (int b = 0; b < s; ++b) acc = acc + shifted[static_cast<size_t>(b)] * W(a, b);
            out[static_cast<size_t>(a)] = acc;
        }
        return out;
    };
    double worst = 0.0;
    for (int g = 0; g < G; ++g)
        for (int d = g + 1; d < G; ++d) {
            auto lhs = act(p.generators[static_cast<size_t>(g)], p.generators[static_cast<size_t>(d)].rhs);
            auto rhs = act(p.generators[static_cast<size_t>(d)], p.generators[static_cast<size_t>(g)].rhs);
            for (int a = 0; a < s; ++a) {
                FourierPoly diff = (p.generators[static_cast<size_t>(g)].rhs[static_cast<size_t>(a)] +
                                    lhs[static_cast<size_t>(a)]) -
                                   (p.generators[static_cast<size_t>(d)].rhs[static_cast<size_t>(a)] +
                                    rhs[static_cast<size_t>(a)]);
                worst = std::max(worst, diff.wiener_norm());
            }
        }
    return worst;
}

/**
 * Empirical analogue of the bounded-solution constant: the largest ratio
 * ||F||_sup / ||h||_sup over a family of solvable problems, minimum-norm
 * solutions throughout. Zero right-hand sides contribute zero.
 */
inline double estimate_k(const std::vector<TwistedCochainProblem>& family) {
    double K = 0.0;
    for (size_t i = 0; i < family.size(); ++i) {
        const auto& p = family[i];
        CochainSolution sol = p.model == TwistedCochainProblem::Model::Nerve
                                  ? nerve_coboundary_solve(p)
                                  : mode_coboundary_solve(p);
        if (!sol.solved())
            throw invalid_input("estimate_k: problem " + std::to_string(i) + " is not solvable");
        double rhs_norm = 0.0;
        if (p.model == TwistedCochainProblem::Model::Nerve) {
            for (const auto& h : p.edge_rhs)
                if (h.size()) rhs_norm = std::max(rhs_norm, h.cwiseAbs().maxCoeff());
        } else {
            for (const auto& g : p.generators)
                for (const auto& f : g.rhs) rhs_norm = std::max(rhs_norm, f.wiener_norm());
        }
        if (rhs_norm == 0.0) continue;
        K = std::max(K, sol.sup_norm / rhs_norm);
    }
    return K;
}

} // namespace ueda

#endif // UEDA_COHOMOLOGY_HPP
