/**
 * @file normalizer.hpp
 * @brief The functional-equation engine: obstruction classes and the type
 *        of a germ system, degree-by-degree construction of the coordinate
 *        change, hypersurface-constrained solves, linear-part splitting,
 *        finite-cover averaging, and majorant bound tracking.
 *
 * The engine looks for u with T (u o gamma) = u by solving
 * w = u + sum_{|a|>=2} F_a(z) u^a shell by shell. At shell n the twisted
 * coboundary operator is F_b - sum_a T F_a(z + c) tau^a_b with tau the
 * degree-n symmetric-power transition of T^{-1}; the right-hand side is read
 * off the degree-n part of the current conjugacy residual, so the
 * inhomogeneous terms are produced by composition, never hand-coded.
 * A shell where every divisor degenerates and the right-hand side survives
 * is a nonzero obstruction class: the type of the system.
 */
#ifndef UEDA_NORMALIZER_HPP
#define UEDA_NORMALIZER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ueda/cohomology.hpp"
#include "ueda/germ.hpp"
#include "ueda/majorant.hpp"

namespace ueda {

class non_split_extension : public std::runtime_error {
public:
    explicit non_split_extension(const std::string& what) : std::runtime_error(what) {}
};

class constrained_unsolvable : public std::runtime_error {
public:
    explicit constrained_unsolvable(const std::string& what) : std::runtime_error(what) {}
};

struct DegreeLog {
    int degree = 0;
    double smallest_divisor = std::numeric_limits<double>::infinity();
    int resonant_count = 0;
    double rhs_norm = 0.0;
    double solution_norm = 0.0;
};

struct ObstructionComponent {
    int generator = 0;
    int lambda = 0;        // bundle factor index
    MultiIndex alpha;      // monomial, |alpha| = level + 1
    std::array<int, 2> mode{0, 0};
    cplx value;            // class-representative entry
};

struct ObstructionReport {
    int level = 0;                     // n: the class lives in degree n+1 data
    std::vector<FSeries> raw_cocycle;  // degree-(n+1) coefficients per generator
    std::vector<ObstructionComponent> class_components;
    bool nonzero = false;
    double class_norm = 0.0;
    double cocycle_violation = 0.0;    // pair identity, multi-generator models
};

struct NormalizationState {
    int r = 1;
    int N = 2;
    int degree_reached = 1;  // shells <= degree_reached are solved
    FSeries forward;         // w = u + sum F_a u^a (identity + solved shells)
    FSeries inverse;         // u as a function of w
    std::vector<DegreeLog> divisor_log;
    std::vector<TwistedCochainProblem> shell_problems;  // one per solved shell
};

inline NormalizationState make_state(const GermSystem& system) {
    NormalizationState st;
    st.r = system.r;
    st.N = system.N;
    st.forward = FSeries::identity(system.r, system.N);
    st.inverse = FSeries::identity(system.r, system.N);
    return st;
}

struct NormalizeOptions {
    bool hypersurface = false;
    std::optional<MajorantParams> track_majorant;
};

struct BoundMarginRow {
    int degree = 0;
    double majorant = 0.0;       // smallest A_alpha on the shell
    double solution_norm = 0.0;  // largest ||F_alpha|| on the shell
    double min_margin = 0.0;     // min over alpha of A_alpha - ||F_alpha||
    MultiIndex worst_alpha;
    bool ok = true;
};

struct NormalizeResult {
    bool finite_type = false;
    int type_level = 0;  // the type when finite; otherwise N ("infinity at N")
    NormalizationState state;
    std::optional<ObstructionReport> obstruction;
    double conjugacy_residual = 0.0;
    bool residual_ok = true;
    bool hypersurface_ok = true;
    double commutator_log = 0.0;
    std::vector<BoundMarginRow> bound_report;

    std::string type_string() const {
        return finite_type ? std::to_string(type_level)
                           : "infinity(N=" + std::to_string(type_level) + ")";
    }
};

namespace detail {

struct ShellProblem {
    TwistedCochainProblem problem;
    std::vector<double> scale;  // per-component basis weights (general path)
};

/// Flattened component index of (beta, lambda) over the degree-n shell.
inline int flat_index(int r, const MultiIndex& beta, int lambda) {
    return static_cast<int>(shell_rank(beta)) * r + lambda;
}

/**
 * The twisted coboundary problem of one degree shell. Diagonal systems get
 * exact divisor angles theta_lambda - beta.theta per component; general
 * systems get the unitary weight T ox tau(T^{-1})^t, assembled in the
 * rescaled symmetric frame so the solver works with a genuinely unitary
 * matrix.
 */
inline ShellProblem build_shell_problem(const GermSystem& system, int n,
                                        const std::vector<FSeries>& rhs) {
    const auto& shell = shell_indices(system.r, n);
    int D = static_cast<int>(shell.size());
    int s = D * system.r;

    ShellProblem sp;
    sp.problem.model = TwistedCochainProblem::Model::Group;
    sp.problem.s = s;
    sp.problem.exact_mode = system.exact_mode && system.all_diagonal();
    sp.problem.tol = system.tol;

    bool need_scale = !system.all_diagonal();
    sp.scale.assign(static_cast<size_t>(s), 1.0);
    if (need_scale) {
        for (int b = 0; b < D; ++b) {
            double fact = 1.0;
            for (int i = 0; i < system.r; ++i)
                for (int j = 2; j <= shell[static_cast<size_t>(b)][i]; ++j) fact *= j;
            for (int lam = 0; lam < system.r; ++lam)
                sp.scale[static_cast<size_t>(b * system.r + lam)] = std::sqrt(fact);
        }
    }

    for (size_t gi = 0; gi < system.generators.size(); ++gi) {
        const GermGenerator& gen = system.generators[gi];
        GroupGenerator g;
        g.shift = gen.shift;
        if (gen.diagonal) {
            g.diagonal = true;
            g.angles.resize(static_cast<size_t>(s));
            for (int b = 0; b < D; ++b) {
                Angle beta_dot;  // beta . theta
                for (int i = 0; i < system.r; ++i)
                    beta_dot = beta_dot + gen.angles[static_cast<size_t>(i)].times(
                                              shell[static_cast<size_t>(b)][i]);
                for (int lam = 0; lam < system.r; ++lam)
                    g.angles[static_cast<size_t>(b * system.r + lam)] =
                        gen.angles[static_cast<size_t>(lam)] - beta_dot;
            }
        } else {
            g.diagonal = false;
            Eigen::MatrixXcd tau_inv =
                symmetric_transition(gen.T.adjoint(), n, system.tol.unitarity).tau;
            Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(s, s);
            for (int b = 0; b < D; ++b)
                for (int lam = 0; lam < system.r; ++lam)
                    for (int a = 0; a < D; ++a)
                        for (int mu = 0; mu < system.r; ++mu)
                            W(b * system.r + lam, a * system.r + mu) =
                                gen.T(lam, mu) * tau_inv(a, b) *
                                (sp.scale[static_cast<size_t>(b * system.r + lam)] /
                                 sp.scale[static_cast<size_t>(a * system.r + mu)]);
            g.W = W;
        }
        g.rhs.assign(static_cast<size_t>(s), FourierPoly());
        for (int b = 0; b < D; ++b)
            for (int lam = 0; lam < system.r; ++lam) {
                FourierPoly v = rhs[gi].coeff(shell[static_cast<size_t>(b)], lam);
                g.rhs[static_cast<size_t>(flat_index(system.r, shell[static_cast<size_t>(b)], lam))] =
                    v * sp.scale[static_cast<size_t>(b * system.r + lam)];
            }
        sp.problem.generators.push_back(std::move(g));
    }
    return sp;
}

inline double power_defect(const GermGenerator& gen, int r, int d) {
    if (gen.diagonal) {
        double worst = 0.0;
        for (const auto& a : gen.angles) {
            Angle p = a.times(d);
            if (p.exact() && p.is_zero()) continue;
            worst = std::max(worst, std::abs(1.0 - p.unit().real()) + std::abs(p.unit().imag()));
        }
        return worst;
    }
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(r, r);
    for (int k = 0; k < d; ++k) P = gen.T * P;
    return (P - Eigen::MatrixXcd::Identity(r, r)).cwiseAbs().maxCoeff();
}

inline FSeries apply_linear_power(const GermGenerator& gen, int r, const FSeries& x, int k) {
    if (k == 0) return x;
    if (gen.diagonal) {
        FSeries out(x.r(), x.N(), r);
        x.for_each_term([&](const MultiIndex& a, int c, const FourierPoly& v) {
            out.add_coeff(a, c, v * gen.angles[static_cast<size_t>(c)].times(k).unit());
        });
        return out;
    }
    FSeries out = x;
    for (int i = 0; i < k; ++i) out = apply_linear(gen, r, out, false);
    return out;
}

} // namespace detail

enum class SolveDegreeStatus { Solved, Obstructed };

struct SolveDegreeOutcome {
    SolveDegreeStatus status = SolveDegreeStatus::Solved;
    DegreeLog log;
    std::optional<ObstructionReport> obstruction;
};

namespace detail {

inline ObstructionReport decode_obstruction(const GermSystem& system, int shell_degree,
                                            const std::vector<FSeries>& residual_shell,
                                            const CochainSolution& sol, double cocycle_viol) {
    ObstructionReport rep;
    rep.level = shell_degree - 1;
    rep.raw_cocycle = residual_shell;
    rep.cocycle_violation = cocycle_viol;
    const auto& shell = shell_indices(system.r, shell_degree);
    for (const auto& ob : sol.obstructions) {
        ObstructionComponent c;
        c.lambda = ob.component % system.r;
        c.alpha = shell[static_cast<size_t>(ob.component / system.r)];
        c.mode = ob.m;
        c.value = ob.value;
        rep.class_components.push_back(std::move(c));
    }
    rep.class_norm = sol.obstruction_norm;
    rep.nonzero = !rep.class_components.empty();
    return rep;
}

} // namespace detail

/**
 * Solve the degree-n shell: read the right-hand side off the conjugacy
 * residual of the current change, solve the twisted coboundary problem,
 * store F_n, and refresh the inverse change. With the hypersurface
 * constraint the first-component unknowns with alpha_1 = 0 are pinned to
 * zero after verifying their equations are trivially satisfied.
 */
inline SolveDegreeOutcome solve_degree(const GermSystem& system, int n, NormalizationState& state,
                                       const NormalizeOptions& options = {}) {
    system.validate();
    if (n < 2 || n > system.N) throw invalid_input("solve_degree: degree out of range");
    if (state.degree_reached != n - 1)
        throw invalid_input("solve_degree: state is valid through degree " +
                            std::to_string(state.degree_reached) + ", expected " +
                            std::to_string(n - 1));
    if (options.hypersurface && !system.all_diagonal())
        throw invalid_input("solve_degree: hypersurface mode needs a diagonal system");

    auto resids = expand_relation(system, state.inverse.truncated(n));
    const auto& shell = detail::shell_indices(system.r, n);
    std::vector<FSeries> rhs;
    rhs.reserve(resids.size());
    for (const auto& res : resids) {
        FSeries h(system.r, n, system.r);
        for (const auto& beta : shell)
            for (int lam = 0; lam < system.r; ++lam) {
                FourierPoly v = res.coeff(beta, lam);
                if (!v.is_zero()) h.set_coeff(beta, lam, FourierPoly() - v);
            }
        rhs.push_back(std::move(h));
    }

    if (options.hypersurface) {
        for (size_t gi = 0; gi < rhs.size(); ++gi)
            for (const auto& beta : shell) {
                if (beta[0] != 0) continue;
                FourierPoly v = rhs[gi].coeff(beta, 0);
                if (v.wiener_norm() > system.tol.obstruction)
                    throw constrained_unsolvable(
                        "hypersurface constraint: generator " + std::to_string(gi) +
                        " has an incompatible term at alpha = " + beta.to_string());
                if (!v.is_zero()) rhs[gi].set_coeff(beta, 0, FourierPoly());
            }
    }

    auto sp = detail::build_shell_problem(system, n, rhs);
    CochainSolution sol = mode_coboundary_solve(sp.problem);

    SolveDegreeOutcome out;
    out.log.degree = n;
    out.log.smallest_divisor = sol.smallest_divisor;
    out.log.resonant_count = sol.resonant_count;
    for (const auto& h : rhs) out.log.rhs_norm = std::max(out.log.rhs_norm, h.max_norm());
    if (sol.status == CochainSolution::Status::Obstructed) {
        out.status = SolveDegreeStatus::Obstructed;
        std::vector<FSeries> residual_shell;
        for (auto& h : rhs) residual_shell.push_back(scale_double(h, -1.0));
        double cv = system.generators.size() > 1 ? group_pair_cocycle_violation(sp.problem) : 0.0;
        // flip the solver's rhs-side values back to residual convention
        CochainSolution flipped = sol;
        for (auto& ob : flipped.obstructions) ob.value = -ob.value;
        out.obstruction =
            detail::decode_obstruction(system, n, residual_shell, flipped, cv);
        return out;
    }
    if (sol.status == CochainSolution::Status::Inconsistent)
        throw std::runtime_error("solve_degree: coboundary problem inconsistent at degree " +
                                 std::to_string(n) + " (residual " +
                                 std::to_string(sol.residual_norm) + ")");

    for (const auto& beta : shell)
        for (int lam = 0; lam < system.r; ++lam) {
            int idx = detail::flat_index(system.r, beta, lam);
            FourierPoly F = sol.cochain[static_cast<size_t>(idx)] *
                            (1.0 / sp.scale[static_cast<size_t>(idx)]);
            if (!F.is_zero()) {
                state.forward.set_coeff(beta, lam, F);
                out.log.solution_norm = std::max(out.log.solution_norm, F.wiener_norm());
            }
        }
    state.inverse = reverse(state.forward);
    state.degree_reached = n;
    state.divisor_log.push_back(out.log);
    state.shell_problems.push_back(sp.problem);
    return out;
}

/**
 * Extract the degree-(n+1) obstruction class of a type-n system: verify the
 * type, check the cocycle identity in multi-generator models, and project
 * the cocycle on the resonant directions. Only the vanishing of the class
 * is intrinsic; the representative is the minimum-norm resonant projection.
 */
inline ObstructionReport obstruction_class(const GermSystem& system, int n) {
    system.validate();
    if (n < 1 || n + 1 > system.N)
        throw invalid_input("obstruction_class: level out of range for the truncation");
    for (const auto& gen : system.generators) {
        double worst = 0.0;
        MultiIndex bad;
        gen.f.for_each_term([&](const MultiIndex& a, int, const FourierPoly& v) {
            if (a.order() <= n && v.wiener_norm() > worst) {
                worst = v.wiener_norm();
                bad = a;
            }
        });
        if (worst > system.tol.obstruction)
            throw invalid_input("obstruction_class: system is not of type " + std::to_string(n) +
                                ", offending term at " + bad.to_string());
    }
    const auto& shell = detail::shell_indices(system.r, n + 1);
    std::vector<FSeries> shells;
    for (const auto& gen : system.generators) {
        FSeries h(system.r, n + 1, system.r);
        for (const auto& beta : shell)
            for (int lam = 0; lam < system.r; ++lam) {
                FourierPoly v = gen.f.coeff(beta, lam);
                if (!v.is_zero()) h.set_coeff(beta, lam, v);
            }
        shells.push_back(std::move(h));
    }
    auto sp = detail::build_shell_problem(system, n + 1, shells);
    double cv = system.generators.size() > 1 ? group_pair_cocycle_violation(sp.problem) : 0.0;
    CochainSolution sol = mode_coboundary_solve(sp.problem);
    return detail::decode_obstruction(system, n + 1, shells, sol, cv);
}

/// Bound check of the constructed coefficients against a majorant series.
/// The premises are rechecked here: the Cauchy-type bound on the input data
/// and that K dominates the solver's empirical norm ratio.
inline std::vector<BoundMarginRow> verify_majorant_bounds(const GermSystem& system,
                                                          const NormalizationState& state,
                                                          const MajorantParams& params) {
    params.validate();
    if (params.eps) throw invalid_input("verify_majorant_bounds: plain parameters expected");
    for (size_t gi = 0; gi < system.generators.size(); ++gi) {
        const auto& gen = system.generators[gi];
        double viol = 0.0;
        MultiIndex bad;
        gen.f.for_each_term([&](const MultiIndex& a, int, const FourierPoly& v) {
            double bound = params.M * std::pow(params.R, a.order());
            if (v.wiener_norm() > bound + 1e-12 && v.wiener_norm() - bound > viol) {
                viol = v.wiener_norm() - bound;
                bad = a;
            }
        });
        if (viol > 0.0)
            throw invalid_input("verify_majorant_bounds: |f| <= M R^{|alpha|} fails for generator " +
                                std::to_string(gi) + " at " + bad.to_string());
    }
    double K_emp = estimate_k(state.shell_problems);
    if (params.K + 1e-12 < K_emp)
        throw invalid_input("verify_majorant_bounds: K = " + std::to_string(params.K) +
                            " does not bound the empirical solver ratio " + std::to_string(K_emp));

    MajorantSeries A = majorant_series(params, std::max(2, state.degree_reached));
    std::vector<BoundMarginRow> rows;
    for (int nn = 2; nn <= state.degree_reached; ++nn) {
        BoundMarginRow row;
        row.degree = nn;
        row.majorant = std::numeric_limits<double>::infinity();
        row.min_margin = std::numeric_limits<double>::infinity();
        for (const auto& alpha : detail::shell_indices(system.r, nn)) {
            double a_val = A.coeff(alpha);
            double f_val = 0.0;
            for (int lam = 0; lam < system.r; ++lam)
                f_val = std::max(f_val, state.forward.coeff(alpha, lam).wiener_norm());
            row.majorant = std::min(row.majorant, a_val);
            row.solution_norm = std::max(row.solution_norm, f_val);
            double margin = a_val - f_val;
            if (margin < row.min_margin) {
                row.min_margin = margin;
                row.worst_alpha = alpha;
            }
        }
        row.ok = row.min_margin >= -1e-12;
        rows.push_back(std::move(row));
    }
    return rows;
}

/**
 * Full normalization loop: solve shells 2..N, then verify the conjugacy
 * T (u o gamma) = u through degree N. A nonzero obstruction stops the loop
 * and reports the type; everything solved reports "infinite type at this
 * truncation". Residual beyond tolerance on a solved run is an internal
 * inconsistency, not a mathematical outcome.
 */
inline NormalizeResult normalize(const GermSystem& system, const NormalizeOptions& options = {}) {
    system.validate();
    NormalizeResult result;
    result.state = make_state(system);
    if (system.generators.size() > 1) result.commutator_log = commutator_violation(system);
    for (int n = 2; n <= system.N; ++n) {
        auto outcome = solve_degree(system, n, result.state, options);
        if (outcome.status == SolveDegreeStatus::Obstructed) {
            result.finite_type = true;
            result.type_level = n - 1;
            result.obstruction = outcome.obstruction;
            return result;
        }
    }
    result.finite_type = false;
    result.type_level = system.N;

    double resid = 0.0;
    for (const auto& res : expand_relation(system, result.state.inverse))
        resid = std::max(resid, res.max_norm());
    result.conjugacy_residual = resid;
    result.residual_ok = resid < system.tol.residual;
    if (resid > 1e-6)
        throw std::runtime_error("normalize: conjugacy residual " + std::to_string(resid) +
                                 " exceeds the internal-consistency trap");

    if (options.hypersurface) {
        double bad = 0.0;
        result.state.inverse.for_each_term([&](const MultiIndex& a, int c, const FourierPoly& v) {
            if (c == 0 && a[0] == 0) bad = std::max(bad, v.wiener_norm());
        });
        result.hypersurface_ok = bad == 0.0;
    }
    if (options.track_majorant)
        result.bound_report =
            verify_majorant_bounds(system, result.state, *options.track_majorant);
    return result;
}

/**
 * Block lower-triangular linear parts (unitary diagonal blocks t^1, S) are
 * conjugated to block-diagonal form by M = [[1,0],[-m,I]]; the correction m
 * solves the mode-0 coboundary system (t^1 - S) m = a. A resonant direction
 * with nonzero data means the extension does not split.
 */
inline GermSystem split_linear_part(const GermSystem& system) {
    if (system.r < 2) throw invalid_input("split_linear_part: needs r >= 2");
    // Block-triangular linear parts are the whole point; bypass the
    // unitarity check and return unchanged when nothing needs splitting.
    bool already_unitary = true;
    for (const auto& gen : system.generators)
        if (!gen.diagonal && unitarity_defect(gen.T) > system.tol.unitarity) already_unitary = false;
    if (already_unitary) return system;

    int rr = system.r - 1;
    TwistedCochainProblem p;
    p.model = TwistedCochainProblem::Model::Group;
    p.s = rr;
    p.tol = system.tol;
    std::vector<cplx> t1s;
    for (const auto& gen : system.generators) {
        if (gen.diagonal) {
            throw invalid_input("split_linear_part: diagonal generators are already unitary");
        }
        for (int j = 1; j < system.r; ++j)
            if (std::abs(gen.T(0, j)) > system.tol.unitarity)
                throw invalid_input("split_linear_part: linear part is not block lower-triangular");
        cplx t1 = gen.T(0, 0);
        Eigen::MatrixXcd S = gen.T.bottomRightCorner(rr, rr);
        if (std::abs(std::abs(t1) - 1.0) > 1e-10 || unitarity_defect(S) > 1e-10)
            throw invalid_input("split_linear_part: diagonal blocks are not unitary");
        GroupGenerator g;
        g.diagonal = false;
        g.W = S / t1;
        g.rhs.assign(static_cast<size_t>(rr), FourierPoly());
        for (int i = 0; i < rr; ++i) g.rhs[static_cast<size_t>(i)] = FourierPoly(gen.T(i + 1, 0) / t1);
        p.generators.push_back(std::move(g));
        t1s.push_back(t1);
    }
    CochainSolution sol = mode_coboundary_solve(p);
    if (sol.status == CochainSolution::Status::Obstructed)
        throw non_split_extension("split_linear_part: mode-0 obstruction, the extension does not split");
    if (sol.status == CochainSolution::Status::Inconsistent)
        throw invalid_input("split_linear_part: splitting system inconsistent across generators");

    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(system.r, system.r);
    for (int i = 0; i < rr; ++i) M(i + 1, 0) = -sol.cochain[static_cast<size_t>(i)].constant_part();

    // w~ = M w turns the linear parts into M D M^{-1} = diag(t^1, S).
    GermSystem out = conjugate_linear_unchecked(system, M);
    for (size_t gi = 0; gi < out.generators.size(); ++gi) {
        Eigen::MatrixXcd& T = out.generators[gi].T;
        double off = 0.0;
        for (int i = 1; i < system.r; ++i) off = std::max(off, std::abs(T(i, 0)));
        if (off > 1e-8)
            throw std::runtime_error("split_linear_part: conjugation failed to clear the block");
        // snap the cleared entries so downstream unitarity checks are exact
        for (int i = 1; i < system.r; ++i) T(i, 0) = cplx(0.0, 0.0);
        T(0, 0) = t1s[gi];
        T.bottomRightCorner(rr, rr) = system.generators[gi].T.bottomRightCorner(rr, rr);
    }
    return out;
}

struct AveragedSolution {
    FSeries u;                    // the averaged change, u(w)
    double equivariance_residual = 0.0;
    double linear_defect = 0.0;   // distance of the linear part from the identity
};

/**
 * Deck-group averaging over a degree-d cover: given a solution u~ of the
 * d-th power system, u = |deck|^{-1} sum_nu T^nu (u~ o gamma^nu) is exactly
 * equivariant for the original torsion system.
 */
inline AveragedSolution finite_cover_average(const GermSystem& system, int d,
                                             const FSeries& u_tilde) {
    system.validate();
    if (d < 1) throw invalid_input("finite_cover_average: d must be >= 1");
    for (size_t gi = 0; gi < system.generators.size(); ++gi)
        if (detail::power_defect(system.generators[gi], system.r, d) > 1e-10)
            throw invalid_input("finite_cover_average: generator " + std::to_string(gi) +
                                " does not have torsion monodromy of order dividing " +
                                std::to_string(d));
    int G = static_cast<int>(system.generators.size());
    int N = system.N;

    FSeries acc(system.r, N, system.r);
    long count = 0;
    std::vector<int> nu(static_cast<size_t>(G), 0);
    // iterate nu in mixed radix, maintaining the composed map per prefix
    std::function<void(int, const GermMap&)> walk = [&](int g, const GermMap& m) {
        if (g == G) {
            FSeries term = detail::compose_with_base(u_tilde, m.c, &m.G, m.W);
            for (int gg = G - 1; gg >= 0; --gg)
                term = detail::apply_linear_power(system.generators[static_cast<size_t>(gg)],
                                                  system.r, term, nu[static_cast<size_t>(gg)]);
            acc = add(acc, term);
            ++count;
            return;
        }
        GermMap cur = m;
        for (int k = 0; k < d; ++k) {
            nu[static_cast<size_t>(g)] = k;
            walk(g + 1, cur);
            if (k + 1 < d) cur = apply_generator(system, g, cur);
        }
    };
    walk(0, GermMap::identity_map(system.r, N));

    AveragedSolution out;
    out.u = scale_double(acc, 1.0 / static_cast<double>(count));
    out.linear_defect = sub(out.u.truncated(1), FSeries::identity(system.r, 1)).max_norm();
    for (const auto& res : expand_relation(system, out.u))
        out.equivariance_residual = std::max(out.equivariance_residual, res.max_norm());
    return out;
}

// ---------------------------------------------------------------------------
// test-data generators

struct ExampleParams {
    int r = 2;
    int N = 8;
    unsigned seed = 1;
    std::vector<Angle> angles;      // model-dependent; see generate_example
    std::vector<cplx> extension;    // the a-vector of the projective-bundle germ
};

/**
 * Named germ generators:
 *  - deformation_trivial: f == 0, the fibration germ; infinite type.
 *  - projective_bundle: single generator from w' = S w / (1 + a.w);
 *    type 1 exactly when the extension data a is nonzero.
 *  - resonant_demo: r = 2, t = (i, -1), the planted resonance at (2,0).
 *  - random_diophantine: golden-mean/sqrt2 diagonal angles with seeded
 *    random quadratic and cubic data, |coefficients| <= 0.1.
 */
inline GermSystem generate_example(const std::string& name, const ExampleParams& params) {
    GermSystem sys;
    sys.r = params.r;
    sys.N = params.N;
    if (name == "deformation_trivial") {
        GermGenerator gen;
        gen.diagonal = true;
        gen.angles = params.angles;
        if (gen.angles.empty()) gen.angles.assign(static_cast<size_t>(params.r), Angle());
        gen.f = FSeries(params.r, params.N, params.r);
        sys.exact_mode = true;
        sys.generators.push_back(std::move(gen));
        sys.validate();
        return sys;
    }
    if (name == "projective_bundle") {
        GermGenerator gen;
        gen.diagonal = true;
        gen.angles.assign(static_cast<size_t>(params.r), Angle());
        for (size_t i = 0; i < params.angles.size() && i < gen.angles.size(); ++i)
            gen.angles[i] = params.angles[i].negated();  // T = S^{-1}
        std::vector<cplx> a = params.extension;
        a.resize(static_cast<size_t>(params.r), cplx(0.0, 0.0));
        sys.exact_mode = true;
        for (const auto& ang : gen.angles) sys.exact_mode &= ang.exact();
        // T w' = w / (1 + a.w): f_p = w_p * sum_{k>=1} (-a.w)^k
        FSeries aw(params.r, params.N, 1);
        for (int lam = 0; lam < params.r; ++lam) {
            std::vector<int> e(static_cast<size_t>(params.r), 0);
            e[static_cast<size_t>(lam)] = 1;
            if (a[static_cast<size_t>(lam)] != cplx(0.0, 0.0))
                aw.set_coeff(MultiIndex(std::move(e)), 0, FourierPoly(a[static_cast<size_t>(lam)]));
        }
        FSeries geom(params.r, params.N, 1);
        auto term = FSeries::constant(params.r, params.N, {coeff_traits<FourierPoly>::one()});
        for (int k = 1; k <= params.N; ++k) {
            term = scale_double(mul(term, aw), -1.0);
            geom = add(geom, term);
        }
        gen.f = FSeries(params.r, params.N, params.r);
        auto id = FSeries::identity(params.r, params.N);
        for (int lam = 0; lam < params.r; ++lam) {
            auto f_lam = mul(geom, id.component(lam));
            f_lam.for_each_term([&](const MultiIndex& al, int, const FourierPoly& v) {
                if (al.order() >= 2) gen.f.set_coeff(al, lam, v);
            });
        }
        sys.generators.push_back(std::move(gen));
        sys.validate();
        return sys;
    }
    if (name == "resonant_demo") {
        sys.r = 2;
        sys.exact_mode = true;
        GermGenerator gen;
        gen.diagonal = true;
        gen.angles = {Angle::from_fraction(1, 4), Angle::from_fraction(1, 2)};  // t = (i, -1)
        gen.f = FSeries(2, params.N, 2);
        gen.f.set_coeff(MultiIndex{2, 0}, 1, FourierPoly(cplx(1.0, 0.0)));
        sys.generators.push_back(std::move(gen));
        sys.validate();
        return sys;
    }
    if (name == "random_diophantine") {
        sys.r = 2;
        sys.exact_mode = false;
        GermGenerator gen;
        gen.diagonal = true;
        gen.angles = {Angle::from_double((std::sqrt(5.0) - 1.0) / 2.0),
                      Angle::from_double(std::sqrt(2.0) - 1.0)};
        gen.f = FSeries(2, params.N, 2);
        std::mt19937_64 rng(params.seed);
        std::uniform_real_distribution<double> uni(-0.0707, 0.0707);
        for (int n = 2; n <= std::min(3, params.N); ++n)
            for (const auto& alpha : detail::shell_indices(2, n))
                for (int lam = 0; lam < 2; ++lam)
                    gen.f.set_coeff(alpha, lam, FourierPoly(cplx(uni(rng), uni(rng))));
        sys.generators.push_back(std::move(gen));
        sys.validate();
        return sys;
    }
    throw invalid_input("generate_example: unknown name '" + name + "'");
}

} // namespace ueda

#endif // UEDA_NORMALIZER_HPP
