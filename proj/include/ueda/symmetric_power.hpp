/**
 * @file symmetric_power.hpp
 * @brief Transition matrices induced on degree-n symmetric powers.
 *
 * For a unitary T, tau(T)^alpha_beta is the coefficient of x^beta in
 * prod_lambda (sum_mu T^lambda_mu x_mu)^{alpha_lambda}, rows and columns
 * running over the graded-lex shell of degree n. tau itself need not be
 * unitary; in the basis rescaled by sqrt(n!/alpha!) it is.
 */
#ifndef UEDA_SYMMETRIC_POWER_HPP
#define UEDA_SYMMETRIC_POWER_HPP

#include <Eigen/Dense>
#include <cmath>

#include "ueda/core.hpp"
#include "ueda/multiindex.hpp"
#include "ueda/series.hpp"

namespace ueda {

inline double unitarity_defect(const Eigen::MatrixXcd& T) {
    Eigen::MatrixXcd d = T.adjoint() * T -
        Eigen::MatrixXcd::Identity(T.rows(), T.cols());
    return d.cwiseAbs().maxCoeff();
}

struct SymPowerTransition {
    Eigen::MatrixXcd source;  // the r x r matrix T
    int degree = 0;           // n
    Eigen::MatrixXcd tau;     // shell_size x shell_size, rows alpha / cols beta

    /// Matrix in the orthonormal frame sqrt(n!/alpha!) * e^alpha.
    Eigen::MatrixXcd scaled() const {
        int r = static_cast<int>(source.rows());
        const auto& idx = detail::shell_indices(r, degree);
        Eigen::VectorXd w(static_cast<long>(idx.size()));
        for (size_t k = 0; k < idx.size(); ++k) {
            double fact = 1.0;  // alpha!
            for (int i = 0; i < r; ++i)
                for (int j = 2; j <= idx[k][i]; ++j) fact *= j;
            w[static_cast<long>(k)] = std::sqrt(fact);  // 1/s_alpha up to common n!
        }
        Eigen::MatrixXcd out = tau;
        for (long a = 0; a < out.rows(); ++a)
            for (long b = 0; b < out.cols(); ++b)
                out(a, b) *= w[b] / w[a];
        return out;
    }
};

inline SymPowerTransition symmetric_transition(const Eigen::MatrixXcd& T, int n,
                                               double unitarity_tol = 1e-12) {
    if (T.rows() != T.cols() || T.rows() < 1)
        throw invalid_input("symmetric_transition: square matrix required");
    double defect = unitarity_defect(T);
    if (defect > unitarity_tol)
        throw invalid_input("symmetric_transition: matrix not unitary, defect " +
                            std::to_string(defect));
    int r = static_cast<int>(T.rows());
    const auto& idx = detail::shell_indices(r, n);
    long D = static_cast<long>(idx.size());

    SymPowerTransition out;
    out.source = T;
    out.degree = n;
    out.tau = Eigen::MatrixXcd::Zero(D, D);

    for (long a = 0; a < D; ++a) {
        const MultiIndex& alpha = idx[static_cast<size_t>(a)];
        // Homogeneous expansion of prod (T x)^alpha, degree shell by shell.
        std::vector<cplx> poly{cplx(1.0, 0.0)};  // degree-0 shell
        int deg = 0;
        for (int lam = 0; lam < r; ++lam) {
            for (int rep = 0; rep < alpha[lam]; ++rep) {
                const auto& cur_idx = detail::shell_indices(r, deg);
                const auto& nxt_idx = detail::shell_indices(r, deg + 1);
                std::vector<cplx> nxt(nxt_idx.size(), cplx(0.0, 0.0));
                for (size_t k = 0; k < cur_idx.size(); ++k) {
                    if (poly[k] == cplx(0.0, 0.0)) continue;
                    for (int mu = 0; mu < r; ++mu) {
                        cplx t = T(lam, mu);
                        if (t == cplx(0.0, 0.0)) continue;
                        MultiIndex next = cur_idx[k];
                        next[mu] += 1;
                        nxt[static_cast<size_t>(shell_rank(next))] += poly[k] * t;
                    }
                }
                poly = std::move(nxt);
                ++deg;
            }
        }
        for (long b = 0; b < D; ++b) out.tau(a, b) = poly[static_cast<size_t>(b)];
    }
    return out;
}

} // namespace ueda

#endif // UEDA_SYMMETRIC_POWER_HPP
