/**
 * @file bundles.hpp
 * @brief Unitary flat line bundles on a genus-g curve as monodromy angles,
 *        the invariant sup-circle distance, Diophantine classification of
 *        tuples, and the small-divisor sequence driving weighted majorants.
 *
 * A rank-1 unitary flat bundle factors through H_1, so it is a vector of
 * 2g angles, one per fundamental-group generator. Tuples model a direct sum
 * of r such bundles. |a| for signed exponent vectors is the l1 norm
 * throughout; lattice scans run parallel over l1 spheres with a
 * deterministic reduction order.
 */
#ifndef UEDA_BUNDLES_HPP
#define UEDA_BUNDLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ueda/core.hpp"
#include "ueda/multiindex.hpp"
#include "ueda/parallel.hpp"

namespace ueda {

struct FlatLineBundle {
    int genus = 1;
    std::vector<Angle> angles;  // size 2 * genus, each in [0,1)

    static FlatLineBundle trivial(int genus) {
        FlatLineBundle b;
        b.genus = genus;
        b.angles.assign(static_cast<size_t>(2 * genus), Angle());
        return b;
    }

    void validate() const {
        if (genus < 1 || angles.size() != static_cast<size_t>(2 * genus))
            throw invalid_input("FlatLineBundle: angle count must be 2*genus");
    }

    bool is_trivial_exact() const {
        for (const auto& a : angles)
            if (!a.is_zero()) return false;
        return true;
    }
};

struct FlatBundleTuple {
    std::vector<FlatLineBundle> bundles;

    int rank() const { return static_cast<int>(bundles.size()); }
    int genus() const { return bundles.empty() ? 0 : bundles.front().genus; }

    void validate() const {
        if (bundles.empty()) throw invalid_input("FlatBundleTuple: empty tuple");
        for (const auto& b : bundles) {
            b.validate();
            if (b.genus != bundles.front().genus)
                throw invalid_input("FlatBundleTuple: mixed genus");
        }
    }

    /// Factors are unique up to ordering; this is the documented order
    /// (lexicographic in the angle vector).
    FlatBundleTuple canonicalized() const {
        FlatBundleTuple t = *this;
        std::sort(t.bundles.begin(), t.bundles.end(),
                  [](const FlatLineBundle& a, const FlatLineBundle& b) {
                      for (size_t i = 0; i < a.angles.size() && i < b.angles.size(); ++i) {
                          if (a.angles[i].value() != b.angles[i].value())
                              return a.angles[i].value() < b.angles[i].value();
                      }
                      return false;
                  });
        return t;
    }
};

/// Small-divisor sequence: values are eps_n^{-1} for n = 1..n_max
/// (0 encodes eps_n = infinity, the torsion case).
struct EpsilonSequence {
    double K = 1.0;
    std::vector<double> eps_inv;  // index n-1 holds eps_n^{-1}

    int n_max() const { return static_cast<int>(eps_inv.size()); }
    double inv(int n) const { return eps_inv.at(static_cast<size_t>(n - 1)); }
    /// eps_n itself; +inf when the divisor degenerates.
    double eps(int n) const {
        double v = inv(n);
        return v == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / v;
    }
};

/// Tensor combination N_a = tensor_lambda L_lambda^{a_lambda}.
inline FlatLineBundle bundle_combine(const FlatBundleTuple& tuple, const MultiIndex& a) {
    tuple.validate();
    if (a.size() != tuple.rank())
        throw invalid_input("bundle_combine: exponent length must equal rank");
    FlatLineBundle out = FlatLineBundle::trivial(tuple.genus());
    for (int lam = 0; lam < tuple.rank(); ++lam) {
        if (a[lam] == 0) continue;
        const auto& b = tuple.bundles[static_cast<size_t>(lam)];
        for (size_t i = 0; i < out.angles.size(); ++i)
            out.angles[i] = out.angles[i] + b.angles[i].times(a[lam]);
    }
    return out;
}

/// d(L, L') = max over generators of the circle distance of the angles.
/// Translation invariant: d(L ox N, L' ox N) = d(L, L').
inline double invariant_distance(const FlatLineBundle& a, const FlatLineBundle& b) {
    a.validate();
    b.validate();
    if (a.genus != b.genus) throw invalid_input("invariant_distance: genus mismatch");
    double d = 0.0;
    for (size_t i = 0; i < a.angles.size(); ++i)
        d = std::max(d, circle_distance(a.angles[i], b.angles[i]));
    return d;
}

inline double distance_to_trivial(const FlatLineBundle& a) {
    double d = 0.0;
    for (const auto& th : a.angles) d = std::max(d, th.circle_distance_to_zero());
    return d;
}

/// Exact-zero test of d(I, N_a); arithmetic in exact mode, float equality else.
inline bool combination_is_trivial(const FlatLineBundle& a) {
    for (const auto& th : a.angles)
        if (!th.is_zero()) return false;
    return true;
}

enum class ClassVerdict { E0, SA, Violation };

struct ShellScanRow {
    int n = 0;
    MultiIndex alpha;     // argmin of the distance on the l1 sphere
    double distance = 0;  // min distance on the sphere
    double bound = 0;     // (2n)^(-A) at the reported A
    bool pass = true;
};

struct ClassifyReport {
    ClassVerdict verdict = ClassVerdict::SA;
    // E0 case
    std::vector<long long> denominators;  // one per (bundle, generator) angle
    long long torsion_order = 0;          // lcm of denominators
    // S_A case
    double fitted_A = 0.0;  // smallest A making the bound hold over the scan
    MultiIndex tightest_witness;
    double tightest_distance = 0.0;
    // violation case
    MultiIndex violating_alpha;
    std::vector<ShellScanRow> rows;

    std::string verdict_string() const {
        switch (verdict) {
            case ClassVerdict::E0: return "E0";
            case ClassVerdict::SA: return "S_A";
            default: return "violation";
        }
    }
};

namespace detail {

struct ShellScanResult {
    // min distance and its graded-lex-first witness, plus the shell's
    // largest exponent requirement A_a = -log d / log(2n)
    double min_dist = std::numeric_limits<double>::infinity();
    MultiIndex argmin;
    double max_exponent = 0.0;
    MultiIndex exponent_witness;
    bool exact_zero = false;
    MultiIndex zero_witness;
};

inline ShellScanResult scan_l1_shell(const FlatBundleTuple& tuple, int n) {
    ShellScanResult res;
    for (const MultiIndex& a : enumerate_l1_sphere(tuple.rank(), n)) {
        FlatLineBundle comb = bundle_combine(tuple, a);
        if (combination_is_trivial(comb) && !res.exact_zero) {
            res.exact_zero = true;
            res.zero_witness = a;
        }
        double d = distance_to_trivial(comb);
        if (d < res.min_dist) {
            res.min_dist = d;
            res.argmin = a;
        }
        if (d > 0.0) {
            double need = -std::log(d) / std::log(2.0 * n);
            if (need > res.max_exponent) {
                res.max_exponent = need;
                res.exponent_witness = a;
            }
        }
    }
    return res;
}

} // namespace detail

/**
 * Classify a tuple: E0 when every angle is rational with denominator at most
 * `torsion_denominator_bound` (decided arithmetically in exact mode, by
 * continued-fraction reconstruction at 1e-12 in float mode); otherwise scan
 * all 1 <= |a| <= scan_bound and report the smallest A making the
 * d >= (2|a|)^(-A) bound hold, or the violating a when a combination is
 * exactly trivial. Never throws on a negative result.
 */
inline ClassifyReport classify(const FlatBundleTuple& tuple, int scan_bound,
                               long long torsion_denominator_bound, bool exact_mode,
                               int threads = 1) {
    tuple.validate();
    if (scan_bound < 1) throw invalid_input("classify: scan_bound must be >= 1");
    ClassifyReport rep;

    bool all_rational = true;
    std::vector<long long> dens;
    for (const auto& b : tuple.bundles)
        for (const auto& th : b.angles) {
            if (exact_mode && th.exact()) {
                if (th.denominator() <= torsion_denominator_bound)
                    dens.push_back(th.denominator());
                else
                    all_rational = false;
            } else {
                auto pq = rational_reconstruct(th.value(), torsion_denominator_bound, 1e-12);
                if (pq)
                    dens.push_back(pq->second);
                else
                    all_rational = false;
            }
            if (!all_rational) break;
        }
    if (all_rational) {
        rep.verdict = ClassVerdict::E0;
        rep.denominators = dens;
        long long l = 1;
        for (long long d : dens) l = std::lcm(l, d);
        rep.torsion_order = l;
        return rep;
    }

    auto shells = parallel_map<detail::ShellScanResult>(
        static_cast<size_t>(scan_bound), threads,
        [&](size_t i) { return detail::scan_l1_shell(tuple, static_cast<int>(i) + 1); });

    double fitted = 0.0;
    for (int n = 1; n <= scan_bound; ++n) {
        const auto& s = shells[static_cast<size_t>(n - 1)];
        if (s.exact_zero) {
            rep.verdict = ClassVerdict::Violation;
            rep.violating_alpha = s.zero_witness;
            return rep;
        }
        if (s.max_exponent > fitted) {
            fitted = s.max_exponent;
            rep.tightest_witness = s.exponent_witness;
            rep.tightest_distance =
                distance_to_trivial(bundle_combine(tuple, s.exponent_witness));
        }
    }
    rep.verdict = ClassVerdict::SA;
    rep.fitted_A = fitted;
    rep.rows.reserve(static_cast<size_t>(scan_bound));
    for (int n = 1; n <= scan_bound; ++n) {
        const auto& s = shells[static_cast<size_t>(n - 1)];
        ShellScanRow row;
        row.n = n;
        row.alpha = s.argmin;
        row.distance = s.min_dist;
        row.bound = std::pow(2.0 * n, -fitted);
        row.pass = row.distance + 1e-15 >= row.bound;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

/// eps_n^{-1} = (1/K) min over the l1 sphere |alpha| = n of d(I, N_alpha).
inline EpsilonSequence epsilon_sequence(const FlatBundleTuple& tuple, double K, int n_max,
                                        int threads = 1) {
    tuple.validate();
    if (K <= 0.0) throw invalid_input("epsilon_sequence: K must be positive");
    if (n_max < 1) throw invalid_input("epsilon_sequence: n_max must be >= 1");
    auto shells = parallel_map<detail::ShellScanResult>(
        static_cast<size_t>(n_max), threads,
        [&](size_t i) { return detail::scan_l1_shell(tuple, static_cast<int>(i) + 1); });
    EpsilonSequence eps;
    eps.K = K;
    eps.eps_inv.reserve(static_cast<size_t>(n_max));
    for (const auto& s : shells)
        eps.eps_inv.push_back(s.exact_zero ? 0.0 : s.min_dist / K);
    return eps;
}

struct SiegelPairViolation {
    int n = 0, m = 0;
    double lhs = 0.0, rhs = 0.0;  // eps^{-1}_{n-m} vs eps^{-1}_n + eps^{-1}_m
};

struct SiegelReport {
    bool property_a_pass = false;
    double A = 0.0;          // least grid multiple of 0.1 that works
    int a_witness = 0;       // the n that blocks property (a), when failing
    bool property_b_pass = false;
    std::vector<SiegelPairViolation> b_violations;
};

/**
 * Property (a): least A on a 0.1 grid with eps_n < (2n)^A for all n <= m_max,
 * failing on torsion entries (eps_n = infinity). Property (b): subadditivity
 * eps^{-1}_{n-m} <= eps^{-1}_n + eps^{-1}_m for all m < n <= m_max, with the
 * violating pairs listed.
 */
inline SiegelReport siegel_check(const EpsilonSequence& eps, int m_max,
                                 double grid_max = 60.0, double slack = 1e-12) {
    if (eps.n_max() < m_max) throw invalid_input("siegel_check: sequence shorter than m_max");
    SiegelReport rep;

    double needed = 0.0;
    bool feasible = true;
    for (int n = 1; n <= m_max; ++n) {
        double e = eps.eps(n);
        if (std::isinf(e)) {
            feasible = false;
            rep.a_witness = n;
            break;
        }
        if (e > 1.0) needed = std::max(needed, std::log(e) / std::log(2.0 * n));
    }
    if (feasible) {
        double a = 0.1 * std::ceil(needed / 0.1 + 1e-12);
        if (a <= 0.0) a = 0.1;
        // strict inequality wanted; nudge one grid step if equality sneaks in
        for (int n = 1; n <= m_max && a <= grid_max; ++n)
            if (!(eps.eps(n) < std::pow(2.0 * n, a))) {
                a += 0.1;
                n = 0;
            }
        if (a <= grid_max) {
            rep.property_a_pass = true;
            rep.A = a;
        } else {
            rep.a_witness = m_max;
        }
    }

    rep.property_b_pass = true;
    for (int n = 2; n <= m_max; ++n)
        for (int m = 1; m < n; ++m) {
            double lhs = eps.inv(n - m);
            double rhs = eps.inv(n) + eps.inv(m);
            if (lhs > rhs + slack) {
                rep.property_b_pass = false;
                rep.b_violations.push_back({n, m, lhs, rhs});
            }
        }
    return rep;
}

/**
 * Simultaneous unitary conjugacy of two commuting unitary families, decided
 * by comparing joint spectra. Families must pairwise commute (checked).
 */
inline bool monodromy_equivalent(const std::vector<Eigen::MatrixXcd>& T_family,
                                 const std::vector<Eigen::MatrixXcd>& S_family,
                                 double tol = 1e-10) {
    if (T_family.size() != S_family.size())
        throw invalid_input("monodromy_equivalent: family sizes differ");
    if (T_family.empty()) return true;
    long dim = T_family.front().rows();
    for (const auto* fam : {&T_family, &S_family})
        for (const auto& A : *fam) {
            if (A.rows() != dim || A.cols() != dim)
                throw invalid_input("monodromy_equivalent: dimension mismatch");
            double defect = (A.adjoint() * A - Eigen::MatrixXcd::Identity(dim, dim))
                                .cwiseAbs()
                                .maxCoeff();
            if (defect > 1e-8)
                throw invalid_input("monodromy_equivalent: family member not unitary");
        }
    for (const auto* fam : {&T_family, &S_family})
        for (size_t i = 0; i < fam->size(); ++i)
            for (size_t j = i + 1; j < fam->size(); ++j) {
                double c = ((*fam)[i] * (*fam)[j] - (*fam)[j] * (*fam)[i]).cwiseAbs().maxCoeff();
                if (c > 1e-9)
                    throw invalid_input("monodromy_equivalent: family does not commute");
            }

    auto joint_spectrum = [&](const std::vector<Eigen::MatrixXcd>& fam)
        -> std::vector<std::vector<cplx>> {
        std::mt19937_64 rng(0x5eedu);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (int attempt = 0; attempt < 8; ++attempt) {
            Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(dim, dim);
            for (const auto& A : fam) B += cplx(uni(rng), uni(rng)) * A;
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(B);
            if (es.info() != Eigen::Success) continue;
            Eigen::MatrixXcd V = es.eigenvectors();
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(V);
            std::vector<std::vector<cplx>> tuples(static_cast<size_t>(dim));
            bool ok = true;
            for (const auto& A : fam) {
                Eigen::MatrixXcd M = lu.solve(A * V);
                double off = 0.0;
                for (long i = 0; i < dim && ok; ++i)
                    for (long j = 0; j < dim; ++j)
                        if (i != j) off = std::max(off, std::abs(M(i, j)));
                if (off > 1e-8) {
                    ok = false;
                    break;
                }
                for (long i = 0; i < dim; ++i) tuples[static_cast<size_t>(i)].push_back(M(i, i));
            }
            if (ok) return tuples;
        }
        throw invalid_input("monodromy_equivalent: joint diagonalization failed");
    };

    auto a = joint_spectrum(T_family);
    auto b = joint_spectrum(S_family);
    auto key = [](const std::vector<cplx>& t, const std::vector<cplx>& s) {
        for (size_t i = 0; i < t.size(); ++i) {
            if (t[i].real() != s[i].real()) return t[i].real() < s[i].real();
            if (t[i].imag() != s[i].imag()) return t[i].imag() < s[i].imag();
        }
        return false;
    };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    // greedy tolerance matching of the two multisets
    std::vector<bool> used(b.size(), false);
    for (const auto& ta : a) {
        bool matched = false;
        for (size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            double d = 0.0;
            for (size_t i = 0; i < ta.size(); ++i) d = std::max(d, std::abs(ta[i] - b[j][i]));
            if (d <= tol) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

} // namespace ueda

#endif // UEDA_BUNDLES_HPP
