#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ueda/io.hpp"
#include "ueda/series.hpp"
#include "ueda/symmetric_power.hpp"

#include "naive_poly.hpp"

using namespace ueda;

namespace {

using Series = TruncatedSeries<cplx>;

Series random_poly(int r, int N, int m, std::mt19937_64& rng, int max_deg) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Series s(r, N, m);
    for (int n = 0; n <= max_deg; ++n)
        for (const auto& a : enumerate_multiindices(r, n))
            for (int c = 0; c < m; ++c) s.set_coeff(a, c, cplx(uni(rng), uni(rng)));
    return s;
}

Series random_tangent_change(int r, int N, std::mt19937_64& rng, int max_deg) {
    std::uniform_real_distribution<double> uni(-0.4, 0.4);
    Series s = Series::identity(r, N);
    for (int n = 2; n <= max_deg; ++n)
        for (const auto& a : enumerate_multiindices(r, n))
            for (int c = 0; c < r; ++c) s.set_coeff(a, c, cplx(uni(rng), uni(rng)));
    return s;
}

naive::Poly to_naive(const Series& s, int comp) {
    naive::Poly p = naive::Poly::zero(s.r());
    s.for_each_term([&](const MultiIndex& a, int c, const cplx& v) {
        if (c == comp) p.add_term(a.exponents(), v);
    });
    return p;
}

double diff_vs_naive(const Series& s, const naive::Poly& p, int comp, int N) {
    double worst = 0.0;
    for (int n = 0; n <= N; ++n)
        for (const auto& a : enumerate_multiindices(s.r(), n))
            worst = std::max(worst, std::abs(s.coeff(a, comp) - p.coeff(a.exponents())));
    return worst;
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ();
    return Q;
}

} // namespace

TEST_CASE("multi-index enumeration is graded-lex with the documented counts") {
    auto l22 = enumerate_multiindices(2, 2);
    REQUIRE(l22.size() == 3);
    CHECK(l22[0] == MultiIndex{2, 0});
    CHECK(l22[1] == MultiIndex{1, 1});
    CHECK(l22[2] == MultiIndex{0, 2});

    auto l15 = enumerate_multiindices(1, 5);
    REQUIRE(l15.size() == 1);
    CHECK(l15[0] == MultiIndex{5});

    CHECK(enumerate_multiindices(3, 4).size() == 15);  // stars and bars C(6,2)

    SECTION("shell_rank agrees with the enumeration position") {
        for (int r = 1; r <= 4; ++r)
            for (int n = 0; n <= 6; ++n) {
                auto shell = enumerate_multiindices(r, n);
                for (size_t i = 0; i < shell.size(); ++i)
                    REQUIRE(shell_rank(shell[i]) == static_cast<long long>(i));
            }
    }
}

TEST_CASE("compose: spec examples") {
    SECTION("identity inner leaves outer unchanged") {
        std::mt19937_64 rng(11);
        auto outer = random_poly(2, 5, 1, rng, 5);
        auto id = Series::identity(2, 5);
        auto out = compose(outer, id);
        double worst = 0.0;
        out.for_each_term([&](const MultiIndex& a, int c, const cplx& v) {
            worst = std::max(worst, std::abs(v - outer.coeff(a, c)));
        });
        CHECK(worst == 0.0);
    }
    SECTION("w + w^2 into itself at N = 4") {
        Series f(1, 4, 1);
        f.set_coeff(MultiIndex{1}, 0, 1.0);
        f.set_coeff(MultiIndex{2}, 0, 1.0);
        auto out = compose(f, f);
        CHECK(out.coeff(MultiIndex{1}, 0) == cplx(1.0, 0.0));
        CHECK(out.coeff(MultiIndex{2}, 0) == cplx(2.0, 0.0));
        CHECK(out.coeff(MultiIndex{3}, 0) == cplx(2.0, 0.0));
        CHECK(out.coeff(MultiIndex{4}, 0) == cplx(1.0, 0.0));
    }
    SECTION("scaling: sum w^k composed with 2w") {
        Series outer(1, 3, 1);
        for (int k = 0; k <= 3; ++k) outer.set_coeff(MultiIndex{k}, 0, 1.0);
        Series inner(1, 3, 1);
        inner.set_coeff(MultiIndex{1}, 0, 2.0);
        auto out = compose(outer, inner);
        for (int k = 0; k <= 3; ++k)
            CHECK(out.coeff(MultiIndex{k}, 0) == cplx(std::pow(2.0, k), 0.0));
    }
    SECTION("nonzero constant term in inner is rejected") {
        Series outer(1, 3, 1);
        outer.set_coeff(MultiIndex{1}, 0, 1.0);
        Series inner(1, 3, 1);
        inner.set_coeff(MultiIndex{0}, 0, 0.5);
        CHECK_THROWS_AS(compose(outer, inner), invalid_input);
    }
}

TEST_CASE("compose agrees with a brute-force polynomial oracle") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        int N = 5;
        auto outer = random_poly(2, N, 1, rng, 3);
        auto inner = random_tangent_change(2, N, rng, 3);
        // force zero constant and keep the linear part general
        auto out = compose(outer, inner);
        std::vector<naive::Poly> inner_naive{to_naive(inner, 0), to_naive(inner, 1)};
        auto expect = naive::compose_trunc(to_naive(outer, 0), inner_naive, N);
        CHECK(diff_vs_naive(out, expect, 0, N) < 1e-12);
    }
}

TEST_CASE("compose is associative through the truncation degree") {
    std::mt19937_64 rng(31);
    int N = 6;
    auto f = random_poly(2, N, 2, rng, 3);
    // make f, g valid inner changes (zero constant term)
    auto g = random_tangent_change(2, N, rng, 3);
    auto h = random_tangent_change(2, N, rng, 3);
    MultiIndex origin{0, 0};
    for (int c = 0; c < 2; ++c) f.set_coeff(origin, c, 0.0);
    auto lhs = compose(compose(f, g), h);
    auto rhs = compose(f, compose(g, h));
    CHECK(sub(lhs, rhs).max_norm() < 1e-12);
}

TEST_CASE("reverse: spec examples and the two-sided inverse property") {
    SECTION("F == 0 gives u = w") {
        auto id = Series::identity(3, 6);
        auto u = reverse(id);
        CHECK(sub(u, id).max_norm() == 0.0);
    }
    SECTION("w = u - u^2 yields Catalan coefficients, exactly") {
        Series fwd(1, 5, 1);
        fwd.set_coeff(MultiIndex{1}, 0, 1.0);
        fwd.set_coeff(MultiIndex{2}, 0, -1.0);
        auto u = reverse(fwd);
        const double catalan[] = {1, 1, 2, 5, 14};
        for (int n = 1; n <= 5; ++n)
            CHECK(u.coeff(MultiIndex{n}, 0) == cplx(catalan[n - 1], 0.0));
    }
    SECTION("2 vars, w = u + (u1 u2, 0): brute-force fixed-point oracle") {
        int N = 4;
        Series fwd = Series::identity(2, N);
        fwd.set_coeff(MultiIndex{1, 1}, 0, 1.0);
        auto u = reverse(fwd);
        // independent fixed-point iteration with naive polynomials
        naive::Poly w1 = naive::Poly::var(2, 0), w2 = naive::Poly::var(2, 1);
        naive::Poly u1 = w1, u2 = w2;
        for (int it = 0; it < N + 1; ++it) {
            auto prod = naive::mul_trunc(u1, u2, N);
            u1 = naive::add(w1, naive::scale(prod, -1.0));
        }
        CHECK(diff_vs_naive(u, u1, 0, N) < 1e-14);
        CHECK(diff_vs_naive(u, u2, 1, N) < 1e-14);
        CHECK(u.coeff(MultiIndex{1, 1}, 0) == cplx(-1.0, 0.0));
    }
    SECTION("two-sided inverse on random tangent changes") {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 4; ++trial) {
            auto fwd = random_tangent_change(2, 6, rng, 4);
            auto gi = reverse(fwd);
            auto a = compose(fwd, gi);
            auto b = compose(gi, fwd);
            CHECK(sub(a, Series::identity(2, 6)).max_norm() < 1e-10);
            CHECK(sub(b, Series::identity(2, 6)).max_norm() < 1e-10);
        }
    }
    SECTION("non-identity linear part is rejected") {
        Series fwd(1, 4, 1);
        fwd.set_coeff(MultiIndex{1}, 0, 2.0);
        CHECK_THROWS_AS(reverse(fwd), invalid_input);
    }
}

TEST_CASE("sparse storage engages above the dense thresholds and matches the oracle") {
    Series s(5, 4, 1);  // r = 5 > 4: sparse
    CHECK_FALSE(s.dense_storage());
    std::mt19937_64 rng(41);
    auto a = random_poly(5, 4, 1, rng, 2);
    auto b = random_poly(5, 4, 1, rng, 2);
    CHECK_FALSE(a.dense_storage());
    auto prod = mul(a, b);
    auto expect = naive::mul_trunc(to_naive(a, 0), to_naive(b, 0), 4);
    CHECK(diff_vs_naive(prod, expect, 0, 4) < 1e-12);

    // deep truncation (N > 16) also runs sparse; reversion still inverts
    Series fwd = Series::identity(1, 18);
    fwd.set_coeff(MultiIndex{2}, 0, -1.0);
    CHECK_FALSE(fwd.dense_storage());
    auto u = reverse(fwd);
    CHECK(sub(compose(fwd, u), Series::identity(1, 18)).max_norm() < 1e-9);
}

TEST_CASE("symmetric power transition matrices") {
    std::mt19937_64 rng(43);
    SECTION("identity maps to the identity") {
        auto sp = symmetric_transition(Eigen::MatrixXcd::Identity(2, 2), 3);
        CHECK((sp.tau - Eigen::MatrixXcd::Identity(sp.tau.rows(), sp.tau.cols()))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
    SECTION("diagonal T gives the monomial character diagonal") {
        Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(2, 2);
        cplx t1 = std::polar(1.0, 1.1), t2 = std::polar(1.0, -0.4);
        T(0, 0) = t1;
        T(1, 1) = t2;
        auto sp = symmetric_transition(T, 3);
        const auto& shell = enumerate_multiindices(2, 3);
        for (size_t a = 0; a < shell.size(); ++a)
            for (size_t b = 0; b < shell.size(); ++b) {
                cplx expect = a == b ? std::pow(t1, shell[a][0]) * std::pow(t2, shell[a][1])
                                     : cplx(0.0, 0.0);
                CHECK(std::abs(sp.tau(static_cast<long>(a), static_cast<long>(b)) - expect) <
                      1e-14);
            }
    }
    SECTION("scaled matrix is unitary for r <= 3, n <= 5") {
        for (int r = 2; r <= 3; ++r)
            for (int n = 1; n <= 5; ++n) {
                auto U = random_unitary(r, rng);
                auto sp = symmetric_transition(U, n);
                CHECK(unitarity_defect(sp.scaled()) < 1e-10);
            }
    }
    SECTION("cocycle rule tau(T) tau(S) = tau(TS)") {
        for (int r = 2; r <= 3; ++r) {
            auto T = random_unitary(r, rng);
            auto S = random_unitary(r, rng);
            int n = 3;
            auto tT = symmetric_transition(T, n).tau;
            auto tS = symmetric_transition(S, n).tau;
            auto tTS = symmetric_transition((T * S).eval(), n).tau;
            CHECK((tT * tS - tTS).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SECTION("non-unitary input is rejected with the violating norm") {
        Eigen::MatrixXcd A = 2.0 * Eigen::MatrixXcd::Identity(2, 2);
        CHECK_THROWS_WITH(symmetric_transition(A, 2), Catch::Matchers::ContainsSubstring("defect"));
    }
}

TEST_CASE("series JSON round trip") {
    std::mt19937_64 rng(47);
    auto s = random_poly(2, 4, 2, rng, 3);
    auto j = series_to_json(s);
    auto back = series_from_json(j);
    CHECK(sub(s, back).max_norm() == 0.0);
    CHECK(j["r"] == 2);
    CHECK(j["terms"].is_array());
}
