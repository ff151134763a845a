#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ueda/bundles.hpp"
#include "ueda/io.hpp"

using namespace ueda;

namespace {

FlatBundleTuple tuple_from_values(int genus, const std::vector<std::vector<double>>& vals) {
    FlatBundleTuple t;
    for (const auto& v : vals) {
        FlatLineBundle b;
        b.genus = genus;
        for (double x : v) b.angles.push_back(Angle::from_double(x));
        t.bundles.push_back(b);
    }
    return t;
}

FlatBundleTuple exact_tuple(int genus, const std::vector<std::vector<std::pair<long long, long long>>>& vals) {
    FlatBundleTuple t;
    for (const auto& v : vals) {
        FlatLineBundle b;
        b.genus = genus;
        for (auto [p, q] : v) b.angles.push_back(Angle::from_fraction(p, q));
        t.bundles.push_back(b);
    }
    return t;
}

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

} // namespace

TEST_CASE("bundle_combine: spec arithmetic") {
    auto t = tuple_from_values(1, {{0.3, 0.0}});
    SECTION("a = 0 gives the trivial bundle") {
        auto b = bundle_combine(t, MultiIndex{0});
        CHECK(b.angles[0].value() == 0.0);
        CHECK(b.angles[1].value() == 0.0);
    }
    SECTION("r=1: doubling the angle") {
        auto b = bundle_combine(t, MultiIndex{2});
        CHECK(b.angles[0].value() == Catch::Approx(0.6).margin(1e-15));
    }
    SECTION("r=2 signed combination mod 1") {
        auto t2 = exact_tuple(1, {{{1, 4}, {0, 1}}, {{1, 2}, {0, 1}}});
        auto b = bundle_combine(t2, MultiIndex{1, -1});
        CHECK(b.angles[0].value() == Catch::Approx(0.75).margin(0.0));
        CHECK(b.angles[0].exact());
    }
    SECTION("group homomorphism, exactly in exact mode") {
        auto t2 = exact_tuple(1, {{{1, 7}, {2, 5}}, {{3, 11}, {1, 3}}});
        MultiIndex a{2, -3}, b{-1, 4}, ab{1, 1};
        auto ca = bundle_combine(t2, a);
        auto cb = bundle_combine(t2, b);
        auto cab = bundle_combine(t2, ab);
        for (size_t i = 0; i < ca.angles.size(); ++i) {
            Angle sum = ca.angles[i] + cb.angles[i];
            CHECK(sum == cab.angles[i]);
        }
    }
}

TEST_CASE("invariant distance is the sup circle metric") {
    auto t = tuple_from_values(1, {{0.9, 0.0}});
    auto L = t.bundles[0];
    CHECK(invariant_distance(L, L) == 0.0);
    CHECK(distance_to_trivial(L) == Catch::Approx(0.1).margin(1e-15));

    SECTION("translation invariance, exact") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            FlatLineBundle a, b, n;
            a.genus = b.genus = n.genus = 2;
            for (int i = 0; i < 4; ++i) {
                a.angles.push_back(Angle::from_double(uni(rng)));
                b.angles.push_back(Angle::from_double(uni(rng)));
                n.angles.push_back(Angle::from_double(uni(rng)));
            }
            FlatLineBundle an = a, bn = b;
            for (int i = 0; i < 4; ++i) {
                an.angles[static_cast<size_t>(i)] =
                    a.angles[static_cast<size_t>(i)] + n.angles[static_cast<size_t>(i)];
                bn.angles[static_cast<size_t>(i)] =
                    b.angles[static_cast<size_t>(i)] + n.angles[static_cast<size_t>(i)];
            }
            CHECK(invariant_distance(an, bn) == Catch::Approx(invariant_distance(a, b)).margin(1e-12));
        }
    }
    SECTION("metric axioms on random triples") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int trial = 0; trial < 25; ++trial) {
            FlatLineBundle x, y, z;
            x.genus = y.genus = z.genus = 1;
            for (int i = 0; i < 2; ++i) {
                x.angles.push_back(Angle::from_double(uni(rng)));
                y.angles.push_back(Angle::from_double(uni(rng)));
                z.angles.push_back(Angle::from_double(uni(rng)));
            }
            double dxy = invariant_distance(x, y);
            double dyx = invariant_distance(y, x);
            double dxz = invariant_distance(x, z);
            double dzy = invariant_distance(z, y);
            CHECK(dxy == dyx);
            CHECK(dxy <= dxz + dzy + 1e-15);
        }
        // identity of indiscernibles in exact mode
        auto e = exact_tuple(1, {{{2, 9}, {5, 7}}});
        CHECK(invariant_distance(e.bundles[0], e.bundles[0]) == 0.0);
    }
    SECTION("genus mismatch is rejected") {
        FlatLineBundle a = FlatLineBundle::trivial(1);
        FlatLineBundle b = FlatLineBundle::trivial(2);
        CHECK_THROWS_AS(invariant_distance(a, b), invalid_input);
    }
}

TEST_CASE("classify: torsion, Diophantine and violation branches") {
    SECTION("rational angles with small denominators are E0") {
        auto t = exact_tuple(1, {{{1, 3}, {5, 6}}, {{1, 2}, {0, 1}}});
        auto rep = classify(t, 20, 6, true);
        REQUIRE(rep.verdict == ClassVerdict::E0);
        CHECK(rep.torsion_order == 6);
        // float mode reconstructs the same rationals
        auto tf = tuple_from_values(1, {{1.0 / 3.0, 5.0 / 6.0}, {0.5, 0.0}});
        auto repf = classify(tf, 20, 6, false);
        CHECK(repf.verdict == ClassVerdict::E0);
        CHECK(repf.torsion_order == 6);
    }
    SECTION("golden ratio: S_A holds with A = 2, minima match brute force") {
        auto t = tuple_from_values(1, {{kGolden, 0.0}});
        auto rep = classify(t, 200, 1000000, false, 2);
        REQUIRE(rep.verdict == ClassVerdict::SA);
        CHECK(rep.fitted_A <= 2.0);
        CHECK(rep.fitted_A > 1.0);
        // independent brute force over a = 1..200
        for (const auto& row : rep.rows) {
            double best = 1.0;
            for (int a = -row.n; a <= row.n; ++a) {
                if (std::abs(a) != row.n) continue;
                double v = a * kGolden;
                double fr = v - std::floor(v);
                best = std::min(best, std::min(fr, 1.0 - fr));
            }
            CHECK(row.distance == Catch::Approx(best).margin(1e-15));
            CHECK(row.pass);
        }
        // the Fibonacci denominators realize the small minima
        int fib_prev = 1, fib = 2;
        while (fib <= 200) {
            double v = fib * kGolden;
            double fr = v - std::floor(v);
            double d = std::min(fr, 1.0 - fr);
            CHECK(rep.rows[static_cast<size_t>(fib - 1)].distance ==
                  Catch::Approx(d).margin(1e-15));
            int nx = fib + fib_prev;
            fib_prev = fib;
            fib = nx;
        }
        SECTION("monotone in A: any larger exponent also passes") {
            for (const auto& row : rep.rows)
                CHECK(row.distance + 1e-15 >= std::pow(2.0 * row.n, -(rep.fitted_A + 0.7)));
        }
    }
    SECTION("truncated Liouville angle violates the A = 2 bound in the scan") {
        double liouville = 0.0;
        double fac = 1.0;
        for (int k = 1; k <= 4; ++k) {
            fac *= k;
            liouville += std::pow(10.0, -fac);
        }
        auto t = tuple_from_values(1, {{liouville, 0.0}});
        auto rep = classify(t, 200, 100, false);
        REQUIRE(rep.verdict == ClassVerdict::SA);
        CHECK(rep.fitted_A > 2.0);  // some scanned a breaks (2|a|)^{-2}
        bool witnessed = false;
        for (const auto& row : rep.rows)
            if (row.distance < std::pow(2.0 * row.n, -2.0)) witnessed = true;
        CHECK(witnessed);
    }
    SECTION("exact-mode violation names the violating alpha") {
        auto t = exact_tuple(1, {{{1, 7}, {0, 1}}});
        auto rep = classify(t, 20, 5, true);  // denominator bound 5 blocks E0
        REQUIRE(rep.verdict == ClassVerdict::Violation);
        CHECK(rep.violating_alpha.l1() == 7);
    }
    SECTION("float-mode violation through an exact cancellation") {
        double x = kGolden;
        double two_x = 2.0 * x - 1.0;
        auto t = tuple_from_values(1, {{two_x, 0.0}, {x, 0.0}});
        auto rep = classify(t, 10, 100, false);
        REQUIRE(rep.verdict == ClassVerdict::Violation);
        CHECK(rep.violating_alpha.l1() == 3);  // (1, -2) kills the angle exactly
    }
}

TEST_CASE("epsilon sequence: torsion zeros, K-linearity, brute-force agreement") {
    SECTION("half-integer angle: eps_2^{-1} = 0") {
        auto t = exact_tuple(1, {{{1, 2}, {0, 1}}});
        auto eps = epsilon_sequence(t, 1.0, 4);
        CHECK(eps.inv(2) == 0.0);
        CHECK(std::isinf(eps.eps(2)));
        CHECK(eps.inv(1) == Catch::Approx(0.5).margin(0.0));
    }
    SECTION("doubling K halves every eps^{-1}") {
        auto t = tuple_from_values(1, {{kGolden, 0.37}});
        auto e1 = epsilon_sequence(t, 1.0, 12);
        auto e2 = epsilon_sequence(t, 2.0, 12);
        for (int n = 1; n <= 12; ++n) CHECK(e2.inv(n) == e1.inv(n) / 2.0);
    }
    SECTION("golden tuple matches an independent lattice scan") {
        auto t = tuple_from_values(1, {{kGolden, 0.0}});
        auto eps = epsilon_sequence(t, 1.0, 20, 3);
        for (int n = 1; n <= 20; ++n) {
            double v = n * kGolden;
            double fr = v - std::floor(v);
            double expect = std::min(fr, 1.0 - fr);
            CHECK(eps.inv(n) == Catch::Approx(expect).margin(1e-15));
        }
    }
}

TEST_CASE("siegel_check: properties (a) and (b)") {
    SECTION("torsion tuple fails property (a)") {
        auto t = exact_tuple(1, {{{1, 2}, {0, 1}}});
        auto eps = epsilon_sequence(t, 1.0, 10);
        auto rep = siegel_check(eps, 10);
        CHECK_FALSE(rep.property_a_pass);
        CHECK(rep.a_witness == 2);
    }
    SECTION("golden tuple passes both through 30") {
        auto t = tuple_from_values(1, {{kGolden, 0.0}});
        auto eps = epsilon_sequence(t, 1.0, 30);
        auto rep = siegel_check(eps, 30);
        CHECK(rep.property_a_pass);
        CHECK(rep.A > 0.0);
        CHECK(rep.A <= 3.0);
        CHECK(rep.property_b_pass);
        // and the fitted grid A indeed dominates: eps_n < (2n)^A for all n
        for (int n = 1; n <= 30; ++n) CHECK(eps.eps(n) < std::pow(2.0 * n, rep.A));
    }
    SECTION("crafted sequence eps^{-1}_n = 1/n: per-pair hand checks") {
        EpsilonSequence eps;
        eps.K = 1.0;
        for (int n = 1; n <= 6; ++n) eps.eps_inv.push_back(1.0 / n);
        auto rep = siegel_check(eps, 6);
        // (n, m) = (3, 1): 1/2 <= 1/3 + 1 passes
        for (const auto& v : rep.b_violations) CHECK_FALSE((v.n == 3 && v.m == 1));
        // (n, m) = (3, 2): 1 > 1/3 + 1/2 is a genuine violation
        bool found = false;
        for (const auto& v : rep.b_violations)
            if (v.n == 3 && v.m == 2) {
                found = true;
                CHECK(v.lhs == Catch::Approx(1.0));
                CHECK(v.rhs == Catch::Approx(1.0 / 3.0 + 0.5));
            }
        CHECK(found);
        CHECK_FALSE(rep.property_b_pass);
    }
    SECTION("subadditivity holds for rank-1 tuples from angles") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int trial = 0; trial < 6; ++trial) {
            int genus = 1 + (trial % 2);
            FlatBundleTuple t;
            FlatLineBundle b;
            b.genus = genus;
            for (int i = 0; i < 2 * genus; ++i) b.angles.push_back(Angle::from_double(uni(rng)));
            t.bundles.push_back(b);
            auto eps = epsilon_sequence(t, 1.0, 30);
            auto rep = siegel_check(eps, 30);
            CHECK(rep.property_b_pass);
        }
    }
}

TEST_CASE("monodromy equivalence by joint spectra") {
    Eigen::MatrixXcd D1 = Eigen::MatrixXcd::Zero(2, 2);
    D1(0, 0) = std::polar(1.0, kTwoPi * 0.3);
    D1(1, 1) = std::polar(1.0, kTwoPi * 0.7);
    Eigen::MatrixXcd D2 = Eigen::MatrixXcd::Zero(2, 2);
    D2(0, 0) = std::polar(1.0, kTwoPi * 0.1);
    D2(1, 1) = std::polar(1.0, kTwoPi * 0.9);

    SECTION("a family is equivalent to itself") {
        CHECK(monodromy_equivalent({D1, D2}, {D1, D2}));
    }
    SECTION("permuted joint eigenvalues are equivalent") {
        Eigen::MatrixXcd P(2, 2);
        P << 0, 1, 1, 0;
        Eigen::MatrixXcd E1 = P * D1 * P.transpose();
        Eigen::MatrixXcd E2 = P * D2 * P.transpose();
        CHECK(monodromy_equivalent({D1, D2}, {E1, E2}));
    }
    SECTION("a shifted eigenvalue angle breaks equivalence") {
        Eigen::MatrixXcd E1 = D1;
        E1(0, 0) = std::polar(1.0, kTwoPi * 0.31);
        CHECK_FALSE(monodromy_equivalent({D1}, {E1}));
    }
    SECTION("non-commuting families are rejected") {
        Eigen::MatrixXcd H(2, 2);
        H << 1, 1, 1, -1;
        H /= std::sqrt(2.0);
        CHECK_THROWS_AS(monodromy_equivalent({D1, H}, {D1, H}), invalid_input);
    }
}

TEST_CASE("tuple JSON round trips, exact and float") {
    auto t = exact_tuple(2, {{{1, 3}, {2, 7}, {0, 1}, {1, 2}}});
    auto j = tuple_to_json(t);
    auto back = tuple_from_json(j, true);
    CHECK(back.bundles[0].angles[1].numerator() == 2);
    CHECK(back.bundles[0].angles[1].denominator() == 7);

    auto tf = tuple_from_values(1, {{0.123456789, 0.987654321}});
    auto jf = tuple_to_json(tf);
    auto backf = tuple_from_json(jf, false);
    CHECK(backf.bundles[0].angles[0].value() == tf.bundles[0].angles[0].value());
}
