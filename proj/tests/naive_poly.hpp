// Test-only brute-force polynomial arithmetic. Deliberately independent of
// the library's series code: plain exponent maps, no shells, no ranking.
#ifndef UEDA_TESTS_NAIVE_POLY_HPP
#define UEDA_TESTS_NAIVE_POLY_HPP

#include <complex>
#include <map>
#include <vector>

namespace naive {

using C = std::complex<double>;
using Expo = std::vector<int>;

struct Poly {
    int vars = 1;
    std::map<Expo, C> terms;

    static Poly zero(int vars) { return Poly{vars, {}}; }
    static Poly var(int vars, int i) {
        Poly p{vars, {}};
        Expo e(static_cast<size_t>(vars), 0);
        e[static_cast<size_t>(i)] = 1;
        p.terms[e] = C(1.0, 0.0);
        return p;
    }
    void add_term(const Expo& e, C c) {
        auto it = terms.find(e);
        if (it == terms.end())
            terms[e] = c;
        else {
            it->second += c;
            if (it->second == C(0.0, 0.0)) terms.erase(it);
        }
    }
    C coeff(const Expo& e) const {
        auto it = terms.find(e);
        return it == terms.end() ? C(0.0, 0.0) : it->second;
    }
};

inline int total_degree(const Expo& e) {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

inline Poly add(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [e, c] : b.terms) out.add_term(e, c);
    return out;
}

inline Poly mul_trunc(const Poly& a, const Poly& b, int N) {
    Poly out = Poly::zero(a.vars);
    for (const auto& [ea, ca] : a.terms)
        for (const auto& [eb, cb] : b.terms) {
            Expo e = ea;
            for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            if (total_degree(e) > N) continue;
            out.add_term(e, ca * cb);
        }
    return out;
}

inline Poly scale(const Poly& a, C s) {
    Poly out = Poly::zero(a.vars);
    for (const auto& [e, c] : a.terms) out.add_term(e, c * s);
    return out;
}

/// outer(inner...) truncated at N; inner entries are polys in the same vars.
inline Poly compose_trunc(const Poly& outer, const std::vector<Poly>& inner, int N) {
    int vars = inner.front().vars;
    Poly out = Poly::zero(vars);
    for (const auto& [e, c] : outer.terms) {
        Poly t{vars, {{Expo(static_cast<size_t>(vars), 0), C(1.0, 0.0)}}};
        for (size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) t = mul_trunc(t, inner[i], N);
        out = add(out, scale(t, c));
    }
    return out;
}

} // namespace naive

#endif // UEDA_TESTS_NAIVE_POLY_HPP
