/**
 * @file multiindex.hpp
 * @brief Exponent vectors, graded-lexicographic shell enumeration and ranking.
 *
 * A shell is the set of all alpha in Z_{>=0}^r with |alpha| = n, listed in
 * graded-lexicographic order: within a shell, alpha precedes beta when the
 * first differing entry of alpha is larger. Every loop over "|alpha| = n"
 * in the library runs in this order, so reports are reproducible.
 */
#ifndef UEDA_MULTIINDEX_HPP
#define UEDA_MULTIINDEX_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ueda/core.hpp"

namespace ueda {

/// Exponent vector. Entries are non-negative for series exponents; the
/// Diophantine scans reuse the same type with signed entries.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : exp_(std::move(e)) {}
    MultiIndex(std::initializer_list<int> e) : exp_(e) {}

    int size() const { return static_cast<int>(exp_.size()); }
    int operator[](int i) const { return exp_[static_cast<size_t>(i)]; }
    int& operator[](int i) { return exp_[static_cast<size_t>(i)]; }
    const std::vector<int>& exponents() const { return exp_; }

    /// |alpha| = sum of entries (for non-negative indices).
    int order() const { return std::accumulate(exp_.begin(), exp_.end(), 0); }
    /// l1 norm, the meaning of |alpha| for signed indices.
    int l1() const {
        int s = 0;
        for (int e : exp_) s += e < 0 ? -e : e;
        return s;
    }

    bool operator==(const MultiIndex& o) const { return exp_ == o.exp_; }
    bool operator!=(const MultiIndex& o) const { return exp_ != o.exp_; }

    /// Graded-lexicographic order (by |alpha|, then first-larger-entry-first).
    bool operator<(const MultiIndex& o) const {
        int a = order(), b = o.order();
        if (a != b) return a < b;
        for (size_t i = 0; i < exp_.size(); ++i)
            if (exp_[i] != o.exp_[i]) return exp_[i] > o.exp_[i];
        return false;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r = *this;
        for (size_t i = 0; i < exp_.size(); ++i) r.exp_[i] += o.exp_[i];
        return r;
    }

    std::string to_string() const {
        std::string s = "(";
        for (size_t i = 0; i < exp_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(exp_[i]);
        }
        return s + ")";
    }

private:
    std::vector<int> exp_;
};

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Number of alpha in Z_{>=0}^r with |alpha| = n: C(n+r-1, r-1).
inline long long shell_size(int r, int n) {
    if (n < 0) return 0;
    return binomial(n + r - 1, r - 1);
}

namespace detail {

inline void enumerate_rec(int r, int n, std::vector<int>& cur, std::vector<MultiIndex>& out) {
    if (r == 1) {
        cur.push_back(n);
        out.emplace_back(cur);
        cur.pop_back();
        return;
    }
    for (int a = n; a >= 0; --a) {
        cur.push_back(a);
        enumerate_rec(r - 1, n - a, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// All alpha in Z_{>=0}^r with |alpha| = n, in graded-lex order.
inline std::vector<MultiIndex> enumerate_multiindices(int r, int n) {
    if (r < 1) throw invalid_input("enumerate_multiindices: need r >= 1");
    if (n < 0) throw invalid_input("enumerate_multiindices: need n >= 0");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<size_t>(shell_size(r, n)));
    std::vector<int> cur;
    detail::enumerate_rec(r, n, cur, out);
    return out;
}

/// Position of alpha inside its graded-lex shell, without enumeration.
inline long long shell_rank(const MultiIndex& alpha) {
    int r = alpha.size();
    int rem = alpha.order();
    long long rank = 0;
    for (int i = 0; i < r - 1; ++i) {
        // entries v with rem >= v > alpha[i] come first
        for (int v = rem; v > alpha[i]; --v) rank += shell_size(r - i - 1, rem - v);
        rem -= alpha[i];
    }
    return rank;
}

/**
 * All alpha in Z^r with l1 norm exactly n, graded-lex on |entries| then sign
 * patterns, "+" before "-" per nonzero slot. Deterministic, duplicate-free.
 */
inline std::vector<MultiIndex> enumerate_l1_sphere(int r, int n) {
    std::vector<MultiIndex> out;
    for (const MultiIndex& base : enumerate_multiindices(r, n)) {
        std::vector<int> nonzero;
        for (int i = 0; i < r; ++i)
            if (base[i] != 0) nonzero.push_back(i);
        int k = static_cast<int>(nonzero.size());
        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            MultiIndex a = base;
            for (int b = 0; b < k; ++b)
                if (mask & (1u << b)) a[nonzero[static_cast<size_t>(b)]] *= -1;
            out.push_back(std::move(a));
        }
    }
    return out;
}

} // namespace ueda

#endif // UEDA_MULTIINDEX_HPP
