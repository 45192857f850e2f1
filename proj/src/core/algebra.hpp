#pragma once

// Spray / Christoffel algebra shared by the double and jet code paths.
// A table provides d(idx) (partials of L in z = (x, v)) and vel(m) (the
// velocity argument), both of scalar type S.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>
#include <vector>

#include "finsler/jets.hpp"
#include "finsler/linalg.hpp"

namespace finsler::detail {

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

// Solves A X = B in place (A is n x n row-major, B is n x cols); B receives X.
template <class S>
void solve_in_place(std::vector<S>& A, std::vector<S>& B, int n, int cols)
{
    for (int c = 0; c < n; ++c) {
        int pivot = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(value_of(A[r * n + c])) > std::abs(value_of(A[pivot * n + c]))) pivot = r;
        if (value_of(A[pivot * n + c]) == 0.0) fail(ErrorCode::degenerate_tensor, "singular fundamental tensor");
        if (pivot != c) {
            for (int k = 0; k < n; ++k) std::swap(A[c * n + k], A[pivot * n + k]);
            for (int k = 0; k < cols; ++k) std::swap(B[c * cols + k], B[pivot * cols + k]);
        }
        const S inv = S(1.0) / A[c * n + c];
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const S f = A[r * n + c] * inv;
            for (int k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
            for (int k = 0; k < cols; ++k) B[r * cols + k] -= f * B[c * cols + k];
        }
        for (int k = c; k < n; ++k) A[c * n + k] *= inv;
        for (int k = 0; k < cols; ++k) B[c * cols + k] *= inv;
    }
}

template <class S, class Table>
std::vector<S> fundamental(const Table& T)
{
    const int n = T.n;
    std::vector<S> g(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) g[a * n + b] = g[b * n + a] = T.d({n + a, n + b}) * 0.5;
    return g;
}

// G^i = 1/4 g^{il} (L_{v_l x_m} v^m - L_{x_l})
template <class S, class Table>
std::vector<S> spray(const Table& T)
{
    const int n = T.n;
    std::vector<S> g = fundamental<S>(T);
    std::vector<S> E(n);
    for (int l = 0; l < n; ++l) {
        S acc = T.d({l}) * -1.0;
        for (int m = 0; m < n; ++m) acc += T.d({n + l, m}) * T.vel(m);
        E[l] = acc * 0.25;
    }
    solve_in_place(g, E, n, 1);
    return E;
}

// Gamma^k_ij = 1/2 g^{ks} (d_i g_sj + d_j g_si - d_s g_ij), d_i = d/dx^i - N^m_i d/dv^m.
// N is row-major: N[i * n + j] = N^i_j. Output index (k * n + i) * n + j.
template <class S, class Table>
std::vector<S> christoffel(const Table& T, const std::vector<S>& N)
{
    const int n = T.n;
    // delta(i, a, b) = delta_i g_ab
    std::vector<S> delta(n * n * n);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                S acc = T.d({n + a, n + b, i});
                for (int m = 0; m < n; ++m) acc -= N[m * n + i] * T.d({n + a, n + b, n + m});
                delta[(i * n + a) * n + b] = delta[(i * n + b) * n + a] = acc * 0.5;
            }
    std::vector<S> g = fundamental<S>(T);
    // first kind: F(s, i, j) = 1/2 (delta_i g_sj + delta_j g_si - delta_s g_ij)
    std::vector<S> first(n * n * n);
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const S val = (delta[(i * n + s) * n + j] + delta[(j * n + s) * n + i] - delta[(s * n + i) * n + j]) * 0.5;
                first[s * n * n + i * n + j] = val;
                first[s * n * n + j * n + i] = val;
            }
    solve_in_place(g, first, n, n * n);
    return first;
}

// Table over doubles: partials straight from a DerivativeTable.
struct PlainTable {
    const DerivativeTable& table;
    const Vec& v;
    int n;
    double d(std::initializer_list<int> idx) const
    {
        return table.at(std::span<const int>(idx.begin(), idx.size()));
    }
    double vel(int m) const { return v(m); }
};

// Table over jets: partials at z + sum_d eps_d seeds[d].
class JetTable {
public:
    JetTable(const DerivativeTable& table, const Vec& v, std::span<const std::vector<double>> seeds, int order)
        : table_(table), v_(v), seeds_(seeds.begin(), seeds.end()), order_(order), n(table.dim())
    {}

    Jet d(std::initializer_list<int> idx) const
    {
        std::vector<int> key(idx);
        std::sort(key.begin(), key.end());
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Jet j = table_.shifted(key, seeds_, order_);
        cache_.emplace(std::move(key), j);
        return j;
    }
    Jet vel(int m) const
    {
        const int p = static_cast<int>(seeds_.size());
        Jet out(v_(m), p, order_);
        if (order_ >= 1)
            for (int dd = 0; dd < p; ++dd) {
                MultiIndex e{};
                e[dd] = 1;
                out.raw(out.layout().find(e)) = seeds_[dd][n + m];
            }
        return out;
    }

private:
    const DerivativeTable& table_;
    const Vec& v_;
    std::vector<std::vector<double>> seeds_;
    int order_;
    mutable std::map<std::vector<int>, Jet> cache_;

public:
    int n;
};

} // namespace finsler::detail
