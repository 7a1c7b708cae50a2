#pragma once

// Dense symbolic matrices over RationalExpr, exact fraction-free linear
// algebra (Bareiss determinants, Cramer solves), the digraph Laplacian, and
// the synthesis/degradation system with its block partition.

#include <vector>

#include "graph.hpp"
#include "symexpr.hpp"

namespace steadykernel {

class SymMatrix {
  public:
    SymMatrix() : rows_(0), cols_(0) {}
    SymMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols) {}

    static SymMatrix identity(std::size_t n) {
        SymMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = RationalExpr(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    RationalExpr& at(std::size_t i, std::size_t j) {
        check(i, j);
        return e_[i * cols_ + j];
    }
    const RationalExpr& at(std::size_t i, std::size_t j) const {
        check(i, j);
        return e_[i * cols_ + j];
    }

    SymMatrix operator*(const SymMatrix& o) const {
        if (cols_ != o.rows_) throw error("matrix dimension mismatch in product");
        SymMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const RationalExpr& a = at(i, k);
                if (a.is_zero()) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) {
                    const RationalExpr& b = o.at(k, j);
                    if (!b.is_zero()) r.at(i, j) += a * b;
                }
            }
        return r;
    }

    std::vector<RationalExpr> operator*(const std::vector<RationalExpr>& v) const {
        if (cols_ != v.size()) throw error("matrix dimension mismatch in product");
        std::vector<RationalExpr> r(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!at(i, j).is_zero() && !v[j].is_zero()) r[i] += at(i, j) * v[j];
        return r;
    }

    SymMatrix operator+(const SymMatrix& o) const { return zip(o, false); }
    SymMatrix operator-(const SymMatrix& o) const { return zip(o, true); }

    SymMatrix scaled(const RationalExpr& c) const {
        SymMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] * c;
        return r;
    }

    SymMatrix transpose() const {
        SymMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    SymMatrix submatrix_without(std::size_t drop_row, std::size_t drop_col) const {
        if (rows_ == 0 || cols_ == 0) throw error("cannot shrink empty matrix");
        SymMatrix r(rows_ - 1, cols_ - 1);
        for (std::size_t i = 0, ri = 0; i < rows_; ++i) {
            if (i == drop_row) continue;
            for (std::size_t j = 0, rj = 0; j < cols_; ++j) {
                if (j == drop_col) continue;
                r.at(ri, rj++) = at(i, j);
            }
            ++ri;
        }
        return r;
    }

    SymMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
                    std::size_t ncols) const {
        if (row0 + nrows > rows_ || col0 + ncols > cols_)
            throw error("block out of range");
        SymMatrix r(nrows, ncols);
        for (std::size_t i = 0; i < nrows; ++i)
            for (std::size_t j = 0; j < ncols; ++j) r.at(i, j) = at(row0 + i, col0 + j);
        return r;
    }

    bool is_zero() const {
        for (const auto& x : e_)
            if (!x.is_zero()) return false;
        return true;
    }

    bool operator==(const SymMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (std::size_t i = 0; i < e_.size(); ++i)
            if (!(e_[i] == o.e_[i])) return false;
        return true;
    }

  private:
    void check(std::size_t i, std::size_t j) const {
        if (i >= rows_ || j >= cols_) throw error("matrix index out of range");
    }
    SymMatrix zip(const SymMatrix& o, bool minus) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw error("matrix dimension mismatch in sum");
        SymMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < e_.size(); ++i)
            r.e_[i] = minus ? e_[i] - o.e_[i] : e_[i] + o.e_[i];
        return r;
    }

    std::size_t rows_, cols_;
    std::vector<RationalExpr> e_;
};

// ---------------------------------------------------------------------------
// Exact determinants and solves.  Entries may be full rational expressions;
// rows are cleared to polynomials first (multiplying each row by the product
// of its denominators), then one-step fraction-free (Bareiss) elimination runs
// over polynomials, dividing by the previous pivot with exact polynomial
// division.  No polynomial gcd is ever required.

namespace detail {

struct PolyMatrix {
    std::vector<std::vector<Polynomial>> a;
    RationalExpr row_scale = RationalExpr(1);  // det(original) * row_scale == det(a)
};

inline PolyMatrix clear_denominators(const SymMatrix& m) {
    PolyMatrix out;
    out.a.resize(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Polynomial prod(1);
        for (std::size_t j = 0; j < m.cols(); ++j) prod *= m.at(i, j).den();
        out.a[i].resize(m.cols());
        for (std::size_t j = 0; j < m.cols(); ++j) {
            // num * (product of the other denominators): exact by construction.
            auto q = divide_exact(prod, m.at(i, j).den());
            out.a[i][j] = m.at(i, j).num() * *q;
        }
        out.row_scale *= RationalExpr(prod);
    }
    return out;
}

// Determinant of a square polynomial matrix by Bareiss elimination with row
// pivoting (pivot = first structurally nonzero entry in the column).
inline Polynomial det_bareiss_poly(std::vector<std::vector<Polynomial>> a) {
    std::size_t n = a.size();
    if (n == 0) return Polynomial(1);
    int sign = 1;
    Polynomial prev(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::size_t pivot = k;
        while (pivot < n && a[pivot][k].is_zero()) ++pivot;
        if (pivot == n) return Polynomial();  // singular
        if (pivot != k) {
            std::swap(a[pivot], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Polynomial num = a[k][k] * a[i][j] - a[i][k] * a[k][j];
                auto q = divide_exact(num, prev);
                if (!q) throw error("internal: inexact Bareiss division");
                a[i][j] = std::move(*q);
            }
            a[i][k] = Polynomial();
        }
        prev = a[k][k];
    }
    Polynomial det = a[n - 1][n - 1];
    return sign < 0 ? -det : det;
}

}  // namespace detail

inline RationalExpr det_bareiss(const SymMatrix& m) {
    if (m.rows() != m.cols()) throw error("determinant of non-square matrix");
    detail::PolyMatrix pm = detail::clear_denominators(m);
    Polynomial d = detail::det_bareiss_poly(std::move(pm.a));
    return RationalExpr(d) / pm.row_scale;
}

// Solves a x = b exactly (Cramer with fraction-free determinants); throws on
// singular a.  Sizes are small enough that n+1 determinants beat tracking a
// symbolic field elimination.
inline std::vector<RationalExpr> solve_exact(const SymMatrix& a,
                                             const std::vector<RationalExpr>& b) {
    if (a.rows() != a.cols()) throw error("solve requires a square matrix");
    if (a.rows() != b.size()) throw error("matrix dimension mismatch in solve");
    std::size_t n = a.rows();
    RationalExpr det = det_bareiss(a);
    if (det.is_zero()) throw error("matrix is singular");
    std::vector<RationalExpr> x(n);
    for (std::size_t j = 0; j < n; ++j) {
        SymMatrix aj = a;
        for (std::size_t i = 0; i < n; ++i) aj.at(i, j) = b[i];
        x[j] = det_bareiss(aj) / det;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Laplacian of a labeled digraph: off-diagonal (i,j) entry is the label of the
// edge j -> i; each diagonal entry makes its column sum to zero.

inline SymMatrix laplacian(const LabeledDigraph& g) {
    std::size_t n = g.n();
    SymMatrix m(n, n);
    for (const auto& [k, lbl] : g.edges()) {
        m.at(k.second, k.first) += RationalExpr(lbl);
        m.at(k.first, k.first) -= RationalExpr(lbl);
    }
    return m;
}

// Linear dynamics with zeroth-order synthesis and first-order degradation:
//   x' = (L(g) - diag(d)) x + s  =  F x + s.
struct SdSystem {
    LabeledDigraph g;
    SymMatrix lap;                // L(g)
    SymMatrix f;                  // L(g) - diag(degradation)
    std::vector<RationalExpr> s;  // synthesis
    std::vector<RationalExpr> d;  // degradation
    std::size_t n() const { return g.n(); }
};

inline SdSystem build_system(const LabeledDigraph& g) {
    SdSystem sys;
    sys.g = g;
    sys.lap = laplacian(g);
    sys.f = sys.lap;
    sys.s = g.synthesis();
    sys.d = g.degradation();
    for (std::size_t v = 0; v < g.n(); ++v) sys.f.at(v, v) -= sys.d[v];
    return sys;
}

// Block partition of F for a canonically labeled system:
//
//   F = [ N  0 ]   with the u vertices of the k degradation-free terminal
//       [ B  T ]   components last.  N is nonsingular; T is a direct sum of
//                  the terminal components' Laplacians.
struct BlockPartition {
    SdSystem sys;          // canonically labeled system
    SccDecomposition scc;  // decomposition of sys.g
    std::size_t u = 0;     // trailing vertex count
    std::size_t k = 0;     // degradation-free terminal component count
    std::size_t r = 0;     // leading component count (p + q - k)
    std::size_t p = 0, q = 0;
    SymMatrix n_block, b_block, t_block;
    std::vector<std::vector<std::size_t>> terminal_vertex_sets;  // the k sets
    std::vector<RationalExpr> s_prime, s_dprime;
};

inline BlockPartition partition(const SdSystem& sys, const SccDecomposition& d) {
    BlockPartition part;
    part.sys = sys;
    part.scc = d;
    part.p = d.p;
    part.q = d.q;

    auto comp_degradation_free = [&](std::size_t c) {
        for (std::size_t v : d.components[c])
            if (!sys.g.degradation(v).is_zero()) return false;
        return true;
    };
    // The degradation-free terminal components must occupy the tail of the
    // component order (canonical labeling precondition).
    bool in_tail = true;
    for (std::size_t c = d.components.size(); c-- > 0;) {
        bool free = d.terminal[c] && comp_degradation_free(c);
        if (free) {
            if (!in_tail)
                throw error("system is not canonically labeled: "
                            "degradation-free terminal components must come last");
            ++part.k;
            for (std::size_t v : d.components[c]) part.u += 1;
        } else {
            in_tail = false;
        }
    }
    part.r = d.components.size() - part.k;
    part.terminal_vertex_sets.reserve(part.k);
    for (std::size_t c = d.components.size() - part.k; c < d.components.size(); ++c)
        part.terminal_vertex_sets.push_back(d.components[c]);

    std::size_t n = sys.n(), lead = n - part.u;
    part.n_block = sys.f.block(0, 0, lead, lead);
    part.b_block = sys.f.block(lead, 0, part.u, lead);
    part.t_block = sys.f.block(lead, lead, part.u, part.u);
    if (!sys.f.block(0, lead, lead, part.u).is_zero())
        throw error("system is not canonically labeled: upper-right block not zero");
    part.s_prime.assign(sys.s.begin(), sys.s.begin() + lead);
    part.s_dprime.assign(sys.s.begin() + lead, sys.s.end());
    return part;
}

// Convenience pipeline: decompose, canonically relabel, rebuild, partition.
// Returns the partition over the relabeled graph plus the vertex permutation
// (original index -> canonical index).
inline std::pair<BlockPartition, std::vector<std::size_t>> canonical_partition(
    const LabeledDigraph& g) {
    SccDecomposition d0 = scc_decompose(g);
    auto [g2, perm] = canonical_relabel(g, d0);
    SccDecomposition d2 = scc_decompose(g2);
    return {partition(build_system(g2), d2), perm};
}

}  // namespace steadykernel
