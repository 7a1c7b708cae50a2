#pragma once

// Directed spanning trees (arborescences oriented towards a root), their
// label products, Matrix-Tree minors, and the kernel basis of the Laplacian
// built from terminal-component tree sums.

#include <utility>
#include <vector>

#include "graph.hpp"
#include "laplacian.hpp"
#include "symexpr.hpp"

namespace steadykernel {

// Edges (from, to) sorted by source vertex; every non-root vertex has exactly
// one outgoing edge and all paths lead to the root.
struct SpanningTree {
    std::size_t root = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    bool operator==(const SpanningTree& o) const {
        return root == o.root && edges == o.edges;
    }
};

namespace detail {

class TreeEnumerator {
  public:
    TreeEnumerator(const LabeledDigraph& g, std::size_t root) : g_(g), root_(root) {}

    std::vector<SpanningTree> run() {
        std::size_t n = g_.n();
        if (root_ >= n) throw error("root vertex out of range");
        // Every vertex must be able to reach the root at all.
        std::vector<bool> target(n, false);
        target[root_] = true;
        std::vector<bool> ok = can_reach(g_, target);
        for (std::size_t v = 0; v < n; ++v)
            if (!ok[v]) return {};

        order_.clear();
        for (std::size_t v = 0; v < n; ++v)
            if (v != root_) order_.push_back(v);
        parent_.assign(n, kNone);
        extend(0);
        return std::move(out_);
    }

  private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    // Assign an outgoing edge to order_[idx], keeping the partial parent map
    // acyclic; choices iterate in ascending target order so trees are emitted
    // in lexicographic order of their edge choices.
    void extend(std::size_t idx) {
        if (idx == order_.size()) {
            SpanningTree t;
            t.root = root_;
            for (std::size_t v : order_) t.edges.emplace_back(v, parent_[v]);
            out_.push_back(std::move(t));
            return;
        }
        std::size_t v = order_[idx];
        for (std::size_t w : g_.out_neighbours(v)) {
            if (makes_cycle(v, w)) continue;
            parent_[v] = w;
            extend(idx + 1);
            parent_[v] = kNone;
        }
    }

    bool makes_cycle(std::size_t v, std::size_t w) const {
        while (w != kNone) {
            if (w == v) return true;
            w = parent_[w];
        }
        return false;
    }

    const LabeledDigraph& g_;
    std::size_t root_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> parent_;
    std::vector<SpanningTree> out_;
};

}  // namespace detail

// All directed spanning trees of g oriented towards `root`.  A single-vertex
// graph has exactly one (edgeless) tree.
inline std::vector<SpanningTree> enumerate_rooted(const LabeledDigraph& g, std::size_t root) {
    return detail::TreeEnumerator(g, root).run();
}

// Product of the labels of the tree's edges (empty product = 1).
inline RationalExpr tree_product(const LabeledDigraph& g, const SpanningTree& t) {
    RationalExpr p(1);
    for (const auto& [from, to] : t.edges) p *= g.label(from, to);
    return p;
}

// Sum of tree products over all trees rooted at `root` (zero when none).
inline RationalExpr tree_sum(const LabeledDigraph& g, std::size_t root) {
    RationalExpr acc;
    for (const auto& t : enumerate_rooted(g, root)) acc += tree_product(g, t);
    return acc;
}

// Vector of tree sums, one entry per vertex.  For a strongly connected graph
// this spans the kernel of the Laplacian and every entry is nonzero.
inline std::vector<RationalExpr> rho_vector(const LabeledDigraph& g) {
    std::vector<RationalExpr> rho(g.n());
    for (std::size_t v = 0; v < g.n(); ++v) rho[v] = tree_sum(g, v);
    return rho;
}

// Laplacian minor (delete row i, column j; 0-based) via the Matrix-Tree
// identity: up to sign, the minor is the tree sum rooted at j.
inline RationalExpr minor_mtt(const LabeledDigraph& g, std::size_t i, std::size_t j) {
    std::size_t n = g.n();
    if (i >= n || j >= n) throw error("minor index out of range");
    RationalExpr sum = tree_sum(g, j);
    // (-1)^(n+i+j-1) with 1-based indices == -(+1) when n+i+j is even 0-based.
    return ((n + i + j) % 2 == 0) ? -sum : sum;
}

// Same minor by direct fraction-free elimination on any square matrix; the
// independent oracle for minor_mtt.
inline RationalExpr minor_cofactor(const SymMatrix& m, std::size_t i, std::size_t j) {
    if (m.rows() != m.cols()) throw error("minor of non-square matrix");
    if (i >= m.rows() || j >= m.cols()) throw error("minor index out of range");
    return det_bareiss(m.submatrix_without(i, j));
}

// Kernel basis of the Laplacian of g: one column per terminal component,
// holding that component's internal tree-sum vector extended by zeros.
inline SymMatrix kernel_basis(const LabeledDigraph& g, const SccDecomposition& d) {
    SymMatrix basis(g.n(), d.q);
    for (std::size_t t = 0; t < d.q; ++t) {
        const auto& comp = d.components[d.p + t];
        LabeledDigraph sub = induced_subgraph(g, comp);
        std::vector<RationalExpr> rho = rho_vector(sub);
        for (std::size_t idx = 0; idx < comp.size(); ++idx)
            basis.at(comp[idx], t) = rho[idx];
    }
    return basis;
}

}  // namespace steadykernel
