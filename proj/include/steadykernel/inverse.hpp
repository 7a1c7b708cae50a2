#pragma once

// Exact inversion of diagonally perturbed Laplacians.  A matrix of the form
// L(G) - diag(delta) with delta >= 0 is inverted either through spanning-tree
// sums on an augmented digraph (one extra hub vertex carrying the
// perturbations plus one probe edge per column) or through the classical
// adjugate; both give identical canonical expressions.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "laplacian.hpp"
#include "spantree.hpp"
#include "symexpr.hpp"

namespace steadykernel {

// A square matrix kept in factored form: the Laplacian of `base` minus the
// diagonal matrix of `delta`.  Entries of delta may be structurally zero.
struct PerturbedMatrix {
    LabeledDigraph base;
    std::vector<RationalExpr> delta;

    SymMatrix matrix() const {
        if (delta.size() != base.n()) throw error("perturbation size mismatch");
        SymMatrix m = laplacian(base);
        for (std::size_t j = 0; j < base.n(); ++j) m.at(j, j) -= delta[j];
        return m;
    }
};

// Reads the factored form back off a square matrix: off-diagonal (i, j) is
// the label of the edge j -> i, and the negated column sum is delta_j.
inline PerturbedMatrix perturbed_from_matrix(const SymMatrix& m,
                                             const std::vector<std::string>& names) {
    if (m.rows() != m.cols()) throw error("perturbed matrix must be square");
    if (names.size() != m.rows()) throw error("vertex name count mismatch");
    PerturbedMatrix pm;
    for (const auto& nm : names) pm.base.add_vertex(nm);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        RationalExpr col_sum;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            col_sum += m.at(i, j);
            if (i != j && !m.at(i, j).num().is_zero()) pm.base.add_edge(j, i, m.at(i, j));
        }
        pm.delta.push_back(-col_sum);
    }
    return pm;
}

// The augmented digraph used by the tree-sum inversion: base plus a hub
// vertex appended last, edges j -> hub labeled delta_j, and one synthetic
// probe edge hub -> i per column with a fresh probe symbol.
struct ProbeGraph {
    LabeledDigraph graph;
    std::vector<std::string> probes;
    std::size_t hub = 0;
};

inline ProbeGraph make_probe_graph(const PerturbedMatrix& pm) {
    if (pm.delta.size() != pm.base.n()) throw error("perturbation size mismatch");
    std::size_t n = pm.base.n();

    std::set<std::string> taken = pm.base.symbols();
    for (const auto& d : pm.delta)
        for (const auto& s : d.symbols()) taken.insert(s);
    std::string prefix = "_s";
    auto collides = [&] {
        for (std::size_t i = 0; i < n; ++i)
            if (taken.count(prefix + std::to_string(i + 1))) return true;
        return false;
    };
    while (collides()) prefix = "_" + prefix;

    ProbeGraph pg;
    for (std::size_t v = 0; v < n; ++v) pg.graph.add_vertex(pm.base.name(v));
    std::string hub_name = "*";
    while (pg.graph.has_vertex(hub_name)) hub_name = "_" + hub_name;
    pg.hub = pg.graph.add_vertex(hub_name);
    for (const auto& [key, label] : pm.base.edges()) pg.graph.add_edge(key.first, key.second, label);
    for (std::size_t j = 0; j < n; ++j)
        if (!pm.delta[j].num().is_zero()) pg.graph.add_edge(j, pg.hub, pm.delta[j]);
    for (std::size_t i = 0; i < n; ++i) {
        pg.probes.push_back(prefix + std::to_string(i + 1));
        pg.graph.add_edge(pg.hub, i, RationalExpr(Polynomial::variable(pg.probes.back())));
    }
    return pg;
}

// Tree-sum inversion.  One symbolic tree-sum vector over the augmented graph
// gives every column: each sum is affine in each probe symbol, and column i
// is recovered by comparing the probe-at-one evaluation with probe i at two,
// all divided by the hub-rooted tree sum (which carries no probe symbols and
// equals the determinant up to sign).  Throws when the matrix is singular,
// i.e. when the augmented graph is not strongly connected.
inline SymMatrix invert_mtt(const PerturbedMatrix& pm) {
    std::size_t n = pm.base.n();
    if (n == 0) return SymMatrix(0, 0);
    ProbeGraph pg = make_probe_graph(pm);
    if (!strongly_connected(pg.graph)) throw error("matrix is singular");

    std::vector<RationalExpr> rho = rho_vector(pg.graph);
    const RationalExpr& rho_hub = rho[pg.hub];
    for (const auto& s : pg.probes)
        if (rho_hub.symbols().count(s))
            throw error("internal: hub tree sum depends on a probe symbol");
    if (rho_hub.num().is_zero()) throw error("matrix is singular");

    std::map<std::string, Rational> at_one;
    for (const auto& s : pg.probes) at_one[s] = 1;
    std::vector<RationalExpr> base_point(n);
    for (std::size_t i = 0; i < n; ++i) base_point[i] = rho[i].subst(at_one);

    SymMatrix inv(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::map<std::string, Rational> bumped = at_one;
        bumped[pg.probes[col]] = 2;
        for (std::size_t i = 0; i < n; ++i)
            inv.at(i, col) = (base_point[i] - rho[i].subst(bumped)) / rho_hub;
    }
    return inv;
}

// Classical adjugate-over-determinant inversion by fraction-free elimination;
// the independent oracle for invert_mtt.
inline SymMatrix invert_adjugate(const SymMatrix& m) {
    if (m.rows() != m.cols()) throw error("cannot invert a non-square matrix");
    std::size_t n = m.rows();
    if (n == 0) return SymMatrix(0, 0);
    RationalExpr det = det_bareiss(m);
    if (det.num().is_zero()) throw error("matrix is singular");
    SymMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            RationalExpr cof = minor_cofactor(m, j, i);
            inv.at(i, j) = (((i + j) % 2 == 0) ? cof : -cof) / det;
        }
    return inv;
}

}  // namespace steadykernel
