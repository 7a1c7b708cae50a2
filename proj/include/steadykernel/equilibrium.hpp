#pragma once

// Steady states of x' = F x + s on a labeled digraph.  Three closed forms:
// a quotient of tree sums on the synthesis/degradation-augmented digraph when
// that digraph is strongly connected, a unique inverse-based solution when
// every terminal component degrades, and an initial-value-dependent family
// otherwise.  Existence is decided exactly and failures are localized to the
// synthesis edges that pump mass into degradation-free terminal components.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "graph.hpp"
#include "inverse.hpp"
#include "laplacian.hpp"
#include "spantree.hpp"
#include "symexpr.hpp"

namespace steadykernel {

enum class EquilibriumMode {
    StrongComplementary,      // augmented digraph strong: x_i = rho_i / rho_hub
    GeneralInitialDependent,  // zero eigenvalue present: x depends on x(0)
    GeneralUnique,            // F nonsingular: x = -F^{-1} s
    NoSteadyState,            // synthesis feeds a degradation-free sink
};

enum class InverseAlgo { TreeSum, Dense };

enum class ViolationKind {
    SynthesisInDegradationFreeTerminal,     // synthesis directly inside the sink
    SynthesisFeedsDegradationFreeTerminal,  // synthesis drains into the sink
};

struct ExistenceViolation {
    ViolationKind kind;
    std::size_t synthesis_vertex = 0;
    std::vector<std::size_t> terminal_component;  // affected component, sorted
};

struct ExistenceVerdict {
    bool ok = true;
    std::vector<ExistenceViolation> violations;
};

// Multiplicity of the zero eigenvalue of F and convergence of trajectories.
// q counts terminal components, k the degradation-free ones among them; zero
// is always semisimple with multiplicity k, so trajectories converge exactly
// when no synthesis reaches a degradation-free terminal component.
struct StabilityReport {
    std::size_t q = 0;
    std::size_t k = 0;
    std::size_t alg0 = 0;
    std::size_t geo0 = 0;
    bool converges = true;
};

inline StabilityReport stability_report(const BlockPartition& part, bool existence_ok) {
    return {part.q, part.k, part.k, part.k, existence_ok};
}

// The leading block N of a canonically labeled F, in factored form: the
// digraph induced on the leading vertices, perturbed by the degradations plus
// every edge that leaves towards the trailing block.
inline PerturbedMatrix leading_perturbed(const BlockPartition& part) {
    std::size_t lead = part.n_block.rows();
    std::vector<std::size_t> verts(lead);
    std::iota(verts.begin(), verts.end(), std::size_t{0});
    PerturbedMatrix pm;
    pm.base = induced_subgraph(part.sys.g, verts);
    pm.delta.resize(lead);
    for (std::size_t j = 0; j < lead; ++j) pm.delta[j] = part.sys.d[j];
    for (const auto& [key, lbl] : part.sys.g.edges())
        if (key.first < lead && key.second >= lead) pm.delta[key.first] += lbl;
    return pm;
}

inline SymMatrix invert_leading(const BlockPartition& part, InverseAlgo algo) {
    return algo == InverseAlgo::TreeSum ? invert_mtt(leading_perturbed(part))
                                        : invert_adjugate(part.n_block);
}

// Exact existence test under canonical labeling.  A steady state exists iff
// no synthesis sits inside a degradation-free terminal component and nothing
// the leading block absorbs drains into one.  One violation per offending
// synthesis vertex; the reported component is the first affected in the
// canonical order.  Indices refer to the canonically labeled system.
inline ExistenceVerdict check_existence(const BlockPartition& part,
                                        InverseAlgo algo = InverseAlgo::TreeSum) {
    ExistenceVerdict verdict;
    std::size_t n = part.sys.n(), lead = part.n_block.rows();

    auto component_of_trailing = [&](std::size_t v) {
        for (const auto& comp : part.terminal_vertex_sets)
            if (std::find(comp.begin(), comp.end(), v) != comp.end()) return comp;
        throw error("internal: trailing vertex outside every trailing component");
    };

    // drains(i, v) != 0 marks mass injected at leading vertex v ending up at
    // trailing vertex i; computed only when some leading synthesis exists.
    SymMatrix drains(0, 0);
    bool have_drains = false;
    for (std::size_t v = 0; v < n; ++v) {
        if (part.sys.s[v].is_zero()) continue;
        if (v >= lead) {
            verdict.violations.push_back({ViolationKind::SynthesisInDegradationFreeTerminal, v,
                                          component_of_trailing(v)});
            continue;
        }
        if (part.u == 0) continue;
        if (!have_drains) {
            drains = part.b_block * invert_leading(part, algo);
            have_drains = true;
        }
        for (std::size_t i = 0; i < part.u; ++i)
            if (!drains.at(i, v).is_zero()) {
                verdict.violations.push_back(
                    {ViolationKind::SynthesisFeedsDegradationFreeTerminal, v,
                     component_of_trailing(lead + i)});
                break;
            }
    }
    verdict.ok = verdict.violations.empty();
    return verdict;
}

// Projection pair for the initial-dependent case.  r holds one normalized
// tree-sum column per degradation-free terminal component; l holds the
// matching conserved linear forms, so that l*f = 0, f*r = 0, l*r = I, and
// r*l projects initial conditions onto the eventual steady state.
struct RlPair {
    SymMatrix r, l;
    SymMatrix u;  // component indicator rows (trailing part of l)
    SymMatrix x;  // leading part of l: -u * B * N^{-1}
};

inline RlPair build_RL(const BlockPartition& part, InverseAlgo algo = InverseAlgo::TreeSum) {
    std::size_t n = part.sys.n(), lead = part.n_block.rows(), k = part.k;
    RlPair rl{SymMatrix(n, k), SymMatrix(k, n), SymMatrix(k, part.u), SymMatrix(k, lead)};

    for (std::size_t t = 0; t < k; ++t) {
        const auto& comp = part.terminal_vertex_sets[t];
        LabeledDigraph sub = induced_subgraph(part.sys.g, comp);
        std::vector<RationalExpr> rho = rho_vector(sub);
        RationalExpr total;
        for (const auto& e : rho) total += e;
        for (std::size_t idx = 0; idx < comp.size(); ++idx)
            rl.r.at(comp[idx], t) = rho[idx] / total;
        for (std::size_t idx = 0; idx < comp.size(); ++idx)
            rl.u.at(t, comp[idx] - lead) = RationalExpr(1);
    }

    if (lead > 0) rl.x = (rl.u * part.b_block * invert_leading(part, algo)).scaled(RationalExpr(-1));
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t j = 0; j < lead; ++j) rl.l.at(t, j) = rl.x.at(t, j);
        for (std::size_t j = 0; j < part.u; ++j) rl.l.at(t, lead + j) = rl.u.at(t, j);
    }
    return rl;
}

// Steady state on a digraph whose synthesis/degradation-augmented extension
// is strongly connected: component i is the quotient of the tree sum rooted
// at i by the tree sum rooted at the hub.
inline std::vector<RationalExpr> steady_state_strong(const LabeledDigraph& g) {
    LabeledDigraph gs = complementary(g);
    if (!strongly_connected(gs)) throw error("augmented digraph is not strongly connected");
    std::vector<RationalExpr> rho = rho_vector(gs);
    std::vector<RationalExpr> x(g.n());
    for (std::size_t v = 0; v < g.n(); ++v) x[v] = rho[v] / rho[g.n()];
    return x;
}

// Symbolic initial state: one fresh symbol per vertex, named after it.
inline std::vector<RationalExpr> symbolic_x0(const LabeledDigraph& g) {
    std::vector<RationalExpr> x0;
    x0.reserve(g.n());
    for (std::size_t v = 0; v < g.n(); ++v)
        x0.push_back(RationalExpr(Polynomial::variable("x0_" + g.name(v))));
    return x0;
}

// Steady state of a canonically labeled system that passes the existence
// test (precondition).  With no degradation-free terminal components the
// answer is unique; otherwise it is the projection of x0 plus the absorbed
// synthesis, expressed over the given initial state.
inline std::vector<RationalExpr> steady_state_general(const BlockPartition& part,
                                                      const std::vector<RationalExpr>& x0,
                                                      InverseAlgo algo = InverseAlgo::TreeSum) {
    std::size_t n = part.sys.n(), lead = part.n_block.rows();
    if (x0.size() != n) throw error("initial state size mismatch");
    SymMatrix n_inv = invert_leading(part, algo);

    // -Q s: the unique leading-block response, zero-extended
    std::vector<RationalExpr> qs(n);
    for (std::size_t i = 0; i < lead; ++i) {
        for (std::size_t j = 0; j < lead; ++j) {
            if (n_inv.at(i, j).is_zero() || part.s_prime[j].is_zero()) continue;
            qs[i] += n_inv.at(i, j) * part.s_prime[j];
        }
    }
    if (part.k == 0) {
        for (auto& e : qs) e = -e;
        return qs;
    }

    RlPair rl = build_RL(part, algo);
    std::vector<RationalExpr> mixed(n);
    for (std::size_t v = 0; v < n; ++v) mixed[v] = x0[v] + qs[v];
    std::vector<RationalExpr> weights = rl.l * mixed;  // k conserved quantities
    std::vector<RationalExpr> x = rl.r * weights;
    for (std::size_t v = 0; v < n; ++v) x[v] -= qs[v];
    return x;
}

// Dense oracle for the unique case: Cramer solve of F x = -s.
inline std::vector<RationalExpr> solve_dense_oracle(const SdSystem& sys) {
    std::vector<RationalExpr> rhs;
    rhs.reserve(sys.n());
    for (const auto& e : sys.s) rhs.push_back(-e);
    return solve_exact(sys.f, rhs);
}

struct EquilibriumReport {
    EquilibriumMode mode = EquilibriumMode::NoSteadyState;
    std::vector<ExistenceViolation> violations;  // original vertex indices
    std::vector<RationalExpr> x;                 // original order; empty iff no steady state
    StabilityReport stability;
};

// Full pipeline on a digraph as parsed: decide the mode, localize existence
// failures, and report the steady state in the original vertex order.  An
// explicit x0 (original order) replaces the symbolic initial state; the
// unique modes ignore it.
inline EquilibriumReport analyze_equilibrium(
    const LabeledDigraph& g, InverseAlgo algo = InverseAlgo::TreeSum,
    const std::optional<std::vector<RationalExpr>>& x0 = std::nullopt) {
    auto [part, perm] = canonical_partition(g);
    EquilibriumReport report;

    if (strongly_connected(complementary(g))) {
        report.mode = EquilibriumMode::StrongComplementary;
        report.x = steady_state_strong(g);
        report.stability = stability_report(part, true);
        return report;
    }

    ExistenceVerdict verdict = check_existence(part, algo);
    report.stability = stability_report(part, verdict.ok);
    if (!verdict.ok) {
        report.mode = EquilibriumMode::NoSteadyState;
        // map canonical indices back to the original labeling
        std::vector<std::size_t> original(g.n());
        for (std::size_t v = 0; v < g.n(); ++v) original[perm[v]] = v;
        for (auto viol : verdict.violations) {
            viol.synthesis_vertex = original[viol.synthesis_vertex];
            for (auto& v : viol.terminal_component) v = original[v];
            std::sort(viol.terminal_component.begin(), viol.terminal_component.end());
            report.violations.push_back(std::move(viol));
        }
        return report;
    }

    std::vector<RationalExpr> x0c(g.n());
    if (x0) {
        if (x0->size() != g.n()) throw error("initial state size mismatch");
        for (std::size_t v = 0; v < g.n(); ++v) x0c[perm[v]] = (*x0)[v];
    } else {
        x0c = symbolic_x0(part.sys.g);
    }
    std::vector<RationalExpr> xc = steady_state_general(part, x0c, algo);
    report.x.resize(g.n());
    for (std::size_t v = 0; v < g.n(); ++v) report.x[v] = xc[perm[v]];
    report.mode = part.k > 0 ? EquilibriumMode::GeneralInitialDependent
                             : EquilibriumMode::GeneralUnique;
    return report;
}

}  // namespace steadykernel
