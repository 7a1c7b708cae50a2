#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <steadykernel/graph.hpp>
#include <steadykernel/laplacian.hpp>
#include <steadykernel/spantree.hpp>

#include "testutil.hpp"
#include "testutil_net.hpp"

using namespace steadykernel;
using namespace testutil;

namespace {

// Cycle through all vertices (shuffled) plus a few chords: strongly connected
// by construction, with distinct symbolic labels.
LabeledDigraph make_strong_random(std::mt19937_64& rng, std::size_t max_vertices = 5) {
    std::uniform_int_distribution<std::size_t> nv(1, max_vertices);
    std::size_t n = nv(rng);
    LabeledDigraph g;
    for (std::size_t v = 0; v < n; ++v) g.add_vertex("v" + std::to_string(v + 1));
    std::vector<std::size_t> order(n);
    for (std::size_t v = 0; v < n; ++v) order[v] = v;
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t next_label = 1;
    auto fresh = [&] {
        return RationalExpr(Polynomial::variable("e" + std::to_string(next_label++)));
    };
    if (n > 1)
        for (std::size_t idx = 0; idx < n; ++idx)
            g.add_edge(order[idx], order[(idx + 1) % n], fresh());
    std::uniform_int_distribution<std::size_t> extra(0, 3);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t e = extra(rng); e > 0; --e) {
        std::size_t from = pick(rng), to = pick(rng);
        if (from == to || g.has_edge(from, to)) continue;
        g.add_edge(from, to, fresh());
    }
    return g;
}

bool tree_is_valid(const LabeledDigraph& g, const SpanningTree& t, std::size_t root) {
    if (t.root != root) return false;
    std::vector<std::size_t> parent(g.n(), static_cast<std::size_t>(-1));
    std::set<std::size_t> sources;
    for (const auto& [from, to] : t.edges) {
        if (from == root || !g.has_edge(from, to)) return false;
        if (!sources.insert(from).second) return false;
        parent[from] = to;
    }
    if (sources.size() != g.n() - 1) return false;
    if (!std::is_sorted(t.edges.begin(), t.edges.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; }))
        return false;
    for (std::size_t v = 0; v < g.n(); ++v) {
        std::size_t cur = v, steps = 0;
        while (cur != root) {
            cur = parent[cur];
            if (cur == static_cast<std::size_t>(-1) || ++steps > g.n()) return false;
        }
    }
    return true;
}

std::map<std::string, Rational> all_ones(const LabeledDigraph& g) {
    std::map<std::string, Rational> b;
    for (const auto& s : g.symbols()) b[s] = 1;
    return b;
}

}  // namespace

TEST_CASE("three-species cycle: spanning trees per root") {
    LabeledDigraph g = load_fixture("fig1.net");

    auto t1 = enumerate_rooted(g, 0);
    REQUIRE(t1.size() == 1);
    CHECK(t1[0].edges == std::vector<std::pair<std::size_t, std::size_t>>{{1, 2}, {2, 0}});
    CHECK(tree_product(g, t1[0]).equals(parse_expr("b*c")));

    auto t2 = enumerate_rooted(g, 1);
    REQUIRE(t2.size() == 2);
    // lexicographic emission: vertex 3's choice 3->1 precedes 3->2
    CHECK(t2[0].edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {2, 0}});
    CHECK(t2[1].edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {2, 1}});
    CHECK(tree_product(g, t2[0]).equals(parse_expr("a*c")));
    CHECK(tree_product(g, t2[1]).equals(parse_expr("a*d")));

    auto t3 = enumerate_rooted(g, 2);
    REQUIRE(t3.size() == 1);
    CHECK(tree_product(g, t3[0]).equals(parse_expr("a*b")));
}

TEST_CASE("three-species cycle: tree sums and minors") {
    LabeledDigraph g = load_fixture("fig1.net");
    SymMatrix lap = laplacian(g);

    auto rho = rho_vector(g);
    CHECK(rho[0].equals(parse_expr("b*c")));
    CHECK(rho[1].equals(parse_expr("a*d + a*c")));
    CHECK(rho[2].equals(parse_expr("a*b")));

    CHECK(minor_mtt(g, 1, 2).equals(parse_expr("0 - a*b")));
    CHECK(minor_mtt(g, 2, 1).equals(parse_expr("0 - (a*d + a*c)")));
    CHECK(minor_cofactor(lap, 1, 2).equals(parse_expr("0 - a*b")));

    // n = 3 is odd, so principal minors equal the tree sums directly
    for (std::size_t j = 0; j < 3; ++j) CHECK(minor_mtt(g, j, j).equals(rho[j]));
}

TEST_CASE("single vertex has exactly one empty tree") {
    LabeledDigraph g = parse_network("* -> only : s\n");
    auto trees = enumerate_rooted(g, 0);
    REQUIRE(trees.size() == 1);
    CHECK(trees[0].edges.empty());
    CHECK(tree_product(g, trees[0]).equals(RationalExpr(1)));
    CHECK(rho_vector(g)[0].equals(RationalExpr(1)));
}

TEST_CASE("unreachable root yields no trees and a zero sum") {
    LabeledDigraph g = parse_network("1 -> 2 : a\n");
    CHECK(enumerate_rooted(g, 0).empty());
    CHECK(tree_sum(g, 0).num().is_zero());
    REQUIRE(enumerate_rooted(g, 1).size() == 1);
    CHECK(tree_sum(g, 1).equals(parse_expr("a")));
}

TEST_CASE("enumerated trees are valid, distinct, and counted by the determinant") {
    auto rng = make_rng(41);
    for (int iter = 0; iter < 120; ++iter) {
        LabeledDigraph g = random_digraph(rng, 5, 10);
        SymMatrix lap = laplacian(g);
        auto ones = all_ones(g);
        std::uniform_int_distribution<std::size_t> pick(0, g.n() - 1);
        std::size_t root = pick(rng);

        auto trees = enumerate_rooted(g, root);
        std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
        for (const auto& t : trees) {
            CHECK(tree_is_valid(g, t, root));
            CHECK(seen.insert(t.edges).second);
        }
        // at unit labels the minor counts the trees
        Rational count = minor_cofactor(lap, root, root).eval(ones);
        CHECK(Rational(trees.size()) == abs(count));
    }
}

TEST_CASE("tree-sum minors agree with determinant minors everywhere") {
    auto rng = make_rng(42);
    for (int iter = 0; iter < 40; ++iter) {
        LabeledDigraph g = random_digraph(rng, 4, 8);
        SymMatrix lap = laplacian(g);
        for (std::size_t i = 0; i < g.n(); ++i)
            for (std::size_t j = 0; j < g.n(); ++j)
                CHECK(minor_mtt(g, i, j).equals(minor_cofactor(lap, i, j)));
    }
}

TEST_CASE("tree-sum vector spans the Laplacian kernel on strong graphs") {
    auto rng = make_rng(43);
    for (int iter = 0; iter < 60; ++iter) {
        LabeledDigraph g = make_strong_random(rng);
        REQUIRE(strongly_connected(g));
        auto rho = rho_vector(g);
        SymMatrix lap = laplacian(g);
        for (std::size_t i = 0; i < g.n(); ++i) {
            RationalExpr acc;
            for (std::size_t j = 0; j < g.n(); ++j) acc += lap.at(i, j) * rho[j];
            CHECK(acc.num().is_zero());
        }
        // every entry strictly positive at positive bindings
        auto bind = random_positive_bindings(rng, g.symbols());
        for (std::size_t v = 0; v < g.n(); ++v) CHECK(rho[v].eval(bind) > 0);
    }
}

TEST_CASE("kernel basis: one column per terminal component") {
    SECTION("strongly connected graph keeps its whole tree-sum vector") {
        LabeledDigraph g = load_fixture("fig1.net");
        auto d = scc_decompose(g);
        REQUIRE(d.q == 1);
        SymMatrix basis = kernel_basis(g, d);
        REQUIRE(basis.rows() == 3);
        REQUIRE(basis.cols() == 1);
        auto rho = rho_vector(g);
        for (std::size_t v = 0; v < 3; ++v) CHECK(basis.at(v, 0).equals(rho[v]));
    }

    SECTION("single-vertex terminal components give unit columns") {
        LabeledDigraph g = load_fixture("illus33.net");
        auto d = scc_decompose(g);
        REQUIRE(d.q == 3);
        SymMatrix basis = kernel_basis(g, d);
        REQUIRE(basis.rows() == 5);
        REQUIRE(basis.cols() == 3);
        for (std::size_t t = 0; t < 3; ++t) {
            std::size_t hot = d.components[d.p + t][0];
            for (std::size_t v = 0; v < 5; ++v) {
                if (v == hot)
                    CHECK(basis.at(v, t).equals(RationalExpr(1)));
                else
                    CHECK(basis.at(v, t).num().is_zero());
            }
        }
    }

    SECTION("random graphs: columns annihilated by the Laplacian") {
        auto rng = make_rng(44);
        for (int iter = 0; iter < 60; ++iter) {
            LabeledDigraph g = random_digraph(rng, 5, 9);
            auto d = scc_decompose(g);
            SymMatrix lap = laplacian(g);
            SymMatrix basis = kernel_basis(g, d);
            REQUIRE(basis.cols() == d.q);
            SymMatrix prod = lap * basis;
            CHECK(prod.is_zero());
            // support of each column is exactly its terminal component
            auto bind = random_positive_bindings(rng, g.symbols());
            for (std::size_t t = 0; t < d.q; ++t) {
                std::set<std::size_t> comp(d.components[d.p + t].begin(),
                                           d.components[d.p + t].end());
                for (std::size_t v = 0; v < g.n(); ++v) {
                    if (comp.count(v))
                        CHECK(basis.at(v, t).eval(bind) > 0);
                    else
                        CHECK(basis.at(v, t).num().is_zero());
                }
            }
        }
    }
}

TEST_CASE("spanning-tree bounds checking") {
    LabeledDigraph g = load_fixture("fig1.net");
    CHECK_THROWS_WITH(enumerate_rooted(g, 3), "root vertex out of range");
    CHECK_THROWS_WITH(minor_mtt(g, 0, 3), "minor index out of range");
    SymMatrix lap = laplacian(g);
    CHECK_THROWS_WITH(minor_cofactor(lap, 3, 0), "minor index out of range");
    CHECK_THROWS_WITH(minor_cofactor(SymMatrix(2, 3), 0, 0), "minor of non-square matrix");
}
