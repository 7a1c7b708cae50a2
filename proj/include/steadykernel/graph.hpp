#pragma once

// Labeled digraphs with per-vertex synthesis and degradation, the line-based
// network file format, strongly-connected-component analysis with a canonical
// component order, and the complementary digraph (the network extended by a
// star vertex that sources synthesis and sinks degradation).

#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "symexpr.hpp"

namespace steadykernel {

class LabeledDigraph {
  public:
    std::size_t n() const { return names_.size(); }
    const std::vector<std::string>& vertex_names() const { return names_; }
    const std::string& name(std::size_t v) const { return names_.at(v); }

    std::size_t index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw error("unknown vertex: " + name);
        return it->second;
    }
    bool has_vertex(const std::string& name) const { return index_.count(name) != 0; }

    std::size_t add_vertex(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        index_[name] = names_.size();
        names_.push_back(name);
        synthesis_.emplace_back();
        degradation_.emplace_back();
        out_.emplace_back();
        return names_.size() - 1;
    }

    // Parallel edges merge by summation; self-loops and structurally zero
    // labels are rejected.
    void add_edge(std::size_t from, std::size_t to, const RationalExpr& label) {
        if (from == to) throw error("self-loop on vertex " + names_.at(from));
        check_label(label);
        auto key = std::make_pair(from, to);
        auto it = edges_.find(key);
        if (it == edges_.end()) {
            edges_.emplace(key, label);
            out_[from].push_back(to);
            std::sort(out_[from].begin(), out_[from].end());
        } else {
            it->second += label;
            if (it->second.is_zero()) throw error("edge label sums to zero");
        }
    }

    void add_synthesis(std::size_t v, const RationalExpr& label) {
        check_label(label);
        synthesis_.at(v) += label;
    }
    void add_degradation(std::size_t v, const RationalExpr& label) {
        check_label(label);
        degradation_.at(v) += label;
    }

    bool has_edge(std::size_t from, std::size_t to) const {
        return edges_.count({from, to}) != 0;
    }
    const RationalExpr& label(std::size_t from, std::size_t to) const {
        auto it = edges_.find({from, to});
        if (it == edges_.end()) throw error("no such edge");
        return it->second;
    }
    const std::map<std::pair<std::size_t, std::size_t>, RationalExpr>& edges() const {
        return edges_;
    }
    // Out-neighbours in ascending vertex order (core edges only).
    const std::vector<std::size_t>& out_neighbours(std::size_t v) const { return out_.at(v); }

    const RationalExpr& synthesis(std::size_t v) const { return synthesis_.at(v); }
    const RationalExpr& degradation(std::size_t v) const { return degradation_.at(v); }
    const std::vector<RationalExpr>& synthesis() const { return synthesis_; }
    const std::vector<RationalExpr>& degradation() const { return degradation_; }

    bool has_any_synthesis() const {
        for (const auto& s : synthesis_)
            if (!s.is_zero()) return true;
        return false;
    }
    bool has_any_degradation() const {
        for (const auto& d : degradation_)
            if (!d.is_zero()) return true;
        return false;
    }

    std::set<std::string> symbols() const {
        std::set<std::string> out;
        for (const auto& [k, lbl] : edges_) lbl.collect_symbols(out);
        for (const auto& s : synthesis_) s.collect_symbols(out);
        for (const auto& d : degradation_) d.collect_symbols(out);
        return out;
    }

    // The core digraph (synthesis/degradation not counted) must be weakly
    // connected for the dynamics to be well posed as a single system.
    bool weakly_connected() const {
        if (names_.empty()) return false;
        std::vector<std::vector<std::size_t>> adj(n());
        for (const auto& [k, lbl] : edges_) {
            adj[k.first].push_back(k.second);
            adj[k.second].push_back(k.first);
        }
        std::vector<bool> seen(n(), false);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = true;
        std::size_t count = 1;
        while (!q.empty()) {
            std::size_t v = q.front();
            q.pop();
            for (std::size_t w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    ++count;
                    q.push(w);
                }
        }
        return count == n();
    }

  private:
    static void check_label(const RationalExpr& label) {
        if (label.is_zero()) throw error("label is structurally zero");
    }

    std::vector<std::string> names_;
    std::map<std::string, std::size_t> index_;
    std::map<std::pair<std::size_t, std::size_t>, RationalExpr> edges_;
    std::vector<RationalExpr> synthesis_, degradation_;
    std::vector<std::vector<std::size_t>> out_;
};

// ---------------------------------------------------------------------------
// Network file format.  Line oriented, UTF-8; '#' lines are comments.
//
//   FROM -> TO : EXPR      core edge
//   * -> V : EXPR          synthesis into V
//   V -> * : EXPR          degradation out of V
//
// Vertex tokens are [A-Za-z0-9_]+ (or the reserved '*'); vertices are indexed
// in first-appearance order.  Duplicate lines for the same edge merge by
// summation.

namespace detail {

struct NetLine {
    std::string from, to, expr;
    int line, expr_col;
};

inline bool is_vertex_token(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace detail

inline LabeledDigraph parse_network(const std::string& text) {
    LabeledDigraph g;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    bool saw_statement = false;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::size_t first = raw.find_first_not_of(" \t");
        if (first == std::string::npos || raw[first] == '#') continue;

        std::size_t arrow = raw.find("->");
        if (arrow == std::string::npos)
            throw parse_error("expected 'FROM -> TO : EXPR'", lineno,
                              static_cast<int>(first) + 1);
        std::size_t colon = raw.find(':', arrow + 2);
        if (colon == std::string::npos)
            throw parse_error("missing ':' before label expression", lineno,
                              static_cast<int>(raw.size()) + 1);

        auto trim = [&](std::size_t b, std::size_t e) {
            while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
            while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
            return std::make_pair(raw.substr(b, e - b), b);
        };
        auto [from, from_col] = trim(first, arrow);
        auto [to, to_col] = trim(arrow + 2, colon);
        std::string expr = raw.substr(colon + 1);

        auto check_token = [&](const std::string& t, std::size_t col) {
            if (t != "*" && !detail::is_vertex_token(t))
                throw parse_error("bad vertex token '" + t + "'", lineno,
                                  static_cast<int>(col) + 1);
        };
        check_token(from, from_col);
        check_token(to, to_col);
        if (from == "*" && to == "*")
            throw parse_error("'*' cannot appear on both sides", lineno,
                              static_cast<int>(from_col) + 1);

        RationalExpr label = parse_expr(expr, lineno, static_cast<int>(colon) + 1);
        if (label.is_zero())
            throw parse_error("label is structurally zero", lineno,
                              static_cast<int>(colon) + 2);
        // A label that is plainly negative (every numerator term negative) is a
        // reversed edge written backwards; the orientation carries the sign.
        bool all_neg = true;
        for (const auto& [m, c] : label.num().terms())
            if (c > 0) all_neg = false;
        if (all_neg)
            throw parse_error("negative label; reverse the edge direction instead", lineno,
                              static_cast<int>(colon) + 2);

        try {
            if (from == "*") {
                g.add_synthesis(g.add_vertex(to), label);
            } else if (to == "*") {
                g.add_degradation(g.add_vertex(from), label);
            } else {
                std::size_t fi = g.add_vertex(from);  // register FROM before TO
                std::size_t ti = g.add_vertex(to);
                g.add_edge(fi, ti, label);
            }
        } catch (const error& e) {
            throw parse_error(e.what(), lineno, static_cast<int>(first) + 1);
        }
        saw_statement = true;
    }
    if (!saw_statement) throw parse_error("network file has no statements", lineno + 1, 1);
    if (!g.weakly_connected())
        throw parse_error("core digraph is not weakly connected", lineno + 1, 1);
    return g;
}

// ---------------------------------------------------------------------------
// Strongly connected components over core edges.  Components are ordered so
// that every edge goes from an earlier component to a later one (ties broken
// by smallest original vertex index) and every terminal component (no
// outgoing core edges) comes after every non-terminal one.

struct SccDecomposition {
    std::vector<std::vector<std::size_t>> components;  // vertices ascending
    std::vector<std::size_t> component_of;             // vertex -> component
    std::vector<bool> terminal;                        // per component
    std::size_t p = 0;                                 // non-terminal count
    std::size_t q = 0;                                 // terminal count
    // Vertex permutation (old -> new) assigning each component a contiguous
    // index range in component order, vertices ascending within a component.
    std::vector<std::size_t> relabel;
};

namespace detail {

class TarjanScc {
  public:
    explicit TarjanScc(const LabeledDigraph& g) : g_(g), state_(g.n()) {}

    std::vector<std::vector<std::size_t>> run() {
        for (std::size_t v = 0; v < g_.n(); ++v)
            if (state_[v].index == kUnvisited) visit(v);
        return std::move(components_);
    }

  private:
    static constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    struct VertexState {
        std::size_t index = kUnvisited;
        std::size_t lowlink = 0;
        bool on_stack = false;
    };

    void visit(std::size_t v) {
        state_[v].index = state_[v].lowlink = counter_++;
        stack_.push_back(v);
        state_[v].on_stack = true;
        for (std::size_t w : g_.out_neighbours(v)) {
            if (state_[w].index == kUnvisited) {
                visit(w);
                state_[v].lowlink = std::min(state_[v].lowlink, state_[w].lowlink);
            } else if (state_[w].on_stack) {
                state_[v].lowlink = std::min(state_[v].lowlink, state_[w].index);
            }
        }
        if (state_[v].lowlink == state_[v].index) {
            std::vector<std::size_t> comp;
            for (;;) {
                std::size_t w = stack_.back();
                stack_.pop_back();
                state_[w].on_stack = false;
                comp.push_back(w);
                if (w == v) break;
            }
            std::sort(comp.begin(), comp.end());
            components_.push_back(std::move(comp));
        }
    }

    const LabeledDigraph& g_;
    std::vector<VertexState> state_;
    std::vector<std::size_t> stack_;
    std::size_t counter_ = 0;
    std::vector<std::vector<std::size_t>> components_;
};

}  // namespace detail

inline SccDecomposition scc_decompose(const LabeledDigraph& g) {
    SccDecomposition d;
    auto raw = detail::TarjanScc(g).run();
    std::size_t nc = raw.size();

    std::vector<std::size_t> comp_of(g.n());
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t v : raw[c]) comp_of[v] = c;

    // Condensation adjacency and terminal flags.
    std::vector<std::set<std::size_t>> succ(nc);
    for (const auto& [k, lbl] : g.edges()) {
        std::size_t a = comp_of[k.first], b = comp_of[k.second];
        if (a != b) succ[a].insert(b);
    }
    std::vector<bool> is_terminal(nc);
    for (std::size_t c = 0; c < nc; ++c) is_terminal[c] = succ[c].empty();

    // Topological order over non-terminal components (Kahn), smallest original
    // vertex first among ready components; terminal components follow, in
    // smallest-vertex order.  Terminals have no successors, so appending them
    // keeps the order topological.
    std::vector<std::size_t> indeg(nc, 0);
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t s : succ[c])
            if (!is_terminal[s]) ++indeg[s];
    auto min_vertex = [&](std::size_t c) { return raw[c].front(); };
    auto cmp = [&](std::size_t a, std::size_t b) { return min_vertex(a) > min_vertex(b); };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
    for (std::size_t c = 0; c < nc; ++c)
        if (!is_terminal[c] && indeg[c] == 0) ready.push(c);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        std::size_t c = ready.top();
        ready.pop();
        order.push_back(c);
        for (std::size_t s : succ[c])
            if (!is_terminal[s] && --indeg[s] == 0) ready.push(s);
    }
    d.p = order.size();
    std::vector<std::size_t> terminals;
    for (std::size_t c = 0; c < nc; ++c)
        if (is_terminal[c]) terminals.push_back(c);
    std::sort(terminals.begin(), terminals.end(),
              [&](std::size_t a, std::size_t b) { return min_vertex(a) < min_vertex(b); });
    d.q = terminals.size();
    order.insert(order.end(), terminals.begin(), terminals.end());

    d.components.reserve(nc);
    d.component_of.resize(g.n());
    d.terminal.resize(nc);
    d.relabel.resize(g.n());
    std::size_t next = 0;
    for (std::size_t pos = 0; pos < nc; ++pos) {
        std::size_t c = order[pos];
        d.components.push_back(raw[c]);
        d.terminal[pos] = is_terminal[c];
        for (std::size_t v : raw[c]) {
            d.component_of[v] = pos;
            d.relabel[v] = next++;
        }
    }
    return d;
}

// Applies a vertex permutation (old index -> new index) to a digraph.
inline LabeledDigraph apply_relabel(const LabeledDigraph& g,
                                    const std::vector<std::size_t>& relabel) {
    std::vector<std::string> new_names(g.n());
    for (std::size_t v = 0; v < g.n(); ++v) new_names[relabel[v]] = g.name(v);
    LabeledDigraph out;
    for (const auto& nm : new_names) out.add_vertex(nm);
    for (const auto& [k, lbl] : g.edges()) out.add_edge(relabel[k.first], relabel[k.second], lbl);
    for (std::size_t v = 0; v < g.n(); ++v) {
        if (!g.synthesis(v).is_zero()) out.add_synthesis(relabel[v], g.synthesis(v));
        if (!g.degradation(v).is_zero()) out.add_degradation(relabel[v], g.degradation(v));
    }
    return out;
}

// Canonical relabeling for the synthesis/degradation block analysis: component
// order as in scc_decompose, except that terminal components carrying no
// degradation move after all other components.  Returns the relabeled graph
// and the permutation old -> new.
inline std::pair<LabeledDigraph, std::vector<std::size_t>> canonical_relabel(
    const LabeledDigraph& g, const SccDecomposition& d) {
    auto comp_degradation_free = [&](std::size_t c) {
        for (std::size_t v : d.components[c])
            if (!g.degradation(v).is_zero()) return false;
        return true;
    };
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < d.components.size(); ++c)
        if (!(d.terminal[c] && comp_degradation_free(c))) order.push_back(c);
    for (std::size_t c = 0; c < d.components.size(); ++c)
        if (d.terminal[c] && comp_degradation_free(c)) order.push_back(c);

    std::vector<std::size_t> relabel(g.n());
    std::size_t next = 0;
    for (std::size_t c : order)
        for (std::size_t v : d.components[c]) relabel[v] = next++;
    return {apply_relabel(g, relabel), relabel};
}

// Complementary digraph: a star vertex (named "*", last index) sources every
// synthesis edge and sinks every degradation edge; the result has no
// synthesis/degradation of its own.
inline LabeledDigraph complementary(const LabeledDigraph& g) {
    LabeledDigraph out;
    for (std::size_t v = 0; v < g.n(); ++v) out.add_vertex(g.name(v));
    std::size_t star = out.add_vertex("*");
    for (const auto& [k, lbl] : g.edges()) out.add_edge(k.first, k.second, lbl);
    for (std::size_t v = 0; v < g.n(); ++v) {
        if (!g.synthesis(v).is_zero()) out.add_edge(star, v, g.synthesis(v));
        if (!g.degradation(v).is_zero()) out.add_edge(v, star, g.degradation(v));
    }
    return out;
}

inline bool strongly_connected(const LabeledDigraph& g) {
    return g.n() > 0 && detail::TarjanScc(g).run().size() == 1;
}

// Vertices from which `targets` can be reached along core edges (targets
// themselves included).
inline std::vector<bool> can_reach(const LabeledDigraph& g, const std::vector<bool>& targets) {
    std::vector<std::vector<std::size_t>> rev(g.n());
    for (const auto& [k, lbl] : g.edges()) rev[k.second].push_back(k.first);
    std::vector<bool> seen(g.n(), false);
    std::queue<std::size_t> q;
    for (std::size_t v = 0; v < g.n(); ++v)
        if (targets[v]) {
            seen[v] = true;
            q.push(v);
        }
    while (!q.empty()) {
        std::size_t v = q.front();
        q.pop();
        for (std::size_t w : rev[v])
            if (!seen[w]) {
                seen[w] = true;
                q.push(w);
            }
    }
    return seen;
}

// Induced subgraph on `vertices` (ascending); keeps names, synthesis and
// degradation of the selected vertices.
inline LabeledDigraph induced_subgraph(const LabeledDigraph& g,
                                       const std::vector<std::size_t>& vertices) {
    LabeledDigraph out;
    std::map<std::size_t, std::size_t> to_new;
    for (std::size_t v : vertices) to_new[v] = out.add_vertex(g.name(v));
    for (const auto& [k, lbl] : g.edges()) {
        auto a = to_new.find(k.first), b = to_new.find(k.second);
        if (a != to_new.end() && b != to_new.end()) out.add_edge(a->second, b->second, lbl);
    }
    for (std::size_t v : vertices) {
        if (!g.synthesis(v).is_zero()) out.add_synthesis(to_new[v], g.synthesis(v));
        if (!g.degradation(v).is_zero()) out.add_degradation(to_new[v], g.degradation(v));
    }
    return out;
}

}  // namespace steadykernel
