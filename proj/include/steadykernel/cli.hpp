#pragma once

// Command-line front end: analyze / check / steady-state / invert / kernel /
// trees / simulate over a network description file, with text or JSON output.
// Everything is deterministic: rerunning a command reproduces its output byte
// for byte.  Exit codes: 0 success, 1 input error, 2 existence violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "equilibrium.hpp"
#include "graph.hpp"
#include "inverse.hpp"
#include "laplacian.hpp"
#include "spantree.hpp"
#include "symexpr.hpp"
#include "verify.hpp"

namespace steadykernel {

struct CliResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

namespace cli_detail {

using Json = nlohmann::ordered_json;

inline const char* mode_string(EquilibriumMode m) {
    switch (m) {
        case EquilibriumMode::StrongComplementary: return "strong_complementary";
        case EquilibriumMode::GeneralInitialDependent: return "general_initial_dependent";
        case EquilibriumMode::GeneralUnique: return "general_unique";
        case EquilibriumMode::NoSteadyState: return "no_steady_state";
    }
    return "?";
}

inline const char* kind_string(ViolationKind k) {
    return k == ViolationKind::SynthesisInDegradationFreeTerminal
               ? "synthesis_in_degradation_free_terminal"
               : "synthesis_feeds_degradation_free_terminal";
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline LabeledDigraph load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open network file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str());
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::pair<std::string, Rational> parse_assignment(const std::string& item) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
        throw error("expected name=value, got: " + item);
    return {item.substr(0, eq), parse_rational(item.substr(eq + 1))};
}

inline std::map<std::string, Rational> parse_bindings(const std::vector<std::string>& items,
                                                      const std::set<std::string>& allowed) {
    std::map<std::string, Rational> binds;
    for (const auto& item : items) {
        auto [name, value] = parse_assignment(item);
        if (!allowed.count(name)) throw error("binding refers to unknown symbol: " + name);
        binds[name] = value;
    }
    return binds;
}

inline std::map<std::string, Rational> parse_x0(const std::string& spec,
                                                const LabeledDigraph& g) {
    std::map<std::string, Rational> x0;
    if (spec.empty()) return x0;
    for (const auto& item : split(spec, ',')) {
        auto [name, value] = parse_assignment(item);
        if (!g.has_vertex(name)) throw error("unknown vertex in --x0: " + name);
        x0[name] = value;
    }
    return x0;
}

inline std::string joined_names(const LabeledDigraph& g, const std::vector<std::size_t>& verts) {
    std::string out;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        if (i) out += ",";
        out += g.name(verts[i]);
    }
    return out;
}

// substitute command-line bindings into an expression before display
inline RationalExpr bound(const RationalExpr& e, const std::map<std::string, Rational>& binds) {
    return binds.empty() ? e : e.subst(binds);
}

inline Json violation_json(const LabeledDigraph& g, const ExistenceViolation& v) {
    Json names = Json::array();
    for (std::size_t idx : v.terminal_component) names.push_back(g.name(idx));
    return Json{{"kind", kind_string(v.kind)},
                {"synthesis_vertex", g.name(v.synthesis_vertex)},
                {"terminal_component", names}};
}

inline std::string violation_text(const LabeledDigraph& g, const ExistenceViolation& v) {
    return std::string("violation: ") + kind_string(v.kind) + " synthesis=" +
           g.name(v.synthesis_vertex) + " component={" + joined_names(g, v.terminal_component) +
           "}";
}

inline Json stability_json(const StabilityReport& st) {
    return Json{{"q", st.q}, {"k", st.k}, {"alg0", st.alg0}, {"geo0", st.geo0},
                {"converges", st.converges}};
}

inline std::string stability_text(const StabilityReport& st) {
    std::ostringstream line;
    line << "stability: q=" << st.q << " k=" << st.k << " alg0=" << st.alg0
         << " geo0=" << st.geo0 << " converges=" << (st.converges ? "yes" : "no");
    return line.str();
}

// symbolic post-checks on a reported steady state
inline bool residual_ok(const LabeledDigraph& g, const std::vector<RationalExpr>& x) {
    SdSystem sys = build_system(g);
    for (std::size_t i = 0; i < sys.n(); ++i) {
        RationalExpr acc = sys.s[i];
        for (std::size_t j = 0; j < sys.n(); ++j) {
            if (sys.f.at(i, j).is_zero() || x[j].is_zero()) continue;
            acc += sys.f.at(i, j) * x[j];
        }
        if (!acc.is_zero()) return false;
    }
    return true;
}

inline bool balance_ok(const LabeledDigraph& g, const std::vector<RationalExpr>& x) {
    RationalExpr out, in;
    for (std::size_t v = 0; v < g.n(); ++v) {
        if (!g.degradation(v).is_zero()) out += g.degradation(v) * x[v];
        in += g.synthesis(v);
    }
    return out.equals(in);
}

struct CommandContext {
    LabeledDigraph g;
    InverseAlgo algo = InverseAlgo::TreeSum;
    std::map<std::string, Rational> binds;
    bool json = false;
    std::ostringstream out;
};

inline int cmd_analyze(CommandContext& ctx) {
    EquilibriumReport rep = analyze_equilibrium(ctx.g, ctx.algo);
    SccDecomposition d = scc_decompose(ctx.g);
    auto comp_degradation_free = [&](std::size_t c) {
        for (std::size_t v : d.components[c])
            if (!ctx.g.degradation(v).is_zero()) return false;
        return true;
    };
    if (ctx.json) {
        Json j;
        j["vertices"] = Json::array();
        for (std::size_t v = 0; v < ctx.g.n(); ++v) j["vertices"].push_back(ctx.g.name(v));
        j["edge_count"] = ctx.g.edges().size();
        j["components"] = Json::array();
        j["terminal_components"] = Json::array();
        j["degradation_free_terminal_components"] = Json::array();
        for (std::size_t c = 0; c < d.components.size(); ++c) {
            Json names = Json::array();
            for (std::size_t v : d.components[c]) names.push_back(ctx.g.name(v));
            j["components"].push_back(names);
            if (d.terminal[c]) {
                j["terminal_components"].push_back(names);
                if (comp_degradation_free(c))
                    j["degradation_free_terminal_components"].push_back(names);
            }
        }
        j["mode"] = mode_string(rep.mode);
        j["stability"] = stability_json(rep.stability);
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << "vertices: " << joined_names(ctx.g, [&] {
            std::vector<std::size_t> all(ctx.g.n());
            std::iota(all.begin(), all.end(), std::size_t{0});
            return all;
        }()) << "\n";
        ctx.out << "edges: " << ctx.g.edges().size() << "\n";
        auto comp_list = [&](bool only_terminal, bool only_free) {
            std::string line;
            for (std::size_t c = 0; c < d.components.size(); ++c) {
                if (only_terminal && !d.terminal[c]) continue;
                if (only_free && !comp_degradation_free(c)) continue;
                if (!line.empty()) line += " ";
                line += "{" + joined_names(ctx.g, d.components[c]) + "}";
            }
            return line;
        };
        ctx.out << "components: " << comp_list(false, false) << "\n";
        ctx.out << "terminal: " << comp_list(true, false) << "\n";
        ctx.out << "degradation-free-terminal: " << comp_list(true, true) << "\n";
        ctx.out << "mode: " << mode_string(rep.mode) << "\n";
        ctx.out << stability_text(rep.stability) << "\n";
    }
    return 0;
}

inline int cmd_check(CommandContext& ctx) {
    EquilibriumReport rep = analyze_equilibrium(ctx.g, ctx.algo);
    bool ok = rep.violations.empty();
    if (ctx.json) {
        Json j;
        j["ok"] = ok;
        j["violations"] = Json::array();
        for (const auto& v : rep.violations) j["violations"].push_back(violation_json(ctx.g, v));
        ctx.out << j.dump(2) << "\n";
    } else {
        if (ok) ctx.out << "ok\n";
        for (const auto& v : rep.violations) ctx.out << violation_text(ctx.g, v) << "\n";
    }
    return ok ? 0 : 2;
}

inline int cmd_steady_state(CommandContext& ctx, const std::string& x0_spec) {
    std::optional<std::vector<RationalExpr>> x0;
    std::map<std::string, Rational> x0_map = parse_x0(x0_spec, ctx.g);
    if (!x0_map.empty()) {
        std::vector<RationalExpr> init = symbolic_x0(ctx.g);
        for (const auto& [name, value] : x0_map)
            init[ctx.g.index_of(name)] = RationalExpr(value);
        x0 = std::move(init);
    }
    EquilibriumReport rep = analyze_equilibrium(ctx.g, ctx.algo, x0);
    bool have_x = !rep.x.empty();
    bool bal = have_x && balance_ok(ctx.g, rep.x);
    bool res = have_x && residual_ok(ctx.g, rep.x);
    if (ctx.json) {
        Json j;
        j["mode"] = mode_string(rep.mode);
        j["violations"] = Json::array();
        for (const auto& v : rep.violations) j["violations"].push_back(violation_json(ctx.g, v));
        j["x_es"] = Json::array();
        for (std::size_t v = 0; v < rep.x.size(); ++v)
            j["x_es"].push_back(Json{{"vertex", ctx.g.name(v)},
                                     {"expr", bound(rep.x[v], ctx.binds).render()}});
        j["stability"] = stability_json(rep.stability);
        if (have_x) {
            j["balance_ok"] = bal;
            j["residual_ok"] = res;
        }
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << "mode: " << mode_string(rep.mode) << "\n";
        for (const auto& v : rep.violations) ctx.out << violation_text(ctx.g, v) << "\n";
        for (std::size_t v = 0; v < rep.x.size(); ++v)
            ctx.out << "x[" << ctx.g.name(v) << "] = " << bound(rep.x[v], ctx.binds).render()
                    << "\n";
        ctx.out << stability_text(rep.stability) << "\n";
        if (have_x) {
            ctx.out << "balance: " << (bal ? "ok" : "FAIL") << "\n";
            ctx.out << "residual: " << (res ? "ok" : "FAIL") << "\n";
        }
    }
    return rep.mode == EquilibriumMode::NoSteadyState ? 2 : 0;
}

inline int cmd_invert(CommandContext& ctx, bool n_block) {
    // synthesis has no seat in the matrix itself; only the full-matrix mode
    // must reject it (the leading block never depends on it)
    if (!n_block && ctx.g.has_any_synthesis())
        throw error("invert does not accept synthesis edges; remove the '* ->' lines");
    std::vector<std::string> names;
    SymMatrix inv(0, 0);
    if (n_block) {
        auto [part, perm] = canonical_partition(ctx.g);
        std::size_t lead = part.n_block.rows();
        for (std::size_t v = 0; v < lead; ++v) names.push_back(part.sys.g.name(v));
        inv = invert_leading(part, ctx.algo);
    } else {
        PerturbedMatrix pm{ctx.g, ctx.g.degradation()};
        names = ctx.g.vertex_names();
        inv = ctx.algo == InverseAlgo::TreeSum ? invert_mtt(pm) : invert_adjugate(pm.matrix());
    }
    if (ctx.json) {
        Json j;
        j["algo"] = ctx.algo == InverseAlgo::TreeSum ? "mtt" : "dense";
        j["vertices"] = names;
        j["matrix"] = Json::array();
        for (std::size_t i = 0; i < inv.rows(); ++i) {
            Json row = Json::array();
            for (std::size_t c = 0; c < inv.cols(); ++c)
                row.push_back(bound(inv.at(i, c), ctx.binds).render());
            j["matrix"].push_back(row);
        }
        ctx.out << j.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < inv.rows(); ++i)
            for (std::size_t c = 0; c < inv.cols(); ++c)
                ctx.out << "inv[" << names[i] << "][" << names[c]
                        << "] = " << bound(inv.at(i, c), ctx.binds).render() << "\n";
    }
    return 0;
}

inline int cmd_kernel(CommandContext& ctx) {
    SccDecomposition d = scc_decompose(ctx.g);
    SymMatrix basis = kernel_basis(ctx.g, d);
    if (ctx.json) {
        Json j;
        j["components"] = Json::array();
        j["columns"] = Json::array();
        for (std::size_t t = 0; t < d.q; ++t) {
            Json names = Json::array();
            for (std::size_t v : d.components[d.p + t]) names.push_back(ctx.g.name(v));
            j["components"].push_back(names);
            Json col = Json::array();
            for (std::size_t v = 0; v < ctx.g.n(); ++v)
                col.push_back(bound(basis.at(v, t), ctx.binds).render());
            j["columns"].push_back(col);
        }
        ctx.out << j.dump(2) << "\n";
    } else {
        for (std::size_t t = 0; t < d.q; ++t) {
            ctx.out << "component {" << joined_names(ctx.g, d.components[d.p + t]) << "}:";
            for (std::size_t v = 0; v < ctx.g.n(); ++v)
                ctx.out << (v ? ", " : " ") << bound(basis.at(v, t), ctx.binds).render();
            ctx.out << "\n";
        }
    }
    return 0;
}

inline int cmd_trees(CommandContext& ctx, const std::string& root_name) {
    if (!ctx.g.has_vertex(root_name)) throw error("unknown vertex: " + root_name);
    std::size_t root = ctx.g.index_of(root_name);
    std::vector<SpanningTree> trees = enumerate_rooted(ctx.g, root);
    if (ctx.json) {
        Json j;
        j["root"] = root_name;
        j["trees"] = Json::array();
        for (const auto& t : trees) {
            Json edges = Json::array();
            for (const auto& [from, to] : t.edges)
                edges.push_back(Json{{"from", ctx.g.name(from)},
                                     {"to", ctx.g.name(to)},
                                     {"label", bound(ctx.g.label(from, to), ctx.binds).render()}});
            j["trees"].push_back(Json{{"edges", edges},
                                      {"product", bound(tree_product(ctx.g, t), ctx.binds).render()}});
        }
        ctx.out << j.dump(2) << "\n";
    } else {
        for (const auto& t : trees) {
            std::string line = root_name + " |";
            for (std::size_t e = 0; e < t.edges.size(); ++e) {
                const auto& [from, to] = t.edges[e];
                line += (e ? "," : " ") + ctx.g.name(from) + "->" + ctx.g.name(to) + ":" +
                        bound(ctx.g.label(from, to), ctx.binds).render();
            }
            ctx.out << line << "\n";
        }
    }
    return 0;
}

inline int cmd_simulate(CommandContext& ctx, const std::string& x0_spec, double dt_flag,
                        double t_end_flag, const std::string& csv_path) {
    SdSystem sys = build_system(ctx.g);
    NumericSystem num = make_numeric(sys, ctx.binds);
    std::vector<double> x0(ctx.g.n(), 0.0);
    for (const auto& [name, value] : parse_x0(x0_spec, ctx.g))
        x0[ctx.g.index_of(name)] = to_double(value);
    double dt = dt_flag > 0.0 ? dt_flag : default_dt(num);
    double t_end = t_end_flag > 0.0 ? t_end_flag : default_t_end(num);

    std::ofstream csv;
    Observer observe{};
    if (!csv_path.empty()) {
        csv.open(csv_path);
        if (!csv) throw error("cannot open csv output file: " + csv_path);
        csv << "t";
        for (std::size_t v = 0; v < ctx.g.n(); ++v) csv << "," << ctx.g.name(v);
        csv << "\n";
        observe = [&](double t, const std::vector<double>& x) {
            csv << fmt_double(t);
            for (double v : x) csv << "," << fmt_double(v);
            csv << "\n";
        };
    }
    IntegrationResult res = integrate(num, x0, dt, t_end, observe);
    double balance_residual = 0.0;
    for (std::size_t v = 0; v < ctx.g.n(); ++v)
        balance_residual += num.d[v] * res.x[v] - num.s[v];
    balance_residual = std::abs(balance_residual);

    if (ctx.json) {
        Json j;
        j["t"] = res.t;
        j["steps"] = res.steps;
        j["diverged"] = res.diverged;
        j["x"] = Json::array();
        for (std::size_t v = 0; v < ctx.g.n(); ++v)
            j["x"].push_back(Json{{"vertex", ctx.g.name(v)}, {"value", res.x[v]}});
        j["residual"] = residual_norm(num, res.x);
        j["balance_residual"] = balance_residual;
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << "t = " << fmt_double(res.t) << "\n";
        ctx.out << "steps = " << res.steps << "\n";
        ctx.out << "diverged = " << (res.diverged ? "yes" : "no") << "\n";
        for (std::size_t v = 0; v < ctx.g.n(); ++v)
            ctx.out << "x[" << ctx.g.name(v) << "] = " << fmt_double(res.x[v]) << "\n";
        ctx.out << "residual = " << fmt_double(residual_norm(num, res.x)) << "\n";
        ctx.out << "balance-residual = " << fmt_double(balance_residual) << "\n";
    }
    return 0;
}

}  // namespace cli_detail

// Parses and executes one command line (without the program name); returns
// the exit code plus everything written to stdout and stderr.
inline CliResult run_cli(const std::vector<std::string>& args) {
    using namespace cli_detail;
    CliResult result;
    std::ostringstream out, err;

    CLI::App app{"exact and numeric steady states for linear dynamics on labeled digraphs"};
    app.name("steadykernel");
    app.require_subcommand(1);

    std::string file, format = "text", algo = "mtt", root, x0_spec, csv_path;
    std::vector<std::string> bind_items;
    double dt_flag = 0.0, t_end_flag = 0.0;
    bool n_block = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("network", file, "network description file")->required();
        sub->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--bind", bind_items, "bind a symbol: name=value (repeatable)");
        return sub;
    };
    auto add_algo = [&](CLI::App* sub) {
        sub->add_option("--algo", algo, "inversion algorithm")
            ->check(CLI::IsMember({"mtt", "dense"}));
        return sub;
    };

    CLI::App* c_analyze = add_algo(add_common(
        app.add_subcommand("analyze", "structure, steady-state mode, and stability")));
    CLI::App* c_check = add_algo(add_common(
        app.add_subcommand("check", "existence test with localized violations")));
    CLI::App* c_steady = add_algo(add_common(
        app.add_subcommand("steady-state", "exact steady state")));
    c_steady->add_option("--x0", x0_spec, "initial state: name=value,... (rest symbolic)");
    CLI::App* c_invert = add_algo(add_common(
        app.add_subcommand("invert", "exact inverse of the rate matrix")));
    c_invert->add_flag("--n-block", n_block, "invert only the leading nonsingular block");
    CLI::App* c_kernel = add_common(
        app.add_subcommand("kernel", "tree-sum basis of the Laplacian kernel"));
    CLI::App* c_trees = add_common(
        app.add_subcommand("trees", "directed spanning trees towards a root"));
    c_trees->add_option("--root", root, "root vertex name")->required();
    CLI::App* c_simulate = add_common(
        app.add_subcommand("simulate", "fixed-step numeric integration"));
    c_simulate->add_option("--x0", x0_spec, "initial state: name=value,... (rest zero)");
    c_simulate->add_option("--dt", dt_flag, "step size (default: from the fastest rate)");
    c_simulate->add_option("--t-end", t_end_flag, "horizon (default: from the slowest rate)");
    c_simulate->add_option("--csv", csv_path, "write the trajectory to this file");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        result.exit_code = app.exit(e, out, err);
        result.out = out.str();
        result.err = err.str();
        return result;
    }

    try {
        CommandContext ctx;
        ctx.g = load_network(file);
        ctx.algo = algo == "dense" ? InverseAlgo::Dense : InverseAlgo::TreeSum;
        ctx.json = format == "json";
        std::set<std::string> allowed = ctx.g.symbols();
        for (std::size_t v = 0; v < ctx.g.n(); ++v) allowed.insert("x0_" + ctx.g.name(v));
        ctx.binds = parse_bindings(bind_items, allowed);

        int code = 0;
        if (*c_analyze) code = cmd_analyze(ctx);
        else if (*c_check) code = cmd_check(ctx);
        else if (*c_steady) code = cmd_steady_state(ctx, x0_spec);
        else if (*c_invert) code = cmd_invert(ctx, n_block);
        else if (*c_kernel) code = cmd_kernel(ctx);
        else if (*c_trees) code = cmd_trees(ctx, root);
        else if (*c_simulate) code = cmd_simulate(ctx, x0_spec, dt_flag, t_end_flag, csv_path);
        result.exit_code = code;
        result.out = ctx.out.str();
    } catch (const error& ex) {
        err << "error: " << ex.what() << "\n";
        result.exit_code = 1;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        result.exit_code = 1;
    }
    result.err = err.str();
    return result;
}

}  // namespace steadykernel
