#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpinv/error.hpp"
#include "dpinv/graphgen.hpp"
#include "dpinv/io.hpp"
#include "dpinv/kernels.hpp"
#include "dpinv/laplacian.hpp"
#include "dpinv/metrics.hpp"
#include "dpinv/oracle.hpp"
#include "dpinv/rng.hpp"

namespace dpinv::cli {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t env_seed() {
    const char* s = std::getenv("DPINV_SEED");
    if (!s || !*s) return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0') throw UsageError(std::string("DPINV_SEED is not an unsigned integer: '") + s + "'");
    return v;
}

// ---- output helpers --------------------------------------------------------

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback, bool binary = false) {
        if (path.empty() || path == "-") {
            os_ = &fallback;
        } else {
            file_.open(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
            if (!file_) throw InputError("cannot open '" + path + "' for writing");
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }
    void close(const std::string& path) {
        os_->flush();
        if (!*os_) throw InputError("write to '" + path + "' failed");
    }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

void emit_report(const json& j, const std::string& path, std::ostream& err) {
    if (path.empty()) return;
    if (path == "-") {
        err << j.dump(2) << '\n';
        return;
    }
    Sink s(path, err);
    *s << j.dump(2) << '\n';
    s.close(path);
}

bool binary_path(const std::string& path, const std::string& format) {
    if (format == "bin") return true;
    if (format == "csv") return false;
    return path.size() > 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}

void write_block(const ColumnBlock& b, const std::string& path, const std::string& format, std::ostream& out) {
    const bool bin = binary_path(path, format);
    if (bin && (path.empty() || path == "-")) throw UsageError("binary output needs --out <file>");
    Sink s(path, out, bin);
    if (bin) io::write_block_binary(*s, b);
    else io::write_block_csv(*s, b);
    s.close(path);
}

ColumnBlock read_block(const std::string& path) {
    const bool bin = binary_path(path, "");
    std::ifstream in(path, bin ? std::ios::binary | std::ios::in : std::ios::in);
    if (!in) throw InputError("cannot open '" + path + "'");
    return bin ? io::read_block_binary(in) : io::read_block_csv(in);
}

double ms(double seconds) { return seconds * 1e3; }

json report_json(const SolveReport& r) {
    return {{"outer_iterations", r.outer_iterations},
            {"inner_iterations", r.inner_iterations_total},
            {"mv", r.mv_count},
            {"initial_residual", r.initial_residual},
            {"final_residual", r.final_residual},
            {"residual_history", r.residual_history},
            {"time_ms", ms(r.wall_time)}};
}

json stationary_json(const StationaryResult& s) {
    return {{"mv", s.mv_count},
            {"iterations", s.iterations},
            {"residual", s.residual},
            {"time_ms", ms(s.wall_time)}};
}

json aggregate_json(const std::vector<SolveReport>& rs) {
    std::uint64_t mv = 0;
    std::size_t outer = 0;
    double worst = 0.0, time = 0.0;
    for (const auto& r : rs) {
        mv += r.mv_count;
        outer = std::max(outer, r.outer_iterations);
        worst = std::max(worst, r.final_residual);
        time += r.wall_time;
    }
    return {{"columns", rs.size()},
            {"mv_total", mv},
            {"max_outer_iterations", outer},
            {"worst_final_residual", worst},
            {"solver_time_ms", ms(time)}};
}

// ---- input helpers ---------------------------------------------------------

Digraph load_graph(const std::string& path) {
    Digraph g = io::read_graph_file(path);
    g.validate();
    if (g.n == 0) throw InputError("graph '" + path + "' has no nodes");
    if (auto bad = find_unreachable_pair(g))
        throw InputError("graph is not strongly connected: node " + std::to_string(bad->second) +
                         " is unreachable from node " + std::to_string(bad->first));
    return g;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::size_t parse_id(const std::string& s) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size() || s.front() == '-') throw InputError("invalid node id '" + s + "'");
    return static_cast<std::size_t>(v);
}

std::vector<NodeId> parse_cols(const std::string& spec, std::size_t n) {
    std::vector<NodeId> J;
    if (spec == "all") {
        J.resize(n);
        std::iota(J.begin(), J.end(), NodeId{0});
        return J;
    }
    for (const auto& f : split(spec, ',')) {
        const NodeId j = parse_id(f);
        if (j >= n) throw InputError("column " + std::to_string(j) + " out of range for n = " + std::to_string(n));
        J.push_back(j);
    }
    if (J.empty()) throw InputError("no columns requested");
    return J;
}

std::vector<std::vector<NodeId>> parse_tuples(const std::string& spec, std::size_t arity, std::size_t n) {
    std::vector<std::vector<NodeId>> out;
    for (const auto& f : split(spec, ',')) {
        auto parts = split(f, ':');
        if (parts.size() != arity)
            throw InputError("expected " + std::to_string(arity) + " colon-separated node ids in '" + f + "'");
        std::vector<NodeId> t;
        for (const auto& p : parts) {
            const NodeId id = parse_id(p);
            if (id >= n) throw InputError("node " + std::to_string(id) + " out of range for n = " + std::to_string(n));
            t.push_back(id);
        }
        out.push_back(std::move(t));
    }
    return out;
}

LaplacianKind solve_kind(const std::string& code) {
    const LaplacianKind k = parse_laplacian_kind(code);
    if (k != LaplacianKind::random_walk && k != LaplacianKind::diag_scaled)
        throw UsageError("--kind must be r or d");
    return k;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---- subcommands -----------------------------------------------------------

struct SolverFlags {
    std::size_t ell = 30;
    double tol = 1e-9;
    std::size_t max_iterations = 10000;
    std::size_t threads = 1;
    std::uint64_t seed = 0;

    SubspaceConfig subspace() const {
        SubspaceConfig c;
        c.ell = ell;
        c.tol = tol;
        c.max_iterations = max_iterations;
        c.seed = seed;
        return c;
    }
    GmresConfig gmres() const {
        GmresConfig c;
        c.restart = ell;
        c.tol = tol;
        c.max_outer = max_iterations;
        return c;
    }
};

void add_solver_flags(CLI::App* sub, SolverFlags& f, bool threads) {
    sub->add_option("--ell", f.ell, "Subspace block size and GMRES restart length")
        ->default_val(f.ell)
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000}));
    sub->add_option("--tol", f.tol, "Residual tolerance")->default_val(f.tol)->check(CLI::PositiveNumber);
    sub->add_option("--max-iterations", f.max_iterations, "Outer iteration cap")
        ->default_val(f.max_iterations)
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "Seed for the subspace start block (default $DPINV_SEED or 0)")
        ->default_val(f.seed);
    if (threads)
        sub->add_option("--threads", f.threads, "Workers for independent column solves")
            ->default_val(f.threads)
            ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
}

struct GenArgs {
    std::size_t n = 1024;
    std::size_t attach = 2;
    std::optional<std::size_t> extra;
    std::uint64_t seed = 0;
    std::string out = "-";
    std::string report;
};

int cmd_gen(const GenArgs& a, std::ostream& out, std::ostream& err) {
    GenConfig c;
    c.n = a.n;
    c.attach = a.attach;
    c.extra_oneway = a.extra;
    c.seed = a.seed;
    GenStats stats;
    const Digraph g = preferential_attachment_digraph(c, &stats);
    Sink s(a.out, out);
    io::write_edge_list(*s, g);
    s.close(a.out);
    emit_report({{"command", "gen"},
                 {"n", g.n},
                 {"attach", a.attach},
                 {"seed", a.seed},
                 {"backbone_edges", stats.backbone_edges},
                 {"extra_requested", stats.extra_requested},
                 {"merged_duplicates", stats.merged_duplicates},
                 {"arcs", stats.arcs}},
                a.report, err);
    return exit_ok;
}

struct StationaryArgs {
    std::string graph;
    SolverFlags solver;
    std::string out = "-";
    std::string report;
};

int cmd_stationary(const StationaryArgs& a, std::ostream& out, std::ostream& err) {
    const Digraph g = load_graph(a.graph);
    const Transition t = build_transition(g);
    const StationaryResult st = stationary_distribution(t.P, a.solver.subspace());
    Sink s(a.out, out);
    io::write_vector(*s, st.pi);
    s.close(a.out);
    json r = stationary_json(st);
    r["command"] = "stationary";
    r["n"] = g.n;
    r["ell"] = a.solver.ell;
    r["tol"] = a.solver.tol;
    r["residual_history"] = st.residual_history;
    emit_report(r, a.report, err);
    return exit_ok;
}

struct PinvArgs {
    std::string graph;
    std::string kind = "d";
    std::string cols = "all";
    SolverFlags solver;
    std::string out = "-";
    std::string format;
    std::string report;
};

int cmd_pinv(const PinvArgs& a, std::ostream& out, std::ostream& err) {
    const LaplacianKind kind = solve_kind(a.kind);
    const Digraph g = load_graph(a.graph);
    const std::vector<NodeId> J = parse_cols(a.cols, g.n);
    const Transition t = build_transition(g);
    const StationaryResult st = stationary_distribution(t.P, a.solver.subspace());
    const EulerianSystem sys(t.P, st.pi, kind);
    const auto t0 = std::chrono::steady_clock::now();
    const PinvBlock block = pinv_columns(sys, J, a.solver.gmres(), a.solver.threads);
    const double solve_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_block(block.values, a.out, a.format, out);

    json cols = json::array();
    for (std::size_t c = 0; c < J.size(); ++c) {
        json r = report_json(block.reports[c]);
        r["column"] = J[c];
        cols.push_back(std::move(r));
    }
    json agg = aggregate_json(block.reports);
    agg["wall_time_ms"] = ms(solve_s);
    emit_report({{"command", "pinv"},
                 {"n", g.n},
                 {"kind", kind_code(kind)},
                 {"ell", a.solver.ell},
                 {"tol", a.solver.tol},
                 {"threads", a.solver.threads},
                 {"column_ids", J},
                 {"stationary", stationary_json(st)},
                 {"gmres", agg},
                 {"columns", cols}},
                a.report, err);
    return exit_ok;
}

struct GeneralArgs {
    std::string laplacian;
    std::string nullvec = "ones";
    std::string cols = "all";
    std::optional<std::size_t> pivot;
    SolverFlags solver;
    std::string out = "-";
    std::string format;
    std::string report;
};

int cmd_general_pinv(const GeneralArgs& a, std::ostream& out, std::ostream& err) {
    SparseMatrix L = io::read_matrix_file(a.laplacian);
    if (L.rows() != L.cols()) throw InputError("Laplacian must be square");
    Vector x = a.nullvec == "ones" ? Vector(L.rows(), 1.0) : io::read_vector_file(a.nullvec);
    if (x.size() != L.rows())
        throw InputError("null vector has " + std::to_string(x.size()) + " entries, expected " +
                         std::to_string(L.rows()));
    const GeneralLaplacian lt(std::move(L), std::move(x));
    const std::vector<NodeId> J = parse_cols(a.cols, lt.size());
    GeneralPinvOptions opt;
    opt.gmres = a.solver.gmres();
    opt.subspace = a.solver.subspace();
    opt.threads = a.solver.threads;
    opt.pivot = a.pivot;
    const auto t0 = std::chrono::steady_clock::now();
    const GeneralPinvResult r = general_pinv(lt, J, opt);
    const double solve_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_block(r.values, a.out, a.format, out);

    json cols = json::array();
    for (std::size_t c = 0; c < r.reports.size(); ++c) cols.push_back(report_json(r.reports[c]));
    json agg = aggregate_json(r.reports);
    agg["wall_time_ms"] = ms(solve_s);
    emit_report({{"command", "general-pinv"},
                 {"n", lt.size()},
                 {"pivot", r.pivot},
                 {"column_ids", J},
                 {"stationary", stationary_json(r.stationary)},
                 {"w_solve", report_json(r.w_report)},
                 {"gmres", agg},
                 {"columns", cols},
                 {"left_null_vector", r.v}},
                a.report, err);
    return exit_ok;
}

struct MetricsArgs {
    std::string graph;
    std::string kind = "d";
    std::string pairs;
    std::string triples;
    std::optional<double> gamma;
    bool kemeny = false;
    SolverFlags solver;
    std::string out = "-";
    std::string report;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out, std::ostream& err) {
    const LaplacianKind kind = solve_kind(a.kind);
    Digraph g = a.gamma ? io::read_graph_file(a.graph) : load_graph(a.graph);
    const std::size_t n_orig = g.n;
    if (a.gamma) {
        g = augment_evaporating(g, *a.gamma);
        if (auto bad = find_unreachable_pair(g))
            throw InputError("augmented graph is not strongly connected: node " + std::to_string(bad->second) +
                             " is unreachable from node " + std::to_string(bad->first));
    }
    const auto pairs = parse_tuples(a.pairs, 2, n_orig);
    const auto triples = parse_tuples(a.triples, 3, n_orig);
    for (const auto& t : triples)
        if (t[1] == t[2]) throw InputError("triple with j = k: pass probability is undefined");
    if (pairs.empty() && triples.empty() && !a.kemeny && !a.gamma)
        throw UsageError("nothing to compute: give --pairs, --triples, --kemeny or --gamma");

    std::set<NodeId> need;
    bool all = kind == LaplacianKind::random_walk || a.kemeny || a.gamma.has_value();
    if (!all) {
        for (const auto& p : pairs) need.insert(p.begin(), p.end());
        for (const auto& t : triples) {
            need.insert(t[1]);
            need.insert(t[2]);
        }
    }
    std::vector<NodeId> J;
    if (all) {
        J.resize(g.n);
        std::iota(J.begin(), J.end(), NodeId{0});
    } else {
        J.assign(need.begin(), need.end());
    }

    const Transition t = build_transition(g);
    const StationaryResult st = stationary_distribution(t.P, a.solver.subspace());
    const EulerianSystem sys(t.P, st.pi, kind);
    const PinvBlock block = pinv_columns(sys, J, a.solver.gmres(), a.solver.threads);
    const PinvColumns M(sys, block);

    // One CSV table per requested quantity, separated by blank lines.
    Sink s(a.out, out);
    bool first = true;
    auto table = [&](const char* header) {
        if (!first) *s << '\n';
        first = false;
        *s << header << '\n';
    };
    if (!pairs.empty()) {
        table("i,k,hitting,commute");
        for (const auto& p : pairs)
            *s << p[0] << ',' << p[1] << ',' << fmt(hitting_time(M, p[0], p[1])) << ','
               << fmt(commute_time(M, p[0], p[1])) << '\n';
    }
    if (!triples.empty()) {
        table("i,j,k,visits,pass_prob");
        for (const auto& t3 : triples)
            *s << t3[0] << ',' << t3[1] << ',' << t3[2] << ',' << fmt(visits(M, t3[0], t3[1], t3[2])) << ','
               << fmt(pass_probability(M, t3[0], t3[1], t3[2])) << '\n';
    }
    if (a.kemeny) {
        table("kemeny");
        *s << fmt(kemeny_constant(M)) << '\n';
    }
    if (a.gamma) {
        if (!pairs.empty()) {
            table("i,j,trust");
            for (const auto& p : pairs)
                *s << p[0] << ',' << p[1] << ',' << fmt(trust(M, g, p[0], p[1])) << '\n';
        }
        std::vector<NodeId> js(n_orig);
        std::iota(js.begin(), js.end(), NodeId{0});
        const Vector inf = influence_scores(M, g, js);
        table("j,influence");
        for (std::size_t j = 0; j < n_orig; ++j) *s << j << ',' << fmt(inf[j]) << '\n';
    }
    s.close(a.out);

    json r = {{"command", "metrics"},
              {"n", g.n},
              {"kind", kind_code(kind)},
              {"column_ids", J},
              {"stationary", stationary_json(st)},
              {"gmres", aggregate_json(block.reports)}};
    if (a.gamma) {
        r["gamma"] = *a.gamma;
        r["evaporating_node"] = *g.evaporating_node;
    }
    emit_report(r, a.report, err);
    return exit_ok;
}

struct BenchArgs {
    std::string sizes = "1024,2048,4096,8192,16384";
    std::string seeds;
    std::size_t attach = 2;
    std::optional<std::size_t> extra;
    std::size_t repeats = 3;
    SolverFlags solver;
    std::string out = "-";
    std::string report;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<std::size_t> sizes;
    for (const auto& f : split(a.sizes, ',')) sizes.push_back(parse_id(f));
    std::vector<std::uint64_t> seeds;
    if (a.seeds.empty()) seeds.push_back(a.solver.seed);
    for (const auto& f : split(a.seeds, ',')) seeds.push_back(parse_id(f));
    if (sizes.empty()) throw UsageError("--sizes is empty");
    for (auto n : sizes)
        if (n < 3) throw UsageError("bench sizes must be at least 3");

    Sink s(a.out, out);
    *s << "n,mv_pi,time_pi_ms,mv_col,time_col_ms\n";
    json rows = json::array();
    // per size: median over seeds
    std::vector<double> med_pi, med_col, med_mv_col;
    for (std::size_t n : sizes) {
        std::vector<double> tp, tc, mc;
        for (std::uint64_t seed : seeds) {
            GenConfig c;
            c.n = n;
            c.attach = a.attach;
            c.extra_oneway = a.extra;
            c.seed = seed;
            GenStats gs;
            const Digraph g = preferential_attachment_digraph(c, &gs);
            const Transition t = build_transition(g);
            SubspaceConfig sc = a.solver.subspace();
            sc.seed = seed;
            StationaryResult st;
            std::vector<double> times_pi;
            for (std::size_t r = 0; r < a.repeats; ++r) {
                st = stationary_distribution(t.P, sc);
                times_pi.push_back(ms(st.wall_time));
            }
            const EulerianSystem sys(t.P, st.pi, LaplacianKind::diag_scaled);
            ColumnSolve col;
            std::vector<double> times_col;
            for (std::size_t r = 0; r < a.repeats; ++r) {
                col = pinv_column(sys, 0, a.solver.gmres());
                times_col.push_back(ms(col.report.wall_time));
            }
            const double time_pi = median(times_pi), time_col = median(times_col);
            *s << n << ',' << st.mv_count << ',' << fmt(time_pi) << ',' << col.report.mv_count << ','
               << fmt(time_col) << '\n';
            rows.push_back({{"n", n},
                            {"seed", seed},
                            {"arcs", gs.arcs},
                            {"backbone_edges", gs.backbone_edges},
                            {"extra_requested", gs.extra_requested},
                            {"merged_duplicates", gs.merged_duplicates},
                            {"mv_pi", st.mv_count},
                            {"iterations_pi", st.iterations},
                            {"residual_pi", st.residual},
                            {"time_pi_ms", time_pi},
                            {"mv_col", col.report.mv_count},
                            {"outer_col", col.report.outer_iterations},
                            {"residual_col", col.report.final_residual},
                            {"time_col_ms", time_col}});
            tp.push_back(time_pi);
            tc.push_back(time_col);
            mc.push_back(static_cast<double>(col.report.mv_count));
        }
        med_pi.push_back(median(tp));
        med_col.push_back(median(tc));
        med_mv_col.push_back(median(mc));
    }
    s.close(a.out);

    std::vector<double> g_pi, g_col;
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        const double doublings = std::log2(static_cast<double>(sizes[i]) / static_cast<double>(sizes[i - 1]));
        if (doublings <= 0.0) continue;
        g_pi.push_back(std::pow(med_pi[i] / med_pi[i - 1], 1.0 / doublings));
        g_col.push_back(std::pow(med_col[i] / med_col[i - 1], 1.0 / doublings));
    }
    emit_report({{"command", "bench"},
                 {"attach", a.attach},
                 {"ell", a.solver.ell},
                 {"tol", a.solver.tol},
                 {"repeats", a.repeats},
                 {"seeds", seeds},
                 {"kernels", kernels::active().name},
                 {"arc_note", "backbone edges are stored as symmetric arc pairs; arcs counts distinct directed arcs"},
                 {"rows", rows},
                 {"summary",
                  {{"sizes", sizes},
                   {"median_time_pi_ms", med_pi},
                   {"median_time_col_ms", med_col},
                   {"median_mv_col", med_mv_col},
                   {"growth_pi_per_doubling", g_pi},
                   {"growth_col_per_doubling", g_col},
                   {"median_growth_pi", median(g_pi)},
                   {"median_growth_col", median(g_col)},
                   {"mv_col_growth", med_mv_col.front() > 0 ? med_mv_col.back() / med_mv_col.front() : 0.0}}}},
                a.report, err);
    return exit_ok;
}

struct Check {
    std::string graph;
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

void add_check(std::vector<Check>& out, const std::string& graph, const std::string& name, double value,
               double limit) {
    out.push_back({graph, name, value, limit, std::isfinite(value) && value <= limit});
}

double rel_max_diff(const DenseMatrix& a, const DenseMatrix& b) {
    return (a - b).max_abs() / std::max(b.max_abs(), 1e-300);
}

void add_penrose(std::vector<Check>& out, const std::string& graph, const std::string& what,
                 const oracle::PenroseReport& p) {
    add_check(out, graph, what + " ABA=A", p.aba, p.tol);
    add_check(out, graph, what + " BAB=B", p.bab, p.tol);
    add_check(out, graph, what + " AB symmetric", p.ab_sym, p.tol);
    add_check(out, graph, what + " BA symmetric", p.ba_sym, p.tol);
}

void verify_graph(const std::string& label, const Digraph& g, double tol, const SolverFlags& solver,
                  std::vector<Check>& out) {
    const Transition t = build_transition(g);
    const DenseMatrix Pd = to_dense(t.P);
    const StationaryResult st = stationary_distribution(t.P, solver.subspace());
    const Vector pd = oracle::stationary_direct(Pd);
    double err = 0.0;
    for (std::size_t i = 0; i < pd.size(); ++i) err = std::max(err, std::abs(pd[i] - st.pi[i]));
    add_check(out, label, "stationary vs direct", err, 1e-8);
    add_check(out, label, "stationary residual", st.residual, solver.tol);

    std::vector<NodeId> J(g.n);
    std::iota(J.begin(), J.end(), NodeId{0});
    for (LaplacianKind kind : {LaplacianKind::random_walk, LaplacianKind::diag_scaled}) {
        const std::string name = std::string("M^") + std::string(kind_code(kind));
        const EulerianSystem sys(t.P, st.pi, kind);
        const PinvBlock block = pinv_columns(sys, J, solver.gmres(), solver.threads);
        const DenseMatrix A = to_dense(sys.L());
        const DenseMatrix B = to_dense(block.values);
        add_penrose(out, label, name, oracle::penrose_check(A, B, tol));
        const DenseMatrix ref = oracle::dense_pinv_reference(A, sys.u(), sys.u());
        add_check(out, label, name + " vs dense reference", rel_max_diff(B, ref), 1e-7);
        if (kind == LaplacianKind::diag_scaled) {
            const PinvColumns M(sys, block);
            const Vector hd = oracle::hitting_times_direct(Pd, 0);
            double e = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < g.n; ++i) {
                e = std::max(e, std::abs(hitting_time(M, i, 0) - hd[i]));
                scale = std::max(scale, std::abs(hd[i]));
            }
            add_check(out, label, "hitting times vs direct (k=0, relative)", e / std::max(scale, 1.0), 1e-8);
        }
    }
}

struct VerifyArgs {
    std::string graph;
    std::string suite;
    std::string columns;
    std::string kind = "r";
    double tol = 1e-6;
    SolverFlags solver = [] {
        SolverFlags f;
        f.tol = 1e-12;
        return f;
    }();
    std::string report;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    if (a.graph.empty() == a.suite.empty()) throw UsageError("give exactly one of --graph or --suite");
    if (!a.columns.empty() && a.graph.empty()) throw UsageError("--columns needs --graph");
    std::vector<Check> checks;
    const auto t0 = std::chrono::steady_clock::now();
    if (!a.suite.empty()) {
        if (a.suite != "small-random") throw UsageError("unknown suite '" + a.suite + "'");
        Rng rng(a.solver.seed, RngStream::test_graphs);
        for (int gi = 0; gi < 30; ++gi) {
            const std::size_t n = 5 + static_cast<std::size_t>(rng.below(196));
            const std::uint64_t gseed = rng.next_u64();
            const Digraph g = random_strongly_connected(n, 2 * n, gseed);
            verify_graph("random#" + std::to_string(gi) + "(n=" + std::to_string(n) + ")", g, a.tol, a.solver,
                         checks);
        }
    } else if (!a.columns.empty()) {
        const LaplacianKind kind = solve_kind(a.kind);
        const Digraph g = load_graph(a.graph);
        const Transition t = build_transition(g);
        const StationaryResult st = stationary_distribution(t.P, a.solver.subspace());
        const EulerianSystem sys(t.P, st.pi, kind);
        const ColumnBlock B = read_block(a.columns);
        if (B.rows() != g.n || B.cols() != g.n)
            throw InputError("column file holds " + std::to_string(B.rows()) + "x" + std::to_string(B.cols()) +
                             " values; certification needs all " + std::to_string(g.n) + " columns");
        add_penrose(checks, a.columns, std::string("M^") + std::string(kind_code(kind)),
                    oracle::penrose_check(to_dense(sys.L()), to_dense(B), a.tol));
    } else {
        verify_graph(a.graph, load_graph(a.graph), a.tol, a.solver, checks);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t failed = 0;
    json list = json::array();
    for (const auto& c : checks) {
        if (!c.pass) ++failed;
        out << (c.pass ? "PASS  " : "FAIL  ") << c.graph << "  " << c.name << "  residual=" << fmt_short(c.value)
            << "  limit=" << fmt_short(c.limit) << '\n';
        list.push_back({{"graph", c.graph}, {"check", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
    }
    out << "verify: " << checks.size() << " checks, " << failed << " failed, " << fmt_short(secs) << " s\n";
    emit_report({{"command", "verify"}, {"checks", list}, {"failed", failed}, {"seconds", secs}}, a.report, err);
    return failed == 0 ? exit_ok : exit_numerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stationary distributions, Laplacian pseudo-inverses and random-walk metrics of digraphs",
                 "dpinv"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    std::uint64_t seed0 = 0;
    try {
        seed0 = env_seed();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    GenArgs gen;
    gen.seed = seed0;
    auto* g = app.add_subcommand("gen", "Generate a preferential-attachment digraph as an edge list");
    g->add_option("--n", gen.n, "Node count (>= 3)")->default_val(gen.n)->check(CLI::Range(std::size_t{3}, std::size_t{1} << 31));
    g->add_option("--attach", gen.attach, "Backbone edges per new node")->default_val(gen.attach)->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
    g->add_option("--extra", gen.extra, "Extra one-way arcs (default n)");
    g->add_option("--seed", gen.seed, "Seed (default $DPINV_SEED or 0)")->default_val(gen.seed);
    g->add_option("--out", gen.out, "Output edge list (- for stdout)")->default_val(gen.out);
    g->add_option("--report", gen.report, "JSON report path (- for stderr)");

    StationaryArgs sta;
    sta.solver.seed = seed0;
    auto* s = app.add_subcommand("stationary", "Stationary distribution by subspace iteration");
    s->add_option("--graph", sta.graph, "Edge list or Matrix Market file")->required();
    add_solver_flags(s, sta.solver, false);
    s->add_option("--out", sta.out, "Output vector (- for stdout)")->default_val(sta.out);
    s->add_option("--report", sta.report, "JSON report path (- for stderr)");

    PinvArgs pin;
    pin.solver.seed = seed0;
    auto* p = app.add_subcommand("pinv", "Columns of the pseudo-inverse of L^r or L^d");
    p->add_option("--graph", pin.graph, "Edge list or Matrix Market file")->required();
    p->add_option("--kind", pin.kind, "Laplacian kind: r or d")->default_val(pin.kind);
    p->add_option("--cols", pin.cols, "Comma-separated column ids or 'all'")->default_val(pin.cols);
    add_solver_flags(p, pin.solver, true);
    p->add_option("--out", pin.out, "Output block (- for stdout; .bin for binary)")->default_val(pin.out);
    p->add_option("--format", pin.format, "csv or bin (default from --out)")->check(CLI::IsMember({"csv", "bin"}));
    p->add_option("--report", pin.report, "JSON report path (- for stderr)");

    GeneralArgs gp;
    gp.solver.seed = seed0;
    auto* gpc = app.add_subcommand("general-pinv", "Columns of the pseudo-inverse of a general Laplacian");
    gpc->add_option("--laplacian", gp.laplacian, "Matrix Market or 0-based triplet file")->required();
    gpc->add_option("--nullvec", gp.nullvec, "Positive right null vector file, or 'ones'")->default_val(gp.nullvec);
    gpc->add_option("--cols", gp.cols, "Comma-separated column ids or 'all'")->default_val(gp.cols);
    gpc->add_option("--pivot", gp.pivot, "Pivot index (default argmax of the stationary vector)");
    add_solver_flags(gpc, gp.solver, true);
    gpc->add_option("--out", gp.out, "Output block (- for stdout; .bin for binary)")->default_val(gp.out);
    gpc->add_option("--format", gp.format, "csv or bin (default from --out)")->check(CLI::IsMember({"csv", "bin"}));
    gpc->add_option("--report", gp.report, "JSON report path (- for stderr)");

    MetricsArgs met;
    met.solver.seed = seed0;
    auto* m = app.add_subcommand("metrics", "Hitting, commute, visit, Kemeny and influence values as CSV");
    m->add_option("--graph", met.graph, "Edge list or Matrix Market file")->required();
    m->add_option("--kind", met.kind, "Pseudo-inverse used for the formulas: r or d")->default_val(met.kind);
    m->add_option("--pairs", met.pairs, "i:k,... for hitting and commute times (and trust with --gamma)");
    m->add_option("--triples", met.triples, "i:j:k,... for visit counts and pass probabilities");
    m->add_option("--gamma", met.gamma, "Append an evaporating node with this probability")
        ->check(CLI::Range(0.0, 1.0));
    m->add_flag("--kemeny", met.kemeny, "Kemeny constant");
    add_solver_flags(m, met.solver, true);
    m->add_option("--out", met.out, "Output CSV (- for stdout)")->default_val(met.out);
    m->add_option("--report", met.report, "JSON report path (- for stderr)");

    BenchArgs ben;
    ben.solver.seed = seed0;
    auto* b = app.add_subcommand("bench", "Timing sweep over generated graphs");
    b->add_option("--sizes", ben.sizes, "Comma-separated node counts")->default_val(ben.sizes);
    b->add_option("--seeds", ben.seeds, "Comma-separated generator seeds (default --seed)");
    b->add_option("--attach", ben.attach, "Backbone edges per new node")->default_val(ben.attach);
    b->add_option("--extra", ben.extra, "Extra one-way arcs (default n)");
    b->add_option("--repeats", ben.repeats, "Timed runs per solve; the median is reported")
        ->default_val(ben.repeats)
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
    add_solver_flags(b, ben.solver, false);
    b->add_option("--out", ben.out, "Output CSV (- for stdout)")->default_val(ben.out);
    b->add_option("--report", ben.report, "JSON report path (- for stderr)");

    VerifyArgs ver;
    ver.solver.seed = seed0;
    auto* v = app.add_subcommand("verify", "Check solver output against dense oracles");
    v->add_option("--graph", ver.graph, "Graph to verify");
    v->add_option("--suite", ver.suite, "Built-in suite: small-random");
    v->add_option("--columns", ver.columns, "Certify a full column block file against --graph");
    v->add_option("--kind", ver.kind, "Laplacian kind of --columns: r or d")->default_val(ver.kind);
    v->add_option("--tol", ver.tol, "Penrose tolerance")->default_val(ver.tol)->check(CLI::PositiveNumber);
    v->add_option("--solve-tol", ver.solver.tol, "Stationary and GMRES tolerance")
        ->default_val(ver.solver.tol)
        ->check(CLI::PositiveNumber);
    v->add_option("--seed", ver.solver.seed, "Seed (default $DPINV_SEED or 0)")->default_val(ver.solver.seed);
    v->add_option("--threads", ver.solver.threads, "Workers for column solves")
        ->default_val(ver.solver.threads)
        ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
    v->add_option("--report", ver.report, "JSON report path (- for stderr)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return exit_usage;
    }

    try {
        if (*g) return cmd_gen(gen, out, err);
        if (*s) return cmd_stationary(sta, out, err);
        if (*p) return cmd_pinv(pin, out, err);
        if (*gpc) return cmd_general_pinv(gp, out, err);
        if (*m) return cmd_metrics(met, out, err);
        if (*b) return cmd_bench(ben, out, err);
        if (*v) return cmd_verify(ver, out, err);
        return exit_usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
        return exit_usage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace dpinv::cli
