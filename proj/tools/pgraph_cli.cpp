// pgraph: p-parabolicity toolkit for weighted graphs.
//
// Subcommands: gen, classify, capacity, potential, green, obstacle,
// khasminskii, suite, check. Graphs come from a pgraph v1 file (--graph) or
// a generated family (--family, with --d/--s/--b/--w and --truncation).
// JSON goes to stdout; --csv adds a stage table. Exit codes: 0 ok,
// 1 error/contradiction, 2 Inconclusive when --definitive was requested.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "pgraph/capacity.hpp"
#include "pgraph/dirichlet.hpp"
#include "pgraph/flows.hpp"
#include "pgraph/format.hpp"
#include "pgraph/graph.hpp"
#include "pgraph/khasminskii.hpp"
#include "pgraph/metrics.hpp"
#include "pgraph/model.hpp"
#include "pgraph/serialize.hpp"
#include "pgraph/suite.hpp"

namespace {

using namespace pgraph;

struct TargetFlags {
    std::string graph_file;
    std::string family;
    int d = 2;
    std::string s_token, b_token, w_token;
    int truncation = 40;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--graph", graph_file, "pgraph v1 file");
        cmd->add_option("--family", family,
                        "star | wheel | starline | line | tree | antitree | lattice");
        cmd->add_option("--d", d, "branching factor (tree) or dimension (lattice)");
        cmd->add_option("--s", s_token, "sphere size sequence (antitree), e.g. \"r+1\"");
        cmd->add_option("--b", b_token, "line weight sequence, e.g. \"(n+1)^2\"");
        cmd->add_option("--w", w_token, "star spoke weight sequence, e.g. \"0.5^n\"");
        cmd->add_option("--truncation", truncation, "generated truncation size");
    }

    std::optional<FamilySpec> family_spec() const {
        if (family.empty()) return std::nullopt;
        if (family == "tree") return FamilySpec::tree(d);
        if (family == "lattice") return FamilySpec::lattice(d);
        if (family == "antitree")
            return FamilySpec::anti_tree(
                SequenceSpec::parse(s_token.empty() ? "r+1" : s_token));
        if (family == "line")
            return FamilySpec::weighted_line(
                SequenceSpec::parse(b_token.empty() ? "1" : b_token));
        SequenceSpec w = w_token.empty() ? SequenceSpec::geometric(0.5, 0.5)
                                         : SequenceSpec::parse(w_token);
        if (family == "star") return FamilySpec::star(w);
        if (family == "wheel") return FamilySpec::wheel(w);
        if (family == "starline") return FamilySpec::star_line(w);
        throw invalid_input("unknown family '" + family + "'");
    }

    WeightedGraph load() const {
        if (!graph_file.empty()) {
            std::ifstream in(graph_file);
            if (!in) throw invalid_input("cannot open '" + graph_file + "'");
            return load_graph(in);
        }
        auto spec = family_spec();
        if (!spec) throw invalid_input("need --graph or --family");
        return generate(*spec, truncation);
    }

    std::optional<RadialProfile> profile(int radius) const {
        auto spec = family_spec();
        if (!spec) return std::nullopt;
        return profile_of(*spec, radius);
    }
};

std::vector<Vertex> parse_labels(const WeightedGraph& g, const std::string& csv) {
    std::vector<Vertex> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(g.index_of(item));
    if (out.empty()) throw invalid_input("empty vertex list");
    return out;
}

Vertex default_root(const WeightedGraph& g) { return g.root >= 0 ? g.root : 0; }

void emit(const json& out) { std::cout << out.dump(2) << '\n'; }

int eccentricity(const WeightedGraph& g, const std::vector<Vertex>& centers) {
    int r = 0;
    while (static_cast<int>(ball(g, centers, r).size()) < g.size()) ++r;
    return r;
}

// --- check subcommand: fuzz batteries over random small graphs ------------

WeightedGraph random_graph(std::mt19937& rng, int max_vertices, bool with_potential) {
    std::uniform_int_distribution<int> nv(2, max_vertices);
    std::uniform_real_distribution<double> weight(0.1, 10.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int n = nv(rng);
    GraphBuilder b;
    for (int i = 0; i < n; ++i)
        b.add_vertex(detail::pad(i, 4), weight(rng),
                     with_potential && unit(rng) < 0.3 ? weight(rng) : 0.0);
    // random spanning tree keeps it connected, then extra edges
    std::uniform_int_distribution<int> any(0, n - 1);
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        b.add_edge(i, parent(rng), weight(rng));
    }
    int extra = std::uniform_int_distribution<int>(0, n)(rng);
    for (int t = 0; t < extra; ++t) {
        int x = any(rng), y = any(rng);
        if (x == y) continue;
        try {
            b.add_edge(x, y, weight(rng));
        } catch (const invalid_input&) {
        }
    }
    return b.finish();
}

json run_check(unsigned seed, int trials) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::vector<double> ps{1.3, 2.0, 3.5};
    double worst_green = 0.0, worst_flow = 0.0;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        WeightedGraph g = random_graph(rng, 30, t % 2 == 0);
        double p = ps[t % ps.size()];
        std::vector<double> f(g.size()), phi(g.size());
        for (auto& v : f) v = unit(rng);
        for (auto& v : phi) v = unit(rng);
        std::vector<Vertex> all(g.size());
        for (Vertex x = 0; x < g.size(); ++x) all[x] = x;
        double r1 = std::abs(greens_formula_residual(g, f, phi, all, p));
        double r2 = std::abs(flow_greens_residual(g, gradient_flow(g, f, p), phi));
        worst_green = std::max(worst_green, r1);
        worst_flow = std::max(worst_flow, r2);
        if (r1 > 1e-10 || r2 > 1e-10) ++failures;
    }
    return {{"schema", kReportSchema},
            {"trials", trials},
            {"seed", seed},
            {"worst_green_residual", worst_green},
            {"worst_flow_residual", worst_flow},
            {"failures", failures}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-parabolicity toolkit for weighted graphs"};
    app.require_subcommand(1);

    TargetFlags target;
    double p = 2.0;
    int stages = 8;
    double tol = 1e-10;
    std::string k_csv, csv_file, out_file, psi_file;
    int radius = -1;
    unsigned seed = 12345;
    int trials = 200;
    bool definitive = false;

    auto add_common = [&](CLI::App* cmd, bool with_p = true) {
        target.add_to(cmd);
        if (with_p) cmd->add_option("--p", p, "exponent p > 1");
        cmd->add_option("--stages", stages, "exhaustion stages");
        cmd->add_option("--tol", tol, "solver tolerance");
        cmd->add_option("--csv", csv_file, "write stage CSV to this file");
        cmd->add_flag("--definitive", definitive,
                      "exit 2 when the result is Inconclusive");
        return cmd;
    };

    CLI::App* gen = app.add_subcommand("gen", "generate a family truncation");
    target.add_to(gen);
    gen->add_option("--out", out_file, "output file (default stdout)");

    CLI::App* classify_cmd = add_common(app.add_subcommand("classify", "parabolic / hyperbolic verdict"));

    CLI::App* capacity_cmd = add_common(app.add_subcommand("capacity", "p-capacity of K in V"));
    capacity_cmd->add_option("--K", k_csv, "comma-separated vertex labels");
    capacity_cmd->add_option("--radius", radius,
                             "V = ball of this radius around K (default: all but the last sphere)");

    CLI::App* potential_cmd =
        add_common(app.add_subcommand("potential", "equilibrium potentials along the exhaustion"));
    potential_cmd->add_option("--K", k_csv, "comma-separated vertex labels (default root)");

    CLI::App* green_cmd = add_common(app.add_subcommand("green", "Green's function estimate"));
    int green_r = 0;
    green_cmd->add_option("--r", green_r, "radius to report (radial families)");

    CLI::App* obstacle_cmd = add_common(app.add_subcommand("obstacle", "obstacle problem"));
    obstacle_cmd->add_option("--psi-file", psi_file,
                             "lines '<label> <value>': free vertices and their obstacle");

    CLI::App* khas_cmd = add_common(app.add_subcommand("khasminskii", "constructive potential"));
    khas_cmd->add_option("--K", k_csv, "comma-separated vertex labels (default root)");

    CLI::App* suite_cmd = add_common(app.add_subcommand("suite", "all characterizations + agreement"));
    suite_cmd->add_option("--seed", seed, "seed for fuzz sections");

    CLI::App* check_cmd = app.add_subcommand("check", "identity fuzz batteries");
    check_cmd->add_option("--seed", seed, "rng seed");
    check_cmd->add_option("--trials", trials, "number of fuzz trials");

    CLI11_PARSE(app, argc, argv);

    try {
        SolverOptions opts;
        opts.tol = tol;

        if (gen->parsed()) {
            auto spec = target.family_spec();
            if (!spec) throw invalid_input("gen: need --family");
            WeightedGraph g = generate(*spec, target.truncation);
            if (out_file.empty()) {
                save_graph(std::cout, g);
            } else {
                std::ofstream out(out_file);
                if (!out) throw invalid_input("cannot write '" + out_file + "'");
                save_graph(out, g);
            }
            return 0;
        }

        if (check_cmd->parsed()) {
            json rep = run_check(seed, trials);
            emit(rep);
            return rep["failures"].get<int>() == 0 ? 0 : 1;
        }

        WeightedGraph g = target.load();
        auto profile = target.profile(g.truncated ? g.truncation_radius : target.truncation);

        if (classify_cmd->parsed()) {
            ClassifyPolicy policy;
            policy.stages = stages;
            policy.solver = opts;
            Verdict v = classify(g, default_root(g), p, policy,
                                 profile ? &*profile : nullptr);
            json out = to_json(v);
            out["schema"] = kReportSchema;
            emit(out);
            return v.label == Label::Inconclusive && definitive ? 2 : 0;
        }

        if (capacity_cmd->parsed()) {
            std::vector<Vertex> k = k_csv.empty()
                                        ? std::vector<Vertex>{default_root(g)}
                                        : parse_labels(g, k_csv);
            int r = radius >= 0 ? radius : eccentricity(g, k) - 1;
            if (r < 0) throw invalid_input("capacity: K already covers the graph");
            CapacityResult res = capacity(g, k, ball(g, k, r), p, opts);
            json out = to_json(res, g);
            out["schema"] = kReportSchema;
            out["radius"] = r;
            emit(out);
            return 0;
        }

        if (potential_cmd->parsed()) {
            std::vector<Vertex> k = k_csv.empty()
                                        ? std::vector<Vertex>{default_root(g)}
                                        : parse_labels(g, k_csv);
            Exhaustion ex = Exhaustion::balls(g, k, stages);
            PotentialSequence seq = capacity_limit(g, k, ex, p, opts);
            json out = to_json(seq);
            out["schema"] = kReportSchema;
            emit(out);
            if (!csv_file.empty()) {
                std::ofstream csv(csv_file);
                if (!csv) throw invalid_input("cannot write '" + csv_file + "'");
                write_csv(csv, seq);
            }
            return 0;
        }

        if (green_cmd->parsed()) {
            json out;
            out["schema"] = kReportSchema;
            if (profile) {
                auto value = radial_green(*profile, p, green_r, profile->max_radius);
                if (!value) {
                    out["status"] = "Parabolic";
                    emit(out);
                    return definitive ? 2 : 0;
                }
                out["status"] = "Ok";
                out["g"] = value->value;
                out["r"] = green_r;
                out["exact_tail"] = value->exact;
                out["remainder_bound"] = value->remainder_bound;
                emit(out);
                return 0;
            }
            Exhaustion ex = Exhaustion::balls(g, {default_root(g)}, stages);
            GreenReport rep = greens_function(g, default_root(g), ex, p, opts);
            out.update(to_json(rep, g));
            emit(out);
            if (rep.status == GreenReport::Status::Inconclusive && definitive) return 2;
            return 0;
        }

        if (obstacle_cmd->parsed()) {
            if (psi_file.empty()) throw invalid_input("obstacle: need --psi-file");
            std::ifstream in(psi_file);
            if (!in) throw invalid_input("cannot open '" + psi_file + "'");
            std::vector<double> psi(g.size(), 0.0), bnd(g.size(), 0.0);
            std::vector<Vertex> free_set;
            std::string label;
            double value;
            while (in >> label >> value) {
                Vertex x = g.index_of(label);
                psi[x] = value;
                free_set.push_back(x);
            }
            SolverReport rep = solve_obstacle(g, p, free_set, bnd, psi, opts);
            SuperharmonicReport sup = superharmonic_report(g, rep.u, free_set, p, tol);
            json out{{"schema", kReportSchema},
                     {"u", to_json(g, rep.u)},
                     {"energy", p_energy(g, rep.u, p)},
                     {"converged", rep.converged},
                     {"sweeps", rep.sweeps},
                     {"residual", rep.residual},
                     {"superharmonic", sup.superharmonic},
                     {"min_laplacian", sup.min_value}};
            emit(out);
            return rep.converged ? 0 : 1;
        }

        if (khas_cmd->parsed()) {
            std::vector<Vertex> k = k_csv.empty()
                                        ? std::vector<Vertex>{default_root(g)}
                                        : parse_labels(g, k_csv);
            KhasminskiiRun run = khasminskii_potential(
                g, k, p, stages, g.truncated ? g.truncation_radius : target.truncation,
                opts, profile ? &*profile : nullptr);
            json out = to_json(run, g);
            out["schema"] = kReportSchema;
            emit(out);
            if (!csv_file.empty() && profile) {
                std::ofstream csv(csv_file);
                if (!csv) throw invalid_input("cannot write '" + csv_file + "'");
                csv << "r,kappa\n";
                csv.precision(17);
                std::vector<int> radius_of(g.size(), -1);
                std::deque<Vertex> q{k.front()};
                radius_of[k.front()] = 0;
                std::map<int, double> by_radius;
                while (!q.empty()) {
                    Vertex x = q.front();
                    q.pop_front();
                    by_radius.emplace(radius_of[x], run.kappa[x]);
                    for (const Edge& e : g.adj[x])
                        if (radius_of[e.to] < 0) {
                            radius_of[e.to] = radius_of[x] + 1;
                            q.push_back(e.to);
                        }
                }
                for (const auto& [r, kappa] : by_radius) csv << r << ',' << kappa << '\n';
            }
            return run.complete ? 0 : 2;
        }

        if (suite_cmd->parsed()) {
            SuiteConfig config;
            config.stages = stages;
            config.truncation = target.truncation;
            config.solver = opts;
            config.seed = seed;
            auto spec = target.family_spec();
            SuiteReport rep = run_suite(g, spec ? &*spec : nullptr, p, config);
            json out = to_json(rep);
            emit(out);
            if (rep.contradiction) return 1;
            if (rep.final_verdict.label == Label::Inconclusive && definitive) return 2;
            return 0;
        }
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
