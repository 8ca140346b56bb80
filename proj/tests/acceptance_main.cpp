// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion states its tolerance inline.

#include <chrono>
#include <cmath>
#include <deque>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "pgraph/capacity.hpp"
#include "pgraph/dirichlet.hpp"
#include "pgraph/flows.hpp"
#include "pgraph/graph.hpp"
#include "pgraph/khasminskii.hpp"
#include "pgraph/model.hpp"
#include "pgraph/operators.hpp"
#include "pgraph/suite.hpp"

using namespace pgraph;
using test_helpers::random_graph;
using test_helpers::tree_capacity_oracle;

namespace {

int failures = 0;

void report(int k, bool ok, const std::string& what) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << k << ": " << what
              << std::endl;
    if (!ok) ++failures;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<int> bfs_depth(const WeightedGraph& g, Vertex o) {
    std::vector<int> depth(g.size(), -1);
    std::deque<Vertex> q{o};
    depth[o] = 0;
    while (!q.empty()) {
        Vertex x = q.front();
        q.pop_front();
        for (const Edge& e : g.adj[x])
            if (depth[e.to] < 0) {
                depth[e.to] = depth[x] + 1;
                q.push_back(e.to);
            }
    }
    return depth;
}

// 1. Tree Green closed form, radial and generic, under 5 s.
void criterion_1() {
    double t0 = now_seconds();
    bool ok = true;
    std::ostringstream msg;
    auto pr = profile_of(FamilySpec::tree(2), 14);
    for (int r = 0; r <= 10 && ok; ++r) {
        auto green = radial_green(*pr, 2.0, r, 14);
        if (!green || std::abs(green->value - std::pow(2.0, -r)) > 1e-12) {
            ok = false;
            msg << "radial value off at r=" << r;
        }
    }
    if (ok) {
        WeightedGraph g = generate(FamilySpec::tree(2), 12);
        Exhaustion ex = Exhaustion::balls(g, {g.root}, 11);
        GreenReport rep = greens_function(g, g.root, ex, 2.0);
        if (rep.status != GreenReport::Status::Ok) {
            ok = false;
            msg << "generic estimate did not resolve";
        } else {
            std::vector<int> depth = bfs_depth(g, g.root);
            for (Vertex x = 0; x < g.size() && ok; ++x) {
                if (depth[x] > 1) continue;
                double exact = std::pow(2.0, -depth[x]);
                if (std::abs(rep.g[x] - exact) / exact > 1e-3) {
                    ok = false;
                    msg << "generic estimate off at depth " << depth[x];
                }
            }
        }
    }
    double dt = now_seconds() - t0;
    if (dt >= 5.0) {
        ok = false;
        msg << " runtime " << dt << " s >= 5 s";
    }
    report(1, ok,
           "tree Green closed form, radial 1e-12 / generic 1e-3, " +
               std::to_string(dt) + " s" + (ok ? "" : " [" + msg.str() + "]"));
}

// 2. Null-sequence energy identity on Line and AntiTree(r+1).
void criterion_2() {
    bool ok = true;
    std::ostringstream msg;
    struct Fam {
        FamilySpec spec;
        const char* name;
    };
    std::vector<Fam> fams = {{FamilySpec::line(), "line"},
                             {FamilySpec::anti_tree(SequenceSpec::parse("r+1")),
                              "antitree"}};
    const std::vector<int> ns{1, 5, 10, 25, 50};
    for (const Fam& fam : fams) {
        auto pr = profile_of(fam.spec, 60);
        WeightedGraph g = generate(fam.spec, 52);
        std::vector<int> depth = bfs_depth(g, g.root);
        for (double p : {1.5, 2.0, 3.0}) {
            for (int n : ns) {
                // independent oracle: c_n from the boundary areas directly
                KahanSum s;
                for (int r = 0; r <= n; ++r)
                    s.add(std::pow(pr->boundary_area[r], -1.0 / (p - 1.0)));
                double oracle = std::pow(1.0 / s.value(), p - 1.0);
                RadialNullTerm term = radial_null_sequence(*pr, p, n);
                std::vector<double> e(g.size(), 0.0);
                for (Vertex x = 0; x < g.size(); ++x)
                    if (depth[x] <= n + 1) e[x] = term.values[depth[x]];
                double graph_energy = p_energy(g, e, p);
                if (std::abs(term.energy - oracle) > 1e-12 ||
                    std::abs(graph_energy - term.energy) > 1e-12) {
                    ok = false;
                    msg << " " << fam.name << " p=" << p << " n=" << n;
                }
            }
        }
    }
    report(2, ok,
           "null-sequence energy = c_n^{p-1} to 1e-12, radial vs graph" +
               msg.str());
}

// 3. Capacity limits with closed-form oracles.
void criterion_3() {
    bool ok = true;
    std::ostringstream msg;
    {
        WeightedGraph g = generate(FamilySpec::tree(2), 16);
        Exhaustion ex = Exhaustion::balls(g, {g.root}, 15);
        PotentialSequence seq = capacity_limit(g, {g.root}, ex, 2.0);
        for (size_t n = 0; n < seq.stages.size(); ++n)
            if (std::abs(seq.stages[n].cap - tree_capacity_oracle(2, n)) > 1e-8) {
                ok = false;
                msg << " tree stage " << n;
            }
        if (std::abs(seq.extrapolated_limit - 1.0) > 1e-3) {
            ok = false;
            msg << " tree limit " << seq.extrapolated_limit;
        }
    }
    {
        WeightedGraph g = generate(FamilySpec::line(), 32);
        Exhaustion ex = Exhaustion::balls(g, {g.root}, 30);
        PotentialSequence seq = capacity_limit(g, {g.root}, ex, 2.0);
        for (size_t n = 0; n < seq.stages.size(); ++n)
            if (std::abs(seq.stages[n].cap - 1.0 / (n + 1)) > 1e-8) {
                ok = false;
                msg << " line stage " << n;
            }
    }
    report(3, ok, "capacity limits: tree (1-2^{-(n+1)})^{-1}, line 1/(n+1), 1e-8" +
                      msg.str());
}

// 4. Classification matrix.
void criterion_4() {
    bool ok = true;
    std::ostringstream msg;
    {
        WeightedGraph star = generate(FamilySpec::star(), 40);
        for (double p : {1.5, 2.0, 3.0})
            if (classify(star, star.root, p).label != Label::Parabolic) {
                ok = false;
                msg << " star p=" << p;
            }
    }
    {
        FamilySpec spec = FamilySpec::tree(2);
        auto pr = profile_of(spec, 30);
        WeightedGraph g = generate(spec, 6);
        for (double p : {1.5, 2.0, 3.0})
            if (classify(g, g.root, p, {}, &*pr).label != Label::Hyperbolic) {
                ok = false;
                msg << " tree p=" << p;
            }
    }
    {
        FamilySpec spec = FamilySpec::anti_tree(SequenceSpec::parse("r+1"));
        auto pr = profile_of(spec, 210);
        if (classify_radial(*pr, 2.0).label != Label::Hyperbolic) {
            ok = false;
            msg << " antitree p=2";
        }
        if (classify_radial(*pr, 3.0).label != Label::Parabolic) {
            ok = false;
            msg << " antitree p=3";
        }
        if (!(radial_null_sequence(*pr, 3.0, 200).energy < 0.05)) {
            ok = false;
            msg << " antitree p=3 cap at n=200";
        }
    }
    {
        FamilySpec spec = FamilySpec::weighted_line(SequenceSpec::parse("(n+1)^2"));
        auto pr = profile_of(spec, 30);
        if (classify_radial(*pr, 2.0).label != Label::Hyperbolic) {
            ok = false;
            msg << " weighted line p=2";
        }
    }
    {
        FamilySpec spec = FamilySpec::lattice(2);
        WeightedGraph g = generate(spec, 10);
        SuiteConfig config;
        config.stages = 8;
        config.subadditivity_trials = 5;
        SuiteReport rep = run_suite(g, &spec, 2.0, config);
        bool decreasing = false;
        for (const SuiteSection& s : rep.sections)
            if (s.name == "capacity")
                decreasing = s.details.at("strictly_decreasing").get<bool>();
        if (rep.contradiction || !decreasing ||
            rep.expected_annotation != "parabolic (theory)") {
            ok = false;
            msg << " lattice exemption";
        }
    }
    report(4, ok, "classification matrix incl. anti-tree dichotomy and Z^2 exemption" +
                      msg.str());
}

// 5. Identity batteries on 200 fuzzed graphs.
void criterion_5() {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::vector<double> ps{1.3, 2.0, 3.5};
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        WeightedGraph g = random_graph(rng, 30, t % 2 == 0);
        double p = ps[t % 3];
        std::vector<double> f(g.size()), phi(g.size());
        for (auto& v : f) v = unit(rng);
        for (auto& v : phi) v = unit(rng);
        std::vector<Vertex> all(g.size());
        for (Vertex x = 0; x < g.size(); ++x) all[x] = x;
        worst = std::max(worst, std::abs(greens_formula_residual(g, f, phi, all, p)));
        worst = std::max(worst,
                         std::abs(flow_greens_residual(g, gradient_flow(g, f, p), phi)));
    }
    report(5, worst < 1e-10,
           "identity batteries on 200 graphs, worst residual " + std::to_string(worst));
}

// 6. Capacity lemma properties on 100 (K,V) pairs per p.
void criterion_6() {
    bool ok = true;
    std::ostringstream msg;
    const double slack = 1e-9;  // 10 * default solver tol
    std::mt19937 rng(202);
    for (double p : {1.5, 2.0, 3.0}) {
        for (int t = 0; t < 100 && ok; ++t) {
            WeightedGraph g = random_graph(rng, 12);
            int n = g.size();
            std::uniform_int_distribution<int> pick(0, n - 1);
            std::set<Vertex> k1{pick(rng)}, k2{pick(rng)};
            if (pick(rng) % 2) k1.insert(pick(rng));
            std::set<Vertex> vs(k1);
            vs.insert(k2.begin(), k2.end());
            for (Vertex x : ball(g, {pick(rng)}, 1)) vs.insert(x);
            std::vector<Vertex> v1(vs.begin(), vs.end());
            vs.insert(pick(rng));
            std::vector<Vertex> v2(vs.begin(), vs.end());
            auto cap_of = [&](const std::set<Vertex>& k, const std::vector<Vertex>& v) {
                return capacity(g, {k.begin(), k.end()}, v, p).value;
            };
            std::set<Vertex> k12(k1);
            k12.insert(k2.begin(), k2.end());
            double c11 = cap_of(k1, v1), c12 = cap_of(k1, v2);
            double c22 = cap_of(k2, v2), cu2 = cap_of(k12, v2);
            if (c11 < c12 - slack) ok = false;              // monotone in V
            if (c12 > cu2 + slack) ok = false;              // monotone in K
            if (cu2 > c12 + c22 + slack) ok = false;        // subadditive
            // boundary-determined: interior vertices of a solid K are inert
            std::vector<Vertex> solid = ball(g, {0}, 1);
            std::set<Vertex> in_solid(solid.begin(), solid.end());
            std::vector<Vertex> shell;
            for (Vertex x : solid) {
                bool interior = true;
                for (const Edge& e : g.adj[x])
                    if (!in_solid.count(e.to)) interior = false;
                if (!interior) shell.push_back(x);
            }
            if (!shell.empty() && static_cast<int>(solid.size()) < n) {
                std::vector<Vertex> all(g.size());
                for (Vertex x = 0; x < g.size(); ++x) all[x] = x;
                all.pop_back();
                std::set<Vertex> va(all.begin(), all.end());
                for (Vertex x : solid) va.insert(x);
                std::vector<Vertex> v_all(va.begin(), va.end());
                if (static_cast<int>(v_all.size()) < n) {
                    double a = capacity(g, solid, v_all, p).value;
                    double b = capacity(g, shell, v_all, p).value;
                    if (std::abs(a - b) > slack) ok = false;
                }
            }
            if (!ok) msg << " p=" << p << " trial " << t;
        }
    }
    report(6, ok, "capacity lemma (monotone, subadditive, boundary-determined) at 1e-9" +
                      msg.str());
}

// 7. Comparison principle with per-component dichotomy.
void criterion_7() {
    bool ok = true;
    std::ostringstream msg;
    std::mt19937 rng(303);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<double> ps{1.5, 2.0, 3.0};
    for (int t = 0; t < 100 && ok; ++t) {
        WeightedGraph g = random_graph(rng, 14);
        double p = ps[t % 3];
        bool equal_case = t % 4 == 0;
        std::vector<double> bu(g.size()), bv(g.size());
        for (Vertex x = 0; x < g.size(); ++x) {
            bu[x] = unit(rng);
            bv[x] = equal_case ? bu[x] : bu[x] + 0.1 + unit(rng);
        }
        std::vector<Vertex> free_set;
        for (Vertex x = 1; x + 1 < g.size(); ++x) free_set.push_back(x);
        if (free_set.empty()) continue;
        SolverReport ru = solve_dirichlet(DirichletProblem{g, p, free_set, bu});
        SolverReport rv = solve_dirichlet(DirichletProblem{g, p, free_set, bv});
        for (Vertex x = 0; x < g.size(); ++x)
            if (ru.u[x] > rv.u[x] + 1e-9) ok = false;
        // dichotomy per free component: identically equal or strictly below
        std::vector<char> is_free(g.size(), 0), seen(g.size(), 0);
        for (Vertex x : free_set) is_free[x] = 1;
        for (Vertex s : free_set) {
            if (seen[s]) continue;
            std::deque<Vertex> q{s};
            seen[s] = 1;
            double lo = 1e300, hi = -1e300;
            while (!q.empty()) {
                Vertex x = q.front();
                q.pop_front();
                lo = std::min(lo, rv.u[x] - ru.u[x]);
                hi = std::max(hi, rv.u[x] - ru.u[x]);
                for (const Edge& e : g.adj[x])
                    if (is_free[e.to] && !seen[e.to]) {
                        seen[e.to] = 1;
                        q.push_back(e.to);
                    }
            }
            bool identical = hi <= 1e-8;
            bool strict = lo > 1e-10;
            if (equal_case ? !identical : !(identical || strict)) ok = false;
        }
        if (!ok) msg << " trial " << t;
    }
    report(7, ok, "comparison principle, 100 ordered pairs, dichotomy per component" +
                      msg.str());
}

// 8. Obstacle solver against multi-resolution grid search.
void criterion_8() {
    bool ok = true;
    std::ostringstream msg;
    std::mt19937 rng(404);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<double> ps{1.5, 2.0, 3.0};
    for (int t = 0; t < 50 && ok; ++t) {
        WeightedGraph g = random_graph(rng, 8);
        double p = ps[t % 3];
        int n_free = 2 + static_cast<int>(unit(rng) * 3.0);
        n_free = std::min(n_free, g.size() - 1);
        std::vector<Vertex> free_set;
        for (Vertex x = 1; x <= n_free; ++x) free_set.push_back(x);
        std::vector<double> boundary(g.size()), psi(g.size());
        for (Vertex x = 0; x < g.size(); ++x) {
            boundary[x] = unit(rng);
            psi[x] = unit(rng) - 0.5;
        }
        SolverReport rep = solve_obstacle(g, p, free_set, boundary, psi);
        if (!rep.converged) {
            ok = false;
            msg << " solver did not converge, trial " << t;
            break;
        }
        double solver_energy = p_energy(g, rep.u, p);
        // multi-resolution grid: 11 points per dim, refine to step <= 1e-3
        double hi_all = 0.0;
        for (Vertex x = 0; x < g.size(); ++x)
            hi_all = std::max({hi_all, boundary[x], psi[x]});
        size_t d = free_set.size();
        std::vector<double> lo(d), hi(d);
        for (size_t i = 0; i < d; ++i) {
            lo[i] = psi[free_set[i]];
            hi[i] = std::max(hi_all, lo[i]);
        }
        std::vector<double> u = rep.u, best(d), pt(d);
        double best_energy = 1e300;
        double step = 0.0;
        for (int round = 0; round < 12; ++round) {
            std::vector<double> cand(d);
            std::vector<int> idx(d, 0);
            step = 0.0;
            for (size_t i = 0; i < d; ++i) step = std::max(step, (hi[i] - lo[i]) / 10.0);
            while (true) {
                for (size_t i = 0; i < d; ++i) {
                    cand[i] = lo[i] + idx[i] * (hi[i] - lo[i]) / 10.0;
                    u[free_set[i]] = cand[i];
                }
                double e = p_energy(g, u, p);
                if (e < best_energy) {
                    best_energy = e;
                    best = cand;
                }
                size_t j = 0;
                while (j < d && ++idx[j] > 10) idx[j++] = 0;
                if (j == d) break;
            }
            if (step <= 1e-3) break;
            for (size_t i = 0; i < d; ++i) {
                double half = (hi[i] - lo[i]) / 10.0;
                lo[i] = std::max(psi[free_set[i]], best[i] - half);
                hi[i] = best[i] + half;
            }
        }
        if (step > 1e-3) {
            ok = false;
            msg << " grid did not refine, trial " << t;
        }
        if (best_energy < solver_energy - 1e-9 ||
            best_energy - solver_energy > 1e-4) {
            ok = false;
            msg << " energy gap " << (best_energy - solver_energy) << ", trial " << t;
        }
        // p < 2 keeps a kink-limited operator floor ~ b * sqrt(ulp)
        double sh_tol = p < 2.0 ? 5e-7 : 1e-8;
        if (!superharmonic_report(g, rep.u, free_set, p, sh_tol).superharmonic) {
            ok = false;
            msg << " not superharmonic, trial " << t;
        }
        // minimality fuzz: feasible perturbations never do better
        for (int s = 0; s < 20; ++s) {
            std::vector<double> candu = rep.u;
            for (Vertex x : free_set)
                candu[x] = std::max(psi[x], candu[x] + 0.2 * (unit(rng) - 0.5));
            if (p_energy(g, candu, p) < solver_energy - 1e-10) {
                ok = false;
                msg << " minimality, trial " << t;
            }
        }
    }
    report(8, ok, "obstacle solver vs grid search (gap <= 1e-4), minimality fuzz" +
                      msg.str());
}

// 9. Khasminskii construction on the line, truncation 400, 4 stages.
void criterion_9() {
    double t0 = now_seconds();
    bool ok = true;
    std::ostringstream msg;
    FamilySpec spec = FamilySpec::line();
    auto pr = profile_of(spec, 800);
    WeightedGraph g = generate(spec, 400);
    KhasminskiiRun run =
        khasminskii_potential(g, {g.root}, 2.0, 4, 400, SolverOptions{}, &*pr);
    if (!run.complete) {
        ok = false;
        msg << " incomplete: " << run.diagnostic;
    } else {
        if (std::abs(run.kappa[g.root]) > 1e-12) {
            ok = false;
            msg << " kappa nonzero on K";
        }
        if (run.superharmonic_min < -1e-8) {
            ok = false;
            msg << " superharmonic violation " << run.superharmonic_min;
        }
        for (const KhasminskiiStage& st : run.stages) {
            if (!st.certified || !(st.grad_increment < std::pow(2.0, -st.n))) {
                ok = false;
                msg << " stage " << st.n << " gradient";
            }
            // kappa clears n+1 outside the accepted level set X_{j_bar + 1}
            for (Vertex x = 0; x < g.size(); ++x)
                if (x != g.root && run.f.f[x] >= st.j_bar + 1.0 &&
                    run.kappa[x] < st.n + 1.0 - 1e-9) {
                    ok = false;
                    msg << " stage " << st.n << " growth";
                    break;
                }
        }
    }
    double dt = now_seconds() - t0;
    if (dt >= 60.0) {
        ok = false;
        msg << " runtime " << dt << " s >= 60 s";
    }
    report(9, ok,
           "Khasminskii potential on the line, 4 stages, " + std::to_string(dt) +
               " s" + msg.str());
}

// 10. KNR flow certificate on the binary tree.
void criterion_10() {
    WeightedGraph g = generate(FamilySpec::tree(2), 4);
    Exhaustion ex = Exhaustion::balls(g, {g.root}, 3);
    KnrCertificate cert = knr_certificate(g, g.root, ex, 2.0);
    bool ok = std::abs(cert.root_mass - 16.0 / 15.0) <= 1e-6 &&
              std::abs(cert.total_mass) <= 1e-12;
    report(10, ok,
           "KNR certificate: o-mass " + std::to_string(cert.root_mass) +
               ", total " + std::to_string(cert.total_mass));
}

// 11. Ahlfors counterexample on the binary tree.
void criterion_11() {
    WeightedGraph g = generate(FamilySpec::tree(2), 12);
    Exhaustion ex = Exhaustion::balls(g, {g.root}, 11);
    GreenReport green = greens_function(g, g.root, ex, 2.0);
    bool ok = green.status == GreenReport::Status::Ok;
    double sup_b = 1e300, sup_c = 0.0;
    bool sub = false;
    if (ok) {
        std::vector<double> u(g.size());
        for (Vertex x = 0; x < g.size(); ++x)
            u[x] = 1.0 - green.g[x] / green.value_at_root;
        FiniteRegion reg;
        for (Vertex x = 0; x < g.size(); ++x)
            if (x != g.root && !g.frontier[x]) reg.inner.push_back(x);
        reg.exterior_boundary = {g.root};
        reg.closure = reg.inner;
        reg.closure.push_back(g.root);
        std::sort(reg.closure.begin(), reg.closure.end());
        AhlforsReport rep = ahlfors_check(g, u, reg, 2.0, 1e-8);
        sup_b = rep.sup_boundary;
        sup_c = rep.sup_closure;
        sub = rep.subharmonic_on_v;
        ok = std::abs(sup_b) <= 1e-12 && sup_c >= 0.5 && sub && !rep.boundary_attains;
    }
    report(11, ok,
           "Ahlfors counterexample: boundary sup " + std::to_string(sup_b) +
               ", interior sup " + std::to_string(sup_c) +
               (sub ? ", subharmonic" : ", not subharmonic"));
}

}  // namespace

int main() {
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9();
        criterion_10();
        criterion_11();
    } catch (const std::exception& e) {
        std::cout << "FAIL: unexpected exception: " << e.what() << std::endl;
        return 1;
    }
    return failures == 0 ? 0 : 1;
}
