#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pgraph/capacity.hpp"
#include "pgraph/dirichlet.hpp"
#include "pgraph/graph.hpp"
#include "pgraph/model.hpp"

namespace pgraph {

// --- weak maximum principle probe -----------------------------------------

struct WeakMaxReport {
    double sup = 0.0;           // sup of Delta_p u over the superlevel set {u > gamma}
    Vertex witness = -1;
    bool escapes = false;       // the superlevel set touches the truncation frontier
    long level_set_size = 0;
};

// The weak maximum principle asks sup_{u > gamma} Delta_p u > 0 for every
// bounded-above nonconstant u. A certified violation witnesses
// hyperbolicity.
inline WeakMaxReport weak_max_check(const WeightedGraph& g, const std::vector<double>& u,
                                    double gamma, double p) {
    double lo = u[0], hi = u[0];
    for (double v : u) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) throw invalid_input("weak_max_check: u is constant");
    if (!(gamma < hi)) throw invalid_input("weak_max_check: gamma not below sup u");

    WeakMaxReport rep;
    bool first = true;
    for (Vertex x = 0; x < g.size(); ++x) {
        if (!(u[x] > gamma)) continue;
        ++rep.level_set_size;
        if (g.truncated && g.frontier[x]) rep.escapes = true;
        double v = p_laplacian(g, u, x, p);
        if (first || v > rep.sup) {
            rep.sup = v;
            rep.witness = x;
            first = false;
        }
    }
    if (first) throw invalid_input("weak_max_check: superlevel set is empty");
    return rep;
}

// --- Ahlfors boundary maximum probe ---------------------------------------

struct AhlforsReport {
    double sup_closure = 0.0;    // sup over V u d_e V
    double sup_boundary = 0.0;   // sup over d_e V
    bool subharmonic_on_v = false;  // Delta_p u >= -tol on V
    double worst_laplacian = 0.0;
    bool boundary_attains = false;  // sup_closure <= sup_boundary + tol
};

// Parabolic expectation: a bounded p-subharmonic function attains its sup
// on the exterior boundary of any proper subset.
inline AhlforsReport ahlfors_check(const WeightedGraph& g, const std::vector<double>& u,
                                   const FiniteRegion& reg, double p, double tol = 1e-10) {
    if (reg.exterior_boundary.empty())
        throw invalid_input("ahlfors_check: exterior boundary is empty");
    AhlforsReport rep;
    bool first = true;
    for (Vertex x : reg.closure) {
        if (first) {
            rep.sup_closure = u[x];
            first = false;
        }
        rep.sup_closure = std::max(rep.sup_closure, u[x]);
    }
    rep.sup_boundary = u[reg.exterior_boundary.front()];
    for (Vertex x : reg.exterior_boundary) rep.sup_boundary = std::max(rep.sup_boundary, u[x]);
    // subharmonic means Delta_p u <= 0 on V
    double max_lap = -std::numeric_limits<double>::infinity();
    for (Vertex x : reg.inner) max_lap = std::max(max_lap, p_laplacian(g, u, x, p));
    rep.worst_laplacian = max_lap;
    rep.subharmonic_on_v = max_lap <= tol;
    rep.boundary_attains = rep.sup_closure <= rep.sup_boundary + tol;
    return rep;
}

// --- exhaustion functions -------------------------------------------------

struct ExhaustionFunction {
    std::vector<double> f;          // 0 on K, >= k off the k-th term's stage
    std::vector<int> term_stages;   // increasing stage indices n_1 < n_2 < ...
    std::vector<double> term_energies;
    double sum_energy_norms = 0.0;  // sum of E_p(e_n)^{1/p} over the terms
    double energy_bound = 0.0;      // (sum of norms)^p, Minkowski bound
    double energy = 0.0;            // E_p(f) on the truncation
    double min_on_frontier = 0.0;
};

// f = sum over a chosen window of stages of (1 - e_n), where e_n are the
// equilibrium potentials of K. Each term vanishes on K and equals 1 off its
// stage, so f >= k outside the k-th chosen stage. The window sits at the
// top of the available stages: dense high-index terms give f a useful
// growth rate per unit of truncation, at a recorded energy budget.
inline ExhaustionFunction exhaustion_function(const WeightedGraph& g,
                                              const std::vector<Vertex>& k_set, double p,
                                              int budget,
                                              const RadialProfile* profile = nullptr,
                                              const SolverOptions& opts = {}) {
    ExhaustionFunction out;
    out.f.assign(g.size(), 0.0);

    if (profile != nullptr) {
        // model-graph route: radial stage potentials in closed form
        if (k_set.size() != 1)
            throw invalid_input("exhaustion_function: radial route needs a single root");
        Vertex o = k_set.front();
        std::vector<int> radius(g.size(), -1);
        {
            std::deque<Vertex> q{o};
            radius[o] = 0;
            while (!q.empty()) {
                Vertex x = q.front();
                q.pop_front();
                for (const Edge& e : g.adj[x])
                    if (radius[e.to] < 0) {
                        radius[e.to] = radius[x] + 1;
                        q.push_back(e.to);
                    }
            }
        }
        int max_r = *std::max_element(radius.begin(), radius.end());
        int top = std::min({budget, max_r, profile->max_radius}) - 1;
        int lo = std::max(1, top / 4);
        KahanSum norms;
        for (int n = lo; n <= top; ++n) {
            RadialNullTerm term = radial_null_sequence(*profile, p, n);
            out.term_stages.push_back(n);
            out.term_energies.push_back(term.energy);
            norms.add(std::pow(term.energy, 1.0 / p));
            for (Vertex x = 0; x < g.size(); ++x) {
                int r = radius[x];
                double e = r <= n + 1 ? term.values[r] : 0.0;
                out.f[x] += 1.0 - e;
            }
        }
        out.sum_energy_norms = norms.value();
    } else {
        Exhaustion ex = Exhaustion::balls(g, k_set, budget);
        PotentialSequence seq = capacity_limit(g, k_set, ex, p, opts);
        int top = static_cast<int>(seq.stages.size()) - 1;
        int lo = std::max(1, top / 4);
        KahanSum norms;
        for (int n = lo; n <= top; ++n) {
            const PotentialStage& st = seq.stages[n];
            out.term_stages.push_back(n);
            out.term_energies.push_back(st.cap);
            norms.add(std::pow(st.cap, 1.0 / p));
            for (Vertex x = 0; x < g.size(); ++x) out.f[x] += 1.0 - st.u[x];
        }
        out.sum_energy_norms = norms.value();
    }
    if (out.term_stages.empty())
        throw invalid_input("exhaustion_function: budget too small, no stages available");
    out.energy_bound = std::pow(out.sum_energy_norms, p);
    out.energy = p_energy(g, out.f, p);
    out.min_on_frontier = std::numeric_limits<double>::infinity();
    if (g.truncated)
        for (Vertex x = 0; x < g.size(); ++x)
            if (g.frontier[x]) out.min_on_frontier = std::min(out.min_on_frontier, out.f[x]);
    return out;
}

// --- the Khas'minskii potential -------------------------------------------

struct KhasminskiiStage {
    int n = 0;
    long j_bar = -1;             // accepted j, power of two
    double sup_dev = 0.0;        // sup over X_{n+1} of |h_j - s|, target 2^{-n-1}
    double grad_increment = 0.0;  // ||grad(s_+ - s)||_{p,b}, target 2^{-n}
    double annulus_norm = 0.0;   // same norm over frontier-incident edges, reported apart
    bool certified = false;
    std::vector<long> tried;     // j values attempted
    std::vector<double> rho_sup;  // sup deviation per attempt (decreasing in j)
    long sweeps = 0;
};

struct KhasminskiiRun {
    std::vector<Vertex> k_set;
    ExhaustionFunction f;
    std::vector<double> kappa;   // final s_N
    std::vector<KhasminskiiStage> stages;
    int truncation = 0;
    bool complete = false;
    std::string diagnostic;
    bool monotone = true;            // s_n <= s_{n+1} within 10 tol
    double superharmonic_min = 0.0;  // min of m Delta_p kappa off K (interior)
    double max_on_k = 0.0;           // kappa restricted to K
};

// Constructive potential of the parabolic case: iterated obstacle problems
// with obstacle psi_j = s + (f/j ^ 1), stage accepted at the first
// j = 1,2,4,... passing both stopping tests. Stages are indexed by the
// level sets X_n = {f < n} u K of the exhaustion function. If the
// truncation is exhausted before a stage certifies, the partial run is
// returned with a diagnostic.
inline KhasminskiiRun khasminskii_potential(const WeightedGraph& g,
                                            const std::vector<Vertex>& k_set, double p,
                                            int n_stages, int truncation,
                                            const SolverOptions& opts = {},
                                            const RadialProfile* profile = nullptr) {
    for (Vertex x : k_set) g.check_vertex(x);
    if (k_set.empty()) throw invalid_input("khasminskii_potential: K is empty");

    {
        Verdict v = profile ? classify_radial(*profile, p)
                            : classify(g, k_set.front(), p);
        if (v.label == Label::Hyperbolic)
            throw invalid_input("khasminskii_potential: graph is hyperbolic");
        if (v.label == Label::Inconclusive)
            throw invalid_input(
                "khasminskii_potential: parabolicity not established; refusing to build");
    }

    KhasminskiiRun run;
    run.k_set = k_set;
    run.truncation = truncation;
    run.f = exhaustion_function(g, k_set, p, truncation, profile, opts);
    const std::vector<double>& f = run.f.f;

    std::vector<char> in_k(g.size(), 0);
    for (Vertex x : k_set) in_k[x] = 1;
    auto in_stage = [&](Vertex x, double level) { return in_k[x] || f[x] < level; };

    double slack = 10.0 * opts.tol;
    std::vector<double> s(g.size(), 0.0);

    for (int n = 0; n < n_stages; ++n) {
        KhasminskiiStage stage;
        stage.n = n;
        double target_sup = std::pow(2.0, -n - 1);
        double target_grad = std::pow(2.0, -n);

        for (long j = 1;; j *= 2) {
            // the level set X_{j+1} = {f < j+1} u K must stay clear of the
            // truncation frontier, otherwise the obstacle problem is not the
            // one posed on the infinite graph
            bool hits_frontier = false;
            for (Vertex x = 0; x < g.size(); ++x)
                if (g.truncated && g.frontier[x] && in_stage(x, j + 1.0))
                    hits_frontier = true;
            if (hits_frontier) {
                run.diagnostic = "stage " + std::to_string(n) +
                                 ": truncation too small to certify j (reached j = " +
                                 std::to_string(j) + ")";
                break;
            }
            // the extension by n+1 outside X_{j+1} needs s = n there
            bool s_flat_outside = true;
            for (Vertex x = 0; x < g.size(); ++x)
                if (!in_stage(x, j + 1.0) && std::abs(s[x] - n) > slack)
                    s_flat_outside = false;
            if (!s_flat_outside) {
                stage.tried.push_back(j);
                stage.rho_sup.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }

            std::vector<Vertex> free_set;
            std::vector<double> bnd(g.size(), n + 1.0), psi(g.size(), 0.0);
            for (Vertex x = 0; x < g.size(); ++x) {
                if (in_k[x])
                    bnd[x] = s[x];
                else if (in_stage(x, j + 1.0))
                    free_set.push_back(x);
                psi[x] = s[x] + std::min(f[x] / j, 1.0);
            }
            SolverReport rep = solve_obstacle(g, p, free_set, bnd, psi, opts);
            stage.sweeps += rep.sweeps;
            stage.tried.push_back(j);

            double sup_dev = 0.0;
            for (Vertex x = 0; x < g.size(); ++x)
                if (in_stage(x, n + 1.0)) sup_dev = std::max(sup_dev, std::abs(rep.u[x] - s[x]));
            stage.rho_sup.push_back(sup_dev);

            // ||grad(h - s)||_{p,b}; frontier-incident edges kept apart
            KahanSum core, annulus;
            for (Vertex x = 0; x < g.size(); ++x)
                for (const Edge& e : g.adj[x]) {
                    if (e.to <= x) continue;
                    double d = std::abs((rep.u[x] - s[x]) - (rep.u[e.to] - s[e.to]));
                    if (d == 0.0) continue;
                    bool frontier_edge =
                        g.truncated && (g.frontier[x] || g.frontier[e.to]);
                    (frontier_edge ? annulus : core).add(e.b * std::pow(d, p));
                }
            double grad = std::pow(core.value(), 1.0 / p);

            bool whole_graph =
                static_cast<long>(free_set.size()) + static_cast<long>(k_set.size()) >=
                g.size();
            if (sup_dev < target_sup && grad < target_grad) {
                stage.j_bar = j;
                stage.sup_dev = sup_dev;
                stage.grad_increment = grad;
                stage.annulus_norm = std::pow(annulus.value(), 1.0 / p);
                stage.certified = true;
                for (Vertex x = 0; x < g.size(); ++x) {
                    if (rep.u[x] < s[x] - slack) run.monotone = false;
                    s[x] = std::max(s[x], rep.u[x]);
                }
                break;
            }
            if (whole_graph) {
                // no larger stage available on an untruncated graph
                run.diagnostic = "stage " + std::to_string(n) +
                                 ": graph exhausted before the stopping tests passed";
                break;
            }
        }
        bool ok = stage.certified;
        run.stages.push_back(std::move(stage));
        if (!ok) {
            run.kappa = s;
            run.complete = false;
            return run;
        }
    }

    run.kappa = s;
    run.complete = true;
    {
        bool first = true;
        for (Vertex x = 0; x < g.size(); ++x) {
            if (in_k[x]) {
                run.max_on_k = std::max(run.max_on_k, std::abs(s[x]));
                continue;
            }
            if (g.truncated && g.frontier[x]) continue;
            double v = g.m[x] * p_laplacian(g, s, x, p);
            if (first || v < run.superharmonic_min) run.superharmonic_min = v;
            first = false;
        }
    }
    return run;
}

}  // namespace pgraph
