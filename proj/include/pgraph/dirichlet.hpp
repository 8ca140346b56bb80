#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "pgraph/graph.hpp"
#include "pgraph/operators.hpp"

namespace pgraph {

struct SolverOptions {
    double tol = 1e-10;
    long max_sweeps = 1000000;
};

struct SolverReport {
    std::vector<double> u;
    long sweeps = 0;
    double residual = 0.0;     // max |sum_y b<u(x)-u(y)> + c<u(x)>| over free vertices
    double last_change = 0.0;  // max coordinate change in the final sweep
    bool converged = false;
    bool stagnated = false;    // updates stopped moving before the residual target
};

// Dirichlet problem for L_p on a finite graph: solve L_p u = 0 on `free_set`
// with u prescribed elsewhere by `boundary`. Optionally constrained from
// below by an obstacle psi, giving the smallest supersolution above psi
// (obstacle problem / reduite).
struct DirichletProblem {
    const WeightedGraph& g;
    double p;
    std::vector<Vertex> free_set;
    std::vector<double> boundary;            // dense; read outside free_set
    const std::vector<double>* obstacle = nullptr;  // dense lower bound, optional
    const std::vector<double>* init = nullptr;      // warm start on the free set
};

namespace detail {

// Scalar equation of one Gauss-Seidel step at x:
//   phi(t) = sum_y b(x,y) <t - u(y)> + c(x) <t> = 0,
// strictly increasing in t, unique root inside [min(0,min u), max(0,max u)]
// over the neighbors (0 enters only when c > 0).
inline double coordinate_root(const WeightedGraph& g, const std::vector<double>& u,
                              Vertex x, double p) {
    const auto& row = g.adj[x];
    if (row.empty()) return 0.0;
    double cx = g.c[x];

    if (p == 2.0) {  // linear case, closed form
        KahanSum num, den;
        for (const Edge& e : row) {
            num.add(e.b * u[e.to]);
            den.add(e.b);
        }
        return num.value() / (den.value() + cx);
    }

    double lo = u[row[0].to], hi = lo;
    for (const Edge& e : row) {
        lo = std::min(lo, u[e.to]);
        hi = std::max(hi, u[e.to]);
    }
    if (cx > 0.0) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
    }
    if (lo == hi) return lo;
    auto phi = [&](double t) {
        KahanSum s;
        for (const Edge& e : row) s.add(e.b * signed_power(t - u[e.to], p));
        if (cx > 0.0) s.add(cx * signed_power(t, p));
        return s.value();
    };
    // 200 halvings drive the bracket below one ulp of its endpoints
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Joint shift of a cluster C of free vertices: minimize the energy over
// u + s 1_C. Internal edge terms cancel pairwise, leaving
//   phi(s) = sum_{x in C} [ sum_{y outside C} b(x,y) <u(x)+s-u(y)> + c(x) <u(x)+s> ].
// Needed for p < 2: coordinate descent jams when neighbors clump onto a
// kink of |u(x)-u(y)|^p, while the cluster as a whole is still not optimal.
inline double cluster_shift(const WeightedGraph& g, const std::vector<double>& u,
                            const std::vector<Vertex>& cluster,
                            const std::vector<char>& in_cluster, double p) {
    double lo = 0.0, hi = 0.0;
    bool have = false;
    for (Vertex x : cluster) {
        for (const Edge& e : g.adj[x]) {
            if (in_cluster[e.to]) continue;
            double s = u[e.to] - u[x];
            if (!have) { lo = hi = s; have = true; }
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        if (g.c[x] > 0.0) {
            lo = std::min(lo, -u[x]);
            hi = std::max(hi, -u[x]);
        }
    }
    if (!have || lo == hi) return have ? lo : 0.0;
    auto phi = [&](double s) {
        KahanSum acc;
        for (Vertex x : cluster) {
            for (const Edge& e : g.adj[x]) {
                if (in_cluster[e.to]) continue;
                acc.add(e.b * signed_power(u[x] + s - u[e.to], p));
            }
            if (g.c[x] > 0.0) acc.add(g.c[x] * signed_power(u[x] + s, p));
        }
        return acc.value();
    };
    if (phi(lo) >= 0.0) return lo;
    if (phi(hi) <= 0.0) return hi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Nonlinear Gauss-Seidel with per-coordinate exact (bracketed) solves, free
// vertices swept in canonical index order. Converges monotonically for the
// p-Laplacian because each update minimizes the energy in one coordinate.
inline SolverReport solve_dirichlet(const DirichletProblem& prob,
                                    const SolverOptions& opts = {}) {
    const WeightedGraph& g = prob.g;
    if (!(prob.p > 1.0)) throw invalid_input("solve_dirichlet: p must be > 1");
    if (static_cast<int>(prob.boundary.size()) != g.size())
        throw invalid_input("solve_dirichlet: boundary data has wrong size");
    if (prob.obstacle && static_cast<int>(prob.obstacle->size()) != g.size())
        throw invalid_input("solve_dirichlet: obstacle has wrong size");

    std::vector<char> is_free(g.size(), 0);
    std::vector<Vertex> order = prob.free_set;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    for (Vertex x : order) {
        g.check_vertex(x);
        is_free[x] = 1;
    }

    SolverReport rep;
    rep.u = prob.boundary;
    if (prob.init)
        for (Vertex x : order) rep.u[x] = (*prob.init)[x];
    if (prob.obstacle)
        for (Vertex x : order) rep.u[x] = std::max(rep.u[x], (*prob.obstacle)[x]);

    auto operator_at = [&](Vertex x, double t) {
        KahanSum s;
        for (const Edge& e : g.adj[x]) s.add(e.b * signed_power(t - rep.u[e.to], prob.p));
        if (g.c[x] > 0.0) s.add(g.c[x] * signed_power(t, prob.p));
        return s.value();
    };
    auto residual_at = [&](Vertex x) {
        double r = operator_at(x, rep.u[x]);
        if (prob.obstacle) {
            // complementarity: off contact |L u| small, on contact L u >= 0
            if (rep.u[x] - (*prob.obstacle)[x] <= opts.tol) return std::max(0.0, -r);
        }
        return std::abs(r);
    };
    // For p < 2 the scalar equation has kinks at the neighbor values, where
    // the attainable residual has a floor above any fixed tolerance. A sign
    // change of the operator across one ulp of the iterate certifies the
    // coordinate root exactly, so accept it in place of the magnitude test.
    auto optimal_at = [&](Vertex x) {
        double t = rep.u[x];
        double h = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(t));
        double up = operator_at(x, t + h);
        if (prob.obstacle && t - (*prob.obstacle)[x] <= opts.tol)
            return up >= 0.0 || operator_at(x, t) >= 0.0;
        double dn = operator_at(x, t - h);
        return dn <= 0.0 && up >= 0.0;
    };

    // For p < 2 coordinate descent can jam with several free vertices clumped
    // at a common value (a kink of the coupling terms). A joint shift of each
    // clump is still a descent step, so run one after every sweep.
    std::vector<char> in_cluster(g.size(), 0);
    std::vector<char> seen(g.size(), 0);
    std::vector<Vertex> cluster, stack;
    auto clump_pass = [&](double& change) {
        std::fill(seen.begin(), seen.end(), 0);
        for (Vertex root : order) {
            if (seen[root]) continue;
            cluster.clear();
            stack.assign(1, root);
            seen[root] = 1;
            while (!stack.empty()) {
                Vertex x = stack.back();
                stack.pop_back();
                cluster.push_back(x);
                in_cluster[x] = 1;
                for (const Edge& e : g.adj[x]) {
                    Vertex y = e.to;
                    if (seen[y] || !is_free[y]) continue;
                    if (std::abs(rep.u[x] - rep.u[y]) >
                        1e-7 * (1.0 + std::abs(rep.u[x])))
                        continue;
                    seen[y] = 1;
                    stack.push_back(y);
                }
            }
            if (cluster.size() >= 2) {
                double s = detail::cluster_shift(g, rep.u, cluster, in_cluster, prob.p);
                if (prob.obstacle) {
                    for (Vertex x : cluster)
                        s = std::max(s, (*prob.obstacle)[x] - rep.u[x]);
                }
                if (s != 0.0) {
                    for (Vertex x : cluster) rep.u[x] += s;
                    change = std::max(change, std::abs(s));
                }
            }
            for (Vertex x : cluster) in_cluster[x] = 0;
        }
    };

    int flat_sweeps = 0;
    for (rep.sweeps = 0; rep.sweeps < opts.max_sweeps; ++rep.sweeps) {
        double change = 0.0;
        for (Vertex x : order) {
            double t = detail::coordinate_root(g, rep.u, x, prob.p);
            if (prob.obstacle) t = std::max(t, (*prob.obstacle)[x]);
            change = std::max(change, std::abs(t - rep.u[x]));
            rep.u[x] = t;
        }
        if (prob.p < 2.0) clump_pass(change);
        rep.last_change = change;
        double res = 0.0;
        bool optimal = true;
        for (Vertex x : order) {
            double r = residual_at(x);
            res = std::max(res, r);
            if (r > opts.tol && !optimal_at(x)) optimal = false;
        }
        rep.residual = res;
        if (optimal && change <= opts.tol) {
            ++rep.sweeps;
            rep.converged = true;
            return rep;
        }
        // iterates pinned to machine precision but residual still above tol:
        // further sweeps cannot help
        flat_sweeps = change <= 1e-16 * (1.0 + res) ? flat_sweeps + 1 : 0;
        if (flat_sweeps >= 3) {
            rep.sweeps += 1;
            rep.stagnated = true;
            return rep;
        }
    }
    return rep;
}

inline SolverReport solve_obstacle(const WeightedGraph& g, double p,
                                   const std::vector<Vertex>& free_set,
                                   const std::vector<double>& boundary,
                                   const std::vector<double>& psi,
                                   const SolverOptions& opts = {}) {
    DirichletProblem prob{g, p, free_set, boundary, &psi};
    return solve_dirichlet(prob, opts);
}

// --- solution checks ------------------------------------------------------

struct SuperharmonicReport {
    double min_value = 0.0;   // min over the set of L_p u (with measure)
    double max_value = 0.0;
    bool superharmonic = false;  // min >= -tol
    bool harmonic = false;       // both within tol of zero
};

inline SuperharmonicReport superharmonic_report(const WeightedGraph& g,
                                                const std::vector<double>& u,
                                                const std::vector<Vertex>& set, double p,
                                                double tol = 1e-10) {
    if (set.empty()) throw invalid_input("superharmonic_report: empty vertex set");
    SuperharmonicReport rep;
    bool first = true;
    for (Vertex x : set) {
        double v = schroedinger(g, u, x, p);
        if (first) {
            rep.min_value = rep.max_value = v;
            first = false;
        }
        rep.min_value = std::min(rep.min_value, v);
        rep.max_value = std::max(rep.max_value, v);
    }
    rep.superharmonic = rep.min_value >= -tol;
    rep.harmonic = rep.superharmonic && rep.max_value <= tol;
    return rep;
}

struct ComparisonReport {
    bool hypotheses_hold = false;  // L_p u <= L_p v on inner, u <= v on d_e V
    bool conclusion_holds = false;  // u <= v on the closure
    double worst_violation = 0.0;   // max(u - v)_+ on the closure
};

// Comparison principle on a finite region: subsolution below supersolution
// on the boundary stays below inside. Used as a cross-check on solver
// output, not as a solver.
inline ComparisonReport comparison_check(const WeightedGraph& g,
                                         const std::vector<double>& u,
                                         const std::vector<double>& v,
                                         const FiniteRegion& reg, double p,
                                         double tol = 1e-10) {
    ComparisonReport rep;
    rep.hypotheses_hold = true;
    for (Vertex x : reg.inner)
        if (schroedinger(g, u, x, p) > schroedinger(g, v, x, p) + tol)
            rep.hypotheses_hold = false;
    for (Vertex x : reg.exterior_boundary)
        if (u[x] > v[x] + tol) rep.hypotheses_hold = false;
    double worst = 0.0;
    for (Vertex x : reg.closure) worst = std::max(worst, u[x] - v[x]);
    rep.worst_violation = std::max(0.0, worst);
    rep.conclusion_holds = worst <= tol;
    return rep;
}

}  // namespace pgraph
