#pragma once

#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "pgraph/graph.hpp"
#include "pgraph/operators.hpp"

namespace pgraph {

// Symmetric edge weighting w: stored per unordered pair of adjacent
// vertices. "Alternative" means strictly positive on every edge.
struct EdgeWeighting {
    std::map<std::pair<Vertex, Vertex>, double> w;

    static std::pair<Vertex, Vertex> key(Vertex x, Vertex y) { return std::minmax(x, y); }

    double operator()(Vertex x, Vertex y) const {
        auto it = w.find(key(x, y));
        if (it == w.end())
            throw invalid_input("edge weighting queried on a non-materialized pair");
        return it->second;
    }

    void set(Vertex x, Vertex y, double value) {
        if (value < 0.0) throw invalid_input("edge weighting must be non-negative");
        w[key(x, y)] = value;
    }

    bool alternative(const WeightedGraph& g) const {
        for (Vertex x = 0; x < g.size(); ++x)
            for (const Edge& e : g.adj[x])
                if (e.to > x && !((*this)(x, e.to) > 0.0)) return false;
        return true;
    }

    static EdgeWeighting constant(const WeightedGraph& g, double value) {
        EdgeWeighting out;
        for (Vertex x = 0; x < g.size(); ++x)
            for (const Edge& e : g.adj[x])
                if (e.to > x) out.set(x, e.to, value);
        return out;
    }

    static EdgeWeighting from_function(const WeightedGraph& g,
                                       const std::vector<double>& f) {
        EdgeWeighting out;
        for (Vertex x = 0; x < g.size(); ++x)
            for (const Edge& e : g.adj[x])
                if (e.to > x) out.set(x, e.to, std::abs(f[x] - f[e.to]));
        return out;
    }
};

// --- path pseudometric ----------------------------------------------------

struct PathMetricResult {
    double value = std::numeric_limits<double>::infinity();
    bool reachable = false;
    // true when no path leaving the searched ball can be shorter: the
    // w-distance to every ball-frontier vertex already exceeds the best path
    bool certified = false;
};

namespace detail {

// multi-source Dijkstra with weights w, restricted to the combinatorial
// ball of the given radius around the sources
inline std::vector<double> w_distances(const WeightedGraph& g, const EdgeWeighting& w,
                                       const std::vector<Vertex>& sources, int horizon,
                                       std::vector<int>* hops_out = nullptr) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<int> hops(g.size(), -1);
    {
        std::deque<Vertex> q;
        for (Vertex s : sources) {
            g.check_vertex(s);
            if (hops[s] < 0) {
                hops[s] = 0;
                q.push_back(s);
            }
        }
        while (!q.empty()) {
            Vertex x = q.front();
            q.pop_front();
            if (hops[x] == horizon) continue;
            for (const Edge& e : g.adj[x])
                if (hops[e.to] < 0) {
                    hops[e.to] = hops[x] + 1;
                    q.push_back(e.to);
                }
        }
    }
    std::vector<double> dist(g.size(), inf);
    using Item = std::pair<double, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (Vertex s : sources) {
        dist[s] = 0.0;
        heap.push({0.0, s});
    }
    while (!heap.empty()) {
        auto [d, x] = heap.top();
        heap.pop();
        if (d > dist[x]) continue;
        for (const Edge& e : g.adj[x]) {
            if (hops[e.to] < 0) continue;  // outside the searched ball
            double nd = d + w(x, e.to);
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                heap.push({nd, e.to});
            }
        }
    }
    if (hops_out) *hops_out = std::move(hops);
    return dist;
}

}  // namespace detail

// d_w(x,y) = inf over paths of the sum of w along the path, searched inside
// B_horizon(x).
inline PathMetricResult path_metric(const WeightedGraph& g, const EdgeWeighting& w,
                                    Vertex x, Vertex y, int horizon) {
    g.check_vertex(x);
    g.check_vertex(y);
    if (horizon < 0) throw invalid_input("path_metric: horizon must be >= 0");
    std::vector<int> hops;
    std::vector<double> dist = detail::w_distances(g, w, {x}, horizon, &hops);
    PathMetricResult out;
    out.value = dist[y];
    out.reachable = std::isfinite(dist[y]);
    double frontier_min = std::numeric_limits<double>::infinity();
    bool has_frontier = false;
    for (Vertex v = 0; v < g.size(); ++v)
        if (hops[v] == horizon || (hops[v] >= 0 && g.truncated && g.frontier[v])) {
            has_frontier = true;
            frontier_min = std::min(frontier_min, dist[v]);
        }
    out.certified = out.reachable && (!has_frontier || out.value <= frontier_min);
    return out;
}

// --- p-intrinsic weights --------------------------------------------------

struct IntrinsicReport {
    std::map<Vertex, double> slack;  // m'(x) - sum_y b(x,y) w(x,y)^p
    double max_violation = 0.0;
    bool intrinsic = false;
};

// w is p-intrinsic w.r.t. m' on V when sum_y b(x,y) w(x,y)^p <= m'(x).
inline IntrinsicReport intrinsic_check(const WeightedGraph& g, const EdgeWeighting& w,
                                       const std::vector<double>& m_prime, double p,
                                       const std::vector<Vertex>& v_set,
                                       double tol = 1e-12) {
    IntrinsicReport rep;
    for (Vertex x : v_set) {
        g.check_vertex(x);
        KahanSum s;
        for (const Edge& e : g.adj[x]) s.add(e.b * std::pow(w(x, e.to), p));
        double slack = m_prime[x] - s.value();
        rep.slack[x] = slack;
        if (slack < 0.0) rep.max_violation = std::max(rep.max_violation, -slack);
    }
    rep.intrinsic = rep.max_violation <= tol;
    return rep;
}

struct IntrinsicFromFunction {
    EdgeWeighting sigma;           // |f(x) - f(y)| on edges
    std::vector<double> m_f;       // m_f(x) = sum_y b sigma^p
    double total_mass = 0.0;       // = 2 E_p(f) when c = 0
};

inline IntrinsicFromFunction intrinsic_from_function(const WeightedGraph& g,
                                                     const std::vector<double>& f,
                                                     double p) {
    {
        std::vector<double> sorted = f;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] == sorted[i - 1])
                throw invalid_input(
                    "intrinsic_from_function: f is not injective; apply injectivize first");
    }
    IntrinsicFromFunction out;
    out.sigma = EdgeWeighting::from_function(g, f);
    out.m_f.assign(g.size(), 0.0);
    KahanSum total;
    for (Vertex x = 0; x < g.size(); ++x) {
        KahanSum s;
        for (const Edge& e : g.adj[x]) s.add(e.b * std::pow(std::abs(f[x] - f[e.to]), p));
        out.m_f[x] = s.value();
        total.add(s.value());
    }
    out.total_mass = total.value();
    return out;
}

// --- metric null sequences ------------------------------------------------

struct MetricNullTerm {
    std::vector<double> e;      // 0 v (1 - sigma_n), 1 on K_n
    double energy = 0.0;
    double bound = 0.0;         // sum of m' over the truncation off K_n
    bool bound_holds = false;
    bool support_escapes = false;  // support touches the truncation frontier
};

// e_n = 0 v (1 - dist_sigma(., K_n)) for a p-intrinsic sigma: the energy is
// bounded by the m'-mass outside K_n.
inline std::vector<MetricNullTerm> metric_null_sequence(
    const WeightedGraph& g, const EdgeWeighting& sigma,
    const std::vector<std::vector<Vertex>>& k_stages, double p,
    const std::vector<double>& m_prime, int horizon = -1) {
    if (horizon < 0) horizon = g.size();
    std::vector<MetricNullTerm> out;
    for (const auto& k_set : k_stages) {
        if (k_set.empty()) throw invalid_input("metric_null_sequence: empty K_n");
        MetricNullTerm term;
        std::vector<double> dist = detail::w_distances(g, sigma, k_set, horizon);
        term.e.resize(g.size());
        for (Vertex x = 0; x < g.size(); ++x) {
            double d = std::isfinite(dist[x]) ? dist[x] : 1.0;
            term.e[x] = std::max(0.0, 1.0 - d);
            if (term.e[x] > 0.0 && g.truncated && g.frontier[x]) term.support_escapes = true;
        }
        term.energy = p_energy(g, term.e, p);
        std::vector<char> in_k(g.size(), 0);
        for (Vertex x : k_set) in_k[x] = 1;
        KahanSum bound;
        for (Vertex x = 0; x < g.size(); ++x)
            if (!in_k[x]) bound.add(m_prime[x]);
        term.bound = bound.value();
        term.bound_holds = term.energy <= term.bound + 1e-10;
        out.push_back(std::move(term));
    }
    return out;
}

// --- injectivization ------------------------------------------------------

// Perturbs f on its collision set only, by dyadic offsets in canonical
// vertex order, halving the budget until the result is pairwise distinct
// with ||f - f_eps||_inf < eps and E_p(f - f_eps) < eps.
inline std::vector<double> injectivize(const WeightedGraph& g,
                                       const std::vector<double>& f, double eps,
                                       double p) {
    if (!(eps > 0.0)) throw invalid_input("injectivize: eps must be positive");
    auto collisions = [&](const std::vector<double>& v) {
        std::map<double, int> count;
        for (double x : v) ++count[x];
        std::vector<char> hit(v.size(), 0);
        for (size_t i = 0; i < v.size(); ++i)
            if (count[v[i]] > 1) hit[i] = 1;
        return hit;
    };
    std::vector<char> hit = collisions(f);
    if (std::none_of(hit.begin(), hit.end(), [](char c) { return c != 0; })) return f;

    for (double delta = 0.5 * eps; delta > 0.0; delta *= 0.5) {
        std::vector<double> out = f;
        int k = 1;
        for (Vertex x = 0; x < g.size(); ++x)
            if (hit[x]) out[x] = f[x] + delta * std::pow(2.0, -k++);
        std::vector<char> still = collisions(out);
        if (std::any_of(still.begin(), still.end(), [](char c) { return c != 0; }))
            continue;
        std::vector<double> diff(g.size());
        double sup = 0.0;
        for (Vertex x = 0; x < g.size(); ++x) {
            diff[x] = out[x] - f[x];
            sup = std::max(sup, std::abs(diff[x]));
        }
        if (sup < eps && p_energy(g, diff, p) < eps) return out;
    }
    throw invalid_input("injectivize: could not separate values within budget");
}

}  // namespace pgraph
