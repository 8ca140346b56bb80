#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pgraph/common.hpp"

namespace pgraph {

struct Edge {
    Vertex to;
    double b;
};

// Weighted graph G = (X, b, m, c). Vertices are dense indices in canonical
// (sorted-label) order; b is symmetric with zero diagonal, m > 0, c >= 0.
//
// Infinite families are represented by finite truncations produced by the
// generators in model.hpp: `truncated` is set, `root` names the base point
// and `frontier[x]` marks vertices whose neighborhood was cut by the
// truncation. Every numeric routine only ever sees such a finite graph.
class WeightedGraph {
public:
    std::vector<std::string> labels;         // index -> label, strictly increasing
    std::vector<double> m;                   // vertex measure, > 0
    std::vector<double> c;                   // potential, >= 0
    std::vector<std::vector<Edge>> adj;      // sorted by neighbor index

    bool truncated = false;
    Vertex root = -1;
    int truncation_radius = -1;
    std::vector<char> frontier;              // nonzero: neighborhood cut off

    int size() const { return static_cast<int>(labels.size()); }

    double degree(Vertex x) const {
        KahanSum s;
        for (const Edge& e : adj[x]) s.add(e.b);
        return s.value();
    }

    double edge_weight(Vertex x, Vertex y) const {
        const auto& row = adj[x];
        auto it = std::lower_bound(row.begin(), row.end(), y,
                                   [](const Edge& e, Vertex v) { return e.to < v; });
        return (it != row.end() && it->to == y) ? it->b : 0.0;
    }

    bool has_potential() const {
        for (double v : c)
            if (v > 0.0) return true;
        return false;
    }

    Vertex index_of(const std::string& label) const {
        auto it = std::lower_bound(labels.begin(), labels.end(), label);
        if (it == labels.end() || *it != label)
            throw invalid_input("unknown vertex label '" + label + "'");
        return static_cast<Vertex>(it - labels.begin());
    }

    void check_vertex(Vertex x) const {
        if (x < 0 || x >= size())
            throw invalid_input("vertex index " + std::to_string(x) +
                                " not materialized");
    }
};

// Builder used by the parser and the family generators. Validates the
// graph invariants on finish(): symmetry and zero diagonal are enforced
// structurally, positivity and connectedness are checked.
class GraphBuilder {
public:
    Vertex add_vertex(std::string label, double m, double c) {
        if (!(m > 0.0))
            throw invalid_input("vertex '" + label + "': measure must be positive");
        if (c < 0.0)
            throw invalid_input("vertex '" + label + "': potential must be non-negative");
        auto [it, inserted] = index_.emplace(std::move(label), 0);
        if (!inserted)
            throw invalid_input("duplicate vertex '" + it->first + "'");
        it->second = static_cast<Vertex>(ms_.size());
        ms_.push_back(m);
        cs_.push_back(c);
        order_.push_back(it);
        return it->second;
    }

    bool has_vertex(const std::string& label) const { return index_.count(label) > 0; }

    Vertex vertex(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end())
            throw invalid_input("edge references unknown vertex '" + label + "'");
        return it->second;
    }

    void add_edge(Vertex x, Vertex y, double b) {
        if (x == y)
            throw invalid_input("self-loop at vertex '" + order_[x]->first + "'");
        if (!(b > 0.0))
            throw invalid_input("edge weight must be positive");
        auto key = std::minmax(x, y);
        if (!edges_.emplace(key, b).second)
            throw invalid_input("duplicate edge between '" + order_[x]->first +
                                "' and '" + order_[y]->first + "'");
    }

    WeightedGraph finish(bool require_connected = true) {
        WeightedGraph g;
        int n = static_cast<int>(ms_.size());
        if (n == 0) throw invalid_input("graph has no vertices");

        // canonical order: sorted labels (map iteration order)
        std::vector<Vertex> perm(n);  // old index -> new index
        g.labels.reserve(n);
        g.m.resize(n);
        g.c.resize(n);
        {
            Vertex next = 0;
            for (const auto& [label, old] : index_) {
                g.labels.push_back(label);
                g.m[next] = ms_[old];
                g.c[next] = cs_[old];
                perm[old] = next++;
            }
        }
        g.adj.assign(n, {});
        for (const auto& [key, b] : edges_) {
            Vertex x = perm[key.first], y = perm[key.second];
            g.adj[x].push_back({y, b});
            g.adj[y].push_back({x, b});
        }
        for (auto& row : g.adj)
            std::sort(row.begin(), row.end(),
                      [](const Edge& a, const Edge& b) { return a.to < b.to; });
        g.frontier.assign(n, 0);

        if (require_connected && n > 1) {
            std::vector<char> seen(n, 0);
            std::deque<Vertex> queue{0};
            seen[0] = 1;
            int reached = 1;
            while (!queue.empty()) {
                Vertex x = queue.front();
                queue.pop_front();
                for (const Edge& e : g.adj[x])
                    if (!seen[e.to]) {
                        seen[e.to] = 1;
                        ++reached;
                        queue.push_back(e.to);
                    }
            }
            if (reached != n)
                throw invalid_input("graph is disconnected");
        }
        return g;
    }

private:
    std::map<std::string, Vertex> index_;
    std::vector<std::map<std::string, Vertex>::iterator> order_;
    std::vector<double> ms_, cs_;
    std::map<std::pair<Vertex, Vertex>, double> edges_;
};

// Sparse vertex -> value map with a declared default off its support.
struct VertexFunction {
    std::map<Vertex, double> support;
    double default_value = 0.0;

    double operator()(Vertex x) const {
        auto it = support.find(x);
        return it == support.end() ? default_value : it->second;
    }

    static VertexFunction from_dense(const std::vector<double>& values,
                                     double default_value = 0.0) {
        VertexFunction f;
        f.default_value = default_value;
        for (Vertex x = 0; x < static_cast<Vertex>(values.size()); ++x)
            if (values[x] != default_value) f.support[x] = values[x];
        return f;
    }

    std::vector<double> to_dense(int n) const {
        std::vector<double> v(n, default_value);
        for (const auto& [x, value] : support)
            if (x >= 0 && x < n) v[x] = value;
        return v;
    }
};

// A finite set V together with its boundaries: exterior boundary (vertices
// outside V with a neighbor in V), interior boundary (vertices of V with a
// neighbor outside) and closure V u d_e V. All lists sorted.
struct FiniteRegion {
    std::vector<Vertex> inner;
    std::vector<Vertex> exterior_boundary;
    std::vector<Vertex> interior_boundary;
    std::vector<Vertex> closure;
};

inline FiniteRegion region(const WeightedGraph& g, const std::vector<Vertex>& vertices) {
    std::set<Vertex> inner;
    for (Vertex x : vertices) {
        g.check_vertex(x);
        inner.insert(x);
    }
    std::set<Vertex> ext, interior;
    for (Vertex x : inner)
        for (const Edge& e : g.adj[x]) {
            if (!inner.count(e.to)) {
                ext.insert(e.to);
                interior.insert(x);
            }
        }
    FiniteRegion r;
    r.inner.assign(inner.begin(), inner.end());
    r.exterior_boundary.assign(ext.begin(), ext.end());
    r.interior_boundary.assign(interior.begin(), interior.end());
    std::set<Vertex> closure = inner;
    closure.insert(ext.begin(), ext.end());
    r.closure.assign(closure.begin(), closure.end());
    return r;
}

// Combinatorial ball B_n(K): all vertices within graph distance n of K.
inline std::vector<Vertex> ball(const WeightedGraph& g, const std::vector<Vertex>& centers,
                                int radius) {
    std::vector<int> dist(g.size(), -1);
    std::deque<Vertex> queue;
    for (Vertex x : centers) {
        g.check_vertex(x);
        if (dist[x] < 0) {
            dist[x] = 0;
            queue.push_back(x);
        }
    }
    while (!queue.empty()) {
        Vertex x = queue.front();
        queue.pop_front();
        if (dist[x] == radius) continue;
        for (const Edge& e : g.adj[x])
            if (dist[e.to] < 0) {
                dist[e.to] = dist[x] + 1;
                queue.push_back(e.to);
            }
    }
    std::vector<Vertex> out;
    for (Vertex x = 0; x < g.size(); ++x)
        if (dist[x] >= 0) out.push_back(x);
    return out;
}

// Increasing exhaustion by combinatorial balls B_0(K) c B_1(K) c ...
// The ball policy guarantees X_{n+1} \ X_n lies in the exterior boundary
// of X_n, which is what the monotone potential scheme needs.
struct Exhaustion {
    std::vector<std::vector<Vertex>> stages;

    static Exhaustion balls(const WeightedGraph& g, const std::vector<Vertex>& centers,
                            int max_stage) {
        Exhaustion ex;
        for (int n = 0; n <= max_stage; ++n) {
            ex.stages.push_back(ball(g, centers, n));
            if (static_cast<int>(ex.stages.back().size()) == g.size()) break;
        }
        return ex;
    }
};

// Connected components of B_n(K) \ K. A component is an "end candidate":
// it escapes if it reaches the ball frontier (or a truncation frontier).
struct EndComponent {
    std::vector<Vertex> vertices;
    bool escapes = false;
};

inline std::vector<EndComponent> ends(const WeightedGraph& g,
                                      const std::vector<Vertex>& k_set, int horizon) {
    if (horizon < 1) throw invalid_input("ends: horizon must be >= 1");
    std::set<Vertex> k(k_set.begin(), k_set.end());
    for (Vertex x : k_set) g.check_vertex(x);

    std::vector<int> dist(g.size(), -1);
    std::deque<Vertex> queue;
    for (Vertex x : k) {
        dist[x] = 0;
        queue.push_back(x);
    }
    while (!queue.empty()) {
        Vertex x = queue.front();
        queue.pop_front();
        if (dist[x] == horizon) continue;
        for (const Edge& e : g.adj[x])
            if (dist[e.to] < 0) {
                dist[e.to] = dist[x] + 1;
                queue.push_back(e.to);
            }
    }

    std::vector<char> assigned(g.size(), 0);
    std::vector<EndComponent> components;
    for (Vertex start = 0; start < g.size(); ++start) {
        if (dist[start] <= 0 || assigned[start]) continue;  // outside ball or in K
        EndComponent comp;
        std::deque<Vertex> q{start};
        assigned[start] = 1;
        while (!q.empty()) {
            Vertex x = q.front();
            q.pop_front();
            comp.vertices.push_back(x);
            if (dist[x] == horizon || (g.truncated && g.frontier[x])) comp.escapes = true;
            for (const Edge& e : g.adj[x]) {
                if (dist[e.to] <= 0) continue;
                if (!assigned[e.to]) {
                    assigned[e.to] = 1;
                    q.push_back(e.to);
                }
            }
        }
        std::sort(comp.vertices.begin(), comp.vertices.end());
        components.push_back(std::move(comp));
    }
    std::sort(components.begin(), components.end(),
              [](const EndComponent& a, const EndComponent& b) {
                  return a.vertices.front() < b.vertices.front();
              });
    return components;
}

}  // namespace pgraph
