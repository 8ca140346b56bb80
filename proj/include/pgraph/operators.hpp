#pragma once

#include <vector>

#include "pgraph/graph.hpp"

namespace pgraph {

// m(x) * Delta_p f(x) = sum_y b(x,y) <f(x)-f(y)>. Keeping the measure out
// of the inner sum lets the solvers compare residuals against tol directly.
inline double weighted_p_laplacian(const WeightedGraph& g, const std::vector<double>& f,
                                   Vertex x, double p) {
    KahanSum s;
    for (const Edge& e : g.adj[x]) s.add(e.b * signed_power(f[x] - f[e.to], p));
    return s.value();
}

inline double p_laplacian(const WeightedGraph& g, const std::vector<double>& f, Vertex x,
                          double p) {
    g.check_vertex(x);
    return weighted_p_laplacian(g, f, x, p) / g.m[x];
}

inline double p_laplacian(const WeightedGraph& g, const VertexFunction& f, Vertex x,
                          double p) {
    return p_laplacian(g, f.to_dense(g.size()), x, p);
}

// L_p f = Delta_p f + (c/m) <f>
inline double schroedinger(const WeightedGraph& g, const std::vector<double>& f, Vertex x,
                           double p) {
    g.check_vertex(x);
    return (weighted_p_laplacian(g, f, x, p) + g.c[x] * signed_power(f[x], p)) / g.m[x];
}

inline double schroedinger(const WeightedGraph& g, const VertexFunction& f, Vertex x,
                           double p) {
    return schroedinger(g, f.to_dense(g.size()), x, p);
}

// E_p(f) = 1/2 sum_{x,y} b |f(x)-f(y)|^p + sum_x c |f(x)|^p over the whole
// (finite) graph. Each unordered edge is visited once.
inline double p_energy(const WeightedGraph& g, const std::vector<double>& f, double p) {
    if (!(p > 1.0)) throw invalid_input("p_energy: p must be > 1");
    KahanSum s;
    for (Vertex x = 0; x < g.size(); ++x) {
        for (const Edge& e : g.adj[x]) {
            if (e.to <= x) continue;
            double d = std::abs(f[x] - f[e.to]);
            if (d != 0.0) s.add(e.b * std::pow(d, p));
        }
        if (g.c[x] != 0.0 && f[x] != 0.0) s.add(g.c[x] * std::pow(std::abs(f[x]), p));
    }
    return s.value();
}

inline double p_energy(const WeightedGraph& g, const VertexFunction& f, double p) {
    return p_energy(g, f.to_dense(g.size()), p);
}

// E_{p,V}(u,v) = 1/2 sum_{x,y in V} b <u(x)-u(y)> (v(x)-v(y)) + sum_{x in V} c <u> v
inline double energy_pairing(const WeightedGraph& g, const std::vector<double>& u,
                             const std::vector<double>& v, const std::vector<Vertex>& region,
                             double p) {
    std::vector<char> in(g.size(), 0);
    for (Vertex x : region) {
        g.check_vertex(x);
        in[x] = 1;
    }
    KahanSum s;
    for (Vertex x : region) {
        for (const Edge& e : g.adj[x]) {
            if (!in[e.to] || e.to <= x) continue;
            s.add(e.b * signed_power(u[x] - u[e.to], p) * (v[x] - v[e.to]));
        }
        if (g.c[x] != 0.0) s.add(g.c[x] * signed_power(u[x], p) * v[x]);
    }
    return s.value();
}

// Green's formula: <L_p f, phi>_V = E_{p,V}(f,phi) + boundary term. Returns
// LHS - RHS; identically zero up to accumulation rounding on finite graphs.
inline double greens_formula_residual(const WeightedGraph& g, const std::vector<double>& f,
                                      const std::vector<double>& phi,
                                      const std::vector<Vertex>& region, double p) {
    std::vector<char> in(g.size(), 0);
    for (Vertex x : region) {
        g.check_vertex(x);
        in[x] = 1;
    }
    KahanSum lhs;
    for (Vertex x : region)
        if (phi[x] != 0.0)
            lhs.add((weighted_p_laplacian(g, f, x, p) + g.c[x] * signed_power(f[x], p)) *
                    phi[x]);
    KahanSum boundary;
    for (Vertex x : region)
        for (const Edge& e : g.adj[x])
            if (!in[e.to]) boundary.add(e.b * signed_power(f[x] - f[e.to], p) * phi[x]);
    return lhs.value() - (energy_pairing(g, f, phi, region, p) + boundary.value());
}

}  // namespace pgraph
