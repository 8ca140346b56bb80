#pragma once

#include <map>
#include <vector>

#include "pgraph/capacity.hpp"
#include "pgraph/graph.hpp"
#include "pgraph/operators.hpp"

namespace pgraph {

// Flow on edges: skew-symmetric F(x,y) = -F(y,x), stored once per unordered
// pair in the orientation (min, max).
struct EdgeFlow {
    std::map<std::pair<Vertex, Vertex>, double> f;

    double operator()(Vertex x, Vertex y) const {
        bool flip = x > y;
        auto it = f.find(flip ? std::make_pair(y, x) : std::make_pair(x, y));
        if (it == f.end()) return 0.0;
        return flip ? -it->second : it->second;
    }

    void set(Vertex x, Vertex y, double value) {
        if (x == y) throw invalid_input("flow on a self-loop");
        if (x > y) {
            std::swap(x, y);
            value = -value;
        }
        f[{x, y}] = value;
    }
};

// F(x,y) = <u(x) - u(y)>^{p-1}; the flow whose divergence is the weighted
// p-Laplacian of u.
inline EdgeFlow gradient_flow(const WeightedGraph& g, const std::vector<double>& u,
                              double p) {
    EdgeFlow F;
    for (Vertex x = 0; x < g.size(); ++x)
        for (const Edge& e : g.adj[x])
            if (e.to > x) F.set(x, e.to, signed_power(u[x] - u[e.to], p));
    return F;
}

// Div F(x) = m(x)^{-1} sum_y b(x,y) F(x,y)
inline double divergence(const WeightedGraph& g, const EdgeFlow& F, Vertex x) {
    g.check_vertex(x);
    KahanSum s;
    for (const Edge& e : g.adj[x]) s.add(e.b * F(x, e.to));
    return s.value() / g.m[x];
}

// Green's formula for flows: sum_x Div F(x) phi(x) m(x) = 1/2 sum_{x,y} b F (phi(x)-phi(y)).
// Returns LHS - RHS; zero up to rounding for compactly supported phi.
inline double flow_greens_residual(const WeightedGraph& g, const EdgeFlow& F,
                                   const std::vector<double>& phi) {
    KahanSum lhs;
    for (Vertex x = 0; x < g.size(); ++x)
        if (phi[x] != 0.0) lhs.add(divergence(g, F, x) * phi[x] * g.m[x]);
    KahanSum rhs;
    for (Vertex x = 0; x < g.size(); ++x)
        for (const Edge& e : g.adj[x])
            if (e.to > x) rhs.add(e.b * F(x, e.to) * (phi[x] - phi[e.to]));
    return lhs.value() - rhs.value();
}

// Flow certificate in the Kelvin-Nevanlinna-Royden spirit: the gradient flow
// of the stage-N equilibrium potential has divergence mass cap_N at the
// root, zero elsewhere inside the stage, and exactly zero total mass by
// skew-symmetry. Hyperbolic graphs keep the root mass bounded away from
// zero as N grows; on parabolic graphs it vanishes.
struct KnrCertificate {
    double root_mass = 0.0;   // Div F(o) m(o) = cap_N
    double total_mass = 0.0;  // sum over the closed stage of Div m; 0 by skew-symmetry
    double cap = 0.0;
    long stage = 0;
    EdgeFlow flow;
};

inline KnrCertificate knr_certificate(const WeightedGraph& g, Vertex o,
                                      const Exhaustion& ex, double p,
                                      const SolverOptions& opts = {}) {
    PotentialSequence seq = harmonic_potential(g, o, ex, p, opts);
    const PotentialStage& last = seq.stages.back();
    KnrCertificate cert;
    cert.stage = static_cast<long>(seq.stages.size()) - 1;
    cert.cap = last.cap;
    cert.flow = gradient_flow(g, last.u, p);
    cert.root_mass = divergence(g, cert.flow, o) * g.m[o];
    KahanSum total;
    for (Vertex x = 0; x < g.size(); ++x)
        total.add(divergence(g, cert.flow, x) * g.m[x]);
    cert.total_mass = total.value();
    return cert;
}

}  // namespace pgraph
