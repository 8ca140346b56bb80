#pragma once

#include <chrono>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "pgraph/dirichlet.hpp"
#include "pgraph/graph.hpp"
#include "pgraph/model.hpp"
#include "pgraph/operators.hpp"

namespace pgraph {

// --- finite capacities ----------------------------------------------------

struct CapacityResult {
    double value = 0.0;
    std::vector<double> minimizer;  // equilibrium potential, 1 on K, 0 off V
    std::vector<Vertex> k_set, v_set;
    double p = 2.0;
    SolverReport report;
};

// cap_p(K,V) = inf { E_p(f) : f = 1 on K, f = 0 off V }. The infimum is
// attained by the solution of the Dirichlet problem on V \ K.
inline CapacityResult capacity(const WeightedGraph& g, const std::vector<Vertex>& k_set,
                               const std::vector<Vertex>& v_set, double p,
                               const SolverOptions& opts = {}) {
    std::vector<char> in_v(g.size(), 0), in_k(g.size(), 0);
    for (Vertex x : v_set) {
        g.check_vertex(x);
        in_v[x] = 1;
    }
    for (Vertex x : k_set) {
        g.check_vertex(x);
        if (!in_v[x]) throw invalid_input("capacity: K must be contained in V");
        in_k[x] = 1;
    }
    if (k_set.empty()) throw invalid_input("capacity: K is empty");

    CapacityResult out;
    out.k_set = k_set;
    out.v_set = v_set;
    out.p = p;

    std::vector<double> boundary(g.size(), 0.0);
    std::vector<Vertex> free_set;
    for (Vertex x = 0; x < g.size(); ++x) {
        if (in_k[x])
            boundary[x] = 1.0;
        else if (in_v[x])
            free_set.push_back(x);
    }
    DirichletProblem prob{g, p, free_set, boundary};
    out.report = solve_dirichlet(prob, opts);
    out.minimizer = out.report.u;
    out.value = p_energy(g, out.minimizer, p);
    return out;
}

// --- equilibrium potentials along an exhaustion ---------------------------

struct PotentialStage {
    std::vector<Vertex> region;  // X_n
    std::vector<double> u;       // u_n: 1 on K, harmonic on X_n \ K, 0 outside
    double cap = 0.0;            // E_p(u_n) = cap_p(K, X_n)
    double du_inf = 0.0;         // ||u_n - u_{n-1}||_inf
    long n_vertices = 0;
    double runtime_ms = 0.0;
    bool converged = false;
    long sweeps = 0;
    double residual = 0.0;
};

struct PotentialSequence {
    std::vector<PotentialStage> stages;
    bool monotone_u = true;    // u_n <= u_{n+1} + 10 tol pointwise
    bool monotone_cap = true;  // cap_n non-increasing within 10 tol
    double extrapolated_limit = 0.0;
    std::string extrapolation_method;
    double extrapolation_residual = 0.0;
};

namespace detail {

inline void extrapolate_caps(PotentialSequence& seq) {
    const auto& st = seq.stages;
    size_t n = st.size();
    if (n < 3) {
        seq.extrapolated_limit = n ? st.back().cap : 0.0;
        seq.extrapolation_method = "last-stage";
        return;
    }
    // Harmonic-looking decay: 1/cap_n grows by a near-constant increment.
    // Richardson then sends the limit to zero.
    double d1 = 1.0 / st[n - 1].cap - 1.0 / st[n - 2].cap;
    double d2 = 1.0 / st[n - 2].cap - 1.0 / st[n - 3].cap;
    if (d1 > 0.0 && d2 > 0.0 && std::abs(d1 - d2) <= 0.25 * std::max(d1, d2)) {
        seq.extrapolated_limit = 0.0;
        seq.extrapolation_method = "richardson-1/cap";
        seq.extrapolation_residual = std::abs(d1 - d2) / std::max(d1, d2);
        return;
    }
    // Otherwise Aitken delta-squared on cap_n itself.
    double c0 = st[n - 3].cap, c1 = st[n - 2].cap, c2 = st[n - 1].cap;
    double denom = (c2 - c1) - (c1 - c0);
    double limit = std::abs(denom) > 1e-300 ? c2 - (c2 - c1) * (c2 - c1) / denom : c2;
    if (!(limit >= 0.0) || limit > c2) limit = c2;
    seq.extrapolated_limit = limit;
    seq.extrapolation_method = "aitken";
    seq.extrapolation_residual = std::abs(c2 - c1);
}

}  // namespace detail

// Equilibrium potentials u_n of K along the exhaustion stages:
// u_n = 1 on K, p-harmonic on X_n \ K, 0 outside X_n, cap_n = E_p(u_n).
// Stages are independent solves; with PGRAPH_THREADS > 1 they run
// concurrently, otherwise each stage warm-starts from the previous one.
inline PotentialSequence capacity_limit(const WeightedGraph& g,
                                        const std::vector<Vertex>& k_set,
                                        const Exhaustion& ex, double p,
                                        const SolverOptions& opts = {}) {
    if (ex.stages.empty()) throw invalid_input("capacity_limit: empty exhaustion");
    {
        std::vector<char> in0(g.size(), 0);
        for (Vertex x : ex.stages.front()) in0[x] = 1;
        for (Vertex x : k_set)
            if (!in0[x]) throw invalid_input("capacity_limit: K not inside X_0");
    }

    PotentialSequence seq;
    seq.stages.resize(ex.stages.size());

    auto solve_stage = [&](size_t n, const std::vector<double>* init) {
        auto t0 = std::chrono::steady_clock::now();
        PotentialStage& st = seq.stages[n];
        st.region = ex.stages[n];
        st.n_vertices = static_cast<long>(st.region.size());
        std::vector<char> in_k(g.size(), 0);
        for (Vertex x : k_set) in_k[x] = 1;
        std::vector<double> boundary(g.size(), 0.0);
        std::vector<Vertex> free_set;
        for (Vertex x : st.region) {
            if (in_k[x])
                boundary[x] = 1.0;
            else
                free_set.push_back(x);
        }
        DirichletProblem prob{g, p, free_set, boundary};
        prob.init = init;
        SolverReport rep = solve_dirichlet(prob, opts);
        st.u = std::move(rep.u);
        st.cap = p_energy(g, st.u, p);
        st.converged = rep.converged;
        st.sweeps = rep.sweeps;
        st.residual = rep.residual;
        st.runtime_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    };

    int threads = thread_budget();
    if (threads > 1) {
        std::vector<std::future<void>> running;
        for (size_t n = 0; n < seq.stages.size(); ++n) {
            running.push_back(
                std::async(std::launch::async, [&, n] { solve_stage(n, nullptr); }));
            if (static_cast<int>(running.size()) == threads) {
                for (auto& f : running) f.get();
                running.clear();
            }
        }
        for (auto& f : running) f.get();
    } else {
        for (size_t n = 0; n < seq.stages.size(); ++n)
            solve_stage(n, n == 0 ? nullptr : &seq.stages[n - 1].u);
    }

    double slack = 10.0 * opts.tol;
    for (size_t n = 0; n < seq.stages.size(); ++n) {
        PotentialStage& st = seq.stages[n];
        if (n > 0) {
            const PotentialStage& prev = seq.stages[n - 1];
            double du = 0.0;
            for (Vertex x = 0; x < g.size(); ++x) {
                du = std::max(du, std::abs(st.u[x] - prev.u[x]));
                if (prev.u[x] > st.u[x] + slack) seq.monotone_u = false;
            }
            st.du_inf = du;
            if (st.cap > prev.cap + slack) seq.monotone_cap = false;
        }
    }
    detail::extrapolate_caps(seq);
    return seq;
}

inline PotentialSequence harmonic_potential(const WeightedGraph& g, Vertex o,
                                            const Exhaustion& ex, double p,
                                            const SolverOptions& opts = {}) {
    g.check_vertex(o);
    return capacity_limit(g, {o}, ex, p, opts);
}

// --- Green's function -----------------------------------------------------

struct GreenReport {
    enum class Status { Ok, Parabolic, Inconclusive };
    Status status = Status::Inconclusive;
    std::vector<double> g;          // g(., o) on the last stage
    double scale = 0.0;             // c = [m(o) D_p u(o)]^{-1/(p-1)}
    double value_at_root = 0.0;     // g(o, o)
    double defining_residual = 0.0;  // |m(o) D_p g(o) - 1|
    double off_root_residual = 0.0;  // max |D_p g| away from o inside X_N
    double cap_from_green = 0.0;     // g(o,o)^{-(p-1)}, compare with cap_N
    PotentialSequence potentials;
    std::string note;
};

struct GreenPolicy {
    double parabolic_cap = 1e-3;   // extrapolated limit below: no Green's function
    double stable_rel_change = 1e-3;  // last stages this flat: accept g
};

inline GreenReport greens_function(const WeightedGraph& g, Vertex o, const Exhaustion& ex,
                                   double p, const SolverOptions& opts = {},
                                   const GreenPolicy& policy = {}) {
    GreenReport rep;
    rep.potentials = harmonic_potential(g, o, ex, p, opts);
    const auto& stages = rep.potentials.stages;
    double cap_last = stages.back().cap;

    double rel_change = 1.0;
    if (stages.size() >= 3) {
        double lo = cap_last, hi = cap_last;
        for (size_t i = stages.size() - 3; i < stages.size(); ++i) {
            lo = std::min(lo, stages[i].cap);
            hi = std::max(hi, stages[i].cap);
        }
        rel_change = (hi - lo) / std::max(hi, 1e-300);
    }

    if (rep.potentials.extrapolated_limit < policy.parabolic_cap &&
        cap_last < policy.parabolic_cap) {
        rep.status = GreenReport::Status::Parabolic;
        rep.note = "capacity decays to zero; no Green's function";
        return rep;
    }
    if (rel_change >= policy.stable_rel_change) {
        rep.status = GreenReport::Status::Inconclusive;
        rep.note = "capacity not resolved at this stage count";
        return rep;
    }

    const PotentialStage& last = stages.back();
    // m(o) D_p u(o) equals cap_N by the Green's formula for u_N, but use the
    // directly evaluated operator so the defining residual is an honest check
    double lap_o = weighted_p_laplacian(g, last.u, o, p);
    rep.scale = std::pow(lap_o, -1.0 / (p - 1.0));
    rep.g.resize(g.size());
    for (Vertex x = 0; x < g.size(); ++x) rep.g[x] = rep.scale * last.u[x];
    rep.value_at_root = rep.g[o];
    rep.defining_residual = std::abs(g.m[o] * p_laplacian(g, rep.g, o, p) - 1.0);
    double off = 0.0;
    for (Vertex x : last.region)
        if (x != o) off = std::max(off, std::abs(weighted_p_laplacian(g, rep.g, x, p)));
    rep.off_root_residual = off;
    rep.cap_from_green = std::pow(rep.value_at_root, -(p - 1.0));
    rep.status = GreenReport::Status::Ok;
    return rep;
}

// --- null sequences -------------------------------------------------------

struct NullTerm {
    std::vector<double> values;  // compactly supported, 1 at o
    double energy = 0.0;         // = cap_n
};

// The stage potentials themselves: e_n = u_n has e_n(o) = 1, finite support
// and E_p(e_n) = cap_n. On parabolic graphs the energies tend to zero, which
// is the constructive certificate.
inline std::vector<NullTerm> null_sequence(const WeightedGraph& g, Vertex o,
                                           const Exhaustion& ex, double p,
                                           const SolverOptions& opts = {}) {
    PotentialSequence seq = harmonic_potential(g, o, ex, p, opts);
    std::vector<NullTerm> out;
    for (auto& st : seq.stages) out.push_back({std::move(st.u), st.cap});
    return out;
}

// --- verdicts -------------------------------------------------------------

enum class Label { Parabolic, Hyperbolic, Inconclusive };

inline const char* to_string(Label l) {
    switch (l) {
        case Label::Parabolic: return "Parabolic";
        case Label::Hyperbolic: return "Hyperbolic";
        case Label::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct Verdict {
    Label label = Label::Inconclusive;
    std::vector<std::string> evidence;
    std::vector<double> cap_sequence;
    std::vector<double> null_energies;
    std::optional<double> green_at_root;
    std::optional<SeriesVerdict> series;
    bool exact = false;  // decided by a closed-form series, not numerics
};

struct ClassifyPolicy {
    double parabolic_cap = 1e-3;
    double hyperbolic_cap = 1e-3;
    double hyperbolic_rel_change = 1e-3;
    double decay_slope = -0.1;  // fitted log-log slope must fall below this
    int stages = 10;
    SolverOptions solver;
};

namespace detail {

// least-squares slope of log cap_n against log(n+1)
inline double log_decay_slope(const std::vector<double>& caps) {
    size_t n = caps.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double x = std::log(i + 1.0), y = std::log(std::max(caps[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    return denom > 0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace detail

// Decide the verdict from an exact radial profile (model graphs): the series
// criterion is a characterization there.
inline Verdict classify_radial(const RadialProfile& pr, double p) {
    Verdict v;
    SeriesReport series = area_series_test(pr, p);
    v.series = series.verdict;
    v.exact = series.exact;
    if (series.verdict == SeriesVerdict::Diverges) {
        v.label = Label::Parabolic;
        v.evidence.push_back("boundary-area series diverges (exact tail)");
        for (int n = 2; n <= std::min(pr.max_radius - 1, 8); n += 2)
            v.null_energies.push_back(radial_null_sequence(pr, p, n).energy);
    } else if (series.verdict == SeriesVerdict::Converges) {
        v.label = Label::Hyperbolic;
        v.evidence.push_back("boundary-area series converges (exact tail)");
        if (auto green = radial_green(pr, p, 0, pr.max_radius)) {
            v.green_at_root = green->value;
            v.evidence.push_back("radial Green's function value " +
                                 std::to_string(green->value) + " at the root");
        }
    } else {
        v.label = Label::Inconclusive;
        v.evidence.push_back("no symbolic tail; series test inconclusive");
    }
    return v;
}

// Numeric verdict for a general graph. Parabolic needs the capacity decay
// AND a constructive null sequence below threshold; Hyperbolic needs a
// stabilized positive capacity. A positive potential c forces hyperbolicity
// outright.
inline Verdict classify(const WeightedGraph& g, Vertex o, double p,
                        const ClassifyPolicy& policy = {},
                        const RadialProfile* profile = nullptr) {
    g.check_vertex(o);
    if (g.has_potential()) {
        Verdict v;
        v.label = Label::Hyperbolic;
        v.exact = true;
        v.evidence.push_back("potential c is nonzero: hyperbolic for every p > 1");
        return v;
    }
    if (profile != nullptr) {
        Verdict v = classify_radial(*profile, p);
        if (v.label != Label::Inconclusive) return v;
    }

    Exhaustion ex = Exhaustion::balls(g, {o}, policy.stages);
    PotentialSequence seq = harmonic_potential(g, o, ex, p, policy.solver);
    Verdict v;
    for (const auto& st : seq.stages) v.cap_sequence.push_back(st.cap);
    double cap_last = v.cap_sequence.back();

    double rel_change = 1.0;
    if (v.cap_sequence.size() >= 3) {
        double lo = cap_last, hi = cap_last;
        for (size_t i = v.cap_sequence.size() - 3; i < v.cap_sequence.size(); ++i) {
            lo = std::min(lo, v.cap_sequence[i]);
            hi = std::max(hi, v.cap_sequence[i]);
        }
        rel_change = (hi - lo) / std::max(hi, 1e-300);
    }
    double slope = detail::log_decay_slope(v.cap_sequence);

    if (cap_last < policy.parabolic_cap && slope < policy.decay_slope &&
        seq.extrapolated_limit < policy.parabolic_cap) {
        v.label = Label::Parabolic;
        v.null_energies = v.cap_sequence;
        v.evidence.push_back("capacity sequence decays (fitted slope " +
                             std::to_string(slope) + ")");
        v.evidence.push_back("null sequence with final energy " +
                             std::to_string(cap_last));
    } else if (cap_last > policy.hyperbolic_cap &&
               rel_change < policy.hyperbolic_rel_change) {
        v.label = Label::Hyperbolic;
        v.evidence.push_back("capacity stabilized at " + std::to_string(cap_last) +
                             " (relative change " + std::to_string(rel_change) + ")");
    } else {
        v.label = Label::Inconclusive;
        v.evidence.push_back("capacity sequence unresolved at stage " +
                             std::to_string(v.cap_sequence.size() - 1));
    }
    return v;
}

// --- Hardy weights and Poincare constants ---------------------------------

// mu = sum_i alpha_i cap_p(x_i, V) 1_{x_i}; then ||phi||_{p,mu}^p <= E_p(phi)
// for phi supported in V. Exists only in the hyperbolic (positive capacity)
// situation.
inline VertexFunction hardy_weight(const WeightedGraph& g, double p,
                                   const std::vector<Vertex>& points,
                                   const std::vector<double>& alpha,
                                   const std::vector<Vertex>& v_set,
                                   const SolverOptions& opts = {}) {
    if (points.empty() || points.size() != alpha.size())
        throw invalid_input("hardy_weight: points and weights must match and be nonempty");
    KahanSum total;
    for (double a : alpha) {
        if (a < 0.0) throw invalid_input("hardy_weight: weights must be non-negative");
        total.add(a);
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
        throw invalid_input("hardy_weight: weights must sum to 1");
    VertexFunction mu;
    double max_cap = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        double cap = capacity(g, {points[i]}, v_set, p, opts).value;
        max_cap = std::max(max_cap, cap);
        if (alpha[i] > 0.0) mu.support[points[i]] = alpha[i] * cap;
    }
    if (max_cap <= 1e-12)
        throw invalid_input("no Hardy weight exists: all capacities vanish");
    return mu;
}

// C(K,p) = sum_{x in K} cap_p(x, V)^{-1}: sum_{x in K} |phi(x)|^p <= C E_p(phi)
// for phi supported in V.
inline double poincare_constant(const WeightedGraph& g, const std::vector<Vertex>& k_set,
                                double p, const std::vector<Vertex>& v_set,
                                const SolverOptions& opts = {}) {
    if (k_set.empty()) throw invalid_input("poincare_constant: K is empty");
    KahanSum c;
    for (Vertex x : k_set) {
        double cap = capacity(g, {x}, v_set, p, opts).value;
        if (cap <= 1e-12)
            throw invalid_input("no Poincare constant: capacity vanishes at '" +
                                g.labels[x] + "'");
        c.add(1.0 / cap);
    }
    return c.value();
}

}  // namespace pgraph
