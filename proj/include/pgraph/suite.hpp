#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pgraph/capacity.hpp"
#include "pgraph/flows.hpp"
#include "pgraph/khasminskii.hpp"
#include "pgraph/model.hpp"
#include "pgraph/serialize.hpp"

namespace pgraph {

// What the closed-form theory says about each generated family, used as an
// annotation next to numeric verdicts (never as evidence).
inline std::optional<Label> expected_family_label(const FamilySpec& spec, double p) {
    switch (spec.family) {
        case Family::Star:
        case Family::Wheel:
        case Family::StarLine:
            return Label::Parabolic;
        case Family::Tree:
            return spec.d >= 2 ? std::optional<Label>(Label::Hyperbolic)
                               : std::optional<Label>(Label::Parabolic);
        case Family::Lattice:
            return spec.d <= p ? Label::Parabolic : Label::Hyperbolic;
        case Family::WeightedLine:
        case Family::AntiTree: {
            if (auto profile = profile_of(spec, 4)) {
                SeriesReport s = area_series_test(*profile, p);
                if (s.exact)
                    return s.verdict == SeriesVerdict::Diverges ? Label::Parabolic
                                                                : Label::Hyperbolic;
            }
            return std::nullopt;
        }
    }
    return std::nullopt;
}

struct SuiteSection {
    std::string name;
    std::optional<Label> label;  // only set when the certificate is definitive
    std::string summary;
    json details;
};

struct SuiteConfig {
    int stages = 8;
    int truncation = 60;
    SolverOptions solver;
    unsigned seed = 12345;
    int subadditivity_trials = 25;
    int khasminskii_stages = 2;
};

struct SuiteReport {
    std::string descriptor;
    double p = 2.0;
    std::vector<SuiteSection> sections;
    Verdict final_verdict;
    bool contradiction = false;
    std::string expected_annotation;  // e.g. "parabolic (theory)" for lattices
    json agreement;                   // per-section label matrix
};

namespace detail {

inline std::string label_or_dash(const std::optional<Label>& l) {
    return l ? to_string(*l) : "-";
}

}  // namespace detail

// Runs every applicable characterization, records agreement and fails
// loudly (contradiction flag) if two definitive certificates disagree.
inline SuiteReport run_suite(const WeightedGraph& g, const FamilySpec* family, double p,
                             const SuiteConfig& config = {}) {
    SuiteReport rep;
    rep.p = p;
    rep.descriptor = "graph(" + std::to_string(g.size()) + " vertices)";
    Vertex o = g.root >= 0 ? g.root : 0;

    std::optional<RadialProfile> profile;
    if (family) {
        int radius = g.truncated ? g.truncation_radius : config.truncation;
        profile = profile_of(*family, radius);
        if (auto expected = expected_family_label(*family, p))
            rep.expected_annotation =
                std::string(*expected == Label::Parabolic ? "parabolic" : "hyperbolic") +
                " (theory)";
    }

    // potential short-circuit
    if (g.has_potential()) {
        SuiteSection s;
        s.name = "positive-potential";
        s.label = Label::Hyperbolic;
        s.summary = "c is nonzero somewhere: hyperbolic for every p > 1";
        rep.sections.push_back(std::move(s));
    }

    // exact series test on model graphs
    if (profile) {
        SuiteSection s;
        s.name = "series";
        SeriesReport series = area_series_test(*profile, p);
        s.details = to_json(series);
        if (series.exact && !g.has_potential()) {
            s.label = series.verdict == SeriesVerdict::Diverges ? Label::Parabolic
                                                                : Label::Hyperbolic;
            s.summary = std::string("boundary-area series ") +
                        (series.verdict == SeriesVerdict::Diverges ? "diverges" : "converges");
        } else {
            s.summary = "series tail not symbolic";
        }
        rep.sections.push_back(std::move(s));
    }

    // capacity decay along the ball exhaustion
    Exhaustion ex = Exhaustion::balls(g, {o}, config.stages);
    PotentialSequence pots = harmonic_potential(g, o, ex, p, config.solver);
    std::vector<double> caps;
    for (const auto& st : pots.stages) caps.push_back(st.cap);
    {
        SuiteSection s;
        s.name = "capacity";
        ClassifyPolicy policy;
        policy.stages = config.stages;
        policy.solver = config.solver;
        Verdict v = classify(g, o, p, policy);
        s.details = to_json(v);
        bool strictly_decreasing = true;
        for (size_t i = 1; i < caps.size(); ++i)
            if (!(caps[i] < caps[i - 1])) strictly_decreasing = false;
        s.details["strictly_decreasing"] = strictly_decreasing;
        if (v.label != Label::Inconclusive) s.label = v.label;
        s.summary = std::string("classify: ") + to_string(v.label);
        rep.sections.push_back(std::move(s));
    }

    // null sequence energies (the stage capacities themselves)
    {
        SuiteSection s;
        s.name = "null-sequence";
        s.details = {{"energies", caps}};
        bool decaying = caps.size() >= 2 && caps.back() < 0.5 * caps.front();
        if (!caps.empty() && caps.back() < 1e-3 && decaying) {
            s.label = Label::Parabolic;
            s.summary = "constructive null sequence, final energy " +
                        std::to_string(caps.back());
        } else {
            s.summary = "final energy " + std::to_string(caps.empty() ? 0.0 : caps.back());
        }
        rep.sections.push_back(std::move(s));
    }

    // Green's function estimate
    GreenReport green = greens_function(g, o, ex, p, config.solver);
    {
        SuiteSection s;
        s.name = "green";
        s.details = to_json(green, g, /*with_values=*/false);
        if (green.status == GreenReport::Status::Ok) {
            s.label = Label::Hyperbolic;
            s.summary = "Green's function with g(o,o) = " +
                        std::to_string(green.value_at_root);
        } else if (green.status == GreenReport::Status::Parabolic) {
            s.summary = "capacity decay signals no Green's function";
        } else {
            s.summary = "unresolved at this stage count";
        }
        rep.sections.push_back(std::move(s));
    }

    // Poincare constant on the last stage region (restricted: informational)
    {
        SuiteSection s;
        s.name = "poincare";
        try {
            double c = poincare_constant(g, {o}, p, pots.stages.back().region,
                                         config.solver);
            s.summary = "restricted constant " + std::to_string(c);
            s.details = {{"constant", c}, {"region_size", pots.stages.back().region.size()}};
        } catch (const invalid_input& e) {
            s.summary = e.what();
        }
        rep.sections.push_back(std::move(s));
    }

    // Ahlfors probe with u = 1 - g/g(o,o) when a Green's function is at hand
    if (green.status == GreenReport::Status::Ok && green.value_at_root > 0.0) {
        SuiteSection s;
        s.name = "ahlfors";
        std::vector<double> u(g.size());
        for (Vertex x = 0; x < g.size(); ++x) u[x] = 1.0 - green.g[x] / green.value_at_root;
        std::vector<Vertex> v_set;
        for (Vertex x = 0; x < g.size(); ++x)
            if (x != o) v_set.push_back(x);
        AhlforsReport a = ahlfors_check(g, u, region(g, v_set), p);
        s.details = {{"sup_closure", a.sup_closure},
                     {"sup_boundary", a.sup_boundary},
                     {"subharmonic", a.subharmonic_on_v},
                     {"boundary_attains", a.boundary_attains}};
        s.summary = a.boundary_attains ? "boundary attains the sup"
                                       : "sup exceeds the boundary sup (hyperbolic-type witness)";
        rep.sections.push_back(std::move(s));
    }

    // KNR flow certificate from the last equilibrium potential
    {
        SuiteSection s;
        s.name = "knr";
        KnrCertificate cert = knr_certificate(g, o, ex, p, config.solver);
        s.details = to_json(cert, g);
        s.summary = "root mass " + std::to_string(cert.root_mass) + ", total " +
                    std::to_string(cert.total_mass);
        rep.sections.push_back(std::move(s));
    }

    // collect definitive labels before the constructive section
    std::optional<Label> definitive;
    for (const SuiteSection& s : rep.sections) {
        if (!s.label) continue;
        if (definitive && *definitive != *s.label) rep.contradiction = true;
        if (!definitive) definitive = s.label;
    }

    // Khasminskii construction, attempted only on certified parabolic inputs
    if (definitive == Label::Parabolic && !rep.contradiction) {
        SuiteSection s;
        s.name = "khasminskii";
        try {
            KhasminskiiRun run = khasminskii_potential(
                g, {o}, p, config.khasminskii_stages,
                g.truncated ? g.truncation_radius : config.truncation, config.solver,
                profile ? &*profile : nullptr);
            s.details = to_json(run, g, /*with_kappa=*/false);
            s.summary = run.complete ? "construction completed"
                                     : ("partial: " + run.diagnostic);
        } catch (const invalid_input& e) {
            s.summary = e.what();
        }
        rep.sections.push_back(std::move(s));
    }

    // experimental: search for strong-subadditivity violations (not asserted)
    {
        SuiteSection s;
        s.name = "subadditivity-experiment";
        std::mt19937 rng(config.seed);
        std::vector<Vertex> pool = ball(g, {o}, 3);
        std::uniform_int_distribution<size_t> pick(0, pool.empty() ? 0 : pool.size() - 1);
        int weak_violations = 0, strong_violations = 0, trials = 0;
        const auto& v_region = pots.stages.back().region;
        for (int t = 0; t < config.subadditivity_trials && pool.size() >= 2; ++t) {
            std::set<Vertex> k1{pool[pick(rng)], pool[pick(rng)]};
            std::set<Vertex> k2{pool[pick(rng)], pool[pick(rng)]};
            std::set<Vertex> uni(k1), inter;
            uni.insert(k2.begin(), k2.end());
            for (Vertex x : k1)
                if (k2.count(x)) inter.insert(x);
            auto cap_of = [&](const std::set<Vertex>& k) {
                if (k.empty()) return 0.0;
                return capacity(g, {k.begin(), k.end()}, v_region, p, config.solver).value;
            };
            double c1 = cap_of(k1), c2 = cap_of(k2), cu = cap_of(uni), ci = cap_of(inter);
            ++trials;
            if (cu > c1 + c2 + 1e-8) ++weak_violations;
            if (cu + ci > c1 + c2 + 1e-8) ++strong_violations;
        }
        s.details = {{"trials", trials},
                     {"weak_violations", weak_violations},
                     {"strong_violations", strong_violations}};
        s.summary = "strong-subadditivity violations observed: " +
                    std::to_string(strong_violations);
        rep.sections.push_back(std::move(s));
    }

    // final verdict and agreement matrix
    rep.agreement = json::array();
    std::optional<Label> final_label;
    bool exact_seen = false;
    for (const SuiteSection& s : rep.sections) {
        rep.agreement.push_back({{"section", s.name}, {"label", detail::label_or_dash(s.label)}});
        if (!s.label) continue;
        bool exact = s.name == "series" || s.name == "positive-potential";
        if (final_label && *final_label != *s.label) rep.contradiction = true;
        if (!final_label || (exact && !exact_seen)) {
            final_label = s.label;
            exact_seen = exact_seen || exact;
        }
    }
    rep.final_verdict.label = final_label.value_or(Label::Inconclusive);
    for (const SuiteSection& s : rep.sections)
        if (s.label)
            rep.final_verdict.evidence.push_back(s.name + ": " + s.summary);
    rep.final_verdict.cap_sequence = caps;
    if (rep.contradiction) {
        rep.final_verdict.label = Label::Inconclusive;
        rep.final_verdict.evidence.push_back("CONTRADICTION: certificates disagree");
    }
    return rep;
}

inline json to_json(const SuiteReport& rep) {
    json sections = json::array();
    for (const SuiteSection& s : rep.sections)
        sections.push_back({{"name", s.name},
                            {"label", detail::label_or_dash(s.label)},
                            {"summary", s.summary},
                            {"details", s.details}});
    return {{"schema", kReportSchema},
            {"descriptor", rep.descriptor},
            {"p", rep.p},
            {"sections", sections},
            {"agreement", rep.agreement},
            {"contradiction", rep.contradiction},
            {"expected", rep.expected_annotation},
            {"verdict", to_json(rep.final_verdict)}};
}

}  // namespace pgraph
