#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "pgraph/capacity.hpp"
#include "pgraph/flows.hpp"
#include "pgraph/graph.hpp"
#include "pgraph/khasminskii.hpp"
#include "pgraph/model.hpp"

namespace pgraph {

using nlohmann::json;

inline constexpr const char* kReportSchema = "pgraph-report-1";

inline json to_json(const WeightedGraph& g, const std::vector<double>& values) {
    json out = json::object();
    for (Vertex x = 0; x < g.size(); ++x) out[g.labels[x]] = values[x];
    return out;
}

inline json to_json(const VertexFunction& f, const WeightedGraph& g) {
    json out = json::object();
    out["default"] = f.default_value;
    json sup = json::object();
    for (const auto& [x, v] : f.support) sup[g.labels[x]] = v;
    out["support"] = sup;
    return out;
}

inline json to_json(const CapacityResult& r, const WeightedGraph& g,
                    bool with_minimizer = true) {
    json out;
    out["value"] = r.value;
    out["p"] = r.p;
    out["k_size"] = r.k_set.size();
    out["v_size"] = r.v_set.size();
    out["converged"] = r.report.converged;
    out["sweeps"] = r.report.sweeps;
    out["residual"] = r.report.residual;
    if (with_minimizer) out["minimizer"] = to_json(g, r.minimizer);
    return out;
}

inline json to_json(const PotentialSequence& seq) {
    json stages = json::array();
    for (size_t n = 0; n < seq.stages.size(); ++n) {
        const PotentialStage& st = seq.stages[n];
        stages.push_back({{"stage", n},
                          {"n_vertices", st.n_vertices},
                          {"cap", st.cap},
                          {"du_inf", st.du_inf},
                          {"runtime_ms", st.runtime_ms},
                          {"converged", st.converged},
                          {"sweeps", st.sweeps}});
    }
    return {{"stages", stages},
            {"monotone_u", seq.monotone_u},
            {"monotone_cap", seq.monotone_cap},
            {"extrapolated_limit", seq.extrapolated_limit},
            {"extrapolation_method", seq.extrapolation_method},
            {"extrapolation_residual", seq.extrapolation_residual}};
}

inline void write_csv(std::ostream& out, const PotentialSequence& seq) {
    out << "stage,n_vertices,cap,du_inf,runtime_ms\n";
    out.precision(17);
    for (size_t n = 0; n < seq.stages.size(); ++n) {
        const PotentialStage& st = seq.stages[n];
        out << n << ',' << st.n_vertices << ',' << st.cap << ',' << st.du_inf << ','
            << st.runtime_ms << '\n';
    }
}

inline json to_json(const SeriesReport& s) {
    const char* verdict = s.verdict == SeriesVerdict::Diverges    ? "Diverges"
                          : s.verdict == SeriesVerdict::Converges ? "Converges"
                                                                  : "Inconclusive";
    return {{"verdict", verdict}, {"exact", s.exact}, {"partial_sums", s.partial_sums}};
}

inline json to_json(const Verdict& v) {
    json out;
    out["label"] = to_string(v.label);
    out["evidence"] = v.evidence;
    out["exact"] = v.exact;
    if (!v.cap_sequence.empty()) out["cap_sequence"] = v.cap_sequence;
    if (!v.null_energies.empty()) out["null_energies"] = v.null_energies;
    if (v.green_at_root) out["green_at_root"] = *v.green_at_root;
    if (v.series) {
        const char* s = *v.series == SeriesVerdict::Diverges    ? "Diverges"
                        : *v.series == SeriesVerdict::Converges ? "Converges"
                                                                : "Inconclusive";
        out["series"] = s;
    }
    return out;
}

inline json to_json(const GreenReport& r, const WeightedGraph& g, bool with_values = true) {
    json out;
    out["status"] = r.status == GreenReport::Status::Ok          ? "Ok"
                    : r.status == GreenReport::Status::Parabolic ? "Parabolic"
                                                                 : "Inconclusive";
    out["note"] = r.note;
    if (r.status == GreenReport::Status::Ok) {
        out["value_at_root"] = r.value_at_root;
        out["scale"] = r.scale;
        out["defining_residual"] = r.defining_residual;
        out["off_root_residual"] = r.off_root_residual;
        out["cap_from_green"] = r.cap_from_green;
        if (with_values) out["g"] = to_json(g, r.g);
    }
    out["potentials"] = to_json(r.potentials);
    return out;
}

inline json to_json(const EdgeFlow& F, const WeightedGraph& g) {
    json out = json::array();
    for (const auto& [key, value] : F.f)
        out.push_back({{"x", g.labels[key.first]}, {"y", g.labels[key.second]}, {"F", value}});
    return out;
}

inline json to_json(const KnrCertificate& c, const WeightedGraph& g, bool with_flow = false) {
    json out{{"root_mass", c.root_mass},
             {"total_mass", c.total_mass},
             {"cap", c.cap},
             {"stage", c.stage}};
    if (with_flow) out["flow"] = to_json(c.flow, g);
    return out;
}

inline json to_json(const KhasminskiiRun& run, const WeightedGraph& g,
                    bool with_kappa = true) {
    json stages = json::array();
    for (const KhasminskiiStage& st : run.stages) {
        stages.push_back({{"n", st.n},
                          {"j_bar", st.j_bar},
                          {"sup_dev", st.sup_dev},
                          {"grad_increment", st.grad_increment},
                          {"annulus_norm", st.annulus_norm},
                          {"certified", st.certified},
                          {"tried", st.tried},
                          {"rho_sup", st.rho_sup},
                          {"sweeps", st.sweeps}});
    }
    json out{{"stages", stages},
             {"complete", run.complete},
             {"diagnostic", run.diagnostic},
             {"truncation", run.truncation},
             {"monotone", run.monotone},
             {"superharmonic_min", run.superharmonic_min},
             {"exhaustion_terms", run.f.term_stages.size()},
             {"exhaustion_energy", run.f.energy},
             {"exhaustion_energy_bound", run.f.energy_bound}};
    if (with_kappa) out["kappa"] = to_json(g, run.kappa);
    return out;
}

}  // namespace pgraph
