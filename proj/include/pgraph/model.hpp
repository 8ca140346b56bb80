#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pgraph/graph.hpp"
#include "pgraph/operators.hpp"

namespace pgraph {

// Closed-form non-negative sequence a(r), r = 0,1,2,... Used for sphere
// sizes, line weights and star spoke weights. Supported tokens:
//   "1", "2.5", ...          constant
//   "r+1"                    (r+1)
//   "(r+1)^2", "(n+1)^-2"    power of r+1 (real exponent)
//   "2^r", "0.5^n"           geometric
struct SequenceSpec {
    enum class Kind { Constant, Polynomial, Geometric, Array };
    Kind kind = Kind::Constant;
    double coeff = 1.0;     // constant value / polynomial coefficient / geometric scale
    double degree = 0.0;    // polynomial exponent of (r+1)
    double base = 1.0;      // geometric base
    std::vector<double> values;  // Array

    double at(int r) const {
        switch (kind) {
            case Kind::Constant: return coeff;
            case Kind::Polynomial: return coeff * std::pow(r + 1.0, degree);
            case Kind::Geometric: return coeff * std::pow(base, r);
            case Kind::Array:
                if (r < 0 || r >= static_cast<int>(values.size()))
                    throw invalid_input("sequence value requested beyond tabulated range");
                return values[r];
        }
        return 0.0;
    }

    bool summable() const {
        switch (kind) {
            case Kind::Constant: return coeff == 0.0;
            case Kind::Polynomial: return degree < -1.0;
            case Kind::Geometric: return base < 1.0;
            case Kind::Array: return false;  // finite tabulation, no claim
        }
        return false;
    }

    static SequenceSpec constant(double v) { return {Kind::Constant, v, 0.0, 1.0, {}}; }
    static SequenceSpec polynomial(double coeff, double degree) {
        return {Kind::Polynomial, coeff, degree, 1.0, {}};
    }
    static SequenceSpec geometric(double coeff, double base) {
        return {Kind::Geometric, coeff, 0.0, base, {}};
    }
    static SequenceSpec array(std::vector<double> v) {
        SequenceSpec s;
        s.kind = Kind::Array;
        s.values = std::move(v);
        return s;
    }

    static SequenceSpec parse(const std::string& token) {
        auto is_number = [](const std::string& t) {
            char* end = nullptr;
            std::strtod(t.c_str(), &end);
            return end != t.c_str() && *end == '\0';
        };
        if (is_number(token)) return constant(std::stod(token));
        if (token == "r+1" || token == "n+1") return polynomial(1.0, 1.0);
        auto caret = token.find('^');
        if (caret != std::string::npos) {
            std::string head = token.substr(0, caret);
            std::string exp = token.substr(caret + 1);
            if ((head == "(r+1)" || head == "(n+1)") && is_number(exp))
                return polynomial(1.0, std::stod(exp));
            if (is_number(head) && (exp == "r" || exp == "n"))
                return geometric(1.0, std::stod(head));
            if (is_number(head) && (exp == "-r" || exp == "-n"))
                return geometric(1.0, 1.0 / std::stod(head));
        }
        throw invalid_input("cannot parse sequence token '" + token + "'");
    }
};

enum class Family { Star, Wheel, StarLine, WeightedLine, Tree, AntiTree, Lattice };

struct FamilySpec {
    Family family;
    int d = 2;          // Tree branching factor / Lattice dimension
    SequenceSpec seq;   // sphere sizes / line weights / spoke weights

    static FamilySpec tree(int d) { return {Family::Tree, d, SequenceSpec::constant(1)}; }
    static FamilySpec anti_tree(SequenceSpec s) { return {Family::AntiTree, 0, std::move(s)}; }
    static FamilySpec weighted_line(SequenceSpec b) {
        return {Family::WeightedLine, 0, std::move(b)};
    }
    static FamilySpec line() { return weighted_line(SequenceSpec::constant(1.0)); }
    static FamilySpec star(SequenceSpec w = SequenceSpec::geometric(0.5, 0.5)) {
        return {Family::Star, 0, std::move(w)};
    }
    static FamilySpec wheel(SequenceSpec w = SequenceSpec::geometric(0.5, 0.5)) {
        return {Family::Wheel, 0, std::move(w)};
    }
    static FamilySpec star_line(SequenceSpec w = SequenceSpec::geometric(0.5, 0.5)) {
        return {Family::StarLine, 0, std::move(w)};
    }
    static FamilySpec lattice(int d) { return {Family::Lattice, d, SequenceSpec::constant(1)}; }
};

// --- model graph profiles -------------------------------------------------

struct ProfileTail {
    enum class Kind { None, Geometric, Polynomial };
    Kind kind = Kind::None;
    double ratio = 1.0;    // boundary_area(r+1)/boundary_area(r) beyond the table
    double degree = 0.0;   // boundary_area(r) ~ coeff*(r+1)^degree beyond the table
    double coeff = 1.0;
};

// Sphere data of a spherically symmetric graph: weighted degrees k+/k-,
// sphere measures and boundary areas dB(r) = sum of edge weights between
// S_r and S_{r+1}. Tabulated to max_radius, optionally with a symbolic tail.
struct RadialProfile {
    std::vector<double> k_plus, k_minus, sphere_m, boundary_area;
    ProfileTail tail;
    int max_radius = 0;

    double term(int r, double p) const {  // dB(r)^{-1/(p-1)}
        return std::pow(area(r), -1.0 / (p - 1.0));
    }
    double area(int r) const {
        if (r <= max_radius) return boundary_area[r];
        switch (tail.kind) {
            case ProfileTail::Kind::Geometric:
                return boundary_area[max_radius] * std::pow(tail.ratio, r - max_radius);
            case ProfileTail::Kind::Polynomial:
                return tail.coeff * std::pow(r + 1.0, tail.degree);
            case ProfileTail::Kind::None:
                throw invalid_input("radial profile has no tail beyond r = " +
                                    std::to_string(max_radius));
        }
        return 0.0;
    }

    // m(S_r) = dB(r)/k+(r) = dB(r-1)/k-(r)
    double consistency_residual() const {
        double worst = 0.0;
        for (int r = 0; r <= max_radius; ++r) {
            worst = std::max(worst,
                             std::abs(sphere_m[r] - boundary_area[r] / k_plus[r]));
            if (r > 0)
                worst = std::max(worst,
                                 std::abs(sphere_m[r] - boundary_area[r - 1] / k_minus[r]));
        }
        return worst;
    }
};

inline std::optional<RadialProfile> profile_of(const FamilySpec& spec, int max_radius) {
    RadialProfile pr;
    pr.max_radius = max_radius;
    auto push = [&](double kp, double km, double sm, double area) {
        pr.k_plus.push_back(kp);
        pr.k_minus.push_back(km);
        pr.sphere_m.push_back(sm);
        pr.boundary_area.push_back(area);
    };
    switch (spec.family) {
        case Family::Tree: {
            double d = spec.d;
            for (int r = 0; r <= max_radius; ++r)
                push(d, r == 0 ? 0.0 : 1.0, std::pow(d, r), std::pow(d, r + 1));
            pr.tail = {ProfileTail::Kind::Geometric, d, 0.0, 1.0};
            return pr;
        }
        case Family::AntiTree: {
            for (int r = 0; r <= max_radius; ++r) {
                double s = spec.seq.at(r), s_next = spec.seq.at(r + 1);
                double s_prev = r == 0 ? 0.0 : spec.seq.at(r - 1);
                push(s_next, s_prev, s, s * s_next);
            }
            if (spec.seq.kind == SequenceSpec::Kind::Geometric)
                pr.tail = {ProfileTail::Kind::Geometric, spec.seq.base * spec.seq.base, 0.0,
                           1.0};
            else if (spec.seq.kind == SequenceSpec::Kind::Polynomial)
                pr.tail = {ProfileTail::Kind::Polynomial, 1.0, 2.0 * spec.seq.degree,
                           spec.seq.coeff * spec.seq.coeff};
            else if (spec.seq.kind == SequenceSpec::Kind::Constant)
                pr.tail = {ProfileTail::Kind::Polynomial, 1.0, 0.0,
                           spec.seq.coeff * spec.seq.coeff};
            return pr;
        }
        case Family::WeightedLine: {
            for (int r = 0; r <= max_radius; ++r)
                push(spec.seq.at(r), r == 0 ? 0.0 : spec.seq.at(r - 1), 1.0, spec.seq.at(r));
            if (spec.seq.kind == SequenceSpec::Kind::Geometric)
                pr.tail = {ProfileTail::Kind::Geometric, spec.seq.base, 0.0, 1.0};
            else if (spec.seq.kind == SequenceSpec::Kind::Polynomial)
                pr.tail = {ProfileTail::Kind::Polynomial, 1.0, spec.seq.degree,
                           spec.seq.coeff};
            else if (spec.seq.kind == SequenceSpec::Kind::Constant)
                pr.tail = {ProfileTail::Kind::Polynomial, 1.0, 0.0, spec.seq.coeff};
            return pr;
        }
        default:
            // star/wheel are not radially reducible (weights vary inside the
            // "sphere"), lattices are not model graphs
            return std::nullopt;
    }
}

// --- generators -----------------------------------------------------------

namespace detail {
inline std::string pad(long n, int width = 8) {
    std::string s = std::to_string(n);
    return std::string(width > static_cast<int>(s.size()) ? width - s.size() : 0, '0') + s;
}
}  // namespace detail

// Materializes the family as a finite truncation. `truncation` is the ball
// radius for radially generated families and the spoke count for star-like
// ones. Frontier vertices are flagged so downstream code can report honest
// truncation diagnostics.
inline WeightedGraph generate(const FamilySpec& spec, int truncation) {
    if (truncation < 1) throw invalid_input("generate: truncation must be >= 1");
    GraphBuilder b;
    std::vector<std::string> frontier_labels;
    std::string root_label;

    switch (spec.family) {
        case Family::Tree: {
            if (spec.d < 1) throw invalid_input("tree branching factor must be >= 1");
            root_label = detail::pad(0);
            b.add_vertex(root_label, 1.0, 0.0);
            long next = 1;
            std::vector<long> sphere{0};
            for (int r = 1; r <= truncation; ++r) {
                std::vector<long> next_sphere;
                for (long parent : sphere)
                    for (int k = 0; k < spec.d; ++k) {
                        long id = next++;
                        b.add_vertex(detail::pad(id), 1.0, 0.0);
                        b.add_edge(b.vertex(detail::pad(parent)), b.vertex(detail::pad(id)),
                                   1.0);
                        next_sphere.push_back(id);
                        if (r == truncation) frontier_labels.push_back(detail::pad(id));
                    }
                sphere = std::move(next_sphere);
            }
            break;
        }
        case Family::AntiTree: {
            long next = 0;
            std::vector<long> prev;
            for (int r = 0; r <= truncation; ++r) {
                long count = std::lround(spec.seq.at(r));
                if (count < 1) throw invalid_input("anti-tree sphere size must be >= 1");
                std::vector<long> sphere;
                for (long k = 0; k < count; ++k) {
                    long id = next++;
                    b.add_vertex(detail::pad(id), 1.0, 0.0);
                    sphere.push_back(id);
                    if (r == truncation) frontier_labels.push_back(detail::pad(id));
                }
                for (long u : prev)
                    for (long v : sphere)
                        b.add_edge(b.vertex(detail::pad(u)), b.vertex(detail::pad(v)), 1.0);
                prev = std::move(sphere);
            }
            root_label = detail::pad(0);
            break;
        }
        case Family::WeightedLine: {
            for (int r = 0; r <= truncation; ++r) {
                double w = spec.seq.at(std::max(r - 1, 0));
                if (!(spec.seq.at(r) > 0.0) || !(w > 0.0))
                    throw invalid_input("line weights must be positive");
                b.add_vertex(detail::pad(r), 1.0, 0.0);
                if (r > 0)
                    b.add_edge(b.vertex(detail::pad(r - 1)), b.vertex(detail::pad(r)),
                               spec.seq.at(r - 1));
            }
            root_label = detail::pad(0);
            frontier_labels.push_back(detail::pad(truncation));
            break;
        }
        case Family::Star:
        case Family::Wheel: {
            if (!spec.seq.summable())
                throw invalid_input("star spoke weights must be summable");
            root_label = detail::pad(0);
            b.add_vertex(root_label, 1.0, 0.0);
            for (int n = 1; n <= truncation; ++n) {
                double w = spec.seq.at(n);
                b.add_vertex(detail::pad(n), 1.0, 0.0);
                b.add_edge(b.vertex(root_label), b.vertex(detail::pad(n)), w);
                if (spec.family == Family::Wheel && n > 1)
                    b.add_edge(b.vertex(detail::pad(n - 1)), b.vertex(detail::pad(n)), 1.0);
            }
            // the center's neighborhood is cut off as well as the last spoke
            frontier_labels.push_back(root_label);
            frontier_labels.push_back(detail::pad(truncation));
            break;
        }
        case Family::StarLine: {
            if (!spec.seq.summable())
                throw invalid_input("star spoke weights must be summable");
            root_label = "c";
            b.add_vertex(root_label, 1.0, 0.0);
            for (int n = 1; n <= truncation; ++n) {
                b.add_vertex("s" + detail::pad(n), 1.0, 0.0);
                b.add_edge(b.vertex(root_label), b.vertex("s" + detail::pad(n)),
                           spec.seq.at(n));
                b.add_vertex("l" + detail::pad(n), 1.0, 0.0);
                b.add_edge(b.vertex(n == 1 ? root_label : "l" + detail::pad(n - 1)),
                           b.vertex("l" + detail::pad(n)), 1.0);
            }
            frontier_labels.push_back(root_label);
            frontier_labels.push_back("s" + detail::pad(truncation));
            frontier_labels.push_back("l" + detail::pad(truncation));
            break;
        }
        case Family::Lattice: {
            if (spec.d < 1) throw invalid_input("lattice dimension must be >= 1");
            // l1 ball of Z^d, coordinates encoded sign-magnitude
            auto label_of = [&](const std::vector<int>& coord) {
                std::string s;
                for (int v : coord)
                    s += (v < 0 ? "m" : "p") + detail::pad(std::abs(v), 4);
                return s;
            };
            std::vector<std::vector<int>> frontier_coords;
            std::vector<std::vector<int>> queue{std::vector<int>(spec.d, 0)};
            b.add_vertex(label_of(queue[0]), 1.0, 0.0);
            root_label = label_of(queue[0]);
            for (size_t head = 0; head < queue.size(); ++head) {
                auto coord = queue[head];
                int norm = 0;
                for (int v : coord) norm += std::abs(v);
                for (int axis = 0; axis < spec.d; ++axis)
                    for (int dir : {-1, 1}) {
                        auto nb = coord;
                        nb[axis] += dir;
                        int nb_norm = 0;
                        for (int v : nb) nb_norm += std::abs(v);
                        if (nb_norm > truncation) continue;
                        std::string lbl = label_of(nb);
                        if (!b.has_vertex(lbl)) {
                            b.add_vertex(lbl, 1.0, 0.0);
                            queue.push_back(nb);
                            if (nb_norm == truncation) frontier_labels.push_back(lbl);
                        }
                        if (nb_norm > norm || (nb_norm == norm && nb > coord))
                            b.add_edge(b.vertex(label_of(coord)), b.vertex(lbl), 1.0);
                    }
            }
            break;
        }
    }

    WeightedGraph g = b.finish();
    g.truncated = true;
    g.truncation_radius = truncation;
    g.root = g.index_of(root_label);
    for (const std::string& lbl : frontier_labels) g.frontier[g.index_of(lbl)] = 1;
    return g;
}

// --- radial operators -----------------------------------------------------

inline double radial_p_laplacian(const RadialProfile& pr, const std::vector<double>& f,
                                 int r, double p) {
    if (r < 0 || r + 1 >= static_cast<int>(f.size()) || r > pr.max_radius - 1)
        throw invalid_input("radial_p_laplacian: radius out of tabulated range");
    double out = pr.k_plus[r] * signed_power(f[r] - f[r + 1], p);
    if (r > 0) out += pr.k_minus[r] * signed_power(f[r] - f[r - 1], p);
    return out;
}

enum class SeriesVerdict { Diverges, Converges, Inconclusive };

struct SeriesReport {
    SeriesVerdict verdict = SeriesVerdict::Inconclusive;
    std::vector<double> partial_sums;  // sum_{r=1}^{R} dB(r)^{-1/(p-1)}
    bool exact = false;                // verdict certified by the symbolic tail
};

// Series criterion: sum_r dB(r)^{-1/(p-1)} diverges  =>  p-parabolic;
// for model graphs the divergence is equivalent to parabolicity.
inline SeriesReport area_series_test(const RadialProfile& pr, double p) {
    if (!(p > 1.0)) throw invalid_input("area_series_test: p must be > 1");
    SeriesReport rep;
    KahanSum s;
    for (int r = 1; r <= pr.max_radius; ++r) {
        s.add(pr.term(r, p));
        rep.partial_sums.push_back(s.value());
    }
    switch (pr.tail.kind) {
        case ProfileTail::Kind::Geometric:
            rep.exact = true;
            rep.verdict =
                pr.tail.ratio > 1.0 ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
            break;
        case ProfileTail::Kind::Polynomial:
            rep.exact = true;
            rep.verdict = pr.tail.degree > p - 1.0 ? SeriesVerdict::Converges
                                                   : SeriesVerdict::Diverges;
            break;
        case ProfileTail::Kind::None:
            rep.verdict = SeriesVerdict::Inconclusive;
            break;
    }
    return rep;
}

struct RadialGreenValue {
    double value = 0.0;
    bool exact = false;            // tail summed in closed form
    double remainder_bound = 0.0;  // for polynomial tails: integral bound on the rest
};

// g(r) = sum_{k>=r} dB(k)^{-1/(p-1)}. Empty when the series diverges
// (parabolic signal).
inline std::optional<RadialGreenValue> radial_green(const RadialProfile& pr, double p,
                                                    int r, int truncation) {
    SeriesReport series = area_series_test(pr, p);
    if (series.verdict == SeriesVerdict::Diverges) return std::nullopt;
    if (r < 0) throw invalid_input("radial_green: negative radius");
    int cut = std::min(truncation, pr.max_radius);
    KahanSum s;
    for (int k = r; k <= cut; ++k) s.add(pr.term(k, p));
    RadialGreenValue out;
    if (pr.tail.kind == ProfileTail::Kind::Geometric && pr.tail.ratio > 1.0) {
        // term ratio rho^{-1/(p-1)} < 1; sum the geometric tail exactly
        double q = std::pow(pr.tail.ratio, -1.0 / (p - 1.0));
        double first = std::pow(pr.area(cut + 1), -1.0 / (p - 1.0));
        s.add(first / (1.0 - q));
        out.exact = true;
    } else if (pr.tail.kind == ProfileTail::Kind::Polynomial &&
               pr.tail.degree > p - 1.0) {
        double alpha = pr.tail.degree / (p - 1.0);  // terms ~ coeff^... (k+1)^-alpha
        double scale = std::pow(pr.tail.coeff, -1.0 / (p - 1.0));
        out.remainder_bound = scale * std::pow(cut + 1.0, 1.0 - alpha) / (alpha - 1.0);
    } else if (series.verdict == SeriesVerdict::Inconclusive) {
        out.remainder_bound = std::numeric_limits<double>::infinity();
    }
    out.value = s.value();
    return out;
}

// Closed form for constant curvature ratio kappa = k+/k- > 1 beyond r0:
// g(r) = [(kappa^{1/(p-1)} - 1) dB(r-1)^{1/(p-1)}]^{-1}.
inline double curvature_ratio_green(const RadialProfile& pr, double p, int r, int r0) {
    if (r <= r0) throw invalid_input("curvature_ratio_green: requires r > r0");
    double kappa = 0.0;
    for (int k = r0 + 1; k <= pr.max_radius; ++k) {
        if (pr.k_minus[k] == 0.0)
            throw invalid_input("curvature_ratio_green: k- vanishes at r = " +
                                std::to_string(k));
        double ratio = pr.k_plus[k] / pr.k_minus[k];
        if (kappa == 0.0)
            kappa = ratio;
        else if (std::abs(ratio - kappa) > 1e-12 * std::max(1.0, kappa))
            throw invalid_input("curvature ratio not constant beyond r0");
    }
    if (!(kappa > 1.0)) throw invalid_input("curvature ratio must exceed 1");
    if (pr.tail.kind == ProfileTail::Kind::Geometric &&
        std::abs(pr.tail.ratio - kappa) > 1e-12 * kappa)
        throw invalid_input("profile tail inconsistent with constant curvature ratio");
    double inv = p - 1.0;
    return 1.0 / ((std::pow(kappa, 1.0 / inv) - 1.0) * std::pow(pr.area(r - 1), 1.0 / inv));
}

struct RadialNullTerm {
    std::vector<double> values;  // e_n on r = 0..n+1
    double energy = 0.0;         // = c_n^{p-1} exactly
    double c_n = 0.0;
};

// e_n(0) = 1, e_n = 0 beyond r = n, with increments proportional to
// dB(r)^{-1/(p-1)}; the energy-optimal radial cutoff.
inline RadialNullTerm radial_null_sequence(const RadialProfile& pr, double p, int n) {
    if (n > pr.max_radius - 1 && pr.tail.kind == ProfileTail::Kind::None)
        throw invalid_input("radial_null_sequence: n beyond tabulated range");
    RadialNullTerm out;
    KahanSum norm;
    for (int r = 0; r <= n; ++r) norm.add(pr.term(r, p));
    out.c_n = 1.0 / norm.value();
    out.values.resize(n + 2);
    out.values[0] = 1.0;
    for (int r = 0; r <= n; ++r)
        out.values[r + 1] = out.values[r] - out.c_n * pr.term(r, p);
    out.values[n + 1] = 0.0;  // telescopes to zero exactly by construction
    out.energy = std::pow(out.c_n, p - 1.0);
    return out;
}

}  // namespace pgraph
