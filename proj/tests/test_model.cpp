#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pgraph/model.hpp"
#include "pgraph/operators.hpp"

using namespace pgraph;
using Catch::Approx;

TEST_CASE("sequence token parsing") {
    CHECK(SequenceSpec::parse("1").at(5) == 1.0);
    CHECK(SequenceSpec::parse("2.5").at(0) == 2.5);
    CHECK(SequenceSpec::parse("r+1").at(3) == 4.0);
    CHECK(SequenceSpec::parse("n+1").at(0) == 1.0);
    CHECK(SequenceSpec::parse("(r+1)^2").at(2) == 9.0);
    CHECK(SequenceSpec::parse("(n+1)^-2").at(1) == Approx(0.25));
    CHECK(SequenceSpec::parse("2^r").at(3) == 8.0);
    CHECK(SequenceSpec::parse("0.5^n").at(2) == Approx(0.25));
    CHECK(SequenceSpec::parse("2^-n").at(2) == Approx(0.25));
    CHECK_THROWS_AS(SequenceSpec::parse("garbage"), invalid_input);
    CHECK(SequenceSpec::geometric(1.0, 0.5).summable());
    CHECK_FALSE(SequenceSpec::polynomial(1.0, -1.0).summable());
    CHECK(SequenceSpec::polynomial(1.0, -2.0).summable());
}

TEST_CASE("tree generator and profile") {
    WeightedGraph g = generate(FamilySpec::tree(2), 3);
    CHECK(g.size() == 15);  // 1 + 2 + 4 + 8
    CHECK(g.truncated);
    CHECK(g.truncation_radius == 3);
    int frontier = 0;
    for (char f : g.frontier) frontier += f;
    CHECK(frontier == 8);
    CHECK(g.degree(g.root) == Approx(2.0));

    auto pr = profile_of(FamilySpec::tree(2), 6);
    REQUIRE(pr);
    CHECK(pr->boundary_area[0] == 2.0);
    CHECK(pr->boundary_area[3] == 16.0);
    CHECK(pr->consistency_residual() < 1e-12);
    CHECK(pr->area(10) == Approx(2048.0));  // geometric tail continues the table
}

TEST_CASE("anti-tree generator matches its profile") {
    FamilySpec spec = FamilySpec::anti_tree(SequenceSpec::parse("r+1"));
    WeightedGraph g = generate(spec, 4);
    CHECK(g.size() == 1 + 2 + 3 + 4 + 5);
    auto pr = profile_of(spec, 4);
    REQUIRE(pr);
    // boundary area between spheres r and r+1 is s(r) * s(r+1)
    CHECK(pr->boundary_area[2] == Approx(12.0));
    CHECK(pr->consistency_residual() < 1e-12);
    // count edges between spheres 2 and 3 in the generated graph
    int count = 0;
    for (Vertex x = 0; x < g.size(); ++x)
        for (const Edge& e : g.adj[x])
            if (e.to > x) ++count;
    CHECK(count == 2 + 6 + 12 + 20);
}

TEST_CASE("weighted line generator") {
    FamilySpec spec = FamilySpec::weighted_line(SequenceSpec::parse("(n+1)^2"));
    WeightedGraph g = generate(spec, 5);
    CHECK(g.size() == 6);
    CHECK(g.edge_weight(g.index_of("00000002"), g.index_of("00000003")) == Approx(9.0));
    auto pr = profile_of(spec, 5);
    REQUIRE(pr);
    CHECK(pr->boundary_area[2] == Approx(9.0));
    CHECK(pr->consistency_residual() < 1e-12);
}

TEST_CASE("star generators require summable spokes") {
    CHECK_THROWS_AS(generate(FamilySpec::star(SequenceSpec::constant(1.0)), 5),
                    invalid_input);
    WeightedGraph star = generate(FamilySpec::star(), 5);
    CHECK(star.size() == 6);
    CHECK(star.degree(star.root) == Approx(0.25 + 0.125 + 0.0625 + 0.03125 + 0.015625));
    WeightedGraph wheel = generate(FamilySpec::wheel(), 5);
    CHECK(wheel.degree(wheel.index_of("00000003")) > 2.0);  // rim edges present
    WeightedGraph sl = generate(FamilySpec::star_line(), 4);
    CHECK(sl.size() == 9);  // center + 4 spokes + 4 line vertices
}

TEST_CASE("lattice generator") {
    WeightedGraph g = generate(FamilySpec::lattice(2), 2);
    CHECK(g.size() == 13);  // l1 ball of radius 2 in Z^2
    CHECK(g.degree(g.root) == Approx(4.0));
    CHECK_FALSE(profile_of(FamilySpec::lattice(2), 4).has_value());
}

TEST_CASE("radial p-laplacian agrees with the graph operator") {
    FamilySpec spec = FamilySpec::tree(2);
    auto pr = profile_of(spec, 5);
    REQUIRE(pr);
    WeightedGraph g = generate(spec, 5);
    // radial function f(r) = 2^{-r}, mapped to vertices via BFS depth
    std::vector<double> radial(7);
    for (int r = 0; r <= 6; ++r) radial[r] = std::pow(2.0, -r);
    std::vector<int> depth(g.size(), -1);
    std::deque<Vertex> q{g.root};
    depth[g.root] = 0;
    while (!q.empty()) {
        Vertex x = q.front();
        q.pop_front();
        for (const Edge& e : g.adj[x])
            if (depth[e.to] < 0) {
                depth[e.to] = depth[x] + 1;
                q.push_back(e.to);
            }
    }
    std::vector<double> dense(g.size());
    for (Vertex x = 0; x < g.size(); ++x) dense[x] = radial[depth[x]];
    for (double p : {1.5, 2.0, 3.0}) {
        for (int r = 0; r <= 4; ++r) {
            // any vertex at depth r gives the same (per-vertex, m-free) value
            Vertex witness = -1;
            for (Vertex x = 0; x < g.size(); ++x)
                if (depth[x] == r) {
                    witness = x;
                    break;
                }
            double graph_value = weighted_p_laplacian(g, dense, witness, p);
            double radial_value = radial_p_laplacian(*pr, radial, r, p);
            CHECK(graph_value == Approx(radial_value).margin(1e-12));
        }
    }
    CHECK_THROWS_AS(radial_p_laplacian(*pr, radial, 6, 2.0), invalid_input);
}

TEST_CASE("area series verdicts") {
    auto tree = profile_of(FamilySpec::tree(2), 8);
    CHECK(area_series_test(*tree, 2.0).verdict == SeriesVerdict::Converges);
    CHECK(area_series_test(*tree, 4.0).verdict == SeriesVerdict::Converges);

    auto line = profile_of(FamilySpec::line(), 8);
    CHECK(area_series_test(*line, 2.0).verdict == SeriesVerdict::Diverges);
    CHECK(area_series_test(*line, 1.5).verdict == SeriesVerdict::Diverges);

    // anti-tree with spheres r+1: boundary area ~ r^2, terms r^{-2/(p-1)}
    auto anti = profile_of(FamilySpec::anti_tree(SequenceSpec::parse("r+1")), 8);
    CHECK(area_series_test(*anti, 2.0).verdict == SeriesVerdict::Converges);
    CHECK(area_series_test(*anti, 3.0).verdict == SeriesVerdict::Diverges);
    CHECK(area_series_test(*anti, 4.0).verdict == SeriesVerdict::Diverges);

    // squared line weights: terms (r+1)^{-2} at p=2
    auto sq = profile_of(FamilySpec::weighted_line(SequenceSpec::parse("(n+1)^2")), 8);
    CHECK(area_series_test(*sq, 2.0).verdict == SeriesVerdict::Converges);
    CHECK(area_series_test(*sq, 3.0).verdict == SeriesVerdict::Diverges);
    CHECK(area_series_test(*sq, 2.0).exact);
}

TEST_CASE("tree Green values in closed form") {
    auto pr = profile_of(FamilySpec::tree(2), 12);
    for (int r = 0; r <= 10; ++r) {
        auto green = radial_green(*pr, 2.0, r, 12);
        REQUIRE(green);
        CHECK(green->exact);
        CHECK(green->value == Approx(std::pow(2.0, -r)).epsilon(1e-12));
    }
    // parabolic profile yields no Green value
    auto line = profile_of(FamilySpec::line(), 12);
    CHECK_FALSE(radial_green(*line, 2.0, 0, 12).has_value());
}

TEST_CASE("curvature-ratio Green agrees with the direct series") {
    // geometric anti-tree s(r) = 2^r: dB(r) = 2^{2r+1}, kappa = 4
    FamilySpec spec = FamilySpec::anti_tree(SequenceSpec::parse("2^r"));
    auto pr = profile_of(spec, 10);
    REQUIRE(pr);
    double direct = radial_green(*pr, 2.0, 1, 10)->value;
    CHECK(direct == Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(curvature_ratio_green(*pr, 2.0, 1, 0) == Approx(direct).epsilon(1e-12));
    // tree: kappa = d
    auto tree = profile_of(FamilySpec::tree(2), 10);
    for (int r = 1; r <= 6; ++r)
        CHECK(curvature_ratio_green(*tree, 2.0, r, 0) ==
              Approx(std::pow(2.0, -r)).epsilon(1e-12));
    CHECK_THROWS_AS(curvature_ratio_green(*profile_of(FamilySpec::line(), 8), 2.0, 1, 0),
                    invalid_input);
}

TEST_CASE("radial null sequence identity") {
    for (double p : {1.5, 2.0, 3.0}) {
        auto line = profile_of(FamilySpec::line(), 30);
        for (int n : {1, 5, 20}) {
            RadialNullTerm term = radial_null_sequence(*line, p, n);
            CHECK(term.values.front() == 1.0);
            CHECK(term.values.back() == 0.0);
            // unit line: c_n = 1/(n+1), energy = (n+1)^{1-p}
            CHECK(term.c_n == Approx(1.0 / (n + 1)).epsilon(1e-12));
            CHECK(term.energy == Approx(std::pow(n + 1.0, 1.0 - p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("generator rejects bad input") {
    CHECK_THROWS_AS(generate(FamilySpec::tree(0), 3), invalid_input);
    CHECK_THROWS_AS(generate(FamilySpec::tree(2), 0), invalid_input);
    CHECK_THROWS_AS(generate(FamilySpec::lattice(0), 3), invalid_input);
}
