#pragma once

#include <random>
#include <vector>

#include "pgraph/format.hpp"
#include "pgraph/graph.hpp"
#include "pgraph/model.hpp"

namespace test_helpers {

using namespace pgraph;

// path 0 - 1 - ... - n with unit weights, m = 1, c = 0
inline WeightedGraph path(int n, double b = 1.0) {
    GraphBuilder builder;
    for (int i = 0; i <= n; ++i) builder.add_vertex(detail::pad(i, 4), 1.0, 0.0);
    for (int i = 0; i < n; ++i) builder.add_edge(i, i + 1, b);
    return builder.finish();
}

inline WeightedGraph random_graph(std::mt19937& rng, int max_vertices,
                                  bool with_potential = false) {
    std::uniform_int_distribution<int> nv(2, max_vertices);
    std::uniform_real_distribution<double> weight(0.1, 10.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int n = nv(rng);
    GraphBuilder b;
    for (int i = 0; i < n; ++i)
        b.add_vertex(detail::pad(i, 4), weight(rng),
                     with_potential && unit(rng) < 0.3 ? weight(rng) : 0.0);
    std::uniform_int_distribution<int> any(0, n - 1);
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        b.add_edge(i, parent(rng), weight(rng));
    }
    int extra = std::uniform_int_distribution<int>(0, n)(rng);
    for (int t = 0; t < extra; ++t) {
        int x = any(rng), y = any(rng);
        if (x == y) continue;
        try {
            b.add_edge(x, y, weight(rng));
        } catch (const invalid_input&) {
        }
    }
    return b.finish();
}

// effective-resistance oracle for cap(root, B_n) on the d-regular rooted
// tree with unit conductances: R(k) = (1 + R(k+1)) / d, R at the zero
// boundary (depth n+1) is 0; capacity = 1 / R(0).
inline double tree_capacity_oracle(int d, int n) {
    double r = 0.0;
    for (int k = n; k >= 0; --k) r = (1.0 + r) / d;
    return 1.0 / r;
}

}  // namespace test_helpers
