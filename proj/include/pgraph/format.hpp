#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pgraph/graph.hpp"

namespace pgraph {

// pgraph v1 text format.
//   # comment
//   V <id> <m> <c>
//   E <id1> <id2> <b>
// ids are whitespace-free tokens, reals are decimal.
inline WeightedGraph load_graph(std::istream& in) {
    GraphBuilder builder;
    struct PendingEdge {
        std::string a, b;
        double weight;
        int line;
    };
    std::vector<PendingEdge> edges;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw invalid_input("pgraph parse error at line " + std::to_string(lineno) + ": " +
                            msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "V") {
            std::string id;
            double m, c;
            if (!(ls >> id >> m >> c)) fail("expected 'V <id> <m> <c>'");
            try {
                builder.add_vertex(id, m, c);
            } catch (const invalid_input& e) {
                fail(e.what());
            }
        } else if (tag == "E") {
            PendingEdge e;
            if (!(ls >> e.a >> e.b >> e.weight)) fail("expected 'E <id1> <id2> <b>'");
            e.line = lineno;
            edges.push_back(std::move(e));
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    for (const PendingEdge& e : edges) {
        lineno = e.line;
        try {
            builder.add_edge(builder.vertex(e.a), builder.vertex(e.b), e.weight);
        } catch (const invalid_input& err) {
            fail(err.what());
        }
    }
    try {
        return builder.finish();
    } catch (const invalid_input& e) {
        throw invalid_input(std::string("pgraph validation error: ") + e.what());
    }
}

inline WeightedGraph load_graph(const std::string& text) {
    std::istringstream in(text);
    return load_graph(in);
}

inline void save_graph(std::ostream& out, const WeightedGraph& g) {
    out << "# pgraph v1\n";
    out.precision(17);
    for (Vertex x = 0; x < g.size(); ++x)
        out << "V " << g.labels[x] << ' ' << g.m[x] << ' ' << g.c[x] << '\n';
    for (Vertex x = 0; x < g.size(); ++x)
        for (const Edge& e : g.adj[x])
            if (e.to > x)
                out << "E " << g.labels[x] << ' ' << g.labels[e.to] << ' ' << e.b << '\n';
}

}  // namespace pgraph
