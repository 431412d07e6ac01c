#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mtqa {

/// Undirected logical problem instance. Edges are stored sorted with u < v,
/// no self-loops, no duplicates, indices in [0, node_count). `seed` and
/// `edge_probability` record how the instance was generated; they are
/// provenance only and do not take part in equality.
struct ProblemGraph {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::uint64_t seed = 0;
    double edge_probability = 0.0;

    bool operator==(const ProblemGraph& other) const {
        return node_count == other.node_count && edges == other.edges;
    }
};

struct DegreeStats {
    int max_degree = 0;
    double avg_degree = 0.0;
};

/// G(n, p) with the n(n-1)/2 candidate edges visited in lexicographic (i < j)
/// order, one uniform draw each, so a fixed (n, p, seed) always yields the
/// same graph on any platform.
ProblemGraph gen_erdos_renyi(int n, double p, std::uint64_t seed);

DegreeStats degree_stats(const ProblemGraph& g);

std::vector<int> degrees(const ProblemGraph& g);

/// Checks the ProblemGraph invariants; throws std::invalid_argument on the
/// first violation.
void validate_graph(const ProblemGraph& g);

/// Edge-list text format: header line "n <node_count>", then one "u v" line
/// per edge with u < v.
std::string graph_to_string(const ProblemGraph& g);
ProblemGraph graph_from_string(const std::string& text, const std::string& source = "<string>");

void save_graph(const ProblemGraph& g, const std::string& path);
ProblemGraph load_graph(const std::string& path);

}  // namespace mtqa
