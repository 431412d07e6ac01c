#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtqa/graph.hpp"

namespace mtqa {

/// Binary assignment, one 0/1 per variable.
using Assignment = std::vector<std::uint8_t>;
/// Spin assignment, one -1/+1 per variable.
using Spins = std::vector<std::int8_t>;

/// Quadratic binary objective
///   E(x) = sum_i linear[i] x_i + sum_{i<j} quadratic[{i,j}] x_i x_j + offset.
/// Quadratic keys are normalized to i < j. Ordered maps keep every iteration
/// (evaluation, serialization, conversion) deterministic.
struct Qubo {
    int size = 0;
    std::map<int, double> linear;
    std::map<std::pair<int, int>, double> quadratic;
    double offset = 0.0;

    void add_linear(int i, double v) { linear[i] += v; }
    void add_quadratic(int i, int j, double v);

    bool operator==(const Qubo&) const = default;
};

/// Spin form: E(s) = sum h_i s_i + sum_{i<j} J_ij s_i s_j + offset, s in {-1,+1}.
/// Variable ids need not be contiguous (physical models use hardware qubit ids).
struct IsingModel {
    int size = 0;
    std::map<int, double> h;
    std::map<std::pair<int, int>, double> J;
    double offset = 0.0;

    void add_h(int i, double v) { h[i] += v; }
    void add_J(int i, int j, double v);

    /// Sorted list of every variable id that carries a bias or coupler.
    std::vector<int> variable_ids() const;

    bool operator==(const IsingModel&) const = default;
};

double evaluate(const Qubo& q, const Assignment& x);
double evaluate(const IsingModel& m, const Spins& s);
/// Evaluate an Ising model whose variable ids are arbitrary: `ids` gives the
/// variable id of each entry of `s`.
double evaluate(const IsingModel& m, const std::vector<int>& ids, const Spins& s);

/// Vertex-cover objective
///   A * sum_{(i,j) in E} (1-x_i)(1-x_j) + B * sum_i x_i,  0 < B < A.
Qubo build_mvcp_qubo(const ProblemGraph& g, double A = 2.0, double B = 1.0);

/// Balanced-partition penalty weight B*min(2*max_degree, |V|)/8.
double gpp_penalty_bound(const ProblemGraph& g, double B = 1.0);

/// Partition objective
///   A * (sum_i x_i - |V|/2)^2 + B * sum_{(u,v) in E} (x_u + x_v - 2 x_u x_v).
/// When A is not given it defaults to gpp_penalty_bound, clamped to B/8 for
/// edgeless graphs so the balance term never vanishes.
Qubo build_gpp_qubo(const ProblemGraph& g, double B = 1.0);
Qubo build_gpp_qubo(const ProblemGraph& g, double B, double A);

/// x = (1+s)/2 substitution; energies match exactly for every assignment.
IsingModel qubo_to_ising(const Qubo& q);

struct BruteForceResult {
    Assignment assignment;
    double energy = 0.0;
};

/// Exhaustive minimum over all 2^size assignments (size <= 24). Ties are
/// broken toward the lexicographically smallest assignment.
BruteForceResult brute_force_min(const Qubo& q);

int cut_edges(const ProblemGraph& g, const Assignment& x);
bool vertex_cover_valid(const ProblemGraph& g, const Assignment& x);
bool partition_balanced(const Assignment& x);

/// JSON text with fields size, linear, quadratic (keys "i,j"), offset.
std::string qubo_to_json(const Qubo& q);
Qubo qubo_from_json(const std::string& text);
std::string ising_to_json(const IsingModel& m);
IsingModel ising_from_json(const std::string& text);

}  // namespace mtqa
