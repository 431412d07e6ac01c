#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mtqa/embedding.hpp"
#include "mtqa/graph.hpp"
#include "mtqa/qubo.hpp"
#include "mtqa/topology.hpp"

namespace mtqa {

enum class ProblemKind { mvcp, gpp };

std::string to_string(ProblemKind k);
ProblemKind problem_kind_from_string(const std::string& s);

/// One logical task: the instance graph plus its objective in both binary and
/// spin form. The kind selects the chain-strength rule.
struct LogicalProblem {
    ProblemGraph graph;
    Qubo qubo;
    IsingModel ising;
    ProblemKind kind = ProblemKind::mvcp;
};

/// Builds the objective with the default penalty weights (MVCP: A=2, B=1;
/// GPP: B=1 with the degree-based bound for A).
LogicalProblem make_logical_problem(const ProblemGraph& g, ProblemKind kind);

/// Uniform-torque-compensation rule:
///   prefactor * rms(couplers) * sqrt(average logical degree).
double chain_strength_utc(const IsingModel& logical, const ProblemGraph& g,
                          double prefactor = 0.5);

/// Scaled rule: prefactor * max(|h|, |J|) over the logical model.
double chain_strength_scaled(const IsingModel& logical, double prefactor = 1.5);

/// Which coefficients the chain-strength rules read. Default is the converted
/// Ising couplers; the binary-quadratic convention is available as a switch.
enum class ChainStrengthBasis { ising_couplers, qubo_quadratic };

/// Maps a logical model onto hardware through an embedding: linear biases are
/// split uniformly across each chain, every logical coupler lands on the
/// lowest-id physical coupler between the two chains, and each chain gets
/// ferromagnetic couplers of -chain_strength on a lowest-id-first BFS
/// spanning tree of its induced subgraph.
IsingModel embed_ising(const IsingModel& logical, const Embedding& e, double chain_strength,
                       const HardwareGraph& hw);

struct ScaleResult {
    IsingModel model;
    double factor = 1.0;
};

/// Divides the model by max(1, max|h|/h_max, max|J|/j_max) so all terms fit
/// the given ranges; a positive factor leaves the argmin set unchanged.
ScaleResult scale_instance(const IsingModel& physical, double h_max = 4.0, double j_max = 1.0);

struct EmbeddedInstance {
    int problem_id = 0;
    IsingModel physical;        // embedded and scaled
    double chain_strength = 0;  // value used when embedding (pre-scaling)
    double scale_factor = 1.0;
    Embedding embedding;
    int chain_tree_edges = 0;  // ferromagnetic couplers added across all chains
};

enum class ComposeMode { mtqa, pqa };

struct ComposeOptions {
    double h_max = 4.0;
    double j_max = 1.0;
    double utc_prefactor = 0.5;
    double scaled_prefactor = 1.5;
    ChainStrengthBasis basis = ChainStrengthBasis::ising_couplers;
};

/// Parallel program over disjoint embedded instances; `combined` is their
/// disjoint union with no cross-instance terms.
struct ComposedProgram {
    ComposeMode mode = ComposeMode::mtqa;
    std::vector<EmbeddedInstance> instances;
    IsingModel combined;
    std::shared_ptr<const HardwareGraph> hardware;
};

/// Kind-specific chain strength for one problem under the given options.
double chain_strength_for(const LogicalProblem& p, const ComposeOptions& opts);

/// Per-instance parameterization: each entry gets its own chain strength and
/// its own scale factor before the union is formed.
ComposedProgram compose_mtqa(const ParallelPlan& plan, const std::vector<LogicalProblem>& problems,
                             const ComposeOptions& opts = {});

/// Global parameterization: one chain strength (the mean of the per-instance
/// values) and one scale factor computed from the whole combined model.
ComposedProgram compose_pqa(const ParallelPlan& plan, const std::vector<LogicalProblem>& problems,
                            const ComposeOptions& opts = {});

std::string program_to_json(const ComposedProgram& program);

}  // namespace mtqa
