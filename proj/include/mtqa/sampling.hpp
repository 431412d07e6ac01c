#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtqa/parameterize.hpp"
#include "mtqa/qubo.hpp"

namespace mtqa {

/// Raw sampler output. Every read is a spin vector aligned with `qubit_ids`,
/// and every stored energy equals a direct re-evaluation of its read.
struct SampleSet {
    std::vector<int> qubit_ids;  // sorted variable ids of the sampled model
    std::vector<Spins> reads;
    std::vector<double> energies;
    double wall_time_seconds = 0.0;
    int sweeps = 0;
    std::uint64_t seed = 0;
};

struct SaOptions {
    int reads = 2500;
    int sweeps = 1000;
    // Geometric inverse-temperature ladder. Non-positive bounds are derived
    // from the model: the hottest step accepts the largest single-spin move
    // with probability >= 1/2, the coldest accepts the smallest nonzero move
    // with probability <= 1/100.
    double beta_min = 0.0;
    double beta_max = 0.0;
};

/// Derived (beta_min, beta_max) for a model, as used by sa_sample.
std::pair<double, double> default_beta_range(const IsingModel& m);

/// Seeded single-spin Metropolis annealing; reads are independent restarts
/// with per-read derived seeds, so the result does not depend on how many
/// workers execute them.
SampleSet sa_sample(const IsingModel& m, const SaOptions& opts, std::uint64_t seed);

struct ExactSampleResult {
    std::vector<int> qubit_ids;
    std::vector<Spins> ground_states;  // all minimizers, enumeration order
    double energy = 0.0;
};

/// Exhaustive ground set over all 2^n spin states (n <= 24).
ExactSampleResult exact_sample(const IsingModel& m);

struct LogicalRead {
    Assignment assignment;
    double energy = 0.0;                // on the original logical Qubo
    double chain_break_fraction = 0.0;  // broken chains / chains, this read
};

/// Per-entry logical solutions, aligned with the program's instance order.
struct LogicalSolutionSet {
    std::vector<int> problem_ids;
    std::vector<std::vector<LogicalRead>> per_entry;
};

/// Majority-vote unembedding: each logical bit is the majority of its chain
/// spins (+1 maps to 1), ties resolved by a per-read seeded coin. Energies
/// are evaluated on the original unscaled logical objective.
LogicalSolutionSet unembed_majority_vote(const SampleSet& samples, const ComposedProgram& program,
                                         const std::vector<LogicalProblem>& problems,
                                         std::uint64_t seed);

std::string sampleset_to_csv(const SampleSet& samples);
std::string logical_solutions_to_csv(const LogicalSolutionSet& solutions);

}  // namespace mtqa
