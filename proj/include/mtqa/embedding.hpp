#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtqa/graph.hpp"
#include "mtqa/topology.hpp"

namespace mtqa {

/// Minor embedding: each logical node owns a non-empty chain of physical
/// qubits. Chains are pairwise disjoint, each induces a connected subgraph of
/// the effective hardware, and every logical edge is realized by at least one
/// physical coupler between the two chains.
struct Embedding {
    std::map<int, std::vector<int>> chains;  // logical node -> sorted qubit ids

    std::vector<int> all_qubits() const;

    bool operator==(const Embedding&) const = default;
};

struct PlanEntry {
    int problem_id = 0;
    Embedding embedding;
};

/// Result of the parallel packing search. Entries are in discovery order;
/// problem ids repeat when the same problem is packed more than once. The
/// hardware pointer snapshots the graph the search started from.
struct ParallelPlan {
    std::vector<PlanEntry> entries;
    bool isolation = false;
    std::shared_ptr<const HardwareGraph> hardware;
    std::string hardware_ref;  // tag or file path, for serialization only
};

struct FindOptions {
    int tries = 10;
    int timeout_ms = 1000;  // wall-clock budget per call; 0 disables
    int max_passes = 32;    // improvement passes per try
    int stall_limit = 4;    // passes without progress before a try is abandoned
};

/// Seeded heuristic search for a minor embedding of `source` into the
/// effective part of `hw`. Chains are grown along weighted shortest paths
/// where a qubit already claimed by k chains costs 10^k, and passes reroute
/// chains until they are disjoint. Deterministic for fixed inputs and seed
/// as long as the wall-clock budget is not hit.
std::optional<Embedding> find_embedding(const ProblemGraph& source, const HardwareGraph& hw,
                                        std::uint64_t seed, const FindOptions& opts = {});

/// Sweeps the problem list repeatedly, embedding whatever still fits on the
/// shrinking hardware (chain qubits are removed after each success, plus
/// their neighbors when isolation is on). Stops when a full sweep places
/// nothing. `max_entries` = 0 means pack to saturation.
ParallelPlan parallel_embedding_search(const std::vector<ProblemGraph>& problems,
                                       const HardwareGraph& hw, bool isolation,
                                       std::uint64_t seed, const FindOptions& opts = {},
                                       std::size_t max_entries = 0);

struct PlanValidation {
    bool ok = true;
    std::string message;
};

std::optional<std::string> validate_embedding(const Embedding& e, const ProblemGraph& source,
                                              const HardwareGraph& hw);

/// Checks every embedding invariant, cross-entry disjointness and, for
/// isolated plans, that no coupler joins two distinct entries.
PlanValidation validate_plan(const ParallelPlan& plan, const std::vector<ProblemGraph>& problems);

struct ChainLengthStats {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation
    int max = 0;
    int chain_count = 0;
};

struct PlanChainStats {
    std::vector<ChainLengthStats> per_entry;
    ChainLengthStats aggregate;
};

PlanChainStats chain_stats(const ParallelPlan& plan);

std::string plan_to_json(const ParallelPlan& plan);
/// Restores entries/isolation/hardware_ref; the hardware graph itself is
/// attached by the caller.
ParallelPlan plan_from_json(const std::string& text);

}  // namespace mtqa
