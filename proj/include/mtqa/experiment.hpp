#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtqa/embedding.hpp"
#include "mtqa/parameterize.hpp"

namespace mtqa {

/// Solving strategies the runner can execute on one configuration.
enum class RunMode { mtqa_isolated, mtqa_nonisolated, pqa, qa_single, sa_logical };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

struct ProblemSpec {
    ProblemKind kind = ProblemKind::mvcp;
    int n = 10;
    double p = 0.9;
    int count = 1;
    std::vector<std::uint64_t> seeds;  // optional; derived from the master seed if empty
};

struct TopologySpec {
    std::string kind = "chimera";  // "chimera" or "file"
    int rows = 16;
    int cols = 16;
    int shore = 4;
    std::string path;

    std::string ref() const;
};

struct ExperimentConfig {
    int version = 1;
    std::uint64_t master_seed = 0;
    std::string out_dir = "out";
    TopologySpec topology;
    std::vector<ProblemSpec> problems;
    std::vector<RunMode> modes;
    int reads = 2500;
    int sweeps = 1000;
    double p_success = 0.99;
    FindOptions embedding;
    ComposeOptions compose;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

HardwareGraph build_topology(const TopologySpec& spec);

/// Runs every configured mode end to end (generate, pack, parameterize,
/// sample, unembed, score against the exact oracle or best-known energy),
/// writes report.json, plan files and plot CSVs under cfg.out_dir, and
/// returns the report. Fixed master seeds reproduce every field except the
/// "timing" subtrees.
nlohmann::ordered_json run_experiment(const ExperimentConfig& cfg);

/// Structural check against the published report schema; throws on violation.
void validate_report(const nlohmann::ordered_json& report);

/// Regenerates the plot CSVs (gsp_vs_n, tts_vs_n, capacity_vs_n, chain_stats,
/// gpp_energy_distribution) from an existing report.
void write_plot_csvs(const nlohmann::ordered_json& report, const std::string& out_dir);

/// Removes every wall-clock-derived subtree ("timing" keys) so two runs of
/// the same configuration can be compared byte for byte.
nlohmann::ordered_json strip_timing(const nlohmann::ordered_json& report);

}  // namespace mtqa
