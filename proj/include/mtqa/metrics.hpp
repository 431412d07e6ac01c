#pragma once

#include <optional>
#include <vector>

namespace mtqa {

/// Mean per-instance probability of sampling an optimal solution.
double gsp(const std::vector<double>& p_list);

/// Expected time to reach the optimum with confidence p_success:
///   t_run * log(1 - p_success) / log(1 - p_avg).
/// Returns nullopt when p_avg is 0 (undefined) and t_run when p_avg is 1.
std::optional<double> tts(double t_run_seconds, double p_avg, double p_success = 0.99);

/// Per-read cost of a parallel batch:
///   (1/A) * (T / (N_mvcp + N_gpp) + sum U_i),
/// where T is the sampler wall time standing in for accelerator access time
/// and U_i are per-instance unembedding times.
double t_run_seconds(int reads, double sampler_wall_seconds, int n_mvcp, int n_gpp,
                     const std::vector<double>& unembed_seconds);

}  // namespace mtqa
