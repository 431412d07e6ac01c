#include "mtqa/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace mtqa {

double gsp(const std::vector<double>& p_list) {
    if (p_list.empty()) throw std::invalid_argument("gsp: empty probability list");
    double sum = 0.0;
    for (double p : p_list) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("gsp: probability outside [0,1]");
        sum += p;
    }
    return sum / static_cast<double>(p_list.size());
}

std::optional<double> tts(double t_run_seconds, double p_avg, double p_success) {
    if (t_run_seconds <= 0.0) throw std::invalid_argument("tts: t_run must be positive");
    if (p_avg < 0.0 || p_avg > 1.0) throw std::invalid_argument("tts: p_avg outside [0,1]");
    if (p_success <= 0.0 || p_success >= 1.0)
        throw std::invalid_argument("tts: p_success outside (0,1)");
    if (p_avg == 0.0) return std::nullopt;
    if (p_avg == 1.0) return t_run_seconds;
    return t_run_seconds * std::log(1.0 - p_success) / std::log(1.0 - p_avg);
}

double t_run_seconds(int reads, double sampler_wall_seconds, int n_mvcp, int n_gpp,
                     const std::vector<double>& unembed_seconds) {
    if (reads < 1) throw std::invalid_argument("t_run: reads must be >= 1");
    if (n_mvcp + n_gpp < 1) throw std::invalid_argument("t_run: needs at least one instance");
    double u_total = 0.0;
    for (double u : unembed_seconds) u_total += u;
    return (sampler_wall_seconds / static_cast<double>(n_mvcp + n_gpp) + u_total) /
           static_cast<double>(reads);
}

}  // namespace mtqa
