#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtqa/qubo.hpp"

namespace mtqa {

// Exact SI values; Hamiltonian math stays in GHz, conversion to joules
// happens only inside the transition-probability computation.
inline constexpr double kPlanck = 6.62607015e-34;    // J s
inline constexpr double kHbar = kPlanck / (2.0 * 3.141592653589793238462643383279502884);
inline constexpr double kBoltzmann = 1.380649e-23;   // J/K

struct SchedulePoint {
    double s = 0.0;
    double a_ghz = 0.0;
    double b_ghz = 0.0;
};

/// Annealing control curves A(s), B(s) sampled on an increasing s grid from
/// 0 to 1, with A non-increasing and B non-decreasing. Queries interpolate
/// linearly and are exact at sample points.
struct AnnealSchedule {
    std::vector<SchedulePoint> samples;
    double anneal_time_seconds = 20e-6;

    std::pair<double, double> value_at(double s) const;  // (A_GHz, B_GHz)
};

void validate_schedule(const AnnealSchedule& sched);

/// Piecewise-linear schedule through (0, 9.62, 0.23), (0.28, 1.28, 1.28) and
/// (1, 0, 7.56) GHz, sampled on a uniform grid.
AnnealSchedule default_schedule(int grid_points = 201);

/// CSV with header "s,A_GHz,B_GHz".
AnnealSchedule schedule_from_csv(const std::string& text, const std::string& source = "<string>");
std::string schedule_to_csv(const AnnealSchedule& sched);

std::vector<double> uniform_grid(int points);

/// Dense transverse-field Ising Hamiltonian at anneal fraction s, in GHz:
///   H(s) = -(A/2) sum_i sx_i + (B/2) (sum_i h_i sz_i + sum_ij J_ij sz_i sz_j + offset).
/// Model size is capped at 12 variables (4096-dimensional matrix).
Eigen::MatrixXd build_hamiltonian(const IsingModel& m, const AnnealSchedule& sched, double s);

struct SpectrumResult {
    std::vector<double> s_grid;
    std::vector<double> e0;   // GHz
    std::vector<double> e1;   // GHz
    std::vector<double> gap;  // GHz
    double min_gap_s = 0.0;
    double min_gap_ghz = 0.0;
    std::vector<double> p_lz;
    std::vector<double> p_thermal;
    std::vector<double> p_total;
    double p_total_max = 0.0;
    double p_total_max_s = 0.0;
};

/// Two lowest eigenvalues across the grid; the minimum gap location is
/// refined off-grid by interval subdivision down to width 1e-4.
SpectrumResult eigencurves(const IsingModel& m, const AnnealSchedule& sched,
                           const std::vector<double>& s_grid);

/// Composite of two non-interacting copies of the same problem: ground energy
/// doubles, the gap is unchanged.
SpectrumResult combine_identical(const SpectrumResult& spec);

/// Composite of two different non-interacting problems: ground energies add,
/// the gap is the pointwise minimum of the two gaps.
SpectrumResult combine_different(const SpectrumResult& a, const SpectrumResult& b);

double lz_probability(double delta_adiabaticity);             // exp(-2 pi delta)
double thermal_probability(double gap_ghz, double t_kelvin);  // 1/(1+exp(hΔ/kT))

/// Landau-Zener, thermal and combined excitation curves over the grid. The
/// sweep velocity is the finite-difference slope of the gap (in joules)
/// divided by the anneal time; where it vanishes the LZ probability is 0.
SpectrumResult transition_probabilities(const SpectrumResult& spec, const AnnealSchedule& sched,
                                        double t_kelvin = 0.016);

/// CSV with header "s,e0,e1,gap,p_lz,p_thermal,p_total"; probability columns
/// are blank when not yet populated.
std::string spectrum_to_csv(const SpectrumResult& spec);

}  // namespace mtqa
