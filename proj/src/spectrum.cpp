#include "mtqa/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mtqa/errors.hpp"
#include "mtqa/parallel.hpp"
#include "mtqa/text.hpp"

namespace mtqa {

std::pair<double, double> AnnealSchedule::value_at(double s) const {
    if (samples.empty()) throw std::invalid_argument("schedule has no samples");
    if (s < samples.front().s || s > samples.back().s)
        throw std::invalid_argument("schedule query outside [" +
                                    format_double(samples.front().s) + "," +
                                    format_double(samples.back().s) + "]");
    auto it = std::lower_bound(samples.begin(), samples.end(), s,
                               [](const SchedulePoint& p, double x) { return p.s < x; });
    if (it != samples.end() && it->s == s) return {it->a_ghz, it->b_ghz};
    const SchedulePoint& hi = *it;
    const SchedulePoint& lo = *(it - 1);
    double t = (s - lo.s) / (hi.s - lo.s);
    return {lo.a_ghz + t * (hi.a_ghz - lo.a_ghz), lo.b_ghz + t * (hi.b_ghz - lo.b_ghz)};
}

void validate_schedule(const AnnealSchedule& sched) {
    if (sched.samples.size() < 2)
        throw std::invalid_argument("schedule needs at least two samples");
    if (sched.samples.front().s != 0.0 || sched.samples.back().s != 1.0)
        throw std::invalid_argument("schedule must span s in [0,1]");
    if (sched.anneal_time_seconds <= 0.0)
        throw std::invalid_argument("anneal time must be positive");
    for (std::size_t i = 0; i < sched.samples.size(); ++i) {
        const auto& p = sched.samples[i];
        if (p.a_ghz < 0.0 || p.b_ghz < 0.0)
            throw std::invalid_argument("schedule coefficients must be non-negative");
        if (i > 0) {
            const auto& prev = sched.samples[i - 1];
            if (p.s <= prev.s) throw std::invalid_argument("schedule s must strictly increase");
            if (p.a_ghz > prev.a_ghz)
                throw std::invalid_argument("A(s) must be non-increasing");
            if (p.b_ghz < prev.b_ghz)
                throw std::invalid_argument("B(s) must be non-decreasing");
        }
    }
}

std::vector<double> uniform_grid(int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / (points - 1);
    return grid;
}

AnnealSchedule default_schedule(int grid_points) {
    AnnealSchedule anchors;
    anchors.samples = {{0.0, 9.62, 0.23}, {0.28, 1.28, 1.28}, {1.0, 0.0, 7.56}};
    AnnealSchedule out;
    out.anneal_time_seconds = anchors.anneal_time_seconds;
    for (double s : uniform_grid(grid_points)) {
        auto [a, b] = anchors.value_at(s);
        out.samples.push_back({s, a, b});
    }
    validate_schedule(out);
    return out;
}

AnnealSchedule schedule_from_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    AnnealSchedule sched;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "s,A_GHz,B_GHz")
                throw ParseError(source, lineno, "expected header 's,A_GHz,B_GHz'");
            header_seen = true;
            continue;
        }
        SchedulePoint p;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> p.s >> c1 >> p.a_ghz >> c2 >> p.b_ghz) || c1 != ',' || c2 != ',')
            throw ParseError(source, lineno, "expected 's,A,B' row");
        sched.samples.push_back(p);
    }
    if (!header_seen) throw ParseError(source, lineno, "missing header");
    try {
        validate_schedule(sched);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, lineno, e.what());
    }
    return sched;
}

std::string schedule_to_csv(const AnnealSchedule& sched) {
    std::ostringstream out;
    out << "s,A_GHz,B_GHz\n";
    for (const auto& p : sched.samples)
        out << format_double(p.s) << "," << format_double(p.a_ghz) << ","
            << format_double(p.b_ghz) << "\n";
    return out.str();
}

Eigen::MatrixXd build_hamiltonian(const IsingModel& m, const AnnealSchedule& sched, double s) {
    auto ids = m.variable_ids();
    const int n = static_cast<int>(ids.size());
    if (n > 12) throw CapacityError("build_hamiltonian: more than 12 variables");
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("build_hamiltonian: s outside [0,1]");

    std::map<int, int> pos;
    for (int k = 0; k < n; ++k) pos[ids[k]] = k;

    auto [a_ghz, b_ghz] = sched.value_at(s);
    const std::size_t dim = 1ULL << n;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);

    // diagonal problem part: bit 0 of the basis index is spin +1
    for (std::size_t idx = 0; idx < dim; ++idx) {
        double e = m.offset;
        for (const auto& [i, v] : m.h) e += v * ((idx >> pos.at(i)) & 1 ? -1.0 : 1.0);
        for (const auto& [ij, v] : m.J) {
            double zi = (idx >> pos.at(ij.first)) & 1 ? -1.0 : 1.0;
            double zj = (idx >> pos.at(ij.second)) & 1 ? -1.0 : 1.0;
            e += v * zi * zj;
        }
        H(idx, idx) = 0.5 * b_ghz * e;
    }
    // transverse field: sigma_x flips one bit
    for (int k = 0; k < n; ++k)
        for (std::size_t idx = 0; idx < dim; ++idx)
            H(idx ^ (1ULL << k), idx) += -0.5 * a_ghz;
    return H;
}

namespace {

std::pair<double, double> two_lowest(const IsingModel& m, const AnnealSchedule& sched, double s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(build_hamiltonian(m, sched, s),
                                                          Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev(0), ev(1)};
}

}  // namespace

SpectrumResult eigencurves(const IsingModel& m, const AnnealSchedule& sched,
                           const std::vector<double>& s_grid) {
    if (m.variable_ids().empty())
        throw std::invalid_argument("eigencurves: model has no variables");
    if (s_grid.size() < 2) throw std::invalid_argument("eigencurves: grid too small");

    SpectrumResult out;
    out.s_grid = s_grid;
    out.e0.resize(s_grid.size());
    out.e1.resize(s_grid.size());
    out.gap.resize(s_grid.size());
    parallel_for(s_grid.size(), [&](std::size_t i) {
        auto [e0, e1] = two_lowest(m, sched, s_grid[i]);
        out.e0[i] = e0;
        out.e1[i] = e1;
        out.gap[i] = e1 - e0;
    });

    std::size_t k = std::min_element(out.gap.begin(), out.gap.end()) - out.gap.begin();
    double lo = s_grid[k > 0 ? k - 1 : 0];
    double hi = s_grid[k + 1 < s_grid.size() ? k + 1 : s_grid.size() - 1];
    auto gap_at = [&](double s) {
        auto [e0, e1] = two_lowest(m, sched, s);
        return e1 - e0;
    };
    for (int iter = 0; iter < 60 && hi - lo > 1e-4; ++iter) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (gap_at(m1) <= gap_at(m2))
            hi = m2;
        else
            lo = m1;
    }
    out.min_gap_s = 0.5 * (lo + hi);
    out.min_gap_ghz = gap_at(out.min_gap_s);
    if (out.gap[k] < out.min_gap_ghz) {  // keep the grid point if refinement drifted
        out.min_gap_s = s_grid[k];
        out.min_gap_ghz = out.gap[k];
    }
    return out;
}

SpectrumResult combine_identical(const SpectrumResult& spec) {
    SpectrumResult out;
    out.s_grid = spec.s_grid;
    out.e0.resize(spec.e0.size());
    out.e1.resize(spec.e0.size());
    out.gap = spec.gap;
    for (std::size_t i = 0; i < spec.e0.size(); ++i) {
        out.e0[i] = 2.0 * spec.e0[i];
        out.e1[i] = out.e0[i] + spec.gap[i];
    }
    out.min_gap_s = spec.min_gap_s;
    out.min_gap_ghz = spec.min_gap_ghz;
    return out;
}

SpectrumResult combine_different(const SpectrumResult& a, const SpectrumResult& b) {
    if (a.s_grid != b.s_grid)
        throw std::invalid_argument("combine_different: grids do not match");
    SpectrumResult out;
    out.s_grid = a.s_grid;
    out.e0.resize(a.e0.size());
    out.e1.resize(a.e0.size());
    out.gap.resize(a.e0.size());
    for (std::size_t i = 0; i < a.e0.size(); ++i) {
        out.e0[i] = a.e0[i] + b.e0[i];
        out.gap[i] = std::min(a.gap[i], b.gap[i]);
        out.e1[i] = out.e0[i] + out.gap[i];
    }
    if (a.min_gap_ghz <= b.min_gap_ghz) {
        out.min_gap_s = a.min_gap_s;
        out.min_gap_ghz = a.min_gap_ghz;
    } else {
        out.min_gap_s = b.min_gap_s;
        out.min_gap_ghz = b.min_gap_ghz;
    }
    return out;
}

double lz_probability(double delta_adiabaticity) {
    return std::exp(-2.0 * M_PI * delta_adiabaticity);
}

double thermal_probability(double gap_ghz, double t_kelvin) {
    double gap_joule = kPlanck * gap_ghz * 1e9;
    return 1.0 / (1.0 + std::exp(gap_joule / (kBoltzmann * t_kelvin)));
}

SpectrumResult transition_probabilities(const SpectrumResult& spec, const AnnealSchedule& sched,
                                        double t_kelvin) {
    if (spec.gap.empty()) throw std::invalid_argument("transition_probabilities: empty gap curve");
    if (sched.anneal_time_seconds <= 0.0)
        throw std::invalid_argument("transition_probabilities: anneal time must be positive");
    const std::size_t n = spec.gap.size();
    SpectrumResult out = spec;
    out.p_lz.resize(n);
    out.p_thermal.resize(n);
    out.p_total.resize(n);

    std::vector<double> gap_joule(n);
    for (std::size_t i = 0; i < n; ++i) gap_joule[i] = kPlanck * spec.gap[i] * 1e9;

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i > 0 ? i - 1 : i;
        std::size_t hi = i + 1 < n ? i + 1 : i;
        double slope = (gap_joule[hi] - gap_joule[lo]) / (spec.s_grid[hi] - spec.s_grid[lo]);
        double velocity = std::abs(slope) / sched.anneal_time_seconds;  // J/s
        double p_lz;
        if (velocity == 0.0) {
            p_lz = 0.0;  // infinitely slow sweep never hops diabatically
        } else {
            double delta = gap_joule[i] * gap_joule[i] / (4.0 * kHbar * velocity);
            p_lz = lz_probability(delta);
        }
        double p_th = thermal_probability(spec.gap[i], t_kelvin);
        out.p_lz[i] = p_lz;
        out.p_thermal[i] = p_th;
        out.p_total[i] = p_lz + (1.0 - p_lz) * p_th;
    }
    std::size_t k = std::max_element(out.p_total.begin(), out.p_total.end()) - out.p_total.begin();
    out.p_total_max = out.p_total[k];
    out.p_total_max_s = out.s_grid[k];
    return out;
}

std::string spectrum_to_csv(const SpectrumResult& spec) {
    std::ostringstream out;
    out << "s,e0,e1,gap,p_lz,p_thermal,p_total\n";
    bool probs = spec.p_lz.size() == spec.s_grid.size();
    for (std::size_t i = 0; i < spec.s_grid.size(); ++i) {
        out << format_double(spec.s_grid[i]) << "," << format_double(spec.e0[i]) << ","
            << format_double(spec.e1[i]) << "," << format_double(spec.gap[i]) << ",";
        if (probs)
            out << format_double(spec.p_lz[i]) << "," << format_double(spec.p_thermal[i]) << ","
                << format_double(spec.p_total[i]);
        else
            out << ",,";
        out << "\n";
    }
    return out.str();
}

}  // namespace mtqa
