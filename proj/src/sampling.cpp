#include "mtqa/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "mtqa/errors.hpp"
#include "mtqa/parallel.hpp"
#include "mtqa/rng.hpp"
#include "mtqa/text.hpp"

namespace mtqa {

namespace {

// Index-compressed mirror of an Ising model for tight sweep loops.
struct CompiledModel {
    std::vector<int> ids;
    std::vector<double> h;
    std::vector<int> offsets;
    std::vector<std::pair<int, double>> couplings;  // (neighbor index, J)

    explicit CompiledModel(const IsingModel& m) {
        ids = m.variable_ids();
        const int n = static_cast<int>(ids.size());
        std::unordered_map<int, int> pos;
        pos.reserve(ids.size());
        for (int k = 0; k < n; ++k) pos[ids[k]] = k;
        h.assign(n, 0.0);
        for (const auto& [i, v] : m.h) h[pos.at(i)] += v;
        std::vector<std::vector<std::pair<int, double>>> adj(n);
        for (const auto& [ij, v] : m.J) {
            int a = pos.at(ij.first), b = pos.at(ij.second);
            adj[a].emplace_back(b, v);
            adj[b].emplace_back(a, v);
        }
        offsets.assign(n + 1, 0);
        for (int k = 0; k < n; ++k) {
            std::sort(adj[k].begin(), adj[k].end());
            offsets[k + 1] = offsets[k] + static_cast<int>(adj[k].size());
        }
        couplings.reserve(offsets[n]);
        for (int k = 0; k < n; ++k)
            couplings.insert(couplings.end(), adj[k].begin(), adj[k].end());
    }

    int size() const { return static_cast<int>(ids.size()); }

    double local_field(const Spins& s, int k) const {
        double f = h[k];
        for (int idx = offsets[k]; idx < offsets[k + 1]; ++idx)
            f += couplings[idx].second * s[couplings[idx].first];
        return f;
    }
};

}  // namespace

std::pair<double, double> default_beta_range(const IsingModel& m) {
    double hottest_move = 0.0;
    {
        CompiledModel cm(m);
        for (int k = 0; k < cm.size(); ++k) {
            double reach = std::abs(cm.h[k]);
            for (int idx = cm.offsets[k]; idx < cm.offsets[k + 1]; ++idx)
                reach += std::abs(cm.couplings[idx].second);
            hottest_move = std::max(hottest_move, 2.0 * reach);
        }
    }
    double smallest = 0.0;
    for (const auto& [i, v] : m.h)
        if (v != 0.0) smallest = (smallest == 0.0) ? std::abs(v) : std::min(smallest, std::abs(v));
    for (const auto& [ij, v] : m.J)
        if (v != 0.0) smallest = (smallest == 0.0) ? std::abs(v) : std::min(smallest, std::abs(v));

    double beta_min = hottest_move > 0.0 ? std::log(2.0) / hottest_move : 1.0;
    double beta_max = smallest > 0.0 ? std::log(100.0) / (2.0 * smallest) : 1.0;
    beta_max = std::max(beta_max, beta_min);
    return {beta_min, beta_max};
}

SampleSet sa_sample(const IsingModel& m, const SaOptions& opts, std::uint64_t seed) {
    if (opts.reads < 1 || opts.sweeps < 1)
        throw std::invalid_argument("sa_sample: reads and sweeps must be >= 1");

    CompiledModel cm(m);
    const int n = cm.size();

    auto [beta_min, beta_max] = default_beta_range(m);
    if (opts.beta_min > 0.0) beta_min = opts.beta_min;
    if (opts.beta_max > 0.0) beta_max = opts.beta_max;
    if (beta_min > beta_max)
        throw std::invalid_argument("sa_sample: beta_min must not exceed beta_max");

    std::vector<double> betas(opts.sweeps);
    if (opts.sweeps == 1) {
        betas[0] = beta_min;
    } else {
        double ratio = beta_max / beta_min;
        for (int t = 0; t < opts.sweeps; ++t)
            betas[t] = beta_min * std::pow(ratio, static_cast<double>(t) / (opts.sweeps - 1));
    }

    SampleSet out;
    out.qubit_ids = cm.ids;
    out.sweeps = opts.sweeps;
    out.seed = seed;
    out.reads.assign(opts.reads, Spins(n, 1));
    out.energies.assign(opts.reads, 0.0);

    auto t0 = std::chrono::steady_clock::now();
    parallel_for(static_cast<std::size_t>(opts.reads), [&](std::size_t r) {
        Rng rng(derive_seed(seed, "sa-read", r));
        Spins& s = out.reads[r];
        for (int k = 0; k < n; ++k) s[k] = rng.bernoulli(0.5) ? 1 : -1;
        for (double beta : betas) {
            for (int k = 0; k < n; ++k) {
                double delta = 2.0 * s[k] * cm.local_field(s, k);
                if (delta <= 0.0 || rng.uniform01() < std::exp(-beta * delta))
                    s[k] = -s[k];
            }
        }
        out.energies[r] = evaluate(m, cm.ids, s);
    });
    out.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

ExactSampleResult exact_sample(const IsingModel& m) {
    CompiledModel cm(m);
    const int n = cm.size();
    if (n > 24) throw CapacityError("exact_sample: size > 24");

    ExactSampleResult out;
    out.qubit_ids = cm.ids;

    Spins s(n, -1);
    double best = evaluate(m, cm.ids, s);
    double energy = best;
    out.ground_states.push_back(s);
    out.energy = best;

    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        int bit = __builtin_ctzll(k);
        // flip exactly one spin per Gray-code step
        energy -= 2.0 * s[bit] * cm.local_field(s, bit);
        s[bit] = -s[bit];
        if (energy < best + 1e-9) {
            double exact = evaluate(m, cm.ids, s);
            if (exact < best) {
                best = exact;
                out.ground_states.clear();
                out.ground_states.push_back(s);
            } else if (exact == best) {
                out.ground_states.push_back(s);
            }
            energy = exact;
        }
    }
    out.energy = best;
    return out;
}

LogicalSolutionSet unembed_majority_vote(const SampleSet& samples, const ComposedProgram& program,
                                         const std::vector<LogicalProblem>& problems,
                                         std::uint64_t seed) {
    std::unordered_map<int, int> pos;
    pos.reserve(samples.qubit_ids.size());
    for (std::size_t k = 0; k < samples.qubit_ids.size(); ++k)
        pos[samples.qubit_ids[k]] = static_cast<int>(k);

    // chain qubit positions per entry/logical node, validated once
    struct EntryLayout {
        int problem_id;
        std::vector<std::vector<int>> chain_positions;  // by logical node
    };
    std::vector<EntryLayout> layouts;
    for (const auto& inst : program.instances) {
        if (inst.problem_id < 0 || inst.problem_id >= static_cast<int>(problems.size()))
            throw std::invalid_argument("unembed: instance references unknown problem id");
        const auto& lp = problems[inst.problem_id];
        EntryLayout layout;
        layout.problem_id = inst.problem_id;
        layout.chain_positions.resize(lp.graph.node_count);
        for (int u = 0; u < lp.graph.node_count; ++u) {
            auto it = inst.embedding.chains.find(u);
            if (it == inst.embedding.chains.end() || it->second.empty())
                throw std::invalid_argument("unembed: missing chain for logical node " +
                                            std::to_string(u));
            for (int q : it->second) {
                auto p = pos.find(q);
                if (p == pos.end())
                    throw std::invalid_argument("unembed: qubit " + std::to_string(q) +
                                                " absent from the sample set");
                layout.chain_positions[u].push_back(p->second);
            }
        }
        layouts.push_back(std::move(layout));
    }

    LogicalSolutionSet out;
    out.per_entry.resize(layouts.size());
    for (const auto& layout : layouts) out.problem_ids.push_back(layout.problem_id);

    for (std::size_t r = 0; r < samples.reads.size(); ++r) {
        const Spins& phys = samples.reads[r];
        Rng coin(derive_seed(seed, "unembed-read", r));
        for (std::size_t e = 0; e < layouts.size(); ++e) {
            const auto& layout = layouts[e];
            const auto& lp = problems[layout.problem_id];
            LogicalRead read;
            read.assignment.resize(lp.graph.node_count);
            int broken = 0;
            for (int u = 0; u < lp.graph.node_count; ++u) {
                int up = 0, down = 0;
                for (int p : layout.chain_positions[u])
                    (phys[p] > 0 ? up : down)++;
                if (up > 0 && down > 0) ++broken;
                bool bit;
                if (up > down)
                    bit = true;
                else if (down > up)
                    bit = false;
                else
                    bit = coin.bernoulli(0.5);
                read.assignment[u] = bit ? 1 : 0;
            }
            read.chain_break_fraction =
                lp.graph.node_count > 0 ? static_cast<double>(broken) / lp.graph.node_count : 0.0;
            read.energy = evaluate(lp.qubo, read.assignment);
            out.per_entry[e].push_back(std::move(read));
        }
    }
    return out;
}

std::string sampleset_to_csv(const SampleSet& samples) {
    std::ostringstream out;
    out << "read,energy,assignment\n";
    for (std::size_t r = 0; r < samples.reads.size(); ++r) {
        out << r << "," << format_double(samples.energies[r]) << ",";
        for (auto s : samples.reads[r]) out << (s > 0 ? '1' : '0');
        out << "\n";
    }
    return out.str();
}

std::string logical_solutions_to_csv(const LogicalSolutionSet& solutions) {
    std::ostringstream out;
    out << "read";
    for (std::size_t e = 0; e < solutions.per_entry.size(); ++e)
        out << ",assignment_" << e << ",energy_" << e << ",chain_break_fraction_" << e;
    out << "\n";
    std::size_t reads = solutions.per_entry.empty() ? 0 : solutions.per_entry.front().size();
    for (std::size_t r = 0; r < reads; ++r) {
        out << r;
        for (const auto& entry : solutions.per_entry) {
            const auto& read = entry[r];
            out << ",";
            for (auto b : read.assignment) out << (b ? '1' : '0');
            out << "," << format_double(read.energy) << ","
                << format_double(read.chain_break_fraction);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace mtqa
