#include "mtqa/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mtqa/metrics.hpp"
#include "mtqa/rng.hpp"
#include "mtqa/sampling.hpp"
#include "mtqa/text.hpp"

namespace mtqa {

namespace {

using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// inclusive linear-interpolation quantile over a sorted vector
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
    if (sorted.size() == 1) return sorted.front();
    double pos = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

ordered_json summary_json(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    ordered_json j;
    j["min"] = values.front();
    j["q1"] = quantile(values, 0.25);
    j["median"] = quantile(values, 0.5);
    j["q3"] = quantile(values, 0.75);
    j["max"] = values.back();
    return j;
}

}  // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::mtqa_isolated: return "MTQA-isolated";
        case RunMode::mtqa_nonisolated: return "MTQA-nonisolated";
        case RunMode::pqa: return "PQA";
        case RunMode::qa_single: return "QA-single";
        case RunMode::sa_logical: return "SA-logical";
    }
    throw std::logic_error("unknown mode");
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "MTQA-isolated") return RunMode::mtqa_isolated;
    if (s == "MTQA-nonisolated") return RunMode::mtqa_nonisolated;
    if (s == "PQA") return RunMode::pqa;
    if (s == "QA-single") return RunMode::qa_single;
    if (s == "SA-logical") return RunMode::sa_logical;
    throw std::invalid_argument("unknown mode: " + s);
}

std::string TopologySpec::ref() const {
    if (kind == "chimera")
        return "chimera:" + std::to_string(rows) + "x" + std::to_string(cols) + "x" +
               std::to_string(shore);
    return path;
}

HardwareGraph build_topology(const TopologySpec& spec) {
    if (spec.kind == "chimera") return gen_chimera(spec.rows, spec.cols, spec.shore);
    if (spec.kind == "file") return load_hardware(spec.path);
    throw std::invalid_argument("unknown topology kind: " + spec.kind);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.version != 1) throw std::invalid_argument("config: unsupported version");
    if (cfg.reads < 1) throw std::invalid_argument("config: reads must be >= 1");
    if (cfg.sweeps < 1) throw std::invalid_argument("config: sweeps must be >= 1");
    if (cfg.p_success <= 0.0 || cfg.p_success >= 1.0)
        throw std::invalid_argument("config: p_success must be in (0,1)");
    if (cfg.problems.empty()) throw std::invalid_argument("config: no problems");
    if (cfg.modes.empty()) throw std::invalid_argument("config: no modes");
    std::set<RunMode> distinct(cfg.modes.begin(), cfg.modes.end());
    if (distinct.size() != cfg.modes.size())
        throw std::invalid_argument("config: duplicate modes");
    for (const auto& p : cfg.problems) {
        if (p.n < 1) throw std::invalid_argument("config: problem n must be >= 1");
        if (p.p < 0.0 || p.p > 1.0) throw std::invalid_argument("config: edge probability");
        if (p.count < 1) throw std::invalid_argument("config: problem count must be >= 1");
        if (!p.seeds.empty() && static_cast<int>(p.seeds.size()) != p.count)
            throw std::invalid_argument("config: seeds list must match count");
    }
}

ExperimentConfig config_from_json(const std::string& text) {
    auto j = ordered_json::parse(text);
    ExperimentConfig cfg;
    cfg.version = j.value("version", 1);
    cfg.master_seed = j.value("master_seed", 0ULL);
    cfg.out_dir = j.value("out_dir", "out");
    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        cfg.topology.kind = t.value("kind", "chimera");
        cfg.topology.rows = t.value("rows", 16);
        cfg.topology.cols = t.value("cols", 16);
        cfg.topology.shore = t.value("shore", 4);
        cfg.topology.path = t.value("path", "");
    }
    for (const auto& pj : j.at("problems")) {
        ProblemSpec spec;
        spec.kind = problem_kind_from_string(pj.at("kind").get<std::string>());
        spec.n = pj.at("n").get<int>();
        spec.p = pj.value("p", 0.9);
        spec.count = pj.value("count", 1);
        if (pj.contains("seeds")) spec.seeds = pj.at("seeds").get<std::vector<std::uint64_t>>();
        cfg.problems.push_back(spec);
    }
    for (const auto& mj : j.at("modes")) cfg.modes.push_back(run_mode_from_string(mj));
    if (j.contains("sampler")) {
        cfg.reads = j.at("sampler").value("reads", 2500);
        cfg.sweeps = j.at("sampler").value("sweeps", 1000);
    }
    if (j.contains("metrics")) cfg.p_success = j.at("metrics").value("p_success", 0.99);
    if (j.contains("embedding")) {
        const auto& e = j.at("embedding");
        cfg.embedding.tries = e.value("tries", 10);
        cfg.embedding.timeout_ms = e.value("timeout_ms", 1000);
        cfg.embedding.max_passes = e.value("max_passes", 32);
        cfg.embedding.stall_limit = e.value("stall_limit", 4);
    }
    if (j.contains("parameterize")) {
        const auto& p = j.at("parameterize");
        cfg.compose.h_max = p.value("h_max", 4.0);
        cfg.compose.j_max = p.value("j_max", 1.0);
        cfg.compose.utc_prefactor = p.value("utc_prefactor", 0.5);
        cfg.compose.scaled_prefactor = p.value("scaled_prefactor", 1.5);
        std::string basis = p.value("chain_strength_basis", "ising");
        if (basis == "ising")
            cfg.compose.basis = ChainStrengthBasis::ising_couplers;
        else if (basis == "qubo")
            cfg.compose.basis = ChainStrengthBasis::qubo_quadratic;
        else
            throw std::invalid_argument("config: chain_strength_basis must be ising or qubo");
    }
    validate_config(cfg);
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["version"] = cfg.version;
    j["master_seed"] = cfg.master_seed;
    j["out_dir"] = cfg.out_dir;
    ordered_json t;
    t["kind"] = cfg.topology.kind;
    if (cfg.topology.kind == "chimera") {
        t["rows"] = cfg.topology.rows;
        t["cols"] = cfg.topology.cols;
        t["shore"] = cfg.topology.shore;
    } else {
        t["path"] = cfg.topology.path;
    }
    j["topology"] = t;
    auto problems = ordered_json::array();
    for (const auto& spec : cfg.problems) {
        ordered_json pj;
        pj["kind"] = to_string(spec.kind);
        pj["n"] = spec.n;
        pj["p"] = spec.p;
        pj["count"] = spec.count;
        if (!spec.seeds.empty()) pj["seeds"] = spec.seeds;
        problems.push_back(pj);
    }
    j["problems"] = problems;
    auto modes = ordered_json::array();
    for (auto m : cfg.modes) modes.push_back(to_string(m));
    j["modes"] = modes;
    j["sampler"] = {{"reads", cfg.reads}, {"sweeps", cfg.sweeps}};
    j["metrics"] = {{"p_success", cfg.p_success}};
    j["embedding"] = {{"tries", cfg.embedding.tries},
                      {"timeout_ms", cfg.embedding.timeout_ms},
                      {"max_passes", cfg.embedding.max_passes},
                      {"stall_limit", cfg.embedding.stall_limit}};
    j["parameterize"] = {
        {"h_max", cfg.compose.h_max},
        {"j_max", cfg.compose.j_max},
        {"utc_prefactor", cfg.compose.utc_prefactor},
        {"scaled_prefactor", cfg.compose.scaled_prefactor},
        {"chain_strength_basis",
         cfg.compose.basis == ChainStrengthBasis::ising_couplers ? "ising" : "qubo"}};
    return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

namespace {

struct InstanceRecord {
    int instance_id = 0;
    ProblemKind kind = ProblemKind::mvcp;
    int n = 0;
    double p = 0.0;
    std::uint64_t graph_seed = 0;
    bool oracle_exact = false;
    double oracle_energy = 0.0;
    bool oracle_known = false;
};

struct EntryResult {
    int instance_id = 0;
    double chain_strength = 0.0;
    double scale_factor = 1.0;
    ChainLengthStats chain_len;
    std::vector<LogicalRead> reads;
    double unembed_seconds = 0.0;
};

struct ModeResult {
    RunMode mode = RunMode::qa_single;
    std::string plan_file;
    bool has_plan = false;
    bool isolation = false;
    std::vector<EntryResult> entries;
    std::vector<int> failed_instances;  // single modes: instances that did not embed
    double sampler_wall_seconds = 0.0;
    std::vector<std::uint64_t> sample_seeds;
    std::uint64_t plan_seed = 0;
    std::uint64_t unembed_seed = 0;
};

ChainLengthStats singleton_stats(int nodes) {
    ChainLengthStats st;
    st.mean = 1.0;
    st.stddev = 0.0;
    st.max = 1;
    st.chain_count = nodes;
    return st;
}

// Unembeds one entry of a program on its own, so the per-instance cost is
// measurable. The seed is already entry-specific.
std::vector<LogicalRead> unembed_one_entry(const SampleSet& samples,
                                           const ComposedProgram& program, std::size_t entry,
                                           const std::vector<LogicalProblem>& problems,
                                           std::uint64_t seed) {
    ComposedProgram view;
    view.mode = program.mode;
    view.instances.push_back(program.instances[entry]);
    auto solutions = unembed_majority_vote(samples, view, problems, seed);
    return std::move(solutions.per_entry.front());
}

}  // namespace

ordered_json run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    auto out_path = [&](const std::string& name) {
        return (std::filesystem::path(cfg.out_dir) / name).string();
    };
    auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream out(out_path(name), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path(name));
        out << content;
    };

    HardwareGraph hardware = build_topology(cfg.topology);
    const std::string hw_ref = cfg.topology.ref();

    // --- instances -----------------------------------------------------
    std::vector<InstanceRecord> records;
    std::vector<LogicalProblem> problems;
    std::vector<ProblemGraph> graphs;
    for (const auto& spec : cfg.problems) {
        for (int c = 0; c < spec.count; ++c) {
            InstanceRecord rec;
            rec.instance_id = static_cast<int>(records.size());
            rec.kind = spec.kind;
            rec.n = spec.n;
            rec.p = spec.p;
            rec.graph_seed = spec.seeds.empty()
                                 ? derive_seed(cfg.master_seed, "instance", rec.instance_id)
                                 : spec.seeds[c];
            auto g = gen_erdos_renyi(spec.n, spec.p, rec.graph_seed);
            problems.push_back(make_logical_problem(g, spec.kind));
            graphs.push_back(problems.back().graph);
            records.push_back(rec);
        }
    }
    for (auto& rec : records) {
        if (rec.n <= 24) {
            rec.oracle_exact = true;
            rec.oracle_energy = brute_force_min(problems[rec.instance_id].qubo).energy;
            rec.oracle_known = true;
        }
    }

    // --- plans ----------------------------------------------------------
    bool need_noniso = false, need_iso = false, need_single = false;
    for (auto m : cfg.modes) {
        if (m == RunMode::mtqa_nonisolated || m == RunMode::pqa) need_noniso = true;
        if (m == RunMode::mtqa_isolated) need_iso = true;
        if (m == RunMode::qa_single) need_single = true;
    }

    ParallelPlan plan_noniso, plan_iso;
    std::uint64_t seed_noniso = derive_seed(cfg.master_seed, "plan:nonisolated");
    std::uint64_t seed_iso = derive_seed(cfg.master_seed, "plan:isolated");
    if (need_noniso) {
        plan_noniso =
            parallel_embedding_search(graphs, hardware, false, seed_noniso, cfg.embedding);
        plan_noniso.hardware_ref = hw_ref;
        write_file("plan_nonisolated.json", plan_to_json(plan_noniso));
    }
    if (need_iso) {
        plan_iso = parallel_embedding_search(graphs, hardware, true, seed_iso, cfg.embedding);
        plan_iso.hardware_ref = hw_ref;
        write_file("plan_isolated.json", plan_to_json(plan_iso));
    }
    std::vector<ParallelPlan> plans_single(records.size());
    if (need_single) {
        ordered_json singles = ordered_json::array();
        for (std::size_t i = 0; i < records.size(); ++i) {
            plans_single[i] = parallel_embedding_search(
                {graphs[i]}, hardware, false, derive_seed(cfg.master_seed, "plan:single", i),
                cfg.embedding, 1);
            plans_single[i].hardware_ref = hw_ref;
            singles.push_back(ordered_json::parse(plan_to_json(plans_single[i])));
        }
        write_file("plans_single.json", singles.dump(2));
    }

    // --- sampling per mode ----------------------------------------------
    SaOptions sa_opts;
    sa_opts.reads = cfg.reads;
    sa_opts.sweeps = cfg.sweeps;

    std::vector<ModeResult> results;
    for (auto mode : cfg.modes) {
        ModeResult mr;
        mr.mode = mode;
        const std::string name = to_string(mode);
        mr.unembed_seed = derive_seed(cfg.master_seed, "unembed:" + name);

        if (mode == RunMode::mtqa_isolated || mode == RunMode::mtqa_nonisolated ||
            mode == RunMode::pqa) {
            const bool iso = mode == RunMode::mtqa_isolated;
            const ParallelPlan& plan = iso ? plan_iso : plan_noniso;
            mr.plan_file = iso ? "plan_isolated.json" : "plan_nonisolated.json";
            mr.plan_seed = iso ? seed_iso : seed_noniso;
            mr.has_plan = true;
            mr.isolation = iso;
            if (!plan.entries.empty()) {
                auto program = mode == RunMode::pqa ? compose_pqa(plan, problems, cfg.compose)
                                                    : compose_mtqa(plan, problems, cfg.compose);
                std::uint64_t sample_seed = derive_seed(cfg.master_seed, "sample:" + name);
                mr.sample_seeds.push_back(sample_seed);
                auto samples = sa_sample(program.combined, sa_opts, sample_seed);
                mr.sampler_wall_seconds = samples.wall_time_seconds;
                auto stats = chain_stats(plan);
                for (std::size_t e = 0; e < program.instances.size(); ++e) {
                    EntryResult entry;
                    entry.instance_id = program.instances[e].problem_id;
                    entry.chain_strength = program.instances[e].chain_strength;
                    entry.scale_factor = program.instances[e].scale_factor;
                    entry.chain_len = stats.per_entry[e];
                    auto t0 = Clock::now();
                    entry.reads = unembed_one_entry(
                        samples, program, e, problems,
                        derive_seed(mr.unembed_seed, "entry", e));
                    entry.unembed_seconds = seconds_since(t0);
                    mr.entries.push_back(std::move(entry));
                }
            }
        } else if (mode == RunMode::qa_single) {
            for (std::size_t i = 0; i < records.size(); ++i) {
                if (plans_single[i].entries.empty()) {
                    mr.failed_instances.push_back(static_cast<int>(i));
                    continue;
                }
                std::vector<LogicalProblem> one{problems[i]};
                auto program = compose_mtqa(plans_single[i], one, cfg.compose);
                std::uint64_t sample_seed =
                    derive_seed(cfg.master_seed, "sample:" + name + ":instance", i);
                mr.sample_seeds.push_back(sample_seed);
                auto samples = sa_sample(program.combined, sa_opts, sample_seed);
                mr.sampler_wall_seconds += samples.wall_time_seconds;
                EntryResult entry;
                entry.instance_id = static_cast<int>(i);
                entry.chain_strength = program.instances[0].chain_strength;
                entry.scale_factor = program.instances[0].scale_factor;
                entry.chain_len = chain_stats(plans_single[i]).per_entry[0];
                auto t0 = Clock::now();
                entry.reads = unembed_one_entry(samples, program, 0, one,
                                                derive_seed(mr.unembed_seed, "entry", i));
                entry.unembed_seconds = seconds_since(t0);
                mr.entries.push_back(std::move(entry));
            }
            mr.plan_file = "plans_single.json";
            mr.has_plan = true;
        } else {  // SA on the logical model, no embedding
            for (std::size_t i = 0; i < records.size(); ++i) {
                const auto& lp = problems[i];
                std::uint64_t sample_seed =
                    derive_seed(cfg.master_seed, "sample:" + name + ":instance", i);
                mr.sample_seeds.push_back(sample_seed);
                auto samples = sa_sample(lp.ising, sa_opts, sample_seed);
                mr.sampler_wall_seconds += samples.wall_time_seconds;
                EntryResult entry;
                entry.instance_id = static_cast<int>(i);
                entry.chain_len = singleton_stats(lp.graph.node_count);
                auto t0 = Clock::now();
                for (std::size_t r = 0; r < samples.reads.size(); ++r) {
                    LogicalRead read;
                    read.assignment.assign(lp.graph.node_count, 0);
                    for (std::size_t k = 0; k < samples.qubit_ids.size(); ++k)
                        read.assignment[samples.qubit_ids[k]] = samples.reads[r][k] > 0 ? 1 : 0;
                    read.energy = evaluate(lp.qubo, read.assignment);
                    read.chain_break_fraction = 0.0;
                    entry.reads.push_back(std::move(read));
                }
                entry.unembed_seconds = seconds_since(t0);
                mr.entries.push_back(std::move(entry));
            }
        }
        results.push_back(std::move(mr));
    }

    // --- best-known oracle for instances beyond the exact cap ------------
    for (auto& rec : records) {
        if (rec.oracle_exact) continue;
        bool seen = false;
        double best = 0.0;
        for (const auto& mr : results)
            for (const auto& entry : mr.entries) {
                if (entry.instance_id != rec.instance_id) continue;
                for (const auto& read : entry.reads) {
                    if (!seen || read.energy < best) {
                        best = read.energy;
                        seen = true;
                    }
                }
            }
        rec.oracle_known = seen;
        rec.oracle_energy = best;
    }

    // --- report ----------------------------------------------------------
    ordered_json report;
    report["schema_version"] = 1;
    report["generator"] = "mtqa";
    report["master_seed"] = cfg.master_seed;
    report["config"] = ordered_json::parse(config_to_json(cfg));
    {
        ordered_json hw;
        hw["ref"] = hw_ref;
        hw["qubits"] = hardware.qubit_count;
        hw["couplers"] = hardware.couplers.size();
        hw["disabled"] = hardware.disabled.size();
        report["hardware"] = hw;
    }
    {
        ordered_json instances = ordered_json::array();
        for (const auto& rec : records) {
            ordered_json ij;
            ij["instance_id"] = rec.instance_id;
            ij["kind"] = to_string(rec.kind);
            ij["n"] = rec.n;
            ij["p"] = rec.p;
            ij["graph_seed"] = rec.graph_seed;
            ij["edges"] = problems[rec.instance_id].graph.edges.size();
            ij["odd_n_gpp"] = rec.kind == ProblemKind::gpp && rec.n % 2 != 0;
            ordered_json oracle;
            oracle["kind"] = rec.oracle_exact ? "exact" : "best-known";
            if (rec.oracle_known)
                oracle["energy"] = rec.oracle_energy;
            else
                oracle["energy"] = nullptr;
            ij["oracle"] = oracle;
            instances.push_back(ij);
        }
        report["instances"] = instances;
    }

    ordered_json modes_json = ordered_json::object();
    for (const auto& mr : results) {
        ordered_json mj;
        mj["plan_file"] = mr.has_plan ? ordered_json(mr.plan_file) : ordered_json(nullptr);
        mj["isolation"] = mr.isolation;
        mj["entry_count"] = mr.entries.size();
        mj["seeds"] = {{"plan", mr.plan_seed},
                       {"sample", mr.sample_seeds},
                       {"unembed", mr.unembed_seed}};
        if (!mr.failed_instances.empty()) mj["unembedded_instances"] = mr.failed_instances;

        // copies per instance
        {
            ordered_json packing = ordered_json::array();
            std::map<int, int> copies;
            for (const auto& entry : mr.entries) copies[entry.instance_id]++;
            for (const auto& [iid, cnt] : copies)
                packing.push_back({{"instance_id", iid}, {"copies", cnt}});
            mj["packing"] = packing;
        }

        ordered_json entries_json = ordered_json::array();
        std::map<std::pair<std::string, int>, std::vector<double>> group_p;
        std::map<std::pair<std::string, int>, std::vector<double>> group_unembed;
        double tol_scale = 1e-9;
        for (std::size_t e = 0; e < mr.entries.size(); ++e) {
            const auto& entry = mr.entries[e];
            const auto& rec = records[entry.instance_id];
            ordered_json ej;
            ej["entry_index"] = e;
            ej["instance_id"] = entry.instance_id;
            ej["chain_strength"] = entry.chain_strength;
            ej["scale_factor"] = entry.scale_factor;
            ej["chain_length"] = {{"mean", entry.chain_len.mean},
                                  {"stddev", entry.chain_len.stddev},
                                  {"max", entry.chain_len.max}};
            std::vector<double> energies;
            double cbf_sum = 0.0;
            std::size_t best_read = 0;
            for (std::size_t r = 0; r < entry.reads.size(); ++r) {
                energies.push_back(entry.reads[r].energy);
                cbf_sum += entry.reads[r].chain_break_fraction;
                if (entry.reads[r].energy < entry.reads[best_read].energy) best_read = r;
            }
            double best_energy = entry.reads[best_read].energy;
            ej["best_energy"] = best_energy;
            ej["energy_summary"] = summary_json(energies);
            ej["chain_break_fraction_mean"] = cbf_sum / entry.reads.size();

            std::optional<double> p_opt;
            if (rec.oracle_known) {
                double tol = tol_scale * std::max(1.0, std::abs(rec.oracle_energy));
                int hits = 0;
                for (const auto& read : entry.reads)
                    if (read.energy <= rec.oracle_energy + tol) ++hits;
                p_opt = static_cast<double>(hits) / entry.reads.size();
            }
            ej["p_optimal"] = p_opt ? ordered_json(*p_opt) : ordered_json(nullptr);
            if (p_opt)
                group_p[{to_string(rec.kind), rec.n}].push_back(*p_opt);
            group_unembed[{to_string(rec.kind), rec.n}].push_back(entry.unembed_seconds);

            const auto& g = problems[entry.instance_id].graph;
            if (rec.kind == ProblemKind::gpp) {
                std::vector<double> cuts;
                for (const auto& read : entry.reads)
                    cuts.push_back(cut_edges(g, read.assignment));
                std::sort(cuts.begin(), cuts.end());
                ej["cut_edges_best_read"] = cut_edges(g, entry.reads[best_read].assignment);
                ej["cut_edges_median"] = quantile(cuts, 0.5);
                ej["balanced_best_read"] = partition_balanced(entry.reads[best_read].assignment);
            } else {
                ej["vertex_cover_valid_best_read"] =
                    vertex_cover_valid(g, entry.reads[best_read].assignment);
            }
            ej["timing"] = {{"unembed_s", entry.unembed_seconds}};
            entries_json.push_back(std::move(ej));
        }
        mj["entries"] = entries_json;

        // ground-state probability, overall and per (kind, n) group
        std::vector<double> all_p;
        for (const auto& [key, ps] : group_p) all_p.insert(all_p.end(), ps.begin(), ps.end());
        mj["gsp"] = all_p.empty() ? ordered_json(nullptr) : ordered_json(gsp(all_p));
        {
            ordered_json groups = ordered_json::array();
            int n_mvcp = 0, n_gpp = 0;
            for (const auto& entry : mr.entries)
                (records[entry.instance_id].kind == ProblemKind::mvcp ? n_mvcp : n_gpp)++;
            ordered_json timing_groups = ordered_json::array();
            for (const auto& [key, ps] : group_p) {
                ordered_json gj;
                gj["kind"] = key.first;
                gj["n"] = key.second;
                gj["entries"] = ps.size();
                double g_gsp = gsp(ps);
                gj["gsp"] = g_gsp;
                groups.push_back(gj);

                double t_run = t_run_seconds(cfg.reads, mr.sampler_wall_seconds, n_mvcp, n_gpp,
                                             group_unembed[key]);
                auto tts_value = tts(t_run, g_gsp, cfg.p_success);
                ordered_json tj;
                tj["kind"] = key.first;
                tj["n"] = key.second;
                tj["t_run_s"] = t_run;
                tj["tts_s"] = tts_value ? ordered_json(*tts_value) : ordered_json(nullptr);
                timing_groups.push_back(tj);
            }
            mj["groups"] = groups;
            mj["timing"] = {{"sampler_wall_s", mr.sampler_wall_seconds},
                            {"by_group", timing_groups}};
        }
        modes_json[to_string(mr.mode)] = std::move(mj);
    }
    report["modes"] = std::move(modes_json);

    validate_report(report);
    write_file("report.json", report.dump(2) + "\n");
    write_plot_csvs(report, cfg.out_dir);
    return report;
}

void write_plot_csvs(const ordered_json& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto write_file = [&](const std::string& name, const std::string& content) {
        auto path = (std::filesystem::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << content;
    };

    std::map<int, std::pair<std::string, int>> instance_key;  // id -> (kind, n)
    for (const auto& ij : report.at("instances"))
        instance_key[ij.at("instance_id").get<int>()] = {ij.at("kind").get<std::string>(),
                                                         ij.at("n").get<int>()};

    std::ostringstream gsp_csv, cap_csv, chain_csv, tts_csv, gpp_csv;
    gsp_csv << "mode,kind,n,entries,gsp\n";
    cap_csv << "mode,kind,n,entries\n";
    chain_csv << "mode,kind,n,chain_mean,chain_stddev,chain_max\n";
    tts_csv << "mode,kind,n,t_run_s,tts_s\n";
    gpp_csv << "mode,instance_id,n,min,q1,median,q3,max\n";

    for (const auto& [mode, mj] : report.at("modes").items()) {
        std::map<std::pair<std::string, int>, std::vector<double>> lengths;
        std::map<std::pair<std::string, int>, int> counts;
        for (const auto& ej : mj.at("entries")) {
            auto key = instance_key.at(ej.at("instance_id").get<int>());
            counts[key]++;
            lengths[key].push_back(ej.at("chain_length").at("mean").get<double>());
            if (key.first == "gpp") {
                const auto& s = ej.at("energy_summary");
                gpp_csv << mode << "," << ej.at("instance_id").get<int>() << "," << key.second
                        << "," << format_double(s.at("min").get<double>()) << ","
                        << format_double(s.at("q1").get<double>()) << ","
                        << format_double(s.at("median").get<double>()) << ","
                        << format_double(s.at("q3").get<double>()) << ","
                        << format_double(s.at("max").get<double>()) << "\n";
            }
        }
        for (const auto& [key, cnt] : counts)
            cap_csv << mode << "," << key.first << "," << key.second << "," << cnt << "\n";
        for (const auto& gj : mj.at("groups"))
            gsp_csv << mode << "," << gj.at("kind").get<std::string>() << ","
                    << gj.at("n").get<int>() << "," << gj.at("entries").get<std::size_t>() << ","
                    << format_double(gj.at("gsp").get<double>()) << "\n";
        if (mj.contains("timing") && mj.at("timing").contains("by_group")) {
            for (const auto& tj : mj.at("timing").at("by_group"))
                tts_csv << mode << "," << tj.at("kind").get<std::string>() << ","
                        << tj.at("n").get<int>() << ","
                        << format_double(tj.at("t_run_s").get<double>()) << ","
                        << (tj.at("tts_s").is_null()
                                ? "undefined"
                                : format_double(tj.at("tts_s").get<double>()))
                        << "\n";
        }
        for (const auto& [key, ls] : lengths) {
            double mean = 0.0;
            for (double v : ls) mean += v;
            mean /= ls.size();
            double ss = 0.0, mx = 0.0;
            for (double v : ls) {
                ss += (v - mean) * (v - mean);
                mx = std::max(mx, v);
            }
            chain_csv << mode << "," << key.first << "," << key.second << ","
                      << format_double(mean) << "," << format_double(std::sqrt(ss / ls.size()))
                      << "," << format_double(mx) << "\n";
        }
    }
    write_file("gsp_vs_n.csv", gsp_csv.str());
    write_file("capacity_vs_n.csv", cap_csv.str());
    write_file("chain_stats.csv", chain_csv.str());
    write_file("tts_vs_n.csv", tts_csv.str());
    write_file("gpp_energy_distribution.csv", gpp_csv.str());
}

void validate_report(const ordered_json& report) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw std::runtime_error("report schema violation: " + what);
    };
    require(report.is_object(), "report must be an object");
    require(report.value("schema_version", -1) == 1, "schema_version must be 1");
    require(report.contains("master_seed") && report["master_seed"].is_number(),
            "master_seed missing");
    require(report.contains("config") && report["config"].is_object(), "config missing");
    require(report.contains("hardware") && report["hardware"].is_object(), "hardware missing");
    require(report.contains("instances") && report["instances"].is_array(), "instances missing");
    for (const auto& ij : report["instances"]) {
        require(ij.contains("instance_id") && ij["instance_id"].is_number_integer(),
                "instance_id missing");
        require(ij.contains("kind") && ij["kind"].is_string(), "instance kind missing");
        require(ij.contains("n") && ij["n"].is_number_integer(), "instance n missing");
        require(ij.contains("graph_seed"), "instance graph_seed missing");
        require(ij.contains("oracle") && ij["oracle"].is_object(), "instance oracle missing");
    }
    require(report.contains("modes") && report["modes"].is_object(), "modes missing");
    for (const auto& [name, mj] : report["modes"].items()) {
        require(mj.contains("entry_count"), "mode " + name + ": entry_count missing");
        require(mj.contains("entries") && mj["entries"].is_array(),
                "mode " + name + ": entries missing");
        require(mj.contains("gsp"), "mode " + name + ": gsp missing");
        if (mj["gsp"].is_number()) {
            double g = mj["gsp"].get<double>();
            require(g >= 0.0 && g <= 1.0, "mode " + name + ": gsp outside [0,1]");
        }
        require(mj.contains("timing") && mj["timing"].is_object(),
                "mode " + name + ": timing missing");
        for (const auto& ej : mj["entries"]) {
            require(ej.contains("p_optimal"), "entry p_optimal missing");
            if (ej["p_optimal"].is_number()) {
                double p = ej["p_optimal"].get<double>();
                require(p >= 0.0 && p <= 1.0, "entry p_optimal outside [0,1]");
            }
            require(ej.contains("energy_summary"), "entry energy_summary missing");
            require(ej.contains("timing"), "entry timing missing");
        }
    }
}

ordered_json strip_timing(const ordered_json& report) {
    ordered_json out = report;
    std::function<void(ordered_json&)> scrub = [&](ordered_json& node) {
        if (node.is_object()) {
            node.erase("timing");
            for (auto& [key, value] : node.items()) scrub(value);
        } else if (node.is_array()) {
            for (auto& value : node) scrub(value);
        }
    };
    scrub(out);
    return out;
}

}  // namespace mtqa
