// Command-line front end: generate instances, build packing plans and
// capacity sweeps, run configured experiments, and compute eigenspectrum /
// transition-probability curves.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mtqa/embedding.hpp"
#include "mtqa/experiment.hpp"
#include "mtqa/graph.hpp"
#include "mtqa/metrics.hpp"
#include "mtqa/parameterize.hpp"
#include "mtqa/rng.hpp"
#include "mtqa/sampling.hpp"
#include "mtqa/spectrum.hpp"
#include "mtqa/text.hpp"
#include "mtqa/topology.hpp"

namespace {

using mtqa::format_double;

mtqa::TopologySpec parse_topology(const std::string& text) {
    mtqa::TopologySpec spec;
    if (text.rfind("chimera:", 0) == 0) {
        spec.kind = "chimera";
        int rows = 0, cols = 0, shore = 0;
        char x1 = 0, x2 = 0;
        std::istringstream in(text.substr(8));
        if (!(in >> rows >> x1 >> cols >> x2 >> shore) || x1 != 'x' || x2 != 'x')
            throw std::invalid_argument("topology must be chimera:RxCxS or a file path");
        spec.rows = rows;
        spec.cols = cols;
        spec.shore = shore;
    } else {
        spec.kind = "file";
        spec.path = text;
    }
    return spec;
}

void write_text(const std::string& path, const std::string& content) {
    if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int cmd_gen(int n, double p, std::uint64_t seed, int count, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (int c = 0; c < count; ++c) {
        std::uint64_t s = count == 1 ? seed : mtqa::derive_seed(seed, "gen", c);
        auto g = mtqa::gen_erdos_renyi(n, p, s);
        auto name = "graph_n" + std::to_string(n) + "_s" + std::to_string(s) + ".txt";
        auto path = (std::filesystem::path(out_dir) / name).string();
        mtqa::save_graph(g, path);
        std::cout << path << "  nodes=" << n << " edges=" << g.edges.size() << " seed=" << s
                  << "\n";
    }
    return 0;
}

int cmd_embed(const std::vector<std::string>& graph_paths, const std::string& topology,
              bool isolation, std::uint64_t seed, const mtqa::FindOptions& opts,
              const std::string& out_dir) {
    auto hw = mtqa::build_topology(parse_topology(topology));
    std::vector<mtqa::ProblemGraph> graphs;
    for (const auto& path : graph_paths) graphs.push_back(mtqa::load_graph(path));
    auto plan = mtqa::parallel_embedding_search(graphs, hw, isolation, seed, opts);
    plan.hardware_ref = topology;
    auto check = mtqa::validate_plan(plan, graphs);
    if (!check.ok) {
        std::cerr << "plan validation failed: " << check.message << "\n";
        return 1;
    }
    std::filesystem::create_directories(out_dir);
    auto plan_path = (std::filesystem::path(out_dir) / "plan.json").string();
    write_text(plan_path, mtqa::plan_to_json(plan));
    std::cout << "plan: " << plan_path << "\n";
    std::cout << "entries: " << plan.entries.size() << " isolation: " << (isolation ? "on" : "off")
              << " tries: " << opts.tries << " timeout_ms: " << opts.timeout_ms << "\n";
    if (!plan.entries.empty()) {
        auto stats = mtqa::chain_stats(plan);
        std::cout << "chain length mean=" << format_double(stats.aggregate.mean)
                  << " stddev=" << format_double(stats.aggregate.stddev)
                  << " max=" << stats.aggregate.max << "\n";
    }
    return 0;
}

int cmd_capacity_sweep(const std::vector<int>& sizes, int seeds, const std::string& kind,
                       double p, const std::string& topology, const mtqa::FindOptions& opts,
                       std::uint64_t seed, const std::string& out_dir) {
    auto hw = mtqa::build_topology(parse_topology(topology));
    std::ostringstream csv;
    csv << "kind,n,seed,isolated,entries,chain_mean,chain_max\n";
    for (int n : sizes) {
        for (int s = 0; s < seeds; ++s) {
            auto g = mtqa::gen_erdos_renyi(n, p, mtqa::derive_seed(seed, "sweep-instance", s));
            for (bool iso : {false, true}) {
                auto plan = mtqa::parallel_embedding_search(
                    {g}, hw, iso, mtqa::derive_seed(seed, iso ? "sweep-iso" : "sweep-noniso", s),
                    opts);
                double mean = 0.0;
                int max = 0;
                if (!plan.entries.empty()) {
                    auto stats = mtqa::chain_stats(plan);
                    mean = stats.aggregate.mean;
                    max = stats.aggregate.max;
                }
                csv << kind << "," << n << "," << s << "," << (iso ? 1 : 0) << ","
                    << plan.entries.size() << "," << format_double(mean) << "," << max << "\n";
                std::cout << "n=" << n << " seed=" << s << (iso ? " isolated" : " dense")
                          << " entries=" << plan.entries.size() << "\n";
            }
        }
    }
    std::filesystem::create_directories(out_dir);
    auto path = (std::filesystem::path(out_dir) / "capacity_sweep.csv").string();
    write_text(path, csv.str());
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_spectrum(const std::string& kind_str, int n, double p, std::uint64_t seed, bool logical,
                 const std::string& topology, int grid_points, double temperature_mk,
                 double anneal_time_us, const std::string& schedule_path,
                 const std::string& combine, const std::string& out_dir) {
    auto kind = mtqa::problem_kind_from_string(kind_str);
    auto g = mtqa::gen_erdos_renyi(n, p, seed);
    auto problem = mtqa::make_logical_problem(g, kind);

    mtqa::AnnealSchedule sched;
    if (!schedule_path.empty()) {
        std::ifstream in(schedule_path);
        if (!in) throw std::runtime_error("cannot open schedule: " + schedule_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        sched = mtqa::schedule_from_csv(buf.str(), schedule_path);
    } else {
        sched = mtqa::default_schedule(grid_points);
    }
    sched.anneal_time_seconds = anneal_time_us * 1e-6;

    mtqa::IsingModel model = problem.ising;
    double chain_strength = 0.0, scale_factor = 1.0;
    if (!logical) {
        auto hw = mtqa::build_topology(parse_topology(topology));
        mtqa::ComposeOptions copts;
        bool embedded = false;
        for (int attempt = 0; attempt < 50 && !embedded; ++attempt) {
            auto emb = mtqa::find_embedding(problem.graph, hw,
                                            mtqa::derive_seed(seed, "spectrum-embed", attempt));
            if (!emb) continue;
            int physical = static_cast<int>(emb->all_qubits().size());
            if (physical > 12) continue;  // dense diagonalization cap
            chain_strength = mtqa::chain_strength_for(problem, copts);
            auto scaled = mtqa::scale_instance(
                mtqa::embed_ising(problem.ising, *emb, chain_strength, hw), copts.h_max,
                copts.j_max);
            model = scaled.model;
            scale_factor = scaled.factor;
            embedded = true;
        }
        if (!embedded)
            throw std::runtime_error(
                "no embedding with at most 12 physical qubits found; try --logical or a denser "
                "topology");
    }

    auto grid = mtqa::uniform_grid(grid_points);
    auto spec = mtqa::eigencurves(model, sched, grid);
    if (combine == "identical") spec = mtqa::combine_identical(spec);
    spec = mtqa::transition_probabilities(spec, sched, temperature_mk * 1e-3);

    std::filesystem::create_directories(out_dir);
    auto spath = (std::filesystem::path(out_dir) / "spectrum.csv").string();
    write_text(spath, mtqa::spectrum_to_csv(spec));
    write_text((std::filesystem::path(out_dir) / "schedule.csv").string(),
               mtqa::schedule_to_csv(sched));

    nlohmann::ordered_json j;
    j["kind"] = kind_str;
    j["n"] = n;
    j["graph_seed"] = seed;
    j["embedded"] = !logical;
    j["chain_strength"] = chain_strength;
    j["scale_factor"] = scale_factor;
    j["variables"] = model.variable_ids().size();
    j["min_gap_ghz"] = spec.min_gap_ghz;
    j["min_gap_s"] = spec.min_gap_s;
    j["p_total_max"] = spec.p_total_max;
    j["p_total_max_s"] = spec.p_total_max_s;
    j["temperature_mk"] = temperature_mk;
    j["anneal_time_us"] = anneal_time_us;
    write_text((std::filesystem::path(out_dir) / "spectrum_summary.json").string(),
               j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    std::cout << "wrote " << spath << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-task annealing emulation toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate random problem graphs");
    int gen_n = 10;
    double gen_p = 0.9;
    std::uint64_t gen_seed = 0;
    int gen_count = 1;
    std::string gen_out = "out";
    gen->add_option("--n", gen_n, "node count")->required();
    gen->add_option("--p", gen_p, "edge probability");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--count", gen_count, "number of instances");
    gen->add_option("--out-dir", gen_out, "output directory");

    // embed
    auto* embed = app.add_subcommand("embed", "build packing plans or capacity sweeps");
    std::vector<std::string> embed_graphs;
    std::string embed_topology = "chimera:16x16x4";
    bool embed_iso = false;
    std::uint64_t embed_seed = 0;
    std::string embed_out = "out";
    mtqa::FindOptions embed_opts;
    bool embed_sweep = false;
    std::vector<int> sweep_sizes;
    int sweep_seeds = 20;
    std::string sweep_kind = "mvcp";
    double sweep_p = 0.9;
    embed->add_option("--graph", embed_graphs, "problem graph file (repeatable)");
    embed->add_option("--topology", embed_topology, "chimera:RxCxS or hardware file");
    embed->add_flag("--isolation", embed_iso, "insert buffer layers between instances");
    embed->add_option("--seed", embed_seed, "search seed");
    embed->add_option("--tries", embed_opts.tries, "restarts per embedding attempt");
    embed->add_option("--timeout-ms", embed_opts.timeout_ms, "wall budget per attempt (0 = none)");
    embed->add_option("--out-dir", embed_out, "output directory");
    embed->add_flag("--capacity-sweep", embed_sweep, "run a packing capacity sweep");
    embed->add_option("--sizes", sweep_sizes, "graph sizes for the sweep");
    embed->add_option("--seeds", sweep_seeds, "seeds per size");
    embed->add_option("--kind", sweep_kind, "problem kind label for the sweep");
    embed->add_option("--p", sweep_p, "edge probability for sweep instances");

    // run
    auto* run = app.add_subcommand("run", "run a configured experiment");
    std::string run_config;
    std::string run_out;
    std::string run_topology;
    std::vector<std::string> run_modes;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    run->add_option("--config", run_config, "experiment config (JSON)")->required();
    run->add_option("--out-dir", run_out, "override output directory");
    run->add_option("--topology", run_topology, "override topology");
    run->add_option("--mode", run_modes, "override mode list (repeatable)");
    run->add_option("--seed", run_seed, "override master seed")
        ->each([&](const std::string&) { run_seed_set = true; });

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "eigenspectrum and transition analysis");
    std::string spec_kind = "mvcp";
    int spec_n = 6;
    double spec_p = 0.9;
    std::uint64_t spec_seed = 1;
    bool spec_logical = false;
    std::string spec_topology = "chimera:2x2x4";
    int spec_grid = 201;
    double spec_temp_mk = 16.0;
    double spec_anneal_us = 20.0;
    std::string spec_schedule;
    std::string spec_combine = "none";
    std::string spec_out = "out";
    spectrum->add_option("--kind", spec_kind, "mvcp or gpp");
    spectrum->add_option("--n", spec_n, "logical node count");
    spectrum->add_option("--p", spec_p, "edge probability");
    spectrum->add_option("--seed", spec_seed, "instance seed");
    spectrum->add_flag("--logical", spec_logical, "analyze the logical model (skip embedding)");
    spectrum->add_option("--topology", spec_topology, "hardware for the embedded analysis");
    spectrum->add_option("--grid", spec_grid, "number of s grid points");
    spectrum->add_option("--temperature-mk", spec_temp_mk, "system temperature in mK");
    spectrum->add_option("--anneal-time-us", spec_anneal_us, "anneal time in microseconds");
    spectrum->add_option("--schedule", spec_schedule, "schedule CSV overriding the default");
    spectrum->add_option("--combine", spec_combine, "none or identical")
        ->check(CLI::IsMember({"none", "identical"}));
    spectrum->add_option("--out-dir", spec_out, "output directory");

    // report
    auto* report = app.add_subcommand("report", "re-aggregate plot CSVs from a report");
    std::string report_dir = "out";
    report->add_option("--out-dir", report_dir, "directory containing report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_n, gen_p, gen_seed, gen_count, gen_out);
        if (embed->parsed()) {
            if (embed_sweep) {
                if (sweep_sizes.empty())
                    throw std::invalid_argument("--capacity-sweep requires --sizes");
                return cmd_capacity_sweep(sweep_sizes, sweep_seeds, sweep_kind, sweep_p,
                                          embed_topology, embed_opts, embed_seed, embed_out);
            }
            if (embed_graphs.empty())
                throw std::invalid_argument("embed requires --graph or --capacity-sweep");
            return cmd_embed(embed_graphs, embed_topology, embed_iso, embed_seed, embed_opts,
                             embed_out);
        }
        if (run->parsed()) {
            auto cfg = mtqa::load_config(run_config);
            if (run_seed_set) cfg.master_seed = run_seed;
            if (!run_out.empty()) cfg.out_dir = run_out;
            if (!run_topology.empty()) cfg.topology = parse_topology(run_topology);
            if (!run_modes.empty()) {
                cfg.modes.clear();
                for (const auto& m : run_modes) cfg.modes.push_back(mtqa::run_mode_from_string(m));
            }
            auto rep = mtqa::run_experiment(cfg);
            std::cout << "report: " << (std::filesystem::path(cfg.out_dir) / "report.json").string()
                      << "\n";
            for (const auto& [mode, mj] : rep["modes"].items())
                std::cout << mode << ": entries=" << mj["entry_count"]
                          << " gsp=" << mj["gsp"].dump() << "\n";
            return 0;
        }
        if (spectrum->parsed())
            return cmd_spectrum(spec_kind, spec_n, spec_p, spec_seed, spec_logical, spec_topology,
                                spec_grid, spec_temp_mk, spec_anneal_us, spec_schedule,
                                spec_combine, spec_out);
        if (report->parsed()) {
            auto path = (std::filesystem::path(report_dir) / "report.json").string();
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open " + path);
            std::ostringstream buf;
            buf << in.rdbuf();
            auto rep = nlohmann::ordered_json::parse(buf.str());
            mtqa::validate_report(rep);
            mtqa::write_plot_csvs(rep, report_dir);
            std::cout << "re-aggregated CSVs under " << report_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
