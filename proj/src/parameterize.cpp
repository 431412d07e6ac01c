#include "mtqa/parameterize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mtqa {

std::string to_string(ProblemKind k) { return k == ProblemKind::mvcp ? "mvcp" : "gpp"; }

ProblemKind problem_kind_from_string(const std::string& s) {
    if (s == "mvcp") return ProblemKind::mvcp;
    if (s == "gpp") return ProblemKind::gpp;
    throw std::invalid_argument("unknown problem kind: " + s);
}

LogicalProblem make_logical_problem(const ProblemGraph& g, ProblemKind kind) {
    LogicalProblem p;
    p.graph = g;
    p.kind = kind;
    p.qubo = (kind == ProblemKind::mvcp) ? build_mvcp_qubo(g) : build_gpp_qubo(g);
    p.ising = qubo_to_ising(p.qubo);
    return p;
}

namespace {

double rms(const std::map<std::pair<int, int>, double>& terms) {
    if (terms.empty()) return 0.0;
    double ss = 0.0;
    for (const auto& [ij, v] : terms) ss += v * v;
    return std::sqrt(ss / terms.size());
}

double max_abs(const std::map<int, double>& lin,
               const std::map<std::pair<int, int>, double>& quad) {
    double m = 0.0;
    for (const auto& [i, v] : lin) m = std::max(m, std::abs(v));
    for (const auto& [ij, v] : quad) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

double chain_strength_utc(const IsingModel& logical, const ProblemGraph& g, double prefactor) {
    if (logical.J.empty()) return 0.0;
    return prefactor * rms(logical.J) * std::sqrt(degree_stats(g).avg_degree);
}

double chain_strength_scaled(const IsingModel& logical, double prefactor) {
    return prefactor * max_abs(logical.h, logical.J);
}

double chain_strength_for(const LogicalProblem& p, const ComposeOptions& opts) {
    if (opts.basis == ChainStrengthBasis::qubo_quadratic) {
        if (p.kind == ProblemKind::mvcp) {
            if (p.qubo.quadratic.empty()) return 0.0;
            return opts.utc_prefactor * rms(p.qubo.quadratic) *
                   std::sqrt(degree_stats(p.graph).avg_degree);
        }
        return opts.scaled_prefactor * max_abs(p.qubo.linear, p.qubo.quadratic);
    }
    if (p.kind == ProblemKind::mvcp)
        return chain_strength_utc(p.ising, p.graph, opts.utc_prefactor);
    return chain_strength_scaled(p.ising, opts.scaled_prefactor);
}

IsingModel embed_ising(const IsingModel& logical, const Embedding& e, double chain_strength,
                       const HardwareGraph& hw) {
    IsingModel phys;
    phys.offset = logical.offset;

    std::set<std::pair<int, int>> coupler_set(hw.couplers.begin(), hw.couplers.end());
    auto adj = hw.adjacency();

    int qubit_total = 0;
    for (const auto& [u, chain] : e.chains) qubit_total += static_cast<int>(chain.size());
    phys.size = qubit_total;

    for (const auto& [i, hv] : logical.h) {
        auto it = e.chains.find(i);
        if (it == e.chains.end() || it->second.empty())
            throw std::invalid_argument("embed_ising: no chain for logical node " +
                                        std::to_string(i));
        double share = hv / static_cast<double>(it->second.size());
        for (int q : it->second) phys.add_h(q, share);
    }

    for (const auto& [ij, jv] : logical.J) {
        auto ci = e.chains.find(ij.first);
        auto cj = e.chains.find(ij.second);
        if (ci == e.chains.end() || cj == e.chains.end())
            throw std::invalid_argument("embed_ising: chain missing for a coupled node");
        std::pair<int, int> pick{-1, -1};
        bool found = false;
        for (int qa : ci->second) {
            for (int qb : cj->second) {
                std::pair<int, int> key = std::minmax(qa, qb);
                if (coupler_set.count(key) && (!found || key < pick)) {
                    pick = key;
                    found = true;
                }
            }
        }
        if (!found)
            throw std::invalid_argument("embed_ising: no physical coupler for logical edge " +
                                        std::to_string(ij.first) + "-" +
                                        std::to_string(ij.second));
        phys.add_J(pick.first, pick.second, jv);
    }

    if (chain_strength != 0.0) {
        for (const auto& [u, chain] : e.chains) {
            if (chain.size() < 2) continue;
            // lowest-id-first BFS spanning tree over the chain's induced subgraph
            std::set<int> in(chain.begin(), chain.end());
            std::set<int> seen{chain.front()};
            std::queue<int> frontier;
            frontier.push(chain.front());
            while (!frontier.empty()) {
                int q = frontier.front();
                frontier.pop();
                for (int b : adj[q]) {
                    if (!in.count(b) || seen.count(b)) continue;
                    seen.insert(b);
                    frontier.push(b);
                    auto key = std::minmax(q, b);
                    phys.add_J(key.first, key.second, -chain_strength);
                }
            }
            if (seen.size() != in.size())
                throw std::invalid_argument("embed_ising: chain of node " + std::to_string(u) +
                                            " is disconnected");
        }
    }
    return phys;
}

ScaleResult scale_instance(const IsingModel& physical, double h_max, double j_max) {
    if (h_max <= 0.0 || j_max <= 0.0)
        throw std::invalid_argument("scale_instance: h_max and j_max must be positive");
    double max_h = 0.0, max_j = 0.0;
    for (const auto& [i, v] : physical.h) max_h = std::max(max_h, std::abs(v));
    for (const auto& [ij, v] : physical.J) max_j = std::max(max_j, std::abs(v));
    double factor = std::max({1.0, max_h / h_max, max_j / j_max});
    ScaleResult out;
    out.factor = factor;
    out.model = physical;
    if (factor > 1.0) {
        for (auto& [i, v] : out.model.h) v /= factor;
        for (auto& [ij, v] : out.model.J) v /= factor;
        out.model.offset /= factor;
    }
    return out;
}

namespace {

int count_tree_edges(const Embedding& e) {
    int edges = 0;
    for (const auto& [u, chain] : e.chains) edges += static_cast<int>(chain.size()) - 1;
    return edges;
}

void merge_disjoint(IsingModel& combined, const IsingModel& part) {
    combined.size += part.size;
    combined.offset += part.offset;
    for (const auto& [i, v] : part.h) {
        if (!combined.h.emplace(i, v).second)
            throw std::logic_error("compose: instances share qubit " + std::to_string(i));
    }
    for (const auto& [ij, v] : part.J) {
        if (!combined.J.emplace(ij, v).second)
            throw std::logic_error("compose: instances share a coupler");
    }
}

const LogicalProblem& problem_for(const PlanEntry& entry,
                                  const std::vector<LogicalProblem>& problems) {
    if (entry.problem_id < 0 || entry.problem_id >= static_cast<int>(problems.size()))
        throw std::invalid_argument("compose: plan entry references unknown problem id " +
                                    std::to_string(entry.problem_id));
    return problems[entry.problem_id];
}

}  // namespace

ComposedProgram compose_mtqa(const ParallelPlan& plan, const std::vector<LogicalProblem>& problems,
                             const ComposeOptions& opts) {
    ComposedProgram prog;
    prog.mode = ComposeMode::mtqa;
    prog.hardware = plan.hardware;
    for (const auto& entry : plan.entries) {
        const auto& lp = problem_for(entry, problems);
        EmbeddedInstance inst;
        inst.problem_id = entry.problem_id;
        inst.embedding = entry.embedding;
        inst.chain_strength = chain_strength_for(lp, opts);
        inst.chain_tree_edges = count_tree_edges(entry.embedding);
        auto scaled = scale_instance(
            embed_ising(lp.ising, entry.embedding, inst.chain_strength, *plan.hardware),
            opts.h_max, opts.j_max);
        inst.physical = std::move(scaled.model);
        inst.scale_factor = scaled.factor;
        merge_disjoint(prog.combined, inst.physical);
        prog.instances.push_back(std::move(inst));
    }
    return prog;
}

ComposedProgram compose_pqa(const ParallelPlan& plan, const std::vector<LogicalProblem>& problems,
                            const ComposeOptions& opts) {
    ComposedProgram prog;
    prog.mode = ComposeMode::pqa;
    prog.hardware = plan.hardware;
    if (plan.entries.empty()) return prog;

    double mean_strength = 0.0;
    for (const auto& entry : plan.entries)
        mean_strength += chain_strength_for(problem_for(entry, problems), opts);
    mean_strength /= static_cast<double>(plan.entries.size());

    IsingModel combined_raw;
    std::vector<IsingModel> raw;
    for (const auto& entry : plan.entries) {
        const auto& lp = problem_for(entry, problems);
        raw.push_back(embed_ising(lp.ising, entry.embedding, mean_strength, *plan.hardware));
        merge_disjoint(combined_raw, raw.back());
    }
    double global_factor = scale_instance(combined_raw, opts.h_max, opts.j_max).factor;

    for (std::size_t k = 0; k < plan.entries.size(); ++k) {
        EmbeddedInstance inst;
        inst.problem_id = plan.entries[k].problem_id;
        inst.embedding = plan.entries[k].embedding;
        inst.chain_strength = mean_strength;
        inst.chain_tree_edges = count_tree_edges(inst.embedding);
        inst.scale_factor = global_factor;
        inst.physical = std::move(raw[k]);
        if (global_factor > 1.0) {
            for (auto& [i, v] : inst.physical.h) v /= global_factor;
            for (auto& [ij, v] : inst.physical.J) v /= global_factor;
            inst.physical.offset /= global_factor;
        }
        merge_disjoint(prog.combined, inst.physical);
        prog.instances.push_back(std::move(inst));
    }
    return prog;
}

std::string program_to_json(const ComposedProgram& program) {
    nlohmann::ordered_json j;
    j["mode"] = program.mode == ComposeMode::mtqa ? "mtqa" : "pqa";
    auto instances = nlohmann::ordered_json::array();
    for (const auto& inst : program.instances) {
        nlohmann::ordered_json ji;
        ji["problem_id"] = inst.problem_id;
        ji["chain_strength"] = inst.chain_strength;
        ji["scale_factor"] = inst.scale_factor;
        ji["chain_tree_edges"] = inst.chain_tree_edges;
        instances.push_back(ji);
    }
    j["instances"] = instances;
    j["combined"] = nlohmann::ordered_json::parse(ising_to_json(program.combined));
    return j.dump(2);
}

}  // namespace mtqa
