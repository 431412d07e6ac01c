#include "mtqa/embedding.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <tuple>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mtqa/rng.hpp"

namespace mtqa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
#ifndef WBASE
#define WBASE 10.0
#endif

using Clock = std::chrono::steady_clock;

// Search state for one find_embedding call. Hardware adjacency is flattened
// once; per-try state is reset in place.
class EmbeddingSearch {
  public:
    EmbeddingSearch(const ProblemGraph& source, const HardwareGraph& hw)
        : n_src_(source.node_count), n_hw_(hw.qubit_count) {
        src_adj_.resize(n_src_);
        for (auto [u, v] : source.edges) {
            src_adj_[u].push_back(v);
            src_adj_[v].push_back(u);
        }
        for (auto& a : src_adj_) std::sort(a.begin(), a.end());

        usable_.assign(n_hw_, 1);
        for (int q : hw.disabled) usable_[q] = 0;
        n_usable_ = hw.effective_qubit_count();

        // CSR adjacency over effective qubits only
        std::vector<std::vector<int>> adj(n_hw_);
        for (auto [u, v] : hw.couplers) {
            if (!usable_[u] || !usable_[v]) continue;
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        offsets_.assign(n_hw_ + 1, 0);
        for (int q = 0; q < n_hw_; ++q) {
            std::sort(adj[q].begin(), adj[q].end());
            offsets_[q + 1] = offsets_[q] + static_cast<int>(adj[q].size());
        }
        neighbors_.reserve(offsets_[n_hw_]);
        for (int q = 0; q < n_hw_; ++q)
            neighbors_.insert(neighbors_.end(), adj[q].begin(), adj[q].end());

        usage_.assign(n_hw_, 0);
        chains_.resize(n_src_);
        dist_.assign(n_hw_, kInf);
        pred_.assign(n_hw_, -1);
        sum_dist_.assign(n_hw_, 0.0);
        reach_count_.assign(n_hw_, 0);
        perm_.assign(n_hw_, 0);
    }

    std::optional<Embedding> run(std::uint64_t seed, const FindOptions& opts) {
        if (n_src_ == 0) throw std::invalid_argument("find_embedding: empty source graph");
        if (n_usable_ == 0) throw std::invalid_argument("find_embedding: empty effective hardware");
        if (n_usable_ < n_src_) return std::nullopt;  // not enough qubits for disjoint chains

        Clock::time_point deadline{};
        bool has_deadline = opts.timeout_ms > 0;
        if (has_deadline) deadline = Clock::now() + std::chrono::milliseconds(opts.timeout_ms);

        for (int t = 0; t < opts.tries; ++t) {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
            if (attempt(rng, opts, has_deadline, deadline)) {
                cleanup_chains();
                Embedding e;
                for (int u = 0; u < n_src_; ++u) {
                    std::sort(chains_[u].begin(), chains_[u].end());
                    e.chains[u] = chains_[u];
                }
                return e;
            }
            if (has_deadline && Clock::now() >= deadline) break;
        }
        return std::nullopt;
    }

  private:
    bool attempt(Rng& rng, const FindOptions& opts, bool has_deadline,
                 Clock::time_point deadline) {
        std::fill(usage_.begin(), usage_.end(), 0);
        for (auto& c : chains_) c.clear();
        // random secondary priority so equal-cost paths and roots are broken
        // differently on every try
        for (int q = 0; q < n_hw_; ++q) perm_[q] = static_cast<std::uint32_t>(q);
        rng.shuffle(perm_);

        std::vector<int> order(n_src_);
        for (int i = 0; i < n_src_; ++i) order[i] = i;
        rng.shuffle(order);

        std::vector<char> placed(n_src_, 0);
        for (int u : order) {
            if (has_deadline && Clock::now() >= deadline) return false;
            if (!place_node(u, placed, rng)) return false;
            placed[u] = 1;
        }

        auto best = fill_signature();
        if (best[0] <= 1) return true;
        int stall = 0;
        for (int pass = 0; pass < opts.max_passes; ++pass) {
            rng.shuffle(order);
            rng.shuffle(perm_);
            for (int u : order) {
                if (has_deadline && Clock::now() >= deadline) return false;
                rip_node(u);
                placed[u] = 0;
                if (!place_node(u, placed, rng)) return false;
                placed[u] = 1;
            }
            auto sig = fill_signature();
#ifdef MTQA_TRACE_FILL
            std::cerr << "pass " << pass << ": maxfill=" << sig[0] << " at_max=" << sig[1]
                      << " overuse=" << sig[2] << "\n";
#endif
            if (sig[0] <= 1) return true;
            if (sig < best) {
                best = sig;
                stall = 0;
            } else if (++stall >= opts.stall_limit) {
                return false;
            }
        }
        return false;
    }

    // (max fill, qubits at max fill, total overuse): lexicographic progress
    // measure for the improvement passes
    std::array<long, 3> fill_signature() const {
        long max_fill = 0, at_max = 0, over = 0;
        for (int q = 0; q < n_hw_; ++q) {
            if (usage_[q] > max_fill) {
                max_fill = usage_[q];
                at_max = 1;
            } else if (usage_[q] == max_fill) {
                ++at_max;
            }
            if (usage_[q] > 1) over += usage_[q] - 1;
        }
        return {max_fill, at_max, over};
    }

    double weight(int q) const {
        // exponential penalty for claimed qubits; capped to stay finite
        int u = std::min(usage_[q], 64);
        return std::pow(WBASE, u);
    }

    void rip_node(int u) {
        for (int q : chains_[u]) --usage_[q];
        chains_[u].clear();
    }

    bool place_node(int u, const std::vector<char>& placed, Rng& rng) {
        std::vector<int> nbrs;
        for (int v : src_adj_[u])
            if (placed[v]) nbrs.push_back(v);

        if (nbrs.empty()) {
            // free-standing root: uniform choice among least-used qubits
            int best_usage = std::numeric_limits<int>::max();
            for (int q = 0; q < n_hw_; ++q)
                if (usable_[q]) best_usage = std::min(best_usage, usage_[q]);
            std::vector<int> cands;
            for (int q = 0; q < n_hw_; ++q)
                if (usable_[q] && usage_[q] == best_usage) cands.push_back(q);
            int root = cands[rng.uniform_int(cands.size())];
            chains_[u].push_back(root);
            ++usage_[root];
            return true;
        }

        std::fill(sum_dist_.begin(), sum_dist_.end(), 0.0);
        std::fill(reach_count_.begin(), reach_count_.end(), 0);
        preds_per_nbr_.assign(nbrs.size(), {});

        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            dijkstra_from_chain(chains_[nbrs[k]]);
            preds_per_nbr_[k] = pred_;
            for (int q = 0; q < n_hw_; ++q) {
                if (dist_[q] < kInf) {
                    sum_dist_[q] += dist_[q];
                    ++reach_count_[q];
                }
            }
        }

        // candidate root: reachable from every neighbor chain, minimal summed
        // path cost plus its own claim cost; uniform choice among minima
        double best = kInf;
        root_minima_.clear();
        for (int q = 0; q < n_hw_; ++q) {
            if (!usable_[q] || reach_count_[q] != static_cast<int>(nbrs.size())) continue;
            double score = sum_dist_[q] + weight(q);
            if (score < best) {
                best = score;
                root_minima_.clear();
            }
            if (score == best) root_minima_.push_back(q);
        }
        if (root_minima_.empty()) return false;
        int root = root_minima_[rng.uniform_int(root_minima_.size())];

        std::set<int> chain;
        chain.insert(root);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            // walk back to the neighbor chain; the endpoint inside it stays put
            int q = root;
            while (preds_per_nbr_[k][q] != -2) {
                chain.insert(q);
                q = preds_per_nbr_[k][q];
            }
        }
        chains_[u].assign(chain.begin(), chain.end());
        trim_chain(u, nbrs);
        for (int q : chains_[u]) ++usage_[q];
        return true;
    }

    // Shed every qubit whose removal keeps the chain connected and keeps a
    // coupler to each listed neighbor chain, dropping the most contested ones
    // first. Keeping chains minimal while the search runs is what lets the
    // refinement passes drain congestion.
    void trim_chain(int u, const std::vector<int>& nbrs) {
        auto& chain = chains_[u];
        bool changed = true;
        while (changed && chain.size() > 1) {
            changed = false;
            std::vector<int> scan = chain;
            std::sort(scan.begin(), scan.end(), [&](int a, int b) {
                if (usage_[a] != usage_[b]) return usage_[a] > usage_[b];
                return a < b;
            });
            for (int q : scan) {
                if (chain.size() <= 1) break;
                std::vector<int> reduced;
                for (int c : chain)
                    if (c != q) reduced.push_back(c);
                if (!subgraph_connected(reduced)) continue;
                bool covers = true;
                for (int v : nbrs) {
                    if (!chains_connected(reduced, chains_[v])) {
                        covers = false;
                        break;
                    }
                }
                if (!covers) continue;
                chain = reduced;
                changed = true;
                break;
            }
        }
    }

    // Node-weighted multi-source Dijkstra; sources (the chain) enter at cost 0
    // and are flagged pred = -2 so path walks stop there. The per-try random
    // permutation acts as a secondary key, so equal-cost parents vary across
    // tries and passes instead of repeating the same routes.
    void dijkstra_from_chain(const std::vector<int>& chain) {
        std::fill(dist_.begin(), dist_.end(), kInf);
        std::fill(pred_.begin(), pred_.end(), -1);
        heap_.clear();
        for (int q : chain) {
            dist_[q] = 0.0;
            pred_[q] = -2;
            heap_.emplace_back(0.0, perm_[q], q);
        }
        std::make_heap(heap_.begin(), heap_.end(), std::greater<>{});
        while (!heap_.empty()) {
            std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
            auto [d, pk, q] = heap_.back();
            heap_.pop_back();
            if (d > dist_[q]) continue;
            for (int idx = offsets_[q]; idx < offsets_[q + 1]; ++idx) {
                int b = neighbors_[idx];
                if (pred_[b] == -2) continue;  // already a source
                double nd = d + weight(b);
                if (nd < dist_[b]) {
                    dist_[b] = nd;
                    pred_[b] = q;
                    heap_.emplace_back(nd, perm_[b], b);
                    std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
                }
            }
        }
    }

    // Drop chain qubits whose removal keeps the chain connected and every
    // incident logical edge realized. Repeats to a fixpoint; deterministic
    // ascending scan order.
    void cleanup_chains() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (int u = 0; u < n_src_; ++u) {
                auto& chain = chains_[u];
                if (chain.size() <= 1) continue;
                std::sort(chain.begin(), chain.end());
                for (std::size_t k = 0; k < chain.size() && chain.size() > 1; ++k) {
                    int q = chain[k];
                    std::vector<int> reduced;
                    for (int c : chain)
                        if (c != q) reduced.push_back(c);
                    if (!subgraph_connected(reduced)) continue;
                    bool covers = true;
                    for (int v : src_adj_[u]) {
                        if (!chains_connected(reduced, chains_[v])) {
                            covers = false;
                            break;
                        }
                    }
                    if (!covers) continue;
                    --usage_[q];
                    chain = reduced;
                    --k;
                    changed = true;
                }
            }
        }
    }

    bool subgraph_connected(const std::vector<int>& qubits) const {
        if (qubits.empty()) return false;
        std::set<int> in(qubits.begin(), qubits.end());
        std::vector<int> stack{qubits.front()};
        std::set<int> seen{qubits.front()};
        while (!stack.empty()) {
            int q = stack.back();
            stack.pop_back();
            for (int idx = offsets_[q]; idx < offsets_[q + 1]; ++idx) {
                int b = neighbors_[idx];
                if (in.count(b) && !seen.count(b)) {
                    seen.insert(b);
                    stack.push_back(b);
                }
            }
        }
        return seen.size() == in.size();
    }

    bool chains_connected(const std::vector<int>& a, const std::vector<int>& b) const {
        std::set<int> in_b(b.begin(), b.end());
        for (int q : a)
            for (int idx = offsets_[q]; idx < offsets_[q + 1]; ++idx)
                if (in_b.count(neighbors_[idx])) return true;
        return false;
    }

    int n_src_;
    int n_hw_;
    int n_usable_ = 0;
    std::vector<std::vector<int>> src_adj_;
    std::vector<char> usable_;
    std::vector<int> offsets_;
    std::vector<int> neighbors_;
    std::vector<int> usage_;
    std::vector<std::vector<int>> chains_;
    std::vector<double> dist_;
    std::vector<int> pred_;
    std::vector<double> sum_dist_;
    std::vector<int> reach_count_;
    std::vector<std::vector<int>> preds_per_nbr_;
    std::vector<std::tuple<double, std::uint32_t, int>> heap_;
    std::vector<std::uint32_t> perm_;
    std::vector<int> root_minima_;
};

}  // namespace

std::vector<int> Embedding::all_qubits() const {
    std::vector<int> out;
    for (const auto& [u, chain] : chains) out.insert(out.end(), chain.begin(), chain.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Embedding> find_embedding(const ProblemGraph& source, const HardwareGraph& hw,
                                        std::uint64_t seed, const FindOptions& opts) {
    EmbeddingSearch search(source, hw);
    auto result = search.run(seed, opts);
    if (result) {
        // a returned embedding is always checked, never trusted
        if (auto violation = validate_embedding(*result, source, hw))
            throw std::logic_error("find_embedding produced an invalid embedding: " + *violation);
    }
    return result;
}

ParallelPlan parallel_embedding_search(const std::vector<ProblemGraph>& problems,
                                       const HardwareGraph& hw, bool isolation,
                                       std::uint64_t seed, const FindOptions& opts,
                                       std::size_t max_entries) {
    ParallelPlan plan;
    plan.isolation = isolation;
    plan.hardware = std::make_shared<HardwareGraph>(hw);
    plan.hardware_ref = hw.family_tag;

    HardwareGraph working = hw;
    std::uint64_t attempt = 0;
    bool capped = false;
    while (!capped) {
        bool found = false;
        for (std::size_t pid = 0; pid < problems.size(); ++pid) {
            if (max_entries > 0 && plan.entries.size() >= max_entries) {
                capped = true;
                break;
            }
            if (working.effective_qubit_count() == 0) continue;
            auto emb = find_embedding(problems[pid], working,
                                      derive_seed(seed, "embed-attempt", attempt++), opts);
            if (!emb) continue;
            std::set<int> used;
            for (int q : emb->all_qubits()) used.insert(q);
            working = isolation ? remove_nodes_and_neighbors(working, used)
                                : remove_nodes(working, used);
            plan.entries.push_back({static_cast<int>(pid), std::move(*emb)});
            found = true;
        }
        if (!found) break;
    }
    return plan;
}

std::optional<std::string> validate_embedding(const Embedding& e, const ProblemGraph& source,
                                              const HardwareGraph& hw) {
    auto adj = hw.adjacency();
    for (int u = 0; u < source.node_count; ++u) {
        auto it = e.chains.find(u);
        if (it == e.chains.end() || it->second.empty())
            return "logical node " + std::to_string(u) + " has no chain";
        for (int q : it->second)
            if (!hw.is_effective(q))
                return "chain of node " + std::to_string(u) + " uses unavailable qubit " +
                       std::to_string(q);
        // connectivity of the induced chain subgraph
        const auto& chain = it->second;
        std::set<int> in(chain.begin(), chain.end());
        if (in.size() != chain.size())
            return "chain of node " + std::to_string(u) + " repeats a qubit";
        std::set<int> seen{chain.front()};
        std::vector<int> stack{chain.front()};
        while (!stack.empty()) {
            int q = stack.back();
            stack.pop_back();
            for (int b : adj[q])
                if (in.count(b) && !seen.count(b)) {
                    seen.insert(b);
                    stack.push_back(b);
                }
        }
        if (seen.size() != in.size())
            return "chain of node " + std::to_string(u) + " is disconnected";
    }
    // pairwise disjoint
    std::map<int, int> owner;
    for (const auto& [u, chain] : e.chains)
        for (int q : chain) {
            auto [it, inserted] = owner.emplace(q, u);
            if (!inserted)
                return "qubit " + std::to_string(q) + " shared by chains of nodes " +
                       std::to_string(it->second) + " and " + std::to_string(u);
        }
    // every logical edge realized
    for (auto [u, v] : source.edges) {
        const auto& cu = e.chains.at(u);
        std::set<int> cv(e.chains.at(v).begin(), e.chains.at(v).end());
        bool hit = false;
        for (int q : cu) {
            for (int b : adj[q])
                if (cv.count(b)) {
                    hit = true;
                    break;
                }
            if (hit) break;
        }
        if (!hit)
            return "logical edge " + std::to_string(u) + "-" + std::to_string(v) +
                   " has no physical coupler";
    }
    return std::nullopt;
}

PlanValidation validate_plan(const ParallelPlan& plan, const std::vector<ProblemGraph>& problems) {
    if (!plan.hardware) return {false, "plan has no hardware snapshot"};
    const HardwareGraph& hw = *plan.hardware;
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
        const auto& entry = plan.entries[i];
        if (entry.problem_id < 0 || entry.problem_id >= static_cast<int>(problems.size()))
            return {false, "entry " + std::to_string(i) + " references unknown problem"};
        if (auto violation =
                validate_embedding(entry.embedding, problems[entry.problem_id], hw))
            return {false, "entry " + std::to_string(i) + ": " + *violation};
    }
    // cross-entry disjointness
    std::map<int, std::size_t> owner;
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
        for (int q : plan.entries[i].embedding.all_qubits()) {
            auto [it, inserted] = owner.emplace(q, i);
            if (!inserted)
                return {false, "entries " + std::to_string(it->second) + " and " +
                                   std::to_string(i) + " share qubit " + std::to_string(q)};
        }
    }
    if (plan.isolation) {
        for (auto [u, v] : hw.couplers) {
            auto iu = owner.find(u);
            auto iv = owner.find(v);
            if (iu != owner.end() && iv != owner.end() && iu->second != iv->second)
                return {false, "isolation violated: coupler " + std::to_string(u) + "-" +
                                   std::to_string(v) + " joins entries " +
                                   std::to_string(iu->second) + " and " +
                                   std::to_string(iv->second)};
        }
    }
    return {true, ""};
}

PlanChainStats chain_stats(const ParallelPlan& plan) {
    if (plan.entries.empty()) throw std::invalid_argument("chain_stats: empty plan");
    PlanChainStats out;
    auto compute = [](const std::vector<int>& lengths) {
        ChainLengthStats st;
        st.chain_count = static_cast<int>(lengths.size());
        double sum = 0.0;
        for (int len : lengths) {
            sum += len;
            st.max = std::max(st.max, len);
        }
        st.mean = sum / lengths.size();
        double ss = 0.0;
        for (int len : lengths) ss += (len - st.mean) * (len - st.mean);
        st.stddev = std::sqrt(ss / lengths.size());
        return st;
    };
    std::vector<int> all;
    for (const auto& entry : plan.entries) {
        std::vector<int> lengths;
        for (const auto& [u, chain] : entry.embedding.chains)
            lengths.push_back(static_cast<int>(chain.size()));
        out.per_entry.push_back(compute(lengths));
        all.insert(all.end(), lengths.begin(), lengths.end());
    }
    out.aggregate = compute(all);
    return out;
}

std::string plan_to_json(const ParallelPlan& plan) {
    nlohmann::ordered_json j;
    j["isolation"] = plan.isolation;
    j["hardware"] = plan.hardware_ref;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& entry : plan.entries) {
        nlohmann::ordered_json je;
        je["problem_id"] = entry.problem_id;
        auto chains = nlohmann::ordered_json::object();
        for (const auto& [u, chain] : entry.embedding.chains)
            chains[std::to_string(u)] = chain;
        je["chains"] = chains;
        entries.push_back(je);
    }
    j["entries"] = entries;
    return j.dump(2);
}

ParallelPlan plan_from_json(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    ParallelPlan plan;
    plan.isolation = j.at("isolation").get<bool>();
    plan.hardware_ref = j.value("hardware", "");
    for (const auto& je : j.at("entries")) {
        PlanEntry entry;
        entry.problem_id = je.at("problem_id").get<int>();
        for (const auto& [key, chain] : je.at("chains").items())
            entry.embedding.chains[std::stoi(key)] = chain.get<std::vector<int>>();
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

}  // namespace mtqa
