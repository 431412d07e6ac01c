#include "mtqa/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "mtqa/errors.hpp"

namespace mtqa {

namespace {

std::pair<int, int> norm_pair(int i, int j) {
    if (i == j) throw std::invalid_argument("quadratic term with i == j");
    return std::minmax(i, j);
}

template <typename Map>
void drop_zeros(Map& m) {
    for (auto it = m.begin(); it != m.end();) {
        if (it->second == 0.0)
            it = m.erase(it);
        else
            ++it;
    }
}

}  // namespace

void Qubo::add_quadratic(int i, int j, double v) { quadratic[norm_pair(i, j)] += v; }

void IsingModel::add_J(int i, int j, double v) { J[norm_pair(i, j)] += v; }

std::vector<int> IsingModel::variable_ids() const {
    std::set<int> ids;
    for (const auto& [i, v] : h) ids.insert(i);
    for (const auto& [ij, v] : J) {
        ids.insert(ij.first);
        ids.insert(ij.second);
    }
    return {ids.begin(), ids.end()};
}

double evaluate(const Qubo& q, const Assignment& x) {
    if (static_cast<int>(x.size()) != q.size)
        throw std::invalid_argument("assignment length does not match qubo size");
    double e = q.offset;
    for (const auto& [i, v] : q.linear) e += v * x[i];
    for (const auto& [ij, v] : q.quadratic) e += v * x[ij.first] * x[ij.second];
    return e;
}

double evaluate(const IsingModel& m, const Spins& s) {
    if (static_cast<int>(s.size()) != m.size)
        throw std::invalid_argument("spin length does not match model size");
    double e = m.offset;
    for (const auto& [i, v] : m.h) e += v * s[i];
    for (const auto& [ij, v] : m.J) e += v * s[ij.first] * s[ij.second];
    return e;
}

double evaluate(const IsingModel& m, const std::vector<int>& ids, const Spins& s) {
    if (ids.size() != s.size()) throw std::invalid_argument("ids/spins length mismatch");
    std::unordered_map<int, int> pos;
    pos.reserve(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) pos[ids[k]] = static_cast<int>(k);
    double e = m.offset;
    for (const auto& [i, v] : m.h) e += v * s[pos.at(i)];
    for (const auto& [ij, v] : m.J) e += v * s[pos.at(ij.first)] * s[pos.at(ij.second)];
    return e;
}

Qubo build_mvcp_qubo(const ProblemGraph& g, double A, double B) {
    if (!(0.0 < B && B < A))
        throw std::invalid_argument("mvcp parameters must satisfy 0 < B < A");
    Qubo q;
    q.size = g.node_count;
    // A(1-x_i)(1-x_j) = A - A x_i - A x_j + A x_i x_j
    for (auto [u, v] : g.edges) {
        q.offset += A;
        q.add_linear(u, -A);
        q.add_linear(v, -A);
        q.add_quadratic(u, v, A);
    }
    for (int i = 0; i < g.node_count; ++i) q.add_linear(i, B);
    drop_zeros(q.linear);
    drop_zeros(q.quadratic);
    return q;
}

double gpp_penalty_bound(const ProblemGraph& g, double B) {
    auto st = degree_stats(g);
    return B * std::min<double>(2.0 * st.max_degree, g.node_count) / 8.0;
}

Qubo build_gpp_qubo(const ProblemGraph& g, double B) {
    // Eq-style bound, clamped away from zero for edgeless graphs so the
    // balance constraint still binds.
    double A = std::max(gpp_penalty_bound(g, B), B / 8.0);
    return build_gpp_qubo(g, B, A);
}

Qubo build_gpp_qubo(const ProblemGraph& g, double B, double A) {
    Qubo q;
    q.size = g.node_count;
    int n = g.node_count;
    // A(sum x - n/2)^2 with x_i^2 = x_i
    q.offset += A * n * n / 4.0;
    for (int i = 0; i < n; ++i) q.add_linear(i, A * (1.0 - n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) q.add_quadratic(i, j, 2.0 * A);
    // B(x_u + x_v - 2 x_u x_v) per edge
    for (auto [u, v] : g.edges) {
        q.add_linear(u, B);
        q.add_linear(v, B);
        q.add_quadratic(u, v, -2.0 * B);
    }
    drop_zeros(q.linear);
    drop_zeros(q.quadratic);
    return q;
}

IsingModel qubo_to_ising(const Qubo& q) {
    IsingModel m;
    m.size = q.size;
    m.offset = q.offset;
    for (const auto& [i, v] : q.linear) {
        m.add_h(i, v / 2.0);
        m.offset += v / 2.0;
    }
    for (const auto& [ij, v] : q.quadratic) {
        m.add_J(ij.first, ij.second, v / 4.0);
        m.add_h(ij.first, v / 4.0);
        m.add_h(ij.second, v / 4.0);
        m.offset += v / 4.0;
    }
    drop_zeros(m.h);
    drop_zeros(m.J);
    return m;
}

BruteForceResult brute_force_min(const Qubo& q) {
    if (q.size > 24) throw CapacityError("brute_force_min: size > 24");
    if (q.size < 0) throw std::invalid_argument("brute_force_min: negative size");
    const int n = q.size;

    // dense mirror for fast flip deltas
    std::vector<double> lin(n, 0.0);
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const auto& [i, v] : q.linear) lin[i] += v;
    for (const auto& [ij, v] : q.quadratic) {
        adj[ij.first].emplace_back(ij.second, v);
        adj[ij.second].emplace_back(ij.first, v);
    }

    Assignment state(n, 0);
    Assignment best_state = state;
    double best = evaluate(q, state);
    double energy = best;  // running estimate, refreshed canonically near the optimum

    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        // Gray-code walk: exactly one variable flips per step.
        int bit = __builtin_ctzll(k);
        double field = lin[bit];
        for (auto [j, v] : adj[bit]) field += v * state[j];
        if (state[bit]) {
            state[bit] = 0;
            energy -= field;
        } else {
            state[bit] = 1;
            energy += field;
        }
        if (energy < best + 1e-9) {
            double exact = evaluate(q, state);
            if (exact < best || (exact == best && state < best_state)) {
                best = exact;
                best_state = state;
            }
            energy = exact;
        }
    }
    return {best_state, best};
}

int cut_edges(const ProblemGraph& g, const Assignment& x) {
    if (static_cast<int>(x.size()) != g.node_count)
        throw std::invalid_argument("assignment length does not match graph");
    int cut = 0;
    for (auto [u, v] : g.edges) cut += (x[u] != x[v]);
    return cut;
}

bool vertex_cover_valid(const ProblemGraph& g, const Assignment& x) {
    if (static_cast<int>(x.size()) != g.node_count)
        throw std::invalid_argument("assignment length does not match graph");
    for (auto [u, v] : g.edges)
        if (!x[u] && !x[v]) return false;
    return true;
}

bool partition_balanced(const Assignment& x) {
    int ones = 0;
    for (auto b : x) ones += b;
    return 2 * ones == static_cast<int>(x.size());
}

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename Model>
ordered_json model_to_json(const Model& m, const std::map<int, double>& linear,
                           const std::map<std::pair<int, int>, double>& quadratic) {
    ordered_json j;
    j["size"] = m.size;
    ordered_json lin = ordered_json::object();
    for (const auto& [i, v] : linear) lin[std::to_string(i)] = v;
    j["linear"] = lin;
    ordered_json quad = ordered_json::object();
    for (const auto& [ij, v] : quadratic)
        quad[std::to_string(ij.first) + "," + std::to_string(ij.second)] = v;
    j["quadratic"] = quad;
    j["offset"] = m.offset;
    return j;
}

void model_from_json(const ordered_json& j, int& size, std::map<int, double>& linear,
                     std::map<std::pair<int, int>, double>& quadratic, double& offset) {
    size = j.at("size").get<int>();
    offset = j.value("offset", 0.0);
    for (const auto& [key, v] : j.at("linear").items()) linear[std::stoi(key)] = v.get<double>();
    for (const auto& [key, v] : j.at("quadratic").items()) {
        auto comma = key.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("quadratic key must be 'i,j': " + key);
        int i = std::stoi(key.substr(0, comma));
        int jj = std::stoi(key.substr(comma + 1));
        if (i == jj) throw std::invalid_argument("quadratic key with i == j: " + key);
        quadratic[std::minmax(i, jj)] = v.get<double>();
    }
}

}  // namespace

std::string qubo_to_json(const Qubo& q) {
    return model_to_json(q, q.linear, q.quadratic).dump(2);
}

Qubo qubo_from_json(const std::string& text) {
    Qubo q;
    model_from_json(ordered_json::parse(text), q.size, q.linear, q.quadratic, q.offset);
    return q;
}

std::string ising_to_json(const IsingModel& m) {
    return model_to_json(m, m.h, m.J).dump(2);
}

IsingModel ising_from_json(const std::string& text) {
    IsingModel m;
    model_from_json(ordered_json::parse(text), m.size, m.h, m.J, m.offset);
    return m;
}

}  // namespace mtqa
