#include "mtqa/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mtqa/errors.hpp"
#include "mtqa/rng.hpp"

namespace mtqa {

ProblemGraph gen_erdos_renyi(int n, double p, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_erdos_renyi: n must be >= 1");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("gen_erdos_renyi: p must be in [0,1]");
    ProblemGraph g;
    g.node_count = n;
    g.seed = seed;
    g.edge_probability = p;
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.uniform01() < p) g.edges.emplace_back(i, j);
        }
    }
    return g;
}

std::vector<int> degrees(const ProblemGraph& g) {
    std::vector<int> deg(g.node_count, 0);
    for (auto [u, v] : g.edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

DegreeStats degree_stats(const ProblemGraph& g) {
    DegreeStats st;
    if (g.node_count == 0) return st;
    auto deg = degrees(g);
    st.max_degree = *std::max_element(deg.begin(), deg.end());
    st.avg_degree = 2.0 * static_cast<double>(g.edges.size()) / g.node_count;
    return st;
}

void validate_graph(const ProblemGraph& g) {
    if (g.node_count < 0) throw std::invalid_argument("graph: negative node count");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : g.edges) {
        if (u == v) throw std::invalid_argument("graph: self-loop at node " + std::to_string(u));
        if (u < 0 || v < 0 || u >= g.node_count || v >= g.node_count)
            throw std::invalid_argument("graph: edge index out of range");
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second)
            throw std::invalid_argument("graph: duplicate edge " + std::to_string(key.first) + "-" +
                                        std::to_string(key.second));
    }
}

std::string graph_to_string(const ProblemGraph& g) {
    std::ostringstream out;
    out << "n " << g.node_count << "\n";
    for (auto [u, v] : g.edges) out << u << " " << v << "\n";
    return out.str();
}

ProblemGraph graph_from_string(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    ProblemGraph g;
    bool header_seen = false;
    std::set<std::pair<int, int>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (!header_seen) {
            std::string tag;
            if (!(ls >> tag >> g.node_count) || tag != "n" || g.node_count < 0)
                throw ParseError(source, lineno, "expected header 'n <node_count>'");
            header_seen = true;
            continue;
        }
        int u = 0, v = 0;
        std::string extra;
        if (!(ls >> u >> v) || (ls >> extra))
            throw ParseError(source, lineno, "expected edge line 'u v'");
        if (u == v) throw ParseError(source, lineno, "self-loop");
        if (u < 0 || v < 0 || u >= g.node_count || v >= g.node_count)
            throw ParseError(source, lineno, "node index out of range [0," +
                                                 std::to_string(g.node_count) + ")");
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second) throw ParseError(source, lineno, "duplicate edge");
        g.edges.push_back(key);
    }
    if (!header_seen) throw ParseError(source, lineno, "missing header 'n <node_count>'");
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

void save_graph(const ProblemGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << graph_to_string(g);
}

ProblemGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return graph_from_string(buf.str(), path);
}

}  // namespace mtqa
