#include "mtqa/topology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mtqa/errors.hpp"

namespace mtqa {

std::vector<std::vector<int>> HardwareGraph::adjacency() const {
    std::vector<std::vector<int>> adj(qubit_count);
    for (auto [u, v] : couplers) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
}

HardwareGraph gen_chimera(int rows, int cols, int shore) {
    if (rows < 1 || cols < 1 || shore < 1)
        throw std::invalid_argument("gen_chimera: rows, cols, shore must be >= 1");
    HardwareGraph h;
    h.family_tag = "chimera";
    const int cell = 2 * shore;
    h.qubit_count = rows * cols * cell;
    auto qubit = [&](int r, int c, int side, int k) {
        return (r * cols + c) * cell + side * shore + k;
    };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            for (int a = 0; a < shore; ++a)
                for (int b = 0; b < shore; ++b)
                    h.couplers.emplace_back(qubit(r, c, 0, a), qubit(r, c, 1, b));
            if (r + 1 < rows)
                for (int k = 0; k < shore; ++k)
                    h.couplers.emplace_back(qubit(r, c, 0, k), qubit(r + 1, c, 0, k));
            if (c + 1 < cols)
                for (int k = 0; k < shore; ++k)
                    h.couplers.emplace_back(qubit(r, c, 1, k), qubit(r, c + 1, 1, k));
        }
    }
    for (auto& [u, v] : h.couplers)
        if (u > v) std::swap(u, v);
    std::sort(h.couplers.begin(), h.couplers.end());
    return h;
}

HardwareGraph remove_nodes(const HardwareGraph& h, const std::set<int>& nodes) {
    HardwareGraph out = h;
    for (int q : nodes) {
        if (q < 0 || q >= h.qubit_count)
            throw std::invalid_argument("remove_nodes: unknown qubit id " + std::to_string(q));
        out.disabled.insert(q);
    }
    return out;
}

HardwareGraph remove_nodes_and_neighbors(const HardwareGraph& h, const std::set<int>& nodes) {
    for (int q : nodes)
        if (q < 0 || q >= h.qubit_count)
            throw std::invalid_argument("remove_nodes_and_neighbors: unknown qubit id " +
                                        std::to_string(q));
    HardwareGraph out = h;
    for (auto [u, v] : h.couplers) {
        if (nodes.count(u) && h.is_effective(v)) out.disabled.insert(v);
        if (nodes.count(v) && h.is_effective(u)) out.disabled.insert(u);
    }
    out.disabled.insert(nodes.begin(), nodes.end());
    return out;
}

std::string hardware_to_string(const HardwareGraph& h) {
    std::ostringstream out;
    out << "n " << h.qubit_count << "\n";
    for (auto [u, v] : h.couplers) out << u << " " << v << "\n";
    for (int q : h.disabled) out << "disabled " << q << "\n";
    return out.str();
}

HardwareGraph hardware_from_string(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    HardwareGraph h;
    bool header_seen = false;
    std::set<std::pair<int, int>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (!header_seen) {
            std::string tag;
            if (!(ls >> tag >> h.qubit_count) || tag != "n" || h.qubit_count < 0)
                throw ParseError(source, lineno, "expected header 'n <qubit_count>'");
            header_seen = true;
            continue;
        }
        std::string first;
        ls >> first;
        if (first == "disabled") {
            int q = 0;
            if (!(ls >> q)) throw ParseError(source, lineno, "expected 'disabled <id>'");
            if (q < 0 || q >= h.qubit_count)
                throw ParseError(source, lineno, "disabled id out of range");
            h.disabled.insert(q);
            continue;
        }
        int u = 0, v = 0;
        std::string extra;
        try {
            u = std::stoi(first);
        } catch (const std::exception&) {
            throw ParseError(source, lineno, "expected coupler line 'u v' or 'disabled <id>'");
        }
        if (!(ls >> v) || (ls >> extra))
            throw ParseError(source, lineno, "expected coupler line 'u v'");
        if (u == v) throw ParseError(source, lineno, "self-coupler");
        if (u < 0 || v < 0 || u >= h.qubit_count || v >= h.qubit_count)
            throw ParseError(source, lineno, "coupler references unknown qubit");
        auto key = std::minmax(u, v);
        if (!seen.insert(key).second) throw ParseError(source, lineno, "duplicate coupler");
        h.couplers.push_back(key);
    }
    if (!header_seen) throw ParseError(source, lineno, "missing header 'n <qubit_count>'");
    std::sort(h.couplers.begin(), h.couplers.end());
    return h;
}

void save_hardware(const HardwareGraph& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << hardware_to_string(h);
}

HardwareGraph load_hardware(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return hardware_from_string(buf.str(), path);
}

}  // namespace mtqa
