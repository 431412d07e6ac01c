#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mtqa {

/// Physical qubit/coupler graph. Qubit ids are dense [0, qubit_count); a
/// separate `disabled` set models dead or deliberately excluded qubits, so
/// the effective graph is qubits minus disabled with induced couplers.
/// Values are immutable in use: removal operations return new graphs.
struct HardwareGraph {
    int qubit_count = 0;
    std::vector<std::pair<int, int>> couplers;  // sorted, u < v
    std::string family_tag = "file";
    std::set<int> disabled;

    bool is_effective(int q) const {
        return q >= 0 && q < qubit_count && !disabled.count(q);
    }
    int effective_qubit_count() const { return qubit_count - static_cast<int>(disabled.size()); }

    /// Adjacency over all couplers (ignores `disabled`); callers filter with
    /// is_effective where needed.
    std::vector<std::vector<int>> adjacency() const;
};

/// Chimera C(rows, cols, shore): a rows x cols grid of K_{shore,shore} cells.
/// Vertical-shore qubits chain to the cell below, horizontal-shore qubits to
/// the cell to the right. Qubit count is rows*cols*2*shore.
HardwareGraph gen_chimera(int rows, int cols, int shore = 4);

HardwareGraph remove_nodes(const HardwareGraph& h, const std::set<int>& nodes);

/// Disables the nodes and every effective neighbor, leaving a buffer of
/// unused qubits around whatever the nodes carried.
HardwareGraph remove_nodes_and_neighbors(const HardwareGraph& h, const std::set<int>& nodes);

/// Text format: the graph edge-list format plus optional "disabled <id>" lines.
std::string hardware_to_string(const HardwareGraph& h);
HardwareGraph hardware_from_string(const std::string& text, const std::string& source = "<string>");
void save_hardware(const HardwareGraph& h, const std::string& path);
HardwareGraph load_hardware(const std::string& path);

}  // namespace mtqa
