#include "mugrid/netmodel.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "mugrid/error.hpp"

namespace mugrid {

namespace {

std::string pair_name(int i, int k) {
    std::ostringstream os;
    os << "(" << i << "," << k << ")";
    return os.str();
}

void check_indices(const Network& net) {
    const int n = static_cast<int>(net.size());
    for (int idx = 0; idx < n; ++idx) {
        if (net.nodes[idx].id != idx) {
            throw NetworkError("node ids must be dense 0..n-1; found id " +
                               std::to_string(net.nodes[idx].id) + " at position " +
                               std::to_string(idx));
        }
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& line : net.lines) {
        if (line.i < 0 || line.i >= n || line.k < 0 || line.k >= n) {
            throw NetworkError("line " + pair_name(line.i, line.k) + " references an unknown node");
        }
        if (line.i == line.k) {
            throw NetworkError("line " + pair_name(line.i, line.k) + " is a self loop");
        }
        auto key = std::minmax(line.i, line.k);
        if (!seen.insert(key).second) {
            throw NetworkError("duplicate line for pair " + pair_name(key.first, key.second));
        }
    }
}

}  // namespace

Eigen::VectorXd Network::voltages() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) v(static_cast<Eigen::Index>(i)) = nodes[i].voltage;
    return v;
}

std::optional<std::size_t> Network::find_line(int i, int k) const {
    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        if (lines[idx].joins(i, k)) return idx;
    }
    return std::nullopt;
}

std::vector<int> Network::nodes_of_kind(NodeKind kind) const {
    std::vector<int> out;
    for (const auto& node : nodes) {
        if (node.kind == kind) out.push_back(node.id);
    }
    return out;
}

InterfaceParams::InterfaceParams(std::vector<NodeInterface> entries) {
    for (const auto& e : entries) set(e);
}

bool InterfaceParams::contains(int id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const NodeInterface& e, int v) { return e.id < v; });
    return it != entries_.end() && it->id == id;
}

const NodeInterface& InterfaceParams::at(int id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const NodeInterface& e, int v) { return e.id < v; });
    if (it == entries_.end() || it->id != id) {
        throw ParameterError("no interface parameters for node " + std::to_string(id));
    }
    return *it;
}

void InterfaceParams::set(const NodeInterface& entry) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), entry.id,
                               [](const NodeInterface& e, int v) { return e.id < v; });
    if (it != entries_.end() && it->id == entry.id) {
        *it = entry;
    } else {
        entries_.insert(it, entry);
    }
}

Eigen::VectorXd InterfaceParams::inertia(const std::vector<int>& ids) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) out(static_cast<Eigen::Index>(i)) = at(ids[i]).m;
    return out;
}

Eigen::VectorXd InterfaceParams::damping(const std::vector<int>& ids) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) out(static_cast<Eigen::Index>(i)) = at(ids[i]).d;
    return out;
}

Eigen::VectorXd InterfaceParams::setpoints(const std::vector<int>& ids) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i) out(static_cast<Eigen::Index>(i)) = at(ids[i]).p_set;
    return out;
}

AdmittanceMatrix build_admittance(const Network& net) {
    check_indices(net);
    const auto n = static_cast<Eigen::Index>(net.size());
    AdmittanceMatrix out{Eigen::MatrixXcd::Zero(n, n)};
    for (const auto& node : net.nodes) out.Y(node.id, node.id) += node.shunt;
    for (const auto& line : net.lines) {
        if (!line.closed()) continue;
        const Complex y = line.admittance();
        out.Y(line.i, line.i) += y;
        out.Y(line.k, line.k) += y;
        out.Y(line.i, line.k) -= y;
        out.Y(line.k, line.i) -= y;
    }
    return out;
}

Network set_line_status(const Network& net, int i, int k, LineStatus status) {
    auto idx = net.find_line(i, k);
    if (!idx) throw NetworkError("unknown line " + pair_name(i, k));
    Network out = net;
    out.lines[*idx].status = status;
    return out;
}

std::vector<std::vector<int>> connected_components(const Network& net) {
    const int n = static_cast<int>(net.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& line : net.lines) {
        if (!line.closed() || line.i < 0 || line.k < 0 || line.i >= n || line.k >= n) continue;
        if (line.admittance() == Complex{0.0, 0.0}) continue;
        int a = find(line.i);
        int c = find(line.k);
        if (a != c) parent[std::max(a, c)] = std::min(a, c);
    }
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(n, -1);
    for (int v = 0; v < n; ++v) {
        int r = find(v);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(v);
    }
    return groups;
}

bool is_connected(const Network& net) { return connected_components(net).size() <= 1; }

bool is_lossless(const Network& net) {
    return std::all_of(net.lines.begin(), net.lines.end(),
                       [](const Line& l) { return !l.closed() || l.g == 0.0; });
}

Diagnostics validate_network(const Network& net) {
    Diagnostics diag;
    try {
        check_indices(net);
    } catch (const NetworkError& e) {
        diag.errors.emplace_back(e.what());
    }
    for (const auto& node : net.nodes) {
        if (!(node.voltage > 0.0)) {
            diag.errors.push_back("node " + std::to_string(node.id) + " has nonpositive voltage");
        }
    }
    for (std::size_t idx = 0; idx < net.lines.size(); ++idx) {
        const auto& line = net.lines[idx];
        if (line.g < 0.0) diag.sign_violations.push_back({idx, line.i, line.k, "g < 0"});
        if (line.b > 0.0) diag.sign_violations.push_back({idx, line.i, line.k, "b > 0"});
    }
    diag.components = connected_components(net);
    diag.connected = diag.components.size() <= 1;
    std::vector<int> degree(net.size(), 0);
    for (const auto& line : net.lines) {
        if (!line.closed()) continue;
        if (line.i >= 0 && line.i < static_cast<int>(net.size())) ++degree[line.i];
        if (line.k >= 0 && line.k < static_cast<int>(net.size())) ++degree[line.k];
    }
    for (std::size_t v = 0; v < degree.size(); ++v) {
        if (degree[v] == 0) diag.dangling.push_back(static_cast<int>(v));
    }
    return diag;
}

Network network_from_admittance(const AdmittanceMatrix& Y, const std::vector<Node>& like) {
    const auto n = Y.size();
    Network net;
    net.nodes.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Node node;
        if (static_cast<std::size_t>(i) < like.size()) node = like[static_cast<std::size_t>(i)];
        node.id = static_cast<int>(i);
        node.shunt = Y.Y.row(i).sum();
        net.nodes[static_cast<std::size_t>(i)] = node;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const Complex y = -Y.Y(i, k);
            if (y == Complex{0.0, 0.0}) continue;
            net.lines.push_back({static_cast<int>(i), static_cast<int>(k), y.real(), y.imag(),
                                 LineStatus::closed});
        }
    }
    return net;
}

}  // namespace mugrid
