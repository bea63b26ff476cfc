#include "mugrid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "mugrid/error.hpp"
#include "mugrid/powerflow.hpp"

namespace mugrid {

void SynthConfig::validate() const {
    if (n < 2) throw ParameterError("synth: n must be at least 2");
    for (const Range* r : {&b, &g_ratio, &v, &delta, &d, &m}) {
        if (!(r->lo <= r->hi) || !std::isfinite(r->lo) || !std::isfinite(r->hi)) {
            throw ParameterError("synth: invalid range");
        }
    }
    if (b.hi > 0.0 || g_ratio.lo < 0.0) throw ParameterError("synth: ranges break the g >= 0, b <= 0 convention");
    if (v.lo <= 0.0 || d.lo <= 0.0 || m.lo <= 0.0) throw ParameterError("synth: V, d, m ranges must be positive");
    const double p = edge_prob();
    if (!(p > 0.0 && p <= 1.0)) throw ParameterError("synth: edge probability must lie in (0, 1]");
    if (max_attempts < 1) throw ParameterError("synth: max_attempts must be positive");
}

double SynthConfig::edge_prob() const {
    if (edge_probability) return *edge_probability;
    return std::min(1.0, avg_degree / static_cast<double>(n - 1));
}

SynthCase generate(const SynthConfig& cfg) {
    cfg.validate();
    Sampler rng(cfg.seed);
    const double p = cfg.edge_prob();

    SynthCase out;
    std::vector<std::pair<int, int>> edges;
    for (int attempt = 1;; ++attempt) {
        edges.clear();
        Network probe;
        probe.nodes.resize(static_cast<std::size_t>(cfg.n));
        for (int i = 0; i < cfg.n; ++i) probe.nodes[static_cast<std::size_t>(i)].id = i;
        for (int i = 0; i < cfg.n; ++i) {
            for (int k = i + 1; k < cfg.n; ++k) {
                if (rng.unit() < p) {
                    edges.emplace_back(i, k);
                    probe.lines.push_back({i, k, 0.0, -1.0, LineStatus::closed});
                }
            }
        }
        if (is_connected(probe)) {
            out.attempts = attempt;
            break;
        }
        if (attempt >= cfg.max_attempts) {
            throw NetworkError("synth: no connected graph after " + std::to_string(attempt) + " attempts");
        }
    }

    Network& net = out.net;
    net.nodes.resize(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        Node& node = net.nodes[static_cast<std::size_t>(i)];
        node.id = i;
        node.kind = NodeKind::active;
        node.voltage = rng.uniform(cfg.v);
    }
    for (const auto& [i, k] : edges) {
        const double b = rng.uniform(cfg.b);
        const double g = std::abs(b) * rng.uniform(cfg.g_ratio);
        net.lines.push_back({i, k, g, b, LineStatus::closed});
    }
    out.seed_angles.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) out.seed_angles(i) = rng.uniform(cfg.delta);

    const Eigen::VectorXd p_set = flow_active(build_admittance(net), net.voltages(), out.seed_angles);
    std::vector<NodeInterface> entries;
    for (int i = 0; i < cfg.n; ++i) {
        const double d = rng.uniform(cfg.d);
        const double m = rng.uniform(cfg.m);
        entries.push_back({i, m, d, p_set(i)});
    }
    out.params = InterfaceParams(std::move(entries));
    out.diameter = graph_diameter(net);
    return out;
}

int graph_diameter(const Network& net) {
    const int n = static_cast<int>(net.size());
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& l : net.lines) {
        if (!l.closed() || l.admittance() == Complex{0.0, 0.0}) continue;
        adj[static_cast<std::size_t>(l.i)].push_back(l.k);
        adj[static_cast<std::size_t>(l.k)].push_back(l.i);
    }
    int diameter = 0;
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(static_cast<std::size_t>(n), -1);
        std::queue<int> q;
        dist[static_cast<std::size_t>(s)] = 0;
        q.push(s);
        int reached = 1;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int u : adj[static_cast<std::size_t>(v)]) {
                if (dist[static_cast<std::size_t>(u)] < 0) {
                    dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
                    diameter = std::max(diameter, dist[static_cast<std::size_t>(u)]);
                    ++reached;
                    q.push(u);
                }
            }
        }
        if (reached < n) return -1;
    }
    return diameter;
}

}  // namespace mugrid
