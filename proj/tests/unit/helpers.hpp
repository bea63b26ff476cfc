#pragma once

#include <doctest.h>

#include "mugrid/netmodel.hpp"

namespace fixture {

inline mugrid::Network make_net(int n, std::vector<mugrid::Line> lines, double v = 1.0) {
    mugrid::Network net;
    for (int i = 0; i < n; ++i) net.nodes.push_back({i, mugrid::NodeKind::active, v, {0.0, 0.0}});
    net.lines = std::move(lines);
    return net;
}

inline mugrid::Line line(int i, int k, double g, double b) { return {i, k, g, b, mugrid::LineStatus::closed}; }

inline mugrid::InterfaceParams uniform_params(int n, double m, double d) {
    std::vector<mugrid::NodeInterface> e;
    for (int i = 0; i < n; ++i) e.push_back({i, m, d, 0.0});
    return mugrid::InterfaceParams(e);
}

inline mugrid::InterfaceParams params_from(const Eigen::VectorXd& m, const Eigen::VectorXd& d) {
    std::vector<mugrid::NodeInterface> e;
    for (Eigen::Index i = 0; i < m.size(); ++i) e.push_back({static_cast<int>(i), m(i), d(i), 0.0});
    return mugrid::InterfaceParams(e);
}

}  // namespace fixture
