#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mugrid/certificates.hpp"
#include "mugrid/netmodel.hpp"
#include "mugrid/powerflow.hpp"

namespace mugrid {

struct NodeBounds {
    double d_min = 0.1;
    double d_max = 100.0;
    double m_min = 0.01;
    double m_max = 100.0;
};

enum class TunePreference { damping_first, inertia_first };

struct TuneBounds {
    NodeBounds defaults;
    std::map<int, NodeBounds> per_node;
    double margin = 0.01;
    TunePreference preference = TunePreference::damping_first;

    const NodeBounds& for_node(int id) const;
    /// Throws ParameterError for nonpositive, inverted or non-finite bounds, or a negative margin.
    void validate() const;
};

/// What a single microgrid can see at its own PCC.
struct LocalMeasurement {
    int node = 0;
    double q = 0.0;
    double v = 1.0;
    double b_ii = 0.0;

    double lhs() const { return -q - v * v * b_ii; }
};

enum class NodeAction { unchanged, damping, inertia, damping_and_inertia, infeasible };

const char* to_string(NodeAction a);

struct NodeTuning {
    int node = 0;
    double lhs = 0.0;
    double d_old = 0.0;
    double m_old = 0.0;
    double d_new = 0.0;
    double m_new = 0.0;
    NodeAction action = NodeAction::unchanged;
    /// d_new^2 / (2 m_new) >= lhs + margin holds in floating point.
    bool satisfied = false;
};

/// Minimal change of (d, m) so that d^2 / (2m) >= lhs + margin. Uses only the node's own data.
NodeTuning tune_node(const LocalMeasurement& meas, double d, double m, const NodeBounds& bounds, double margin,
                     TunePreference preference = TunePreference::damping_first);

struct ControlPlan {
    std::vector<NodeTuning> nodes;
    InterfaceParams params;
    /// Lines opened, as (i, k) pairs in opening order.
    std::vector<std::pair<int, int>> opened_lines;
    std::vector<int> infeasible_nodes;
    std::vector<std::string> log;
    std::optional<Equilibrium> equilibrium;
    std::optional<CertReport> report;
    bool feasible = false;
};

/// Local measurements of every node at the operating point delta.
std::vector<LocalMeasurement> measure_locally(const Network& net, const Eigen::VectorXd& delta);

/// Per-node tuning from local measurements; nodes without a measurement keep their parameters.
/// `feasible` is true when every measured node ends up satisfied.
ControlPlan tune_distributed(const std::vector<LocalMeasurement>& measurements, const InterfaceParams& params,
                             const TuneBounds& bounds);

/// Measures, tunes and re-certifies at delta with the bounds' margin.
ControlPlan tune_distributed(const Network& net, const Eigen::VectorXd& delta, const InterfaceParams& params,
                             const TuneBounds& bounds);

struct BraessDelta {
    int i = 0;
    int k = 0;
    /// Decrease of sum_k V_i V_k |Y_ik| at each endpoint if the line were opened.
    double at_i = 0.0;
    double at_k = 0.0;

    double total() const { return at_i + at_k; }
};

/// Throws NetworkError for an unknown line. Open lines give zero.
BraessDelta braess_delta(const Network& net, int i, int k);

using EquilibriumSolver = std::function<Equilibrium(const Network&)>;

/// Newton re-solve with the given setpoints, warm-started from `initial` when present.
EquilibriumSolver newton_resolver(Eigen::VectorXd p_set, int ref = 0, std::optional<Eigen::VectorXd> initial = {});

struct SwitchingOptions {
    int budget = 2;
    double margin = 0.0;
};

/// Greedy coordinated scheme: repeatedly open the connectivity-preserving closed line with the
/// largest total braess_delta (ties by smallest line index), re-solve and re-certify.
ControlPlan search_line_switching(const Network& net, const InterfaceParams& params, const EquilibriumSolver& solver,
                                  const SwitchingOptions& options = {});

/// Network with the plan's lines opened.
Network apply_switching(const Network& net, const ControlPlan& plan);

}  // namespace mugrid
