#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mugrid {

using Complex = std::complex<double>;

enum class NodeKind { active, passive };
enum class LineStatus { closed, open };

/// A point of common coupling. Voltage is the per-unit magnitude at the PCC,
/// shunt the admittance to ground (default zero).
struct Node {
    int id = 0;
    NodeKind kind = NodeKind::active;
    double voltage = 1.0;
    Complex shunt{0.0, 0.0};
};

/// Series branch y = g + jb between nodes i and k. Sign convention: g >= 0, b <= 0.
struct Line {
    int i = 0;
    int k = 0;
    double g = 0.0;
    double b = 0.0;
    LineStatus status = LineStatus::closed;

    Complex admittance() const { return {g, b}; }
    bool closed() const { return status == LineStatus::closed; }
    bool joins(int a, int c) const { return (i == a && k == c) || (i == c && k == a); }
};

/// Power/voltage bases. Carried through files, never used in the math.
struct BaseValues {
    double p_mw = 100.0;
    double v_kv = 1.0;
};

struct Network {
    std::vector<Node> nodes;
    std::vector<Line> lines;
    BaseValues base;
    /// Optional external names, indexed by node id. Empty when absent.
    std::vector<std::string> names;

    std::size_t size() const { return nodes.size(); }
    Eigen::VectorXd voltages() const;
    std::optional<std::size_t> find_line(int i, int k) const;
    std::vector<int> nodes_of_kind(NodeKind kind) const;
};

/// Virtual inertia m (s), damping d and active power setpoint for one active node.
struct NodeInterface {
    int id = 0;
    double m = 1.0;
    double d = 1.0;
    double p_set = 0.0;
};

/// Interface parameters keyed by node id.
class InterfaceParams {
public:
    InterfaceParams() = default;
    explicit InterfaceParams(std::vector<NodeInterface> entries);

    const std::vector<NodeInterface>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    bool contains(int id) const;
    /// Throws ParameterError when the id has no entry.
    const NodeInterface& at(int id) const;
    void set(const NodeInterface& entry);

    /// Values gathered in the order of `ids`. Throws for missing ids.
    Eigen::VectorXd inertia(const std::vector<int>& ids) const;
    Eigen::VectorXd damping(const std::vector<int>& ids) const;
    Eigen::VectorXd setpoints(const std::vector<int>& ids) const;

private:
    std::vector<NodeInterface> entries_;  // sorted by id
};

/// Dense nodal admittance matrix Y = G + jB.
struct AdmittanceMatrix {
    Eigen::MatrixXcd Y;

    Eigen::Index size() const { return Y.rows(); }
    Eigen::MatrixXd G() const { return Y.real(); }
    Eigen::MatrixXd B() const { return Y.imag(); }
    double magnitude(Eigen::Index i, Eigen::Index k) const { return std::abs(Y(i, k)); }
    /// theta_ik in (-pi, pi]; zero for an exactly zero entry.
    double angle(Eigen::Index i, Eigen::Index k) const { return std::arg(Y(i, k)); }
};

/// Y_ii = shunt_i + sum of incident closed line admittances, Y_ik = -y_ik.
/// Throws NetworkError for duplicate pairs, self loops or bad indices.
AdmittanceMatrix build_admittance(const Network& net);

/// Returns a copy of `net` with the status of line (i,k) changed.
Network set_line_status(const Network& net, int i, int k, LineStatus status);

struct SignViolation {
    std::size_t line = 0;
    int i = 0;
    int k = 0;
    std::string what;
};

struct Diagnostics {
    bool connected = false;
    std::vector<std::vector<int>> components;
    std::vector<SignViolation> sign_violations;
    /// Nodes without any closed incident line.
    std::vector<int> dangling;
    std::vector<std::string> errors;

    std::size_t component_count() const { return components.size(); }
    bool ok() const { return connected && sign_violations.empty() && errors.empty(); }
};

Diagnostics validate_network(const Network& net);

/// Connected components of the closed-line graph, each sorted, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const Network& net);
bool is_connected(const Network& net);

/// True when every closed line has zero transfer conductance.
bool is_lossless(const Network& net);

/// Line list equivalent to an admittance matrix: y_ik = -Y_ik for every nonzero
/// off-diagonal entry, shunt_i = row sum of Y. Voltages and kinds are taken from `like`
/// when given (by position), otherwise defaults.
Network network_from_admittance(const AdmittanceMatrix& Y, const std::vector<Node>& like = {});

}  // namespace mugrid
