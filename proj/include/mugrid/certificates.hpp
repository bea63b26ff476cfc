#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mugrid/kron.hpp"
#include "mugrid/netmodel.hpp"
#include "mugrid/powerflow.hpp"

namespace mugrid {

enum class Verdict { lossless_stable, certified, uncertified };

/// Which sufficient condition produced the report:
/// thm1c  -Q_i - V_i^2 B_ii <= d_i^2 / (2 m_i) at the operating point,
/// cor1   sum_{k != i} V_i V_k |Y_ik| <= d_i^2 / (2 m_i), independent of the angles,
/// thm2   the first condition at active nodes using unreduced B_kk, certifying the Kron-reduced grid.
enum class Condition { thm1c, cor1, thm2 };

const char* to_string(Verdict v);
const char* to_string(Condition c);

struct NodeCertificate {
    int node = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    /// S_i = lhs - rhs
    double index = 0.0;
    bool satisfied = false;
};

struct CertOptions {
    /// Satisfied means S_i <= -margin.
    double margin = 0.0;
};

struct CertReport {
    std::vector<NodeCertificate> nodes;
    Verdict verdict = Verdict::uncertified;
    Condition which_condition = Condition::thm1c;
    double margin = 0.0;
    /// Why the verdict is `uncertified`: omega_violation, disconnected, node_violation,
    /// assumption1_violation, assumption2_violation.
    std::vector<std::string> reasons;
    std::vector<int> offending;
    /// Nodes whose shunt makes B_ii positive.
    std::vector<int> shunt_flipped;
    std::optional<OmegaCheck> omega;
    std::vector<AssumptionViolation> assumption_violations;
    /// Structure-preserving reports only: the same EP certified directly on the reduced grid.
    std::optional<bool> reduced_certified;

    bool all_satisfied() const;
    bool stable() const { return verdict != Verdict::uncertified; }
    bool has_reason(const std::string& r) const;
};

/// S = -Q - V^2 B_ii - d^2 / (2 m). Throws ParameterError unless m > 0 and d > 0.
double stability_index(double q, double v, double b_ii, double d, double m);

/// Per-node evaluation of lhs <= d^2 / (2m) - margin.
NodeCertificate evaluate_node(int node, double lhs, double d, double m, double margin = 0.0);

/// Matrix-level form. `ids` labels the rows (defaults to 0..n-1).
CertReport certify_lossy(const AdmittanceMatrix& Y, const Eigen::VectorXd& V, const Eigen::VectorXd& delta,
                         const Eigen::VectorXd& m, const Eigen::VectorXd& d, const CertOptions& options = {},
                         std::vector<int> ids = {});

/// Every node of `net` needs interface parameters.
CertReport certify_lossy(const Network& net, const Eigen::VectorXd& delta, const InterfaceParams& params,
                         const CertOptions& options = {});

CertReport certify_topology(const Network& net, const InterfaceParams& params, const CertOptions& options = {});

struct StructureOptions {
    double nu_min = 5.0;
    double nu_max = 7.14;
    double margin = 0.0;
    EliminationOrder order = EliminationOrder::descending;
};

/// `delta_active` holds the angles of `active` (same order as the sorted active ids).
/// Passive voltages follow from zero passive injection.
CertReport certify_structure_preserving(const Network& full, const std::vector<int>& active,
                                        const InterfaceParams& params, const Eigen::VectorXd& delta_active,
                                        const StructureOptions& options = {});

/// Connectivity of the graph of nonzero off-diagonal entries.
bool matrix_connected(const AdmittanceMatrix& Y);

}  // namespace mugrid
