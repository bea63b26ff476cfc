#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mugrid/netmodel.hpp"

namespace mugrid {

/// Outgoing active power P_e_i = sum_k V_i V_k |Y_ik| cos(theta_ik - delta_i + delta_k).
Eigen::VectorXd flow_active(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                            const Eigen::VectorXd& delta);

/// Outgoing reactive power Q_k = -sum_i V_k V_i |Y_ki| sin(theta_ki - delta_k + delta_i).
Eigen::VectorXd flow_reactive(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                              const Eigen::VectorXd& delta);

/// An equilibrium point (delta*, 0). The reference node absorbs losses: `balanced_setpoints`
/// equals the requested setpoints except at `ref`, where it holds P_e_ref(delta*).
struct Equilibrium {
    Eigen::VectorXd delta;
    Eigen::VectorXd omega;
    /// max |P_e - P_s| over the non-reference nodes
    double residual = 0.0;
    /// P_e_ref(delta*) - P_s_ref; zero when the setpoints were loss-consistent
    double slack_mismatch = 0.0;
    int ref = 0;
    int iterations = 0;
    Eigen::VectorXd balanced_setpoints;
};

struct SolverOptions {
    int ref = 0;
    double tol = 1e-10;
    int max_iter = 50;
    /// Flat start when empty.
    std::optional<Eigen::VectorXd> initial;
};

/// Newton-Raphson on angles with fixed voltage magnitudes; delta_ref is pinned to 0
/// (or to the initial guess's value at ref). Throws SolverError on non-convergence or a
/// singular reduced Jacobian.
Equilibrium solve_equilibrium(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                              const Eigen::VectorXd& p_set, const SolverOptions& options = {});

/// Equilibrium record for a known angle vector; setpoints are taken as P_e(delta).
Equilibrium equilibrium_at(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                           const Eigen::VectorXd& delta, int ref = 0);

struct ArcAngle {
    int i = 0;
    int k = 0;
    /// theta_ik - delta_i + delta_k, wrapped to (-pi, pi]
    double phi = 0.0;
};

struct OmegaCheck {
    std::vector<ArcAngle> arcs;
    bool in_region = true;
    /// min over arcs of min(phi, pi - phi); +inf when there are no arcs
    double worst_margin = 0.0;
};

OmegaCheck check_omega_region(const AdmittanceMatrix& Y, const Eigen::VectorXd& delta);

}  // namespace mugrid
