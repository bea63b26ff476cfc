#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mugrid/netmodel.hpp"

namespace mugrid {

/// Everything the swing equations need, gathered per node in id order.
struct SwingModel {
    AdmittanceMatrix Y;
    Eigen::VectorXd V;
    Eigen::VectorXd m;
    Eigen::VectorXd d;
    Eigen::VectorXd p_set;

    Eigen::Index size() const { return V.size(); }
};

/// Throws ParameterError for missing or nonpositive parameters.
SwingModel make_swing_model(const Network& net, const InterfaceParams& params, const Eigen::VectorXd& p_set);

struct SwingDerivative {
    Eigen::VectorXd ddelta;
    Eigen::VectorXd domega;
};

/// ddelta = omega, m domega = P_s - d omega - P_e(delta).
SwingDerivative swing_rhs(const Eigen::VectorXd& delta, const Eigen::VectorXd& omega, const SwingModel& model);

struct IntegrateOptions {
    double T = 50.0;
    double dt = 1e-3;
    /// Keep every k-th step (the last step is always kept).
    int record_every = 1;
    double divergence_threshold = 1e6;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> delta;
    std::vector<Eigen::VectorXd> omega;
    double dt = 0.0;
    double horizon = 0.0;
    bool diverged = false;
    /// First integration step whose state exceeded the threshold or went non-finite.
    std::optional<long> divergence_step;

    std::size_t samples() const { return t.size(); }
};

/// Classic fixed-step RK4. Stops early on divergence.
Trajectory integrate(const SwingModel& model, const Eigen::VectorXd& delta0, const Eigen::VectorXd& omega0,
                     const IntegrateOptions& options = {});

enum class Convergence { converged, diverged, undetermined };

const char* to_string(Convergence c);

/// Converged when max |omega| over the trailing 10% of the horizon is <= tol.
Convergence assess_convergence(const Trajectory& traj, double tol = 1e-3);

struct SwingParams {
    double m = 0.0;
    double d = 0.0;
    double p_set = 0.0;
    std::optional<std::string> warning;
};

/// m = tau / k, d = 1 / k, P_s = P_d. Throws ParameterError for k <= 0 or tau < 0.
SwingParams vsi_to_swing(double k, double tau, double p_d);

/// Droop-controlled inverters: ddelta = -k (P_m - P_d), tau dP_m = -P_m + P_e(delta).
struct VsiModel {
    AdmittanceMatrix Y;
    Eigen::VectorXd V;
    Eigen::VectorXd k;
    Eigen::VectorXd tau;
    Eigen::VectorXd p_d;
};

struct VsiTrajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> delta;
    std::vector<Eigen::VectorXd> p_m;
};

/// Requires tau > 0 at every node.
VsiTrajectory integrate_vsi(const VsiModel& model, const Eigen::VectorXd& delta0, const Eigen::VectorXd& p_m0,
                            const IntegrateOptions& options = {});

/// Frequency deviation implied by the measured power: omega = -k (P_m - P_d).
Eigen::VectorXd vsi_frequency(const VsiModel& model, const Eigen::VectorXd& p_m);

/// Measured power matching a frequency deviation: P_m = P_d - omega / k.
Eigen::VectorXd vsi_measured_power(const VsiModel& model, const Eigen::VectorXd& omega);

}  // namespace mugrid
