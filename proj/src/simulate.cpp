#include "mugrid/simulate.hpp"

#include <cmath>

#include "mugrid/error.hpp"
#include "mugrid/powerflow.hpp"

namespace mugrid {

SwingModel make_swing_model(const Network& net, const InterfaceParams& params, const Eigen::VectorXd& p_set) {
    const auto n = static_cast<Eigen::Index>(net.size());
    if (p_set.size() != n) throw ParameterError("make_swing_model: setpoint vector size mismatch");
    std::vector<int> ids(net.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    SwingModel model{build_admittance(net), net.voltages(), params.inertia(ids), params.damping(ids), p_set};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(model.m(i) > 0.0) || !(model.d(i) > 0.0)) {
            throw ParameterError("nonpositive inertia/damping at node " + std::to_string(i));
        }
    }
    return model;
}

SwingDerivative swing_rhs(const Eigen::VectorXd& delta, const Eigen::VectorXd& omega, const SwingModel& model) {
    const Eigen::VectorXd pe = flow_active(model.Y, model.V, delta);
    SwingDerivative out;
    out.ddelta = omega;
    out.domega = (model.p_set - model.d.cwiseProduct(omega) - pe).cwiseQuotient(model.m);
    return out;
}

namespace {

long step_count(const IntegrateOptions& o) {
    if (!(o.dt > 0.0) || !(o.T >= o.dt)) throw ParameterError("integrate: need dt > 0 and T >= dt");
    if (o.record_every < 1) throw ParameterError("integrate: record_every must be >= 1");
    return static_cast<long>(std::llround(std::ceil(o.T / o.dt - 1e-9)));
}

}  // namespace

Trajectory integrate(const SwingModel& model, const Eigen::VectorXd& delta0, const Eigen::VectorXd& omega0,
                     const IntegrateOptions& options) {
    const auto n = model.size();
    if (delta0.size() != n || omega0.size() != n) throw ParameterError("integrate: initial state size mismatch");
    const long steps = step_count(options);
    const double h = options.dt;

    Trajectory tr;
    tr.dt = h;
    tr.horizon = static_cast<double>(steps) * h;
    Eigen::VectorXd x = delta0;
    Eigen::VectorXd w = omega0;
    tr.t.push_back(0.0);
    tr.delta.push_back(x);
    tr.omega.push_back(w);

    for (long s = 1; s <= steps; ++s) {
        const auto k1 = swing_rhs(x, w, model);
        const auto k2 = swing_rhs(x + 0.5 * h * k1.ddelta, w + 0.5 * h * k1.domega, model);
        const auto k3 = swing_rhs(x + 0.5 * h * k2.ddelta, w + 0.5 * h * k2.domega, model);
        const auto k4 = swing_rhs(x + h * k3.ddelta, w + h * k3.domega, model);
        x += (h / 6.0) * (k1.ddelta + 2.0 * k2.ddelta + 2.0 * k3.ddelta + k4.ddelta);
        w += (h / 6.0) * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);

        const double norm = std::max(x.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff());
        const bool bad = !x.allFinite() || !w.allFinite() || norm > options.divergence_threshold;
        if (bad || s % options.record_every == 0 || s == steps) {
            tr.t.push_back(static_cast<double>(s) * h);
            tr.delta.push_back(x);
            tr.omega.push_back(w);
        }
        if (bad) {
            tr.diverged = true;
            tr.divergence_step = s;
            break;
        }
    }
    return tr;
}

const char* to_string(Convergence c) {
    switch (c) {
        case Convergence::converged: return "converged";
        case Convergence::diverged: return "diverged";
        case Convergence::undetermined: return "undetermined";
    }
    return "?";
}

Convergence assess_convergence(const Trajectory& traj, double tol) {
    if (traj.diverged) return Convergence::diverged;
    if (traj.t.empty()) return Convergence::undetermined;
    const double start = traj.horizon - 0.1 * traj.horizon - 1e-12;
    double worst = 0.0;
    for (std::size_t s = 0; s < traj.t.size(); ++s) {
        if (traj.t[s] >= start) worst = std::max(worst, traj.omega[s].cwiseAbs().maxCoeff());
    }
    return worst <= tol ? Convergence::converged : Convergence::undetermined;
}

SwingParams vsi_to_swing(double k, double tau, double p_d) {
    if (!(k > 0.0)) throw ParameterError("vsi_to_swing: droop gain must be positive");
    if (!(tau >= 0.0)) throw ParameterError("vsi_to_swing: filter time constant must be nonnegative");
    SwingParams out{tau / k, 1.0 / k, p_d, std::nullopt};
    if (tau == 0.0) out.warning = "zero inertia: filter time constant is 0";
    return out;
}

Eigen::VectorXd vsi_frequency(const VsiModel& model, const Eigen::VectorXd& p_m) {
    return -model.k.cwiseProduct(p_m - model.p_d);
}

Eigen::VectorXd vsi_measured_power(const VsiModel& model, const Eigen::VectorXd& omega) {
    return model.p_d - omega.cwiseQuotient(model.k);
}

VsiTrajectory integrate_vsi(const VsiModel& model, const Eigen::VectorXd& delta0, const Eigen::VectorXd& p_m0,
                            const IntegrateOptions& options) {
    const auto n = model.V.size();
    if (delta0.size() != n || p_m0.size() != n || model.k.size() != n || model.tau.size() != n ||
        model.p_d.size() != n) {
        throw ParameterError("integrate_vsi: dimension mismatch");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(model.k(i) > 0.0) || !(model.tau(i) > 0.0)) {
            throw ParameterError("integrate_vsi: need k > 0 and tau > 0 at node " + std::to_string(i));
        }
    }
    const long steps = step_count(options);
    const double h = options.dt;
    auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
        return std::make_pair(Eigen::VectorXd(-model.k.cwiseProduct(p - model.p_d)),
                              Eigen::VectorXd((flow_active(model.Y, model.V, x) - p).cwiseQuotient(model.tau)));
    };

    VsiTrajectory tr;
    Eigen::VectorXd x = delta0;
    Eigen::VectorXd p = p_m0;
    tr.t.push_back(0.0);
    tr.delta.push_back(x);
    tr.p_m.push_back(p);
    for (long s = 1; s <= steps; ++s) {
        const auto k1 = rhs(x, p);
        const auto k2 = rhs(x + 0.5 * h * k1.first, p + 0.5 * h * k1.second);
        const auto k3 = rhs(x + 0.5 * h * k2.first, p + 0.5 * h * k2.second);
        const auto k4 = rhs(x + h * k3.first, p + h * k3.second);
        x += (h / 6.0) * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
        p += (h / 6.0) * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
        if (s % options.record_every == 0 || s == steps) {
            tr.t.push_back(static_cast<double>(s) * h);
            tr.delta.push_back(x);
            tr.p_m.push_back(p);
        }
    }
    return tr;
}

}  // namespace mugrid
