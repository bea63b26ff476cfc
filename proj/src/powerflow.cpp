#include "mugrid/powerflow.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mugrid/error.hpp"
#include "mugrid/spectral.hpp"

namespace mugrid {

namespace {

void check_dims(const AdmittanceMatrix& Y, const Eigen::VectorXd& V, const Eigen::VectorXd& delta,
                const char* who) {
    if (V.size() != Y.size() || delta.size() != Y.size()) {
        throw ParameterError(std::string(who) + ": dimension mismatch");
    }
}

// S = U .* conj(Y U) with phasors U_i = V_i e^{j delta_i}
Eigen::VectorXcd complex_injection(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                                   const Eigen::VectorXd& delta) {
    Eigen::VectorXcd U(V.size());
    for (Eigen::Index i = 0; i < V.size(); ++i) U(i) = std::polar(V(i), delta(i));
    Eigen::VectorXcd I = Y.Y * U;
    return U.cwiseProduct(I.conjugate());
}

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    a = std::remainder(a, 2.0 * pi);  // [-pi, pi]
    if (a <= -pi) a += 2.0 * pi;
    return a;
}

Eigen::VectorXd drop(const Eigen::VectorXd& v, int ref) {
    const auto n = v.size();
    Eigen::VectorXd out(n - 1);
    out << v.head(ref), v.tail(n - ref - 1);
    return out;
}

Eigen::MatrixXd drop(const Eigen::MatrixXd& A, int ref) {
    const auto n = A.rows();
    Eigen::MatrixXd out(n - 1, n - 1);
    const auto tail = n - ref - 1;
    out.topLeftCorner(ref, ref) = A.topLeftCorner(ref, ref);
    out.topRightCorner(ref, tail) = A.topRightCorner(ref, tail);
    out.bottomLeftCorner(tail, ref) = A.bottomLeftCorner(tail, ref);
    out.bottomRightCorner(tail, tail) = A.bottomRightCorner(tail, tail);
    return out;
}

}  // namespace

Eigen::VectorXd flow_active(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                            const Eigen::VectorXd& delta) {
    check_dims(Y, V, delta, "flow_active");
    return complex_injection(Y, V, delta).real();
}

Eigen::VectorXd flow_reactive(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                              const Eigen::VectorXd& delta) {
    check_dims(Y, V, delta, "flow_reactive");
    return complex_injection(Y, V, delta).imag();
}

Equilibrium equilibrium_at(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                           const Eigen::VectorXd& delta, int ref) {
    Equilibrium eq;
    eq.delta = delta;
    eq.omega = Eigen::VectorXd::Zero(delta.size());
    eq.ref = ref;
    eq.balanced_setpoints = flow_active(Y, V, delta);
    return eq;
}

Equilibrium solve_equilibrium(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                              const Eigen::VectorXd& p_set, const SolverOptions& options) {
    const auto n = Y.size();
    if (V.size() != n || p_set.size() != n) throw ParameterError("solve_equilibrium: dimension mismatch");
    if (n == 0) throw ParameterError("solve_equilibrium: empty network");
    const int ref = options.ref;
    if (ref < 0 || ref >= n) throw ParameterError("solve_equilibrium: reference node out of range");

    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    if (options.initial) {
        if (options.initial->size() != n) throw ParameterError("solve_equilibrium: bad initial guess");
        delta = *options.initial;
    }

    auto mismatch = [&](const Eigen::VectorXd& d) { return Eigen::VectorXd(p_set - flow_active(Y, V, d)); };
    Eigen::VectorXd r = mismatch(delta);
    double res = n > 1 ? drop(r, ref).cwiseAbs().maxCoeff() : 0.0;
    int it = 0;
    while (res > options.tol) {
        if (it >= options.max_iter) {
            std::ostringstream os;
            os << "solve_equilibrium: no convergence after " << it << " iterations (residual " << res << ")";
            throw SolverError(os.str(), res);
        }
        // dP_e/d delta = L
        const Eigen::MatrixXd Lred = drop(build_laplacian(Y, V, delta).L, ref);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Lred);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible()) {
            throw SolverError("solve_equilibrium: degenerate reduced Jacobian (EP on the boundary of the "
                              "angle region or disconnected grid)",
                              res);
        }
        const Eigen::VectorXd step = lu.solve(drop(r, ref));
        for (Eigen::Index i = 0, j = 0; i < n; ++i) {
            if (i == ref) continue;
            delta(i) += step(j++);
        }
        ++it;
        r = mismatch(delta);
        res = drop(r, ref).cwiseAbs().maxCoeff();
        if (!std::isfinite(res)) throw SolverError("solve_equilibrium: iteration diverged", res);
    }

    Equilibrium eq;
    eq.delta = delta;
    eq.omega = Eigen::VectorXd::Zero(n);
    eq.residual = res;
    eq.slack_mismatch = -r(ref);
    eq.ref = ref;
    eq.iterations = it;
    eq.balanced_setpoints = p_set;
    eq.balanced_setpoints(ref) = p_set(ref) - r(ref);
    return eq;
}

OmegaCheck check_omega_region(const AdmittanceMatrix& Y, const Eigen::VectorXd& delta) {
    constexpr double pi = std::numbers::pi;
    const auto n = Y.size();
    if (delta.size() != n) throw ParameterError("check_omega_region: dimension mismatch");
    OmegaCheck out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (i == k || Y.Y(i, k) == Complex{0.0, 0.0}) continue;
            const double phi = wrap_angle(Y.angle(i, k) - delta(i) + delta(k));
            out.arcs.push_back({static_cast<int>(i), static_cast<int>(k), phi});
            out.worst_margin = std::min(out.worst_margin, std::min(phi, pi - phi));
            if (!(phi > 0.0 && phi < pi)) out.in_region = false;
        }
    }
    return out;
}

}  // namespace mugrid
