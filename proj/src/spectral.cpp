#include "mugrid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mugrid/error.hpp"

namespace mugrid {

namespace {

constexpr double kZeroBand = 1e-8;

double max_abs(const Eigen::MatrixXd& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

std::vector<bool> reachable(const Eigen::MatrixXd& L, bool reverse) {
    const auto n = L.rows();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    if (n == 0) return seen;
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (Eigen::Index u = 0; u < n; ++u) {
            if (u == v) continue;
            const double entry = reverse ? L(u, v) : L(v, u);
            if (entry != 0.0 && !seen[static_cast<std::size_t>(u)]) {
                seen[static_cast<std::size_t>(u)] = true;
                stack.push_back(u);
            }
        }
    }
    return seen;
}

}  // namespace

Laplacian build_laplacian(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                          const Eigen::VectorXd& delta) {
    const auto n = Y.size();
    if (V.size() != n || delta.size() != n) {
        throw ParameterError("build_laplacian: dimension mismatch");
    }
    Laplacian out{Eigen::MatrixXd::Zero(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k == i || Y.Y(i, k) == Complex{0.0, 0.0}) continue;
            const double w =
                V(i) * V(k) * Y.magnitude(i, k) * std::sin(Y.angle(i, k) - delta(i) + delta(k));
            out.L(i, k) = -w;
            out.L(i, i) += w;
        }
    }
    return out;
}

SystemJacobian build_jacobian(const Laplacian& L, const Eigen::VectorXd& m, const Eigen::VectorXd& d) {
    const auto n = L.size();
    if (m.size() != n || d.size() != n) throw ParameterError("build_jacobian: dimension mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(m(i) > 0.0)) throw ParameterError("nonpositive inertia at node " + std::to_string(i));
        if (!(d(i) > 0.0)) throw ParameterError("nonpositive damping at node " + std::to_string(i));
    }
    SystemJacobian out;
    out.m = m;
    out.d = d;
    out.J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    out.J.topRightCorner(n, n).setIdentity();
    // M^-1 as row scaling
    out.J.bottomLeftCorner(n, n) = -(m.cwiseInverse().asDiagonal() * L.L);
    out.J.bottomRightCorner(n, n) = (-(d.cwiseQuotient(m))).asDiagonal();
    return out;
}

Spectrum classify_spectrum(std::vector<std::complex<double>> values) {
    Spectrum s;
    s.values = std::move(values);
    for (const auto& z : s.values) s.spectral_radius = std::max(s.spectral_radius, std::abs(z));
    s.tol_zero = kZeroBand * std::max(1.0, s.spectral_radius);
    s.max_real_nonzero = -std::numeric_limits<double>::infinity();
    for (const auto& z : s.values) {
        if (s.is_zero(z)) {
            ++s.zero_count;
            continue;
        }
        s.max_real_nonzero = std::max(s.max_real_nonzero, z.real());
        if (!(z.real() < 0.0)) s.lhp = false;
    }
    for (const auto& z : s.values) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& w : s.values) nearest = std::min(nearest, std::abs(w - std::conj(z)));
        s.conjugate_mismatch = std::max(s.conjugate_mismatch, nearest);
    }
    return s;
}

Spectrum eigenvalues(const Eigen::MatrixXd& A) {
    if (!A.allFinite()) throw SolverError("eigenvalues: matrix has non-finite entries");
    if (A.rows() == 0) return classify_spectrum({});
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        const auto& sv = svd.singularValues();
        std::ostringstream os;
        os << "eigenvalues: decomposition failed (n=" << A.rows() << ", ||A||_2=" << sv(0)
           << ", cond=" << (sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                                  : std::numeric_limits<double>::infinity())
           << ")";
        throw SolverError(os.str());
    }
    const auto& ev = solver.eigenvalues();
    return classify_spectrum(std::vector<std::complex<double>>(ev.data(), ev.data() + ev.size()));
}

Spectrum eigenvalues(const SystemJacobian& J) { return eigenvalues(J.J); }

double pencil_residual(const Laplacian& L, const Eigen::VectorXd& m, const Eigen::VectorXd& d,
                       std::complex<double> lambda) {
    const auto n = L.size();
    if (n == 0) return 0.0;
    Eigen::MatrixXcd P = L.L.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < n; ++i) P(i, i) += lambda * lambda * m(i) + lambda * d(i);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
    const double smin = svd.singularValues()(n - 1);
    const double norm_L = Eigen::JacobiSVD<Eigen::MatrixXd>(L.L).singularValues()(0);
    const double scale = std::norm(lambda) * m.cwiseAbs().maxCoeff() +
                         std::abs(lambda) * d.cwiseAbs().maxCoeff() + norm_L;
    if (scale == 0.0) return 0.0;
    return smin / scale;
}

MMatrixReport m_matrix_diagnostics(const Laplacian& lap) {
    const auto& L = lap.L;
    const auto n = L.rows();
    MMatrixReport r;
    const double scale = max_abs(L);
    const double tol = 1e-12 * scale;
    bool gersh = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        double radius = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k == i) continue;
            if (L(i, k) > 0.0) r.sign_violations.emplace_back(static_cast<int>(i), static_cast<int>(k));
            radius += std::abs(L(i, k));
        }
        r.max_abs_row_sum = std::max(r.max_abs_row_sum, std::abs(L.row(i).sum()));
        if (L(i, i) - radius < -tol) gersh = false;
    }
    r.zero_row_sums = r.max_abs_row_sum <= tol;
    r.gershgorin_rhp = gersh;

    auto fwd = reachable(L, false);
    auto bwd = reachable(L, true);
    r.strongly_connected = std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
                           std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });

    Spectrum s = eigenvalues(L);
    r.eigenvalues = s.values;
    r.zero_multiplicity = s.zero_count;
    r.zero_simple = s.zero_count == 1;
    r.nonzero_rhp = std::all_of(s.values.begin(), s.values.end(), [&](const auto& z) {
        return s.is_zero(z) || z.real() > 0.0;
    });
    return r;
}

int null_space_dimension(const Eigen::MatrixXd& A, double rel_tol) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double thr = rel_tol * std::max(sv(0), std::numeric_limits<double>::min());
    int count = static_cast<int>(std::min(A.rows(), A.cols()) - sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) <= thr) ++count;
    }
    return count + static_cast<int>(std::max<Eigen::Index>(0, A.cols() - A.rows()));
}

KernelReport kernel_projection_check(const SystemJacobian& sj, const Laplacian& lap) {
    constexpr double kRel = 1e-8;
    const auto n = lap.size();
    KernelReport r;
    const double norm_L = n > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(lap.L).singularValues()(0) : 0.0;

    auto kernel_basis = [&](const Eigen::MatrixXd& A) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double thr = kRel * std::max(sv(0), std::numeric_limits<double>::min());
        std::vector<Eigen::Index> cols;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) <= thr) cols.push_back(i);
        }
        Eigen::MatrixXd basis(A.cols(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            basis.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(cols[c]);
        }
        return basis;
    };

    const Eigen::MatrixXd kerJ = kernel_basis(sj.J);
    const Eigen::MatrixXd kerL = kernel_basis(lap.L);
    r.dim_ker_J = static_cast<int>(kerJ.cols());
    r.dim_ker_L = static_cast<int>(kerL.cols());

    Eigen::MatrixXd projected(n, kerJ.cols());
    for (Eigen::Index c = 0; c < kerJ.cols(); ++c) {
        const Eigen::VectorXd v1 = kerJ.col(c).head(n);
        const Eigen::VectorXd v2 = kerJ.col(c).tail(n);
        r.max_velocity_part = std::max(r.max_velocity_part, v2.norm());
        r.max_L_residual = std::max(r.max_L_residual, (lap.L * v1).norm());
        projected.col(c) = v1;
    }
    for (Eigen::Index c = 0; c < kerL.cols(); ++c) {
        Eigen::VectorXd lifted = Eigen::VectorXd::Zero(2 * n);
        lifted.head(n) = kerL.col(c);
        r.max_lift_residual = std::max(r.max_lift_residual, (sj.J * lifted).norm());
    }
    const double tol = 1e-6 * std::max(1.0, norm_L);
    int projected_rank = 0;
    if (projected.cols() > 0) {
        projected_rank = static_cast<int>(projected.cols()) - null_space_dimension(projected, 1e-6);
    }
    r.projection_ok = r.max_velocity_part <= 1e-6 && r.max_L_residual <= tol &&
                      r.max_lift_residual <= tol * std::max(1.0, sj.m.cwiseInverse().maxCoeff()) &&
                      projected_rank == r.dim_ker_L;
    r.multiplicities_equal = r.dim_ker_J == r.dim_ker_L;
    r.J_singular = r.dim_ker_J > 0;
    r.L_singular = r.dim_ker_L > 0;
    return r;
}

}  // namespace mugrid
