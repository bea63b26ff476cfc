#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mugrid/netmodel.hpp"

namespace mugrid {

/// Jacobian of the flow function: the Laplacian of the digraph with arc weights
/// w_ik = V_i V_k |Y_ik| sin(theta_ik - delta_i + delta_k).
struct Laplacian {
    Eigen::MatrixXd L;

    Eigen::Index size() const { return L.rows(); }
};

Laplacian build_laplacian(const AdmittanceMatrix& Y, const Eigen::VectorXd& V,
                          const Eigen::VectorXd& delta);

/// J = [[0, I], [-M^-1 L, -M^-1 D]] with diagonal inertia M and damping D.
struct SystemJacobian {
    Eigen::MatrixXd J;
    Eigen::VectorXd m;
    Eigen::VectorXd d;

    Eigen::Index nodes() const { return m.size(); }
};

/// Throws ParameterError naming the first node with m <= 0 or d <= 0.
SystemJacobian build_jacobian(const Laplacian& L, const Eigen::VectorXd& m, const Eigen::VectorXd& d);

struct Spectrum {
    std::vector<std::complex<double>> values;
    int zero_count = 0;
    /// Every eigenvalue outside the zero band has a strictly negative real part.
    bool lhp = true;
    /// Largest real part among the nonzero eigenvalues (-inf when there are none).
    double max_real_nonzero = 0.0;
    double tol_zero = 0.0;
    double spectral_radius = 0.0;
    /// Largest distance between an eigenvalue and its nearest conjugate partner.
    double conjugate_mismatch = 0.0;

    bool is_zero(std::complex<double> z) const { return std::abs(z) <= tol_zero; }
};

/// Zero band: |lambda| <= 1e-8 * max(1, spectral radius).
Spectrum classify_spectrum(std::vector<std::complex<double>> values);

/// Dense eigen-decomposition of J, classified. Throws SolverError on failure.
Spectrum eigenvalues(const SystemJacobian& J);
Spectrum eigenvalues(const Eigen::MatrixXd& A);

/// sigma_min(lambda^2 M + lambda D + L) scaled by |lambda|^2 ||M|| + |lambda| ||D|| + ||L||.
/// Zero exactly when the pencil (and hence J) is singular at lambda.
double pencil_residual(const Laplacian& L, const Eigen::VectorXd& m, const Eigen::VectorXd& d,
                       std::complex<double> lambda);

struct MMatrixReport {
    /// Off-diagonal entries that are strictly positive (sign pattern violations).
    std::vector<std::pair<int, int>> sign_violations;
    double max_abs_row_sum = 0.0;
    bool zero_row_sums = false;
    /// Every Gershgorin disc lies in the closed right half plane.
    bool gershgorin_rhp = false;
    /// Digraph of nonzero off-diagonal entries is strongly connected.
    bool strongly_connected = false;
    /// Algebraic count of eigenvalues in the zero band.
    int zero_multiplicity = 0;
    bool zero_simple = false;
    /// Nonzero eigenvalues all have positive real part.
    bool nonzero_rhp = false;
    std::vector<std::complex<double>> eigenvalues;

    bool sign_pattern_ok() const { return sign_violations.empty(); }
    bool singular_m_matrix() const {
        return sign_pattern_ok() && zero_row_sums && gershgorin_rhp && nonzero_rhp;
    }
};

MMatrixReport m_matrix_diagnostics(const Laplacian& L);

struct KernelReport {
    int dim_ker_J = 0;
    int dim_ker_L = 0;
    /// max ||v2|| and max ||L v1|| over an orthonormal basis of ker(J).
    double max_velocity_part = 0.0;
    double max_L_residual = 0.0;
    /// max ||J (v, 0)|| over an orthonormal basis of ker(L).
    double max_lift_residual = 0.0;
    /// proj(ker J) = ker L, checked numerically.
    bool projection_ok = false;
    bool multiplicities_equal = false;
    bool J_singular = false;
    bool L_singular = false;

    bool ok() const { return projection_ok && multiplicities_equal && (J_singular == L_singular); }
};

/// Kernel dimensions from singular values thresholded at 1e-8 relative.
KernelReport kernel_projection_check(const SystemJacobian& J, const Laplacian& L);

/// Numerical rank deficiency of A: count of singular values <= rel_tol * sigma_max.
int null_space_dimension(const Eigen::MatrixXd& A, double rel_tol = 1e-8);

}  // namespace mugrid
