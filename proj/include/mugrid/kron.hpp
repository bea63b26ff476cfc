#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mugrid/netmodel.hpp"

namespace mugrid {

/// Eliminates node k0: Y^r_ik = Y_ik - Y_ik0 Y_k0k / Y_k0k0 for i,k != k0.
/// Throws NetworkError when |Y_k0k0| <= 1e-12 * max|Y|.
AdmittanceMatrix eliminate_node(const AdmittanceMatrix& Y, int k0);

/// One-shot Schur complement Y[a,a] - Y[a,b] Y[b,b]^-1 Y[b,a]; `active` keeps its order.
Eigen::MatrixXcd schur_complement(const Eigen::MatrixXcd& Y, const std::vector<int>& active,
                                  const std::vector<int>& passive);

struct AssumptionViolation {
    int i = 0;
    int k = 0;
    std::string what;
    /// Offending entry, or |B_ik|/|G_ik| for ratio violations (inf when G_ik = 0).
    double value = 0.0;
};

struct AssumptionReport {
    std::vector<AssumptionViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Off-diagonal G_ik <= 0, B_ik >= 0; diagonal G_ii >= 0, B_ii <= 0 (1e-12 relative slack).
AssumptionReport check_assumption1(const AdmittanceMatrix& Y);

/// Largest admissible nu_max for a given nu_min: sqrt(1 + 2 nu_min^2).
double max_nu_max(double nu_min);

/// True when 0 <= nu_min <= nu_max <= sqrt(1 + 2 nu_min^2).
bool valid_nu_pair(double nu_min, double nu_max);

/// nu_min |G_ik| <= |B_ik| <= nu_max |G_ik| on every off-diagonal entry (G_ik = 0 forces
/// B_ik = 0). Throws ParameterError for an invalid (nu_min, nu_max) pair.
AssumptionReport check_assumption2(const AdmittanceMatrix& Y, double nu_min, double nu_max);

struct MonotonicityEntry {
    int node = 0;  // index in the unreduced matrix
    double b_before = 0.0;
    double b_after = 0.0;
    bool ok = true;
};

struct MonotonicityReport {
    std::vector<MonotonicityEntry> entries;

    bool ok() const;
};

/// Compares B^r_kk with B_kk for all survivors of a single-node elimination;
/// ok when B^r_kk - B_kk >= -1e-12.
MonotonicityReport verify_monotonicity(const AdmittanceMatrix& Y, const AdmittanceMatrix& reduced,
                                       int eliminated);

enum class EliminationOrder { descending, ascending, as_given };

struct KronOptions {
    EliminationOrder order = EliminationOrder::descending;
    /// When set, Assumption 2 is checked on every intermediate matrix with these bounds.
    std::optional<std::pair<double, double>> nu;
};

struct ReductionStep {
    int eliminated = 0;  // original node id
    bool assumption1_ok = true;
    bool assumption2_ok = true;
    std::vector<AssumptionViolation> violations;
    MonotonicityReport monotonicity;
};

struct ReductionTrace {
    std::vector<int> eliminated;
    /// Original ids of the surviving rows/columns, in matrix order.
    std::vector<int> kept;
    std::vector<ReductionStep> steps;

    bool assumptions_ok() const;
    bool monotone() const;
};

struct KronResult {
    AdmittanceMatrix reduced;
    ReductionTrace trace;
};

/// Sequential single-node elimination of `passive`. Throws NetworkError for an unknown or
/// repeated passive node, an empty active set, or a singular pivot (naming the step).
KronResult kron_reduce(const AdmittanceMatrix& Y, const std::vector<int>& passive,
                       const KronOptions& options = {});

/// Complex voltages at the passive nodes that make their injections vanish:
/// U_b = -Y[b,b]^-1 Y[b,a] U_a. Returns the full phasor vector.
Eigen::VectorXcd complete_voltages(const Eigen::MatrixXcd& Y, const std::vector<int>& active,
                                   const std::vector<int>& passive, const Eigen::VectorXcd& U_active);

}  // namespace mugrid
