#include "mugrid/kron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mugrid/error.hpp"

namespace mugrid {

namespace {

double max_abs(const Eigen::MatrixXcd& Y) { return Y.size() == 0 ? 0.0 : Y.cwiseAbs().maxCoeff(); }

Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& Y, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Y(rows[r], cols[c]);
        }
    }
    return out;
}

}  // namespace

AdmittanceMatrix eliminate_node(const AdmittanceMatrix& Y, int k0) {
    const auto n = Y.size();
    if (k0 < 0 || k0 >= n) throw NetworkError("eliminate_node: node " + std::to_string(k0) + " out of range");
    const Complex pivot = Y.Y(k0, k0);
    if (std::abs(pivot) <= 1e-12 * max_abs(Y.Y)) {
        throw NetworkError("eliminate_node: singular pivot at node " + std::to_string(k0));
    }
    AdmittanceMatrix out{Eigen::MatrixXcd(n - 1, n - 1)};
    for (Eigen::Index i = 0, ri = 0; i < n; ++i) {
        if (i == k0) continue;
        for (Eigen::Index k = 0, rk = 0; k < n; ++k) {
            if (k == k0) continue;
            out.Y(ri, rk) = Y.Y(i, k) - Y.Y(i, k0) * Y.Y(k0, k) / pivot;
            ++rk;
        }
        ++ri;
    }
    return out;
}

Eigen::MatrixXcd schur_complement(const Eigen::MatrixXcd& Y, const std::vector<int>& active,
                                  const std::vector<int>& passive) {
    const Eigen::MatrixXcd Yaa = submatrix(Y, active, active);
    if (passive.empty()) return Yaa;
    const Eigen::MatrixXcd Yab = submatrix(Y, active, passive);
    const Eigen::MatrixXcd Yba = submatrix(Y, passive, active);
    const Eigen::MatrixXcd Ybb = submatrix(Y, passive, passive);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(Ybb);
    if (!lu.isInvertible()) throw NetworkError("schur_complement: singular passive block");
    return Yaa - Yab * lu.solve(Yba);
}

AssumptionReport check_assumption1(const AdmittanceMatrix& Y) {
    const auto n = Y.size();
    const double tol = 1e-12 * max_abs(Y.Y);
    AssumptionReport rep;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double G = Y.Y(i, k).real();
            const double B = Y.Y(i, k).imag();
            const int ii = static_cast<int>(i);
            const int kk = static_cast<int>(k);
            if (i == k) {
                if (G < -tol) rep.violations.push_back({ii, kk, "G_ii < 0", G});
                if (B > tol) rep.violations.push_back({ii, kk, "B_ii > 0", B});
            } else {
                if (G > tol) rep.violations.push_back({ii, kk, "G_ik > 0", G});
                if (B < -tol) rep.violations.push_back({ii, kk, "B_ik < 0", B});
            }
        }
    }
    return rep;
}

double max_nu_max(double nu_min) { return std::sqrt(1.0 + 2.0 * nu_min * nu_min); }

bool valid_nu_pair(double nu_min, double nu_max) {
    return nu_min >= 0.0 && nu_min <= nu_max && nu_max <= max_nu_max(nu_min);
}

AssumptionReport check_assumption2(const AdmittanceMatrix& Y, double nu_min, double nu_max) {
    if (!valid_nu_pair(nu_min, nu_max)) {
        throw ParameterError("invalid bounds: need 0 <= nu_min <= nu_max <= sqrt(1 + 2 nu_min^2)");
    }
    const auto n = Y.size();
    const double tol = 1e-12 * max_abs(Y.Y);
    AssumptionReport rep;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = i + 1; k < n; ++k) {
            const double G = std::abs(Y.Y(i, k).real());
            const double B = std::abs(Y.Y(i, k).imag());
            if (G <= tol && B <= tol) continue;
            const double ratio = G > 0.0 ? B / G : std::numeric_limits<double>::infinity();
            const double slack = 1e-12 * std::max(G, B);
            if (nu_min * G > B + slack) {
                rep.violations.push_back({static_cast<int>(i), static_cast<int>(k), "|B/G| < nu_min", ratio});
            } else if (B > nu_max * G + slack) {
                rep.violations.push_back({static_cast<int>(i), static_cast<int>(k), "|B/G| > nu_max", ratio});
            }
        }
    }
    return rep;
}

bool MonotonicityReport::ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.ok; });
}

MonotonicityReport verify_monotonicity(const AdmittanceMatrix& Y, const AdmittanceMatrix& reduced,
                                       int eliminated) {
    const auto n = Y.size();
    if (reduced.size() != n - 1) throw ParameterError("verify_monotonicity: not a single-node elimination");
    MonotonicityReport rep;
    for (Eigen::Index i = 0, r = 0; i < n; ++i) {
        if (i == eliminated) continue;
        MonotonicityEntry e;
        e.node = static_cast<int>(i);
        e.b_before = Y.Y(i, i).imag();
        e.b_after = reduced.Y(r, r).imag();
        e.ok = e.b_after - e.b_before >= -1e-12;
        rep.entries.push_back(e);
        ++r;
    }
    return rep;
}

bool ReductionTrace::assumptions_ok() const {
    return std::all_of(steps.begin(), steps.end(),
                       [](const auto& s) { return s.assumption1_ok && s.assumption2_ok; });
}

bool ReductionTrace::monotone() const {
    return std::all_of(steps.begin(), steps.end(), [](const auto& s) { return s.monotonicity.ok(); });
}

KronResult kron_reduce(const AdmittanceMatrix& Y, const std::vector<int>& passive,
                       const KronOptions& options) {
    const auto n = static_cast<int>(Y.size());
    std::set<int> unique;
    for (int p : passive) {
        if (p < 0 || p >= n) throw NetworkError("kron_reduce: passive node " + std::to_string(p) + " out of range");
        if (!unique.insert(p).second) throw NetworkError("kron_reduce: passive node " + std::to_string(p) + " repeated");
    }
    if (static_cast<int>(unique.size()) >= n) throw NetworkError("kron_reduce: active set is empty");

    std::vector<int> order = passive;
    if (options.order == EliminationOrder::descending) std::sort(order.rbegin(), order.rend());
    if (options.order == EliminationOrder::ascending) std::sort(order.begin(), order.end());

    KronResult result;
    result.reduced = Y;
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;

    for (std::size_t step = 0; step < order.size(); ++step) {
        const int target = order[step];
        const auto pos = static_cast<int>(std::find(ids.begin(), ids.end(), target) - ids.begin());
        AdmittanceMatrix next;
        try {
            next = eliminate_node(result.reduced, pos);
        } catch (const NetworkError&) {
            throw NetworkError("kron_reduce: singular pivot at step " + std::to_string(step + 1) +
                               " (node " + std::to_string(target) + ")");
        }
        ReductionStep rec;
        rec.eliminated = target;
        rec.monotonicity = verify_monotonicity(result.reduced, next, pos);
        for (auto& e : rec.monotonicity.entries) e.node = ids[static_cast<std::size_t>(e.node)];
        ids.erase(ids.begin() + pos);

        auto a1 = check_assumption1(next);
        rec.assumption1_ok = a1.ok();
        for (auto v : a1.violations) {
            v.i = ids[static_cast<std::size_t>(v.i)];
            v.k = ids[static_cast<std::size_t>(v.k)];
            rec.violations.push_back(v);
        }
        if (options.nu) {
            auto a2 = check_assumption2(next, options.nu->first, options.nu->second);
            rec.assumption2_ok = a2.ok();
            for (auto v : a2.violations) {
                v.i = ids[static_cast<std::size_t>(v.i)];
                v.k = ids[static_cast<std::size_t>(v.k)];
                rec.violations.push_back(v);
            }
        }
        result.trace.steps.push_back(std::move(rec));
        result.trace.eliminated.push_back(target);
        result.reduced = std::move(next);
    }
    result.trace.kept = ids;
    return result;
}

Eigen::VectorXcd complete_voltages(const Eigen::MatrixXcd& Y, const std::vector<int>& active,
                                   const std::vector<int>& passive, const Eigen::VectorXcd& U_active) {
    Eigen::VectorXcd U = Eigen::VectorXcd::Zero(Y.rows());
    for (std::size_t a = 0; a < active.size(); ++a) U(active[a]) = U_active(static_cast<Eigen::Index>(a));
    if (passive.empty()) return U;
    const Eigen::MatrixXcd Ybb = submatrix(Y, passive, passive);
    const Eigen::MatrixXcd Yba = submatrix(Y, passive, active);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(Ybb);
    if (!lu.isInvertible()) throw NetworkError("complete_voltages: singular passive block");
    const Eigen::VectorXcd Ub = -lu.solve(Yba * U_active);
    for (std::size_t b = 0; b < passive.size(); ++b) U(passive[b]) = Ub(static_cast<Eigen::Index>(b));
    return U;
}

}  // namespace mugrid
