#include "mugrid/certificates.hpp"

#include <algorithm>
#include <numeric>

#include "mugrid/error.hpp"

namespace mugrid {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::lossless_stable: return "lossless_stable";
        case Verdict::certified: return "certified";
        case Verdict::uncertified: return "uncertified";
    }
    return "?";
}

const char* to_string(Condition c) {
    switch (c) {
        case Condition::thm1c: return "thm1c";
        case Condition::cor1: return "cor1";
        case Condition::thm2: return "thm2";
    }
    return "?";
}

bool CertReport::all_satisfied() const {
    return std::all_of(nodes.begin(), nodes.end(), [](const auto& n) { return n.satisfied; });
}

bool CertReport::has_reason(const std::string& r) const {
    return std::find(reasons.begin(), reasons.end(), r) != reasons.end();
}

double stability_index(double q, double v, double b_ii, double d, double m) {
    if (!(m > 0.0)) throw ParameterError("stability_index: inertia must be positive");
    if (!(d > 0.0)) throw ParameterError("stability_index: damping must be positive");
    return -q - v * v * b_ii - d * d / (2.0 * m);
}

NodeCertificate evaluate_node(int node, double lhs, double d, double m, double margin) {
    if (!(m > 0.0)) throw ParameterError("nonpositive inertia at node " + std::to_string(node));
    if (!(d > 0.0)) throw ParameterError("nonpositive damping at node " + std::to_string(node));
    NodeCertificate c;
    c.node = node;
    c.lhs = lhs;
    c.rhs = d * d / (2.0 * m);
    c.index = c.lhs - c.rhs;
    c.satisfied = c.index <= -margin;
    return c;
}

bool matrix_connected(const AdmittanceMatrix& Y) {
    const auto n = Y.size();
    if (n <= 1) return true;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    Eigen::Index count = 1;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (Eigen::Index u = 0; u < n; ++u) {
            if (u != v && !seen[static_cast<std::size_t>(u)] && Y.Y(v, u) != Complex{0.0, 0.0}) {
                seen[static_cast<std::size_t>(u)] = true;
                ++count;
                stack.push_back(u);
            }
        }
    }
    return count == n;
}

namespace {

bool matrix_lossless(const AdmittanceMatrix& Y) {
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
        for (Eigen::Index k = 0; k < Y.size(); ++k) {
            if (i != k && Y.Y(i, k).real() != 0.0) return false;
        }
    }
    return true;
}

void finish(CertReport& rep) {
    for (const auto& c : rep.nodes) {
        if (!c.satisfied) rep.offending.push_back(c.node);
    }
    if (!rep.offending.empty()) rep.reasons.emplace_back("node_violation");
}

std::vector<int> iota_ids(Eigen::Index n) {
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

}  // namespace

CertReport certify_lossy(const AdmittanceMatrix& Y, const Eigen::VectorXd& V, const Eigen::VectorXd& delta,
                         const Eigen::VectorXd& m, const Eigen::VectorXd& d, const CertOptions& options,
                         std::vector<int> ids) {
    const auto n = Y.size();
    if (ids.empty()) ids = iota_ids(n);
    if (m.size() != n || d.size() != n || static_cast<Eigen::Index>(ids.size()) != n) {
        throw ParameterError("certify_lossy: dimension mismatch");
    }
    CertReport rep;
    rep.which_condition = Condition::thm1c;
    rep.margin = options.margin;
    const Eigen::VectorXd Q = flow_reactive(Y, V, delta);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double b_ii = Y.Y(i, i).imag();
        const double lhs = -Q(i) - V(i) * V(i) * b_ii;
        rep.nodes.push_back(evaluate_node(ids[static_cast<std::size_t>(i)], lhs, d(i), m(i), options.margin));
        if (b_ii > 0.0) rep.shunt_flipped.push_back(ids[static_cast<std::size_t>(i)]);
    }
    rep.omega = check_omega_region(Y, delta);
    std::vector<std::string> hypotheses;
    if (!rep.omega->in_region) hypotheses.emplace_back("omega_violation");
    if (!matrix_connected(Y)) hypotheses.emplace_back("disconnected");
    finish(rep);
    const bool node_ok = rep.offending.empty();
    if (!hypotheses.empty()) {
        rep.reasons.insert(rep.reasons.begin(), hypotheses.begin(), hypotheses.end());
        rep.verdict = Verdict::uncertified;
    } else if (matrix_lossless(Y)) {
        rep.verdict = Verdict::lossless_stable;
    } else {
        rep.verdict = node_ok ? Verdict::certified : Verdict::uncertified;
    }
    return rep;
}

CertReport certify_lossy(const Network& net, const Eigen::VectorXd& delta, const InterfaceParams& params,
                         const CertOptions& options) {
    const auto ids = iota_ids(static_cast<Eigen::Index>(net.size()));
    return certify_lossy(build_admittance(net), net.voltages(), delta, params.inertia(ids), params.damping(ids),
                         options, ids);
}

CertReport certify_topology(const Network& net, const InterfaceParams& params, const CertOptions& options) {
    const AdmittanceMatrix Y = build_admittance(net);
    const Eigen::VectorXd V = net.voltages();
    const auto n = Y.size();
    CertReport rep;
    rep.which_condition = Condition::cor1;
    rep.margin = options.margin;
    for (Eigen::Index i = 0; i < n; ++i) {
        double lhs = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k != i) lhs += V(i) * V(k) * std::abs(Y.Y(i, k));
        }
        const auto& p = params.at(static_cast<int>(i));
        rep.nodes.push_back(evaluate_node(static_cast<int>(i), lhs, p.d, p.m, options.margin));
    }
    const bool connected = matrix_connected(Y);
    finish(rep);
    if (!connected) rep.reasons.insert(rep.reasons.begin(), "disconnected");
    rep.verdict = (connected && rep.offending.empty()) ? Verdict::certified : Verdict::uncertified;
    return rep;
}

CertReport certify_structure_preserving(const Network& full, const std::vector<int>& active_in,
                                        const InterfaceParams& params, const Eigen::VectorXd& delta_active,
                                        const StructureOptions& options) {
    const AdmittanceMatrix Y = build_admittance(full);
    const int n = static_cast<int>(full.size());
    std::vector<int> active = active_in;
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    if (active.empty()) throw ParameterError("certify_structure_preserving: no active nodes");
    std::vector<bool> is_active(static_cast<std::size_t>(n), false);
    for (int a : active) {
        if (a < 0 || a >= n) throw ParameterError("certify_structure_preserving: active node out of range");
        is_active[static_cast<std::size_t>(a)] = true;
    }
    std::vector<int> passive;
    for (int i = 0; i < n; ++i) {
        if (!is_active[static_cast<std::size_t>(i)]) passive.push_back(i);
    }
    const auto na = static_cast<Eigen::Index>(active.size());
    if (delta_active.size() != na) throw ParameterError("certify_structure_preserving: angle vector size mismatch");

    const Eigen::VectorXd V_full = full.voltages();
    Eigen::VectorXd V(na);
    Eigen::VectorXcd U_active(na);
    for (Eigen::Index a = 0; a < na; ++a) {
        V(a) = V_full(active[static_cast<std::size_t>(a)]);
        U_active(a) = std::polar(V(a), delta_active(a));
    }
    const Eigen::VectorXd m = params.inertia(active);
    const Eigen::VectorXd d = params.damping(active);

    CertReport rep;
    rep.which_condition = Condition::thm2;
    rep.margin = options.margin;

    auto a1 = check_assumption1(Y);
    bool a1_ok = a1.ok();
    bool a2_ok = true;
    rep.assumption_violations = a1.violations;

    KronOptions kopts;
    kopts.order = options.order;
    kopts.nu = std::make_pair(options.nu_min, options.nu_max);
    KronResult kron = kron_reduce(Y, passive, kopts);
    if (!passive.empty()) {
        auto a2 = check_assumption2(Y, options.nu_min, options.nu_max);
        a2_ok = a2.ok();
        rep.assumption_violations.insert(rep.assumption_violations.end(), a2.violations.begin(), a2.violations.end());
    }
    for (const auto& step : kron.trace.steps) {
        a1_ok = a1_ok && step.assumption1_ok;
        a2_ok = a2_ok && step.assumption2_ok;
        rep.assumption_violations.insert(rep.assumption_violations.end(), step.violations.begin(),
                                         step.violations.end());
    }

    // Injections at active nodes are the same in both networks once passive voltages
    // satisfy zero injection.
    const Eigen::VectorXcd U = complete_voltages(Y.Y, active, passive, U_active);
    const Eigen::VectorXcd S = U.cwiseProduct((Y.Y * U).conjugate());
    for (Eigen::Index a = 0; a < na; ++a) {
        const int node = active[static_cast<std::size_t>(a)];
        const double b_kk = Y.Y(node, node).imag();
        const double lhs = -S(node).imag() - V(a) * V(a) * b_kk;
        rep.nodes.push_back(evaluate_node(node, lhs, d(a), m(a), options.margin));
        if (b_kk > 0.0) rep.shunt_flipped.push_back(node);
    }

    const CertReport reduced = certify_lossy(kron.reduced, V, delta_active, m, d, CertOptions{options.margin}, active);
    rep.reduced_certified = reduced.stable();
    rep.omega = reduced.omega;

    std::vector<std::string> hypotheses;
    if (!a1_ok) hypotheses.emplace_back("assumption1_violation");
    if (!a2_ok) hypotheses.emplace_back("assumption2_violation");
    if (!rep.omega->in_region) hypotheses.emplace_back("omega_violation");
    if (!matrix_connected(kron.reduced)) hypotheses.emplace_back("disconnected");
    finish(rep);
    rep.reasons.insert(rep.reasons.begin(), hypotheses.begin(), hypotheses.end());
    rep.verdict = (hypotheses.empty() && rep.offending.empty()) ? Verdict::certified : Verdict::uncertified;
    return rep;
}

}  // namespace mugrid
