#include "mugrid/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mugrid/error.hpp"

namespace mugrid {

const NodeBounds& TuneBounds::for_node(int id) const {
    auto it = per_node.find(id);
    return it == per_node.end() ? defaults : it->second;
}

void TuneBounds::validate() const {
    auto check = [](const NodeBounds& b, const std::string& who) {
        const bool finite = std::isfinite(b.d_min) && std::isfinite(b.d_max) && std::isfinite(b.m_min) &&
                            std::isfinite(b.m_max);
        if (!finite || b.d_min <= 0.0 || b.m_min <= 0.0 || b.d_min > b.d_max || b.m_min > b.m_max) {
            throw ParameterError("invalid tuning bounds for " + who);
        }
    };
    check(defaults, "defaults");
    for (const auto& [id, b] : per_node) check(b, "node " + std::to_string(id));
    if (!(margin >= 0.0)) throw ParameterError("tuning margin must be nonnegative");
}

const char* to_string(NodeAction a) {
    switch (a) {
        case NodeAction::unchanged: return "unchanged";
        case NodeAction::damping: return "damping";
        case NodeAction::inertia: return "inertia";
        case NodeAction::damping_and_inertia: return "damping_and_inertia";
        case NodeAction::infeasible: return "infeasible";
    }
    return "?";
}

namespace {

bool holds(double lhs, double d, double m, double margin) { return lhs - d * d / (2.0 * m) <= -margin; }

}  // namespace

NodeTuning tune_node(const LocalMeasurement& meas, double d, double m, const NodeBounds& bounds, double margin,
                     TunePreference preference) {
    NodeTuning t;
    t.node = meas.node;
    t.lhs = meas.lhs();
    t.d_old = t.d_new = d;
    t.m_old = t.m_new = m;
    if (holds(t.lhs, d, m, margin)) {
        t.satisfied = true;
        return t;
    }
    const double target = t.lhs + margin;  // > 0 here since d^2/2m > 0
    double dn = d;
    double mn = m;
    bool changed_d = false;
    bool changed_m = false;
    if (preference == TunePreference::damping_first) {
        dn = std::sqrt(2.0 * mn * target);
        changed_d = true;
        if (dn > bounds.d_max) {
            dn = std::max(d, bounds.d_max);
            mn = dn * dn / (2.0 * target);
            changed_d = dn != d;
            changed_m = true;
        }
    } else {
        mn = dn * dn / (2.0 * target);
        changed_m = true;
        if (mn < bounds.m_min) {
            mn = std::min(m, bounds.m_min);
            dn = std::sqrt(2.0 * mn * target);
            changed_m = mn != m;
            changed_d = true;
        }
    }
    const bool in_range = dn <= bounds.d_max * (1.0 + 1e-12) && mn >= bounds.m_min * (1.0 - 1e-12);
    if (!in_range) {
        // best effort: both parameters at their limits
        t.d_new = std::max(d, bounds.d_max);
        t.m_new = std::min(m, bounds.m_min);
        t.action = NodeAction::infeasible;
        t.satisfied = holds(t.lhs, t.d_new, t.m_new, margin);
        return t;
    }
    // Rounding may leave the inequality a few ulps short.
    for (int guard = 0; guard < 64 && !holds(t.lhs, dn, mn, margin); ++guard) {
        if (changed_d || !changed_m) {
            dn = std::nextafter(dn, std::numeric_limits<double>::infinity());
        } else {
            mn = std::nextafter(mn, 0.0);
        }
    }
    t.d_new = dn;
    t.m_new = mn;
    t.satisfied = holds(t.lhs, dn, mn, margin);
    if (changed_d && changed_m) {
        t.action = NodeAction::damping_and_inertia;
    } else if (changed_m) {
        t.action = NodeAction::inertia;
    } else {
        t.action = NodeAction::damping;
    }
    if (!t.satisfied) t.action = NodeAction::infeasible;
    return t;
}

std::vector<LocalMeasurement> measure_locally(const Network& net, const Eigen::VectorXd& delta) {
    const AdmittanceMatrix Y = build_admittance(net);
    const Eigen::VectorXd V = net.voltages();
    const Eigen::VectorXd Q = flow_reactive(Y, V, delta);
    std::vector<LocalMeasurement> out;
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
        out.push_back({static_cast<int>(i), Q(i), V(i), Y.Y(i, i).imag()});
    }
    return out;
}

ControlPlan tune_distributed(const std::vector<LocalMeasurement>& measurements, const InterfaceParams& params,
                             const TuneBounds& bounds) {
    bounds.validate();
    ControlPlan plan;
    plan.params = params;
    for (const auto& meas : measurements) {
        const auto& cur = params.at(meas.node);
        NodeTuning t = tune_node(meas, cur.d, cur.m, bounds.for_node(meas.node), bounds.margin, bounds.preference);
        NodeInterface next = cur;
        next.d = t.d_new;
        next.m = t.m_new;
        plan.params.set(next);
        if (!t.satisfied) {
            plan.infeasible_nodes.push_back(t.node);
            plan.log.push_back("node " + std::to_string(t.node) + ": bounds too tight");
        }
        plan.nodes.push_back(t);
    }
    plan.feasible = plan.infeasible_nodes.empty();
    return plan;
}

ControlPlan tune_distributed(const Network& net, const Eigen::VectorXd& delta, const InterfaceParams& params,
                             const TuneBounds& bounds) {
    ControlPlan plan = tune_distributed(measure_locally(net, delta), params, bounds);
    plan.report = certify_lossy(net, delta, plan.params, CertOptions{bounds.margin});
    plan.feasible = plan.feasible && plan.report->stable();
    return plan;
}

BraessDelta braess_delta(const Network& net, int i, int k) {
    const auto idx = net.find_line(i, k);
    if (!idx) throw NetworkError("unknown line (" + std::to_string(i) + "," + std::to_string(k) + ")");
    const Line& line = net.lines[*idx];
    BraessDelta out;
    out.i = i;
    out.k = k;
    if (line.closed()) {
        const double w = net.nodes[static_cast<std::size_t>(i)].voltage *
                         net.nodes[static_cast<std::size_t>(k)].voltage * std::abs(line.admittance());
        out.at_i = w;
        out.at_k = w;
    }
    return out;
}

EquilibriumSolver newton_resolver(Eigen::VectorXd p_set, int ref, std::optional<Eigen::VectorXd> initial) {
    return [p_set = std::move(p_set), ref, initial = std::move(initial)](const Network& net) {
        SolverOptions opts;
        opts.ref = ref;
        opts.initial = initial;
        return solve_equilibrium(build_admittance(net), net.voltages(), p_set, opts);
    };
}

Network apply_switching(const Network& net, const ControlPlan& plan) {
    Network out = net;
    for (const auto& [i, k] : plan.opened_lines) out = set_line_status(out, i, k, LineStatus::open);
    return out;
}

ControlPlan search_line_switching(const Network& net, const InterfaceParams& params, const EquilibriumSolver& solver,
                                  const SwitchingOptions& options) {
    if (options.budget < 0) throw ParameterError("switching budget must be nonnegative");
    ControlPlan plan;
    plan.params = params;
    Network current = net;
    Equilibrium eq = solver(current);
    CertReport rep = certify_lossy(current, eq.delta, params, CertOptions{options.margin});
    plan.equilibrium = eq;
    plan.report = rep;
    if (rep.stable()) {
        plan.feasible = true;
        return plan;
    }

    for (int round = 0; round < options.budget; ++round) {
        struct Candidate {
            std::size_t index;
            double score;
        };
        std::vector<Candidate> candidates;
        for (std::size_t l = 0; l < current.lines.size(); ++l) {
            const Line& line = current.lines[l];
            if (!line.closed()) continue;
            if (!is_connected(set_line_status(current, line.i, line.k, LineStatus::open))) continue;
            candidates.push_back({l, braess_delta(current, line.i, line.k).total()});
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

        bool opened = false;
        for (const auto& c : candidates) {
            const Line& line = current.lines[c.index];
            Network trial = set_line_status(current, line.i, line.k, LineStatus::open);
            std::ostringstream tag;
            tag << "line (" << line.i << "," << line.k << ")";
            Equilibrium trial_eq;
            try {
                trial_eq = solver(trial);
            } catch (const Error& e) {
                plan.log.push_back(tag.str() + " skipped: " + e.what());
                continue;
            }
            const CertReport trial_rep = certify_lossy(trial, trial_eq.delta, params, CertOptions{options.margin});
            if (trial_rep.has_reason("omega_violation")) {
                plan.log.push_back(tag.str() + " skipped: re-solved EP leaves the angle region");
                continue;
            }
            plan.opened_lines.emplace_back(line.i, line.k);
            plan.log.push_back(tag.str() + " opened");
            current = std::move(trial);
            eq = std::move(trial_eq);
            rep = trial_rep;
            opened = true;
            break;
        }
        if (!opened) {
            plan.log.emplace_back("no admissible opening left");
            break;
        }
        if (rep.stable()) break;
    }
    plan.equilibrium = eq;
    plan.report = rep;
    plan.feasible = rep.stable();
    return plan;
}

}  // namespace mugrid
