#include "mugrid/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "mugrid/error.hpp"

namespace mugrid::io {

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw FormatError("expected a number, got " + j.dump());
}

json ids_to_json(const std::vector<int>& ids) { return json(ids); }

}  // namespace

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
    if (!out) throw FormatError("write failed for " + path);
}

Network network_from_json(const json& j) {
    try {
        Network net;
        if (!j.contains("nodes") || !j.at("nodes").is_array()) throw FormatError("network: missing `nodes` array");
        for (const auto& jn : j.at("nodes")) {
            Node node;
            node.id = jn.at("id").get<int>();
            const auto kind = get_or<std::string>(jn, "kind", "active");
            if (kind == "active") {
                node.kind = NodeKind::active;
            } else if (kind == "passive") {
                node.kind = NodeKind::passive;
            } else {
                throw FormatError("network: unknown node kind `" + kind + "`");
            }
            node.voltage = get_or<double>(jn, "voltage", 1.0);
            if (!(node.voltage > 0.0)) {
                throw FormatError("network: node " + std::to_string(node.id) + " needs a positive voltage");
            }
            if (jn.contains("shunt")) {
                const auto& s = jn.at("shunt");
                node.shunt = {get_or<double>(s, "g", 0.0), get_or<double>(s, "b", 0.0)};
            }
            net.nodes.push_back(node);
        }
        std::sort(net.nodes.begin(), net.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
        for (const auto& jl : get_or<json>(j, "lines", json::array())) {
            Line line;
            line.i = jl.at("i").get<int>();
            line.k = jl.at("k").get<int>();
            line.g = get_or<double>(jl, "g", 0.0);
            line.b = get_or<double>(jl, "b", 0.0);
            const auto status = get_or<std::string>(jl, "status", "closed");
            if (status == "closed") {
                line.status = LineStatus::closed;
            } else if (status == "open") {
                line.status = LineStatus::open;
            } else {
                throw FormatError("network: unknown line status `" + status + "`");
            }
            net.lines.push_back(line);
        }
        if (j.contains("base")) {
            net.base.p_mw = get_or<double>(j.at("base"), "p_mw", 100.0);
            net.base.v_kv = get_or<double>(j.at("base"), "v_kv", 1.0);
        }
        if (j.contains("names")) net.names = j.at("names").get<std::vector<std::string>>();
        build_admittance(net);  // id and duplicate checks
        return net;
    } catch (const json::exception& e) {
        throw FormatError(std::string("network: ") + e.what());
    }
}

json network_to_json(const Network& net) {
    json j;
    json nodes = json::array();
    for (const auto& n : net.nodes) {
        nodes.push_back({{"id", n.id},
                         {"kind", n.kind == NodeKind::active ? "active" : "passive"},
                         {"voltage", n.voltage},
                         {"shunt", {{"g", n.shunt.real()}, {"b", n.shunt.imag()}}}});
    }
    json lines = json::array();
    for (const auto& l : net.lines) {
        lines.push_back(
            {{"i", l.i}, {"k", l.k}, {"g", l.g}, {"b", l.b}, {"status", l.closed() ? "closed" : "open"}});
    }
    j["nodes"] = std::move(nodes);
    j["lines"] = std::move(lines);
    j["base"] = {{"p_mw", net.base.p_mw}, {"v_kv", net.base.v_kv}};
    if (!net.names.empty()) j["names"] = net.names;
    return j;
}

json network_to_json(const Network& net, const InterfaceParams& params) {
    json j = network_to_json(net);
    j["interface"] = params_to_json(params);
    return j;
}

InterfaceParams params_from_json(const json& j) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("interface")) throw FormatError("params: missing `interface` array");
        arr = &j.at("interface");
    }
    if (!arr->is_array()) throw FormatError("params: `interface` must be an array");
    try {
        std::vector<NodeInterface> entries;
        for (const auto& e : *arr) {
            NodeInterface p;
            p.id = e.at("id").get<int>();
            p.m = e.at("m").get<double>();
            p.d = e.at("d").get<double>();
            p.p_set = get_or<double>(e, "p_set", 0.0);
            entries.push_back(p);
        }
        return InterfaceParams(std::move(entries));
    } catch (const json::exception& e) {
        throw FormatError(std::string("params: ") + e.what());
    }
}

json params_to_json(const InterfaceParams& params) {
    json arr = json::array();
    for (const auto& p : params.entries()) {
        arr.push_back({{"id", p.id}, {"m", p.m}, {"d", p.d}, {"p_set", p.p_set}});
    }
    return arr;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& key) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains(key)) throw FormatError("missing `" + key + "` array");
        arr = &j.at(key);
    }
    if (!arr->is_array()) throw FormatError("`" + key + "` must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr->size()));
    for (std::size_t i = 0; i < arr->size(); ++i) v(static_cast<Eigen::Index>(i)) = read_number((*arr)[i]);
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v(i)));
    return arr;
}

json equilibrium_to_json(const Equilibrium& eq, const OmegaCheck& omega) {
    json j;
    j["delta"] = vector_to_json(eq.delta);
    j["omega"] = vector_to_json(eq.omega);
    j["residual"] = number(eq.residual);
    j["in_omega"] = omega.in_region;
    j["phi_margin"] = number(omega.worst_margin);
    j["ref"] = eq.ref;
    j["iterations"] = eq.iterations;
    j["slack_mismatch"] = number(eq.slack_mismatch);
    j["balanced_setpoints"] = vector_to_json(eq.balanced_setpoints);
    return j;
}

json spectrum_to_json(const Spectrum& s, bool with_values) {
    json j;
    j["zero_count"] = s.zero_count;
    j["lhp"] = s.lhp;
    j["max_real_nonzero"] = number(s.max_real_nonzero);
    j["tol_zero"] = number(s.tol_zero);
    j["spectral_radius"] = number(s.spectral_radius);
    j["conjugate_mismatch"] = number(s.conjugate_mismatch);
    if (with_values) {
        json vals = json::array();
        for (const auto& z : s.values) vals.push_back({number(z.real()), number(z.imag())});
        j["eigenvalues"] = std::move(vals);
    }
    return j;
}

json cert_report_to_json(const CertReport& rep) {
    json j;
    j["verdict"] = to_string(rep.verdict);
    j["which_condition"] = to_string(rep.which_condition);
    j["margin"] = rep.margin;
    json nodes = json::array();
    for (const auto& c : rep.nodes) {
        nodes.push_back({{"node", c.node},
                         {"lhs", number(c.lhs)},
                         {"rhs", number(c.rhs)},
                         {"index", number(c.index)},
                         {"satisfied", c.satisfied}});
    }
    j["nodes"] = std::move(nodes);
    j["reasons"] = rep.reasons;
    j["offending"] = ids_to_json(rep.offending);
    j["shunt_flipped"] = ids_to_json(rep.shunt_flipped);
    if (rep.omega) {
        j["omega"] = {{"in_region", rep.omega->in_region}, {"worst_margin", number(rep.omega->worst_margin)}};
    }
    if (!rep.assumption_violations.empty()) {
        json v = json::array();
        for (const auto& a : rep.assumption_violations) {
            v.push_back({{"i", a.i}, {"k", a.k}, {"what", a.what}, {"value", number(a.value)}});
        }
        j["assumption_violations"] = std::move(v);
    }
    if (rep.reduced_certified) j["reduced_certified"] = *rep.reduced_certified;
    return j;
}

json control_plan_to_json(const ControlPlan& plan) {
    json j;
    j["feasible"] = plan.feasible;
    json nodes = json::array();
    for (const auto& t : plan.nodes) {
        nodes.push_back({{"node", t.node},
                         {"lhs", number(t.lhs)},
                         {"d_old", t.d_old},
                         {"m_old", t.m_old},
                         {"d_new", t.d_new},
                         {"m_new", t.m_new},
                         {"action", to_string(t.action)},
                         {"satisfied", t.satisfied}});
    }
    j["nodes"] = std::move(nodes);
    json lines = json::array();
    for (const auto& [i, k] : plan.opened_lines) lines.push_back({i, k});
    j["opened_lines"] = std::move(lines);
    j["infeasible_nodes"] = ids_to_json(plan.infeasible_nodes);
    j["interface"] = params_to_json(plan.params);
    if (plan.equilibrium) j["delta"] = vector_to_json(plan.equilibrium->delta);
    if (plan.report) j["report"] = cert_report_to_json(*plan.report);
    j["log"] = plan.log;
    return j;
}

json reduction_trace_to_json(const ReductionTrace& trace) {
    json j;
    j["eliminated"] = ids_to_json(trace.eliminated);
    j["kept"] = ids_to_json(trace.kept);
    j["assumptions_ok"] = trace.assumptions_ok();
    j["monotone"] = trace.monotone();
    json steps = json::array();
    for (const auto& s : trace.steps) {
        json js;
        js["eliminated"] = s.eliminated;
        js["assumption1_ok"] = s.assumption1_ok;
        js["assumption2_ok"] = s.assumption2_ok;
        json viol = json::array();
        for (const auto& v : s.violations) {
            viol.push_back({{"i", v.i}, {"k", v.k}, {"what", v.what}, {"value", number(v.value)}});
        }
        js["violations"] = std::move(viol);
        json mono = json::array();
        for (const auto& e : s.monotonicity.entries) {
            mono.push_back({{"node", e.node}, {"b_before", e.b_before}, {"b_after", e.b_after}, {"ok", e.ok}});
        }
        js["monotonicity"] = std::move(mono);
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    return j;
}

json trajectory_summary_to_json(const Trajectory& traj, Convergence verdict, double tol) {
    json j;
    j["classification"] = to_string(verdict);
    j["tolerance"] = tol;
    j["horizon"] = traj.horizon;
    j["dt"] = traj.dt;
    j["samples"] = traj.samples();
    j["diverged"] = traj.diverged;
    j["divergence_step"] = traj.divergence_step ? json(*traj.divergence_step) : json(nullptr);
    if (!traj.omega.empty()) {
        j["final_omega_inf"] = number(traj.omega.back().cwiseAbs().maxCoeff());
        j["final_delta"] = vector_to_json(traj.delta.back());
        j["final_omega"] = vector_to_json(traj.omega.back());
    }
    return j;
}

TuneBounds bounds_from_json(const json& j) {
    auto node_bounds = [](const json& jb, NodeBounds b) {
        b.d_min = get_or<double>(jb, "d_min", b.d_min);
        b.d_max = get_or<double>(jb, "d_max", b.d_max);
        b.m_min = get_or<double>(jb, "m_min", b.m_min);
        b.m_max = get_or<double>(jb, "m_max", b.m_max);
        return b;
    };
    try {
        TuneBounds out;
        if (j.contains("defaults")) out.defaults = node_bounds(j.at("defaults"), out.defaults);
        for (const auto& jn : get_or<json>(j, "nodes", json::array())) {
            out.per_node[jn.at("id").get<int>()] = node_bounds(jn, out.defaults);
        }
        out.margin = get_or<double>(j, "margin", out.margin);
        const auto pref = get_or<std::string>(j, "preference", "damping_first");
        if (pref == "damping_first") {
            out.preference = TunePreference::damping_first;
        } else if (pref == "inertia_first") {
            out.preference = TunePreference::inertia_first;
        } else {
            throw FormatError("bounds: unknown preference `" + pref + "`");
        }
        out.validate();
        return out;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bounds: ") + e.what());
    }
}

std::string cert_table(const CertReport& rep) {
    std::ostringstream os;
    os << std::left << std::setw(6) << "node" << std::right << std::setw(14) << "lhs" << std::setw(14) << "rhs"
       << std::setw(14) << "S_i" << "  satisfied\n";
    os << std::setprecision(6) << std::fixed;
    for (const auto& c : rep.nodes) {
        os << std::left << std::setw(6) << c.node << std::right << std::setw(14) << c.lhs << std::setw(14) << c.rhs
           << std::setw(14) << c.index << "  " << (c.satisfied ? "yes" : "no") << "\n";
    }
    os << "verdict: " << to_string(rep.verdict) << " (" << to_string(rep.which_condition) << ")";
    for (const auto& r : rep.reasons) os << " " << r;
    os << "\n";
    return os.str();
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "re,im\n";
    for (const auto& z : s.values) os << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const auto n = traj.delta.empty() ? 0 : traj.delta.front().size();
    os << 't';
    for (Eigen::Index i = 0; i < n; ++i) os << ",delta_" << i;
    for (Eigen::Index i = 0; i < n; ++i) os << ",omega_" << i;
    os << '\n';
    for (std::size_t s = 0; s < traj.t.size(); ++s) {
        os << format_double(traj.t[s]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(traj.delta[s](i));
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(traj.omega[s](i));
        os << '\n';
    }
}

}  // namespace mugrid::io
