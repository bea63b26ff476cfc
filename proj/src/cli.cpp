#include "mugrid/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "mugrid/certificates.hpp"
#include "mugrid/error.hpp"
#include "mugrid/kron.hpp"
#include "mugrid/simulate.hpp"
#include "mugrid/spectral.hpp"
#include "mugrid/synth.hpp"

namespace mugrid::cli {

using io::json;

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

json RunManifest::to_json() const {
    json j;
    j["subcommand"] = subcommand;
    j["inputs"] = inputs;
    j["config_digest"] = config_digest;
    j["tool_version"] = tool_version;
    if (wall_time_s) j["wall_time_s"] = *wall_time_s;
    return j;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Common {
    std::string out;
    bool reproducible = false;
};

// Options that only steer where output goes; they stay out of the digest.
const std::set<std::string> kOutputFlags = {"--out", "--csv", "--equilibrium-out", "--summary", "--reproducible",
                                            "--jobs", "--quiet"};

RunManifest make_manifest(const CLI::App& sub, const std::vector<std::string>& inputs, bool reproducible,
                          Clock::time_point start) {
    RunManifest m;
    m.subcommand = sub.get_name();
    m.inputs = inputs;
    std::ostringstream cfg;
    cfg << m.subcommand << '\n';
    std::map<std::string, std::string> opts;
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_name();
        if (opt->count() == 0 || kOutputFlags.count(name) || name == "--help") continue;
        std::string joined;
        for (const auto& r : opt->results()) joined += r + ' ';
        opts[name] = joined;
    }
    for (const auto& [k, v] : opts) cfg << k << '=' << v << '\n';
    for (const auto& path : inputs) cfg << io::read_text_file(path) << '\n';
    m.config_digest = sha256_hex(cfg.str());
    if (!reproducible) m.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    return m;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        io::write_text_file(path, text);
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<int> all_ids(const Network& net) {
    std::vector<int> ids(net.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    return ids;
}

/// Params from --params when given, else from the network file's `interface` key.
InterfaceParams load_params(const std::string& params_path, const json& net_json) {
    if (!params_path.empty()) return io::params_from_json(io::read_json_file(params_path));
    if (net_json.contains("interface")) return io::params_from_json(net_json);
    throw ParameterError("no interface parameters: pass --params or add `interface` to the network file");
}

Eigen::VectorXd load_setpoints(const std::string& path, const Network& net, const InterfaceParams& params) {
    if (!path.empty()) {
        const json j = io::read_json_file(path);
        const Eigen::VectorXd p = io::vector_from_json(j, "p_set");
        if (p.size() != static_cast<Eigen::Index>(net.size())) {
            throw ParameterError("setpoint vector has " + std::to_string(p.size()) + " entries, network has " +
                                 std::to_string(net.size()) + " nodes");
        }
        return p;
    }
    return params.setpoints(all_ids(net));
}

Eigen::VectorXd load_delta(const std::string& path, Eigen::Index n) {
    const Eigen::VectorXd d = io::vector_from_json(io::read_json_file(path), "delta");
    if (d.size() != n) {
        throw ParameterError("angle vector has " + std::to_string(d.size()) + " entries, expected " + std::to_string(n));
    }
    return d;
}

Range parse_range(const std::string& spec, std::string& name) {
    const auto eq = spec.find('=');
    const auto colon = spec.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos) {
        throw ParameterError("range override must look like name=lo:hi, got `" + spec + "`");
    }
    name = spec.substr(0, eq);
    try {
        return {std::stod(spec.substr(eq + 1, colon - eq - 1)), std::stod(spec.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ParameterError("bad numbers in range override `" + spec + "`");
    }
}

int default_jobs() {
    if (const char* env = std::getenv("MUGRID_JOBS")) {
        try {
            const int j = std::stoi(env);
            if (j > 0) return j;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto start = Clock::now();
    CLI::App app{"Small-signal stability certificates for multi-microgrid networks", "mugrid"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "Output file (default: stdout)");
        sub->add_flag("--reproducible", common.reproducible, "Leave wall time out of the manifest");
    };

    std::string net_path, params_path, setpoints_path, eq_path, initial_path, csv_path, bounds_path, summary_path,
        eq_out_path;
    int ref = 0;
    double tol = 1e-10;
    int max_iter = 50;
    bool strict = false;
    bool quiet = false;

    // powerflow
    auto* pf = app.add_subcommand("powerflow", "Solve the equilibrium angles");
    pf->add_option("--net", net_path, "Network JSON")->required();
    pf->add_option("--setpoints", setpoints_path, "Setpoint JSON (array or {p_set: [...]})");
    pf->add_option("--params", params_path, "Interface JSON (setpoints fall back to its p_set)");
    pf->add_option("--ref", ref, "Reference node")->capture_default_str();
    pf->add_option("--tol", tol, "Mismatch tolerance")->capture_default_str();
    pf->add_option("--max-iter", max_iter, "Newton iteration limit")->capture_default_str();
    pf->add_option("--initial", initial_path, "Initial angles JSON");
    add_common(pf);

    // certify
    bool topology_only = false;
    bool structure = false;
    std::vector<int> active_ids;
    double nu_min = 5.0;
    double nu_max = -1.0;
    double margin = 0.0;
    std::string order_name = "descending";
    auto* cert = app.add_subcommand("certify", "Evaluate the stability certificates");
    cert->add_option("--net", net_path, "Network JSON")->required();
    cert->add_option("--equilibrium", eq_path, "Equilibrium JSON with `delta`");
    cert->add_option("--params", params_path, "Interface JSON");
    cert->add_flag("--topology-only", topology_only, "Angle-independent condition");
    cert->add_flag("--structure-preserving", structure, "Certify the Kron-reduced grid");
    cert->add_option("--active", active_ids, "Active node ids (default: nodes tagged active)");
    cert->add_option("--nu-min", nu_min, "Lower |B/G| bound")->capture_default_str();
    cert->add_option("--nu-max", nu_max, "Upper |B/G| bound (default sqrt(1 + 2 nu_min^2))");
    cert->add_option("--order", order_name, "Elimination order: descending, ascending, given")->capture_default_str();
    cert->add_option("--margin", margin, "Safety margin eps")->capture_default_str();
    cert->add_flag("--strict", strict, "Exit 2 when not certified");
    cert->add_flag("--quiet", quiet, "No table on stderr");
    add_common(cert);

    // spectrum
    auto* spec = app.add_subcommand("spectrum", "Eigenvalues of the system Jacobian");
    spec->add_option("--net", net_path, "Network JSON")->required();
    spec->add_option("--equilibrium", eq_path, "Equilibrium JSON with `delta`")->required();
    spec->add_option("--params", params_path, "Interface JSON");
    spec->add_option("--csv", csv_path, "Write eigenvalues as re,im CSV");
    add_common(spec);

    // simulate
    double T = 50.0;
    double dt = 1e-3;
    int record_every = 1;
    double conv_tol = 1e-3;
    auto* sim = app.add_subcommand("simulate", "Integrate the swing equations");
    sim->add_option("--net", net_path, "Network JSON")->required();
    sim->add_option("--params", params_path, "Interface JSON");
    sim->add_option("--setpoints", setpoints_path, "Setpoint JSON");
    sim->add_option("--initial", initial_path, "Initial state JSON {delta, omega}")->required();
    sim->add_option("--T", T, "Horizon (s)")->capture_default_str();
    sim->add_option("--dt", dt, "Step (s)")->capture_default_str();
    sim->add_option("--record-every", record_every, "Keep every k-th step")->capture_default_str();
    sim->add_option("--tol", conv_tol, "Convergence tolerance on |omega|")->capture_default_str();
    sim->add_option("--csv", csv_path, "Trajectory CSV");
    add_common(sim);

    // kron
    std::vector<int> passive_ids;
    bool check_assumptions = false;
    auto* kr = app.add_subcommand("kron", "Kron-reduce passive nodes");
    kr->add_option("--net", net_path, "Network JSON")->required();
    kr->add_option("--passive", passive_ids, "Passive node ids (default: nodes tagged passive)");
    kr->add_flag("--check-assumptions", check_assumptions, "Check sign pattern and |B/G| bounds at every step");
    kr->add_option("--nu-min", nu_min, "Lower |B/G| bound")->capture_default_str();
    kr->add_option("--nu-max", nu_max, "Upper |B/G| bound (default sqrt(1 + 2 nu_min^2))");
    kr->add_option("--order", order_name, "Elimination order: descending, ascending, given")->capture_default_str();
    add_common(kr);

    // tune
    double tune_margin = 0.01;
    bool allow_switching = false;
    int budget = 2;
    auto* tn = app.add_subcommand("tune", "Distributed tuning and line switching");
    tn->add_option("--net", net_path, "Network JSON")->required();
    tn->add_option("--equilibrium", eq_path, "Equilibrium JSON with `delta`")->required();
    tn->add_option("--params", params_path, "Interface JSON");
    tn->add_option("--bounds", bounds_path, "Bounds JSON");
    auto* margin_opt = tn->add_option("--margin", tune_margin, "Safety margin eps")->capture_default_str();
    tn->add_flag("--allow-switching", allow_switching, "Open lines before tuning");
    tn->add_option("--budget", budget, "Maximum lines to open")->capture_default_str();
    tn->add_option("--ref", ref, "Reference node for re-solving")->capture_default_str();
    tn->add_flag("--strict", strict, "Exit 2 when the plan is infeasible");
    add_common(tn);

    // synth
    SynthConfig synth_cfg;
    std::vector<std::string> ranges;
    double edge_prob = -1.0;
    auto* sy = app.add_subcommand("synth", "Generate a random network");
    sy->add_option("--n", synth_cfg.n, "Node count")->capture_default_str();
    sy->add_option("--seed", synth_cfg.seed, "Seed")->capture_default_str();
    sy->add_option("--avg-degree", synth_cfg.avg_degree, "Target average degree")->capture_default_str();
    sy->add_option("--edge-prob", edge_prob, "Edge probability (overrides --avg-degree)");
    sy->add_option("--range", ranges, "Override a range: b, g_ratio, v, delta, d, m as name=lo:hi");
    sy->add_option("--equilibrium-out", eq_out_path, "Also write the seed equilibrium");
    add_common(sy);

    // sweep
    SweepConfig sweep_cfg;
    sweep_cfg.jobs = default_jobs();
    auto* sw = app.add_subcommand("sweep", "Batch generate/solve/tune/certify/eigen-check");
    sw->add_option("--n", sweep_cfg.n, "Node count")->capture_default_str();
    sw->add_option("--cases", sweep_cfg.cases, "Number of cases")->capture_default_str();
    sw->add_option("--seed", sweep_cfg.seed, "Seed")->capture_default_str();
    sw->add_option("--avg-degree", sweep_cfg.avg_degree, "Target average degree")->capture_default_str();
    sw->add_option("--margin", sweep_cfg.bounds.margin, "Tuning margin")->capture_default_str();
    sw->add_option("--bounds", bounds_path, "Bounds JSON");
    sw->add_option("--jobs", sweep_cfg.jobs, "Worker threads (default $MUGRID_JOBS or 1)");
    sw->add_option("--summary", summary_path, "Summary JSON file");
    add_common(sw);

    std::vector<const char*> argv{"mugrid"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << "\n";
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return error;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    auto nu_pair = [&] { return std::make_pair(nu_min, nu_max < 0.0 ? max_nu_max(nu_min) : nu_max); };
    auto order = [&] {
        if (order_name == "descending") return EliminationOrder::descending;
        if (order_name == "ascending") return EliminationOrder::ascending;
        if (order_name == "given") return EliminationOrder::as_given;
        throw ParameterError("unknown elimination order `" + order_name + "`");
    };
    auto inputs = [&] {
        std::vector<std::string> v;
        for (const auto* p : {&net_path, &params_path, &setpoints_path, &eq_path, &initial_path, &bounds_path}) {
            if (!p->empty()) v.push_back(*p);
        }
        return v;
    };

    try {
        if (cmd == "powerflow") {
            const json nj = io::read_json_file(net_path);
            const Network net = io::network_from_json(nj);
            Eigen::VectorXd p_set;
            if (setpoints_path.empty()) {
                p_set = load_params(params_path, nj).setpoints(all_ids(net));
            } else {
                p_set = load_setpoints(setpoints_path, net, {});
            }
            SolverOptions opts;
            opts.ref = ref;
            opts.tol = tol;
            opts.max_iter = max_iter;
            if (!initial_path.empty()) opts.initial = load_delta(initial_path, static_cast<Eigen::Index>(net.size()));
            const AdmittanceMatrix Y = build_admittance(net);
            const Equilibrium eq = solve_equilibrium(Y, net.voltages(), p_set, opts);
            json j = io::equilibrium_to_json(eq, check_omega_region(Y, eq.delta));
            j["manifest"] = make_manifest(*sub, inputs(), common.reproducible, start).to_json();
            emit(common.out, dump(j), out);
            return ok;
        }

        if (cmd == "certify") {
            const json nj = io::read_json_file(net_path);
            const Network net = io::network_from_json(nj);
            const InterfaceParams params = load_params(params_path, nj);
            CertReport rep;
            if (topology_only) {
                rep = certify_topology(net, params, CertOptions{margin});
            } else {
                if (eq_path.empty()) throw ParameterError("certify needs --equilibrium unless --topology-only");
                const Eigen::VectorXd delta = io::vector_from_json(io::read_json_file(eq_path), "delta");
                if (structure) {
                    std::vector<int> active = active_ids.empty() ? net.nodes_of_kind(NodeKind::active) : active_ids;
                    std::sort(active.begin(), active.end());
                    Eigen::VectorXd da;
                    if (delta.size() == static_cast<Eigen::Index>(net.size())) {
                        da.resize(static_cast<Eigen::Index>(active.size()));
                        for (std::size_t a = 0; a < active.size(); ++a) {
                            if (active[a] < 0 || active[a] >= delta.size()) {
                                throw ParameterError("active node " + std::to_string(active[a]) + " out of range");
                            }
                            da(static_cast<Eigen::Index>(a)) = delta(active[a]);
                        }
                    } else {
                        da = delta;
                    }
                    StructureOptions so;
                    std::tie(so.nu_min, so.nu_max) = nu_pair();
                    so.margin = margin;
                    so.order = order();
                    rep = certify_structure_preserving(net, active, params, da, so);
                } else {
                    if (delta.size() != static_cast<Eigen::Index>(net.size())) {
                        throw ParameterError("angle vector size does not match the network");
                    }
                    rep = certify_lossy(net, delta, params, CertOptions{margin});
                }
            }
            json j = io::cert_report_to_json(rep);
            j["manifest"] = make_manifest(*sub, inputs(), common.reproducible, start).to_json();
            emit(common.out, dump(j), out);
            if (!quiet) err << io::cert_table(rep);
            return (strict && !rep.stable()) ? uncertified : ok;
        }

        if (cmd == "spectrum") {
            const json nj = io::read_json_file(net_path);
            const Network net = io::network_from_json(nj);
            const InterfaceParams params = load_params(params_path, nj);
            const Eigen::VectorXd delta = load_delta(eq_path, static_cast<Eigen::Index>(net.size()));
            const auto ids = all_ids(net);
            const Laplacian L = build_laplacian(build_admittance(net), net.voltages(), delta);
            const Spectrum s = eigenvalues(build_jacobian(L, params.inertia(ids), params.damping(ids)));
            const RunManifest manifest = make_manifest(*sub, inputs(), common.reproducible, start);
            if (!csv_path.empty()) {
                std::ostringstream csv;
                csv << "# " << json{{"manifest", manifest.to_json()}}.dump() << "\n";
                io::write_spectrum_csv(csv, s);
                io::write_text_file(csv_path, csv.str());
            }
            json j = io::spectrum_to_json(s, csv_path.empty());
            j["manifest"] = manifest.to_json();
            emit(common.out, dump(j), out);
            return ok;
        }

        if (cmd == "simulate") {
            const json nj = io::read_json_file(net_path);
            const Network net = io::network_from_json(nj);
            const InterfaceParams params = load_params(params_path, nj);
            const Eigen::VectorXd p_set = load_setpoints(setpoints_path, net, params);
            const auto n = static_cast<Eigen::Index>(net.size());
            const json ij = io::read_json_file(initial_path);
            const Eigen::VectorXd delta0 = load_delta(initial_path, n);
            Eigen::VectorXd omega0 = Eigen::VectorXd::Zero(n);
            if (ij.is_object() && ij.contains("omega")) omega0 = io::vector_from_json(ij, "omega");
            if (omega0.size() != n) throw ParameterError("initial omega size does not match the network");
            IntegrateOptions opts;
            opts.T = T;
            opts.dt = dt;
            opts.record_every = record_every;
            const Trajectory traj = integrate(make_swing_model(net, params, p_set), delta0, omega0, opts);
            const Convergence verdict = assess_convergence(traj, conv_tol);
            const RunManifest manifest = make_manifest(*sub, inputs(), common.reproducible, start);
            if (!csv_path.empty()) {
                std::ostringstream csv;
                csv << "# " << json{{"manifest", manifest.to_json()}}.dump() << "\n";
                io::write_trajectory_csv(csv, traj);
                io::write_text_file(csv_path, csv.str());
            }
            json j = io::trajectory_summary_to_json(traj, verdict, conv_tol);
            j["manifest"] = manifest.to_json();
            emit(common.out, dump(j), out);
            return ok;
        }

        if (cmd == "kron") {
            const json nj = io::read_json_file(net_path);
            const Network net = io::network_from_json(nj);
            const std::vector<int> passive = passive_ids.empty() ? net.nodes_of_kind(NodeKind::passive) : passive_ids;
            KronOptions ko;
            ko.order = order();
            if (check_assumptions) ko.nu = nu_pair();
            const AdmittanceMatrix Y = build_admittance(net);
            const KronResult kr_res = kron_reduce(Y, passive, ko);
            std::vector<Node> like;
            std::vector<std::string> names;
            for (int id : kr_res.trace.kept) {
                like.push_back(net.nodes[static_cast<std::size_t>(id)]);
                names.push_back(net.names.empty() ? std::to_string(id) : net.names[static_cast<std::size_t>(id)]);
            }
            Network reduced = network_from_admittance(kr_res.reduced, like);
            reduced.base = net.base;
            reduced.names = names;
            json j;
            if (nj.contains("interface")) {
                const InterfaceParams params = io::params_from_json(nj);
                std::vector<NodeInterface> kept;
                for (std::size_t r = 0; r < kr_res.trace.kept.size(); ++r) {
                    const int id = kr_res.trace.kept[r];
                    if (!params.contains(id)) continue;
                    NodeInterface p = params.at(id);
                    p.id = static_cast<int>(r);
                    kept.push_back(p);
                }
                j = io::network_to_json(reduced, InterfaceParams(kept));
            } else {
                j = io::network_to_json(reduced);
            }
            json trace = io::reduction_trace_to_json(kr_res.trace);
            if (check_assumptions) {
                const auto a1 = check_assumption1(Y);
                const auto [lo, hi] = nu_pair();
                const auto a2 = check_assumption2(Y, lo, hi);
                trace["original"] = {{"assumption1_ok", a1.ok()}, {"assumption2_ok", a2.ok()}};
            }
            j["trace"] = std::move(trace);
            j["manifest"] = make_manifest(*sub, inputs(), common.reproducible, start).to_json();
            emit(common.out, dump(j), out);
            return ok;
        }

        if (cmd == "tune") {
            const json nj = io::read_json_file(net_path);
            const Network net = io::network_from_json(nj);
            const InterfaceParams params = load_params(params_path, nj);
            const Eigen::VectorXd delta = load_delta(eq_path, static_cast<Eigen::Index>(net.size()));
            TuneBounds bounds = bounds_path.empty() ? TuneBounds{} : io::bounds_from_json(io::read_json_file(bounds_path));
            if (margin_opt->count() > 0 || bounds_path.empty()) bounds.margin = tune_margin;
            bounds.validate();

            Network grid = net;
            Eigen::VectorXd at = delta;
            ControlPlan switching;
            if (allow_switching) {
                const Eigen::VectorXd p_set = flow_active(build_admittance(net), net.voltages(), delta);
                SwitchingOptions so;
                so.budget = budget;
                so.margin = bounds.margin;
                switching = search_line_switching(net, params, newton_resolver(p_set, ref, delta), so);
                grid = apply_switching(net, switching);
                if (switching.equilibrium) at = switching.equilibrium->delta;
            }
            ControlPlan plan = tune_distributed(grid, at, params, bounds);
            plan.opened_lines = switching.opened_lines;
            plan.log.insert(plan.log.begin(), switching.log.begin(), switching.log.end());
            plan.equilibrium = equilibrium_at(build_admittance(grid), grid.voltages(), at, ref);
            json j = io::control_plan_to_json(plan);
            j["manifest"] = make_manifest(*sub, inputs(), common.reproducible, start).to_json();
            emit(common.out, dump(j), out);
            return (strict && !plan.feasible) ? uncertified : ok;
        }

        if (cmd == "synth") {
            if (edge_prob >= 0.0) synth_cfg.edge_probability = edge_prob;
            for (const auto& r : ranges) {
                std::string name;
                const Range range = parse_range(r, name);
                static const std::map<std::string, Range SynthConfig::*> fields = {
                    {"b", &SynthConfig::b}, {"g_ratio", &SynthConfig::g_ratio}, {"v", &SynthConfig::v},
                    {"delta", &SynthConfig::delta}, {"d", &SynthConfig::d},    {"m", &SynthConfig::m}};
                auto it = fields.find(name);
                if (it == fields.end()) throw ParameterError("unknown range `" + name + "`");
                synth_cfg.*(it->second) = range;
            }
            const SynthCase c = generate(synth_cfg);
            const RunManifest manifest = make_manifest(*sub, {}, common.reproducible, start);
            json j = io::network_to_json(c.net, c.params);
            j["synth"] = {{"n", synth_cfg.n},
                          {"seed", synth_cfg.seed},
                          {"edge_probability", synth_cfg.edge_prob()},
                          {"diameter", c.diameter},
                          {"attempts", c.attempts},
                          {"seed_delta", io::vector_to_json(c.seed_angles)}};
            j["manifest"] = manifest.to_json();
            emit(common.out, dump(j), out);
            if (!eq_out_path.empty()) {
                const AdmittanceMatrix Y = build_admittance(c.net);
                json ej = io::equilibrium_to_json(equilibrium_at(Y, c.net.voltages(), c.seed_angles),
                                                  check_omega_region(Y, c.seed_angles));
                ej["manifest"] = manifest.to_json();
                io::write_text_file(eq_out_path, dump(ej));
            }
            return ok;
        }

        if (cmd == "sweep") {
            if (!bounds_path.empty()) {
                const double m = sweep_cfg.bounds.margin;
                sweep_cfg.bounds = io::bounds_from_json(io::read_json_file(bounds_path));
                if (sw->get_option("--margin")->count() > 0) sweep_cfg.bounds.margin = m;
            }
            const SweepResult res = run_sweep(sweep_cfg);
            const RunManifest manifest = make_manifest(*sub, inputs(), common.reproducible, start);
            std::ostringstream csv;
            csv << "# " << json{{"manifest", manifest.to_json()}}.dump() << "\n";
            write_sweep_csv(csv, res);
            emit(common.out, csv.str(), out);
            json summary = {{"cases", res.rows.size()},
                            {"failures", res.failures()},
                            {"certified_before", res.certified_before()},
                            {"certified_after", res.certified_after()},
                            {"unsound", res.unsound()},
                            {"manifest", manifest.to_json()}};
            if (!summary_path.empty()) io::write_text_file(summary_path, dump(summary));
            for (const auto& r : res.rows) {
                if (!r.error.empty()) err << "case " << r.index << ": " << r.error << "\n";
            }
            err << "cases " << res.rows.size() << ", failures " << res.failures() << ", certified "
                << res.certified_before() << " -> " << res.certified_after() << ", unsound " << res.unsound() << "\n";
            return ok;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return error;
    }
    err << "error: unknown subcommand\n";
    return error;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace mugrid::cli
