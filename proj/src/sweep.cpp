#include <algorithm>
#include <atomic>
#include <chrono>
#include <ostream>
#include <thread>

#include "mugrid/certificates.hpp"
#include "mugrid/cli.hpp"
#include "mugrid/error.hpp"
#include "mugrid/spectral.hpp"
#include "mugrid/synth.hpp"

namespace mugrid::cli {

int SweepResult::failures() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); }));
}

int SweepResult::certified_before() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.certified_before; }));
}

int SweepResult::certified_after() const {
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.certified_after; }));
}

int SweepResult::unsound() const {
    return static_cast<int>(
        std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.error.empty() && !r.sound; }));
}

std::uint64_t case_seed(std::uint64_t seed, int index) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::vector<int> all_ids(const Network& net) {
    std::vector<int> ids(net.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    return ids;
}

Spectrum spectrum_of(const Network& net, const Eigen::VectorXd& delta, const InterfaceParams& params) {
    const auto ids = all_ids(net);
    const Laplacian L = build_laplacian(build_admittance(net), net.voltages(), delta);
    return eigenvalues(build_jacobian(L, params.inertia(ids), params.damping(ids)));
}

bool consistent(bool certified, const Spectrum& s) { return !certified || (s.lhp && s.zero_count == 1); }

}  // namespace

SweepRow run_sweep_case(const SweepConfig& cfg, int index) {
    const auto start = std::chrono::steady_clock::now();
    SweepRow row;
    row.index = index;
    row.seed = case_seed(cfg.seed, index);
    row.n = cfg.n;
    try {
        SynthConfig sc;
        sc.n = cfg.n;
        sc.avg_degree = cfg.avg_degree;
        sc.seed = row.seed;
        SynthCase c = generate(sc);
        row.lines = static_cast<int>(c.net.lines.size());
        row.diameter = c.diameter;

        const AdmittanceMatrix Y = build_admittance(c.net);
        const Eigen::VectorXd V = c.net.voltages();
        const Eigen::VectorXd p_set = c.params.setpoints(all_ids(c.net));
        // Newton from a flat start can land on a second EP outside Omega on large grids
        Equilibrium eq;
        try {
            SolverOptions opts;
            opts.initial = c.seed_angles;
            eq = solve_equilibrium(Y, V, p_set, opts);
        } catch (const SolverError&) {
            eq = solve_equilibrium(Y, V, p_set);
        }
        row.in_omega = check_omega_region(Y, eq.delta).in_region;

        const CertReport before = certify_lossy(c.net, eq.delta, c.params);
        const Spectrum s_before = spectrum_of(c.net, eq.delta, c.params);
        row.certified_before = before.stable();
        row.lhp_before = s_before.lhp;
        row.zero_count_before = s_before.zero_count;

        const ControlPlan plan = tune_distributed(c.net, eq.delta, c.params, cfg.bounds);
        row.tuned_nodes = static_cast<int>(std::count_if(plan.nodes.begin(), plan.nodes.end(), [](const auto& t) {
            return t.action != NodeAction::unchanged;
        }));
        row.tune_feasible = plan.feasible;
        const Spectrum s_after = spectrum_of(c.net, eq.delta, plan.params);
        row.certified_after = plan.report && plan.report->stable();
        row.lhp_after = s_after.lhp;
        row.zero_count_after = s_after.zero_count;
        row.max_real_nonzero_after = s_after.max_real_nonzero;
        row.sound = consistent(row.certified_before, s_before) && consistent(row.certified_after, s_after);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    if (cfg.cases < 0) throw ParameterError("sweep: case count must be nonnegative");
    cfg.bounds.validate();
    SweepResult result;
    result.rows.resize(static_cast<std::size_t>(cfg.cases));
    const int jobs = std::max(1, std::min(cfg.jobs, cfg.cases));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < cfg.cases; i = next++) result.rows[static_cast<std::size_t>(i)] = run_sweep_case(cfg, i);
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "case,seed,n,lines,diameter,in_omega,certified_before,lhp_before,zero_count_before,tuned_nodes,"
          "tune_feasible,certified_after,lhp_after,zero_count_after,max_real_nonzero_after,sound,error\n";
    for (const auto& r : result.rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << r.index << ',' << r.seed << ',' << r.n << ',' << r.lines << ',' << r.diameter << ',' << r.in_omega << ','
           << r.certified_before << ',' << r.lhp_before << ',' << r.zero_count_before << ',' << r.tuned_nodes << ','
           << r.tune_feasible << ',' << r.certified_after << ',' << r.lhp_after << ',' << r.zero_count_after << ','
           << io::format_double(r.max_real_nonzero_after) << ',' << r.sound << ',' << err << '\n';
    }
}

}  // namespace mugrid::cli
