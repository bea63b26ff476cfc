#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mugrid/control.hpp"
#include "mugrid/io.hpp"

namespace mugrid::cli {

inline constexpr const char* tool_version = "0.3.1";

enum ExitCode : int { ok = 0, error = 1, uncertified = 2 };

struct RunManifest {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::string config_digest;
    std::string tool_version = cli::tool_version;
    std::optional<double> wall_time_s;

    io::json to_json() const;
};

std::string sha256_hex(const std::string& data);

/// `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

struct SweepConfig {
    int n = 50;
    int cases = 10;
    std::uint64_t seed = 1;
    double avg_degree = 4.0;
    /// Tuning bounds and margin; the sweep certifies the tuned parameters with this margin.
    TuneBounds bounds;
    int jobs = 1;
};

struct SweepRow {
    int index = 0;
    std::uint64_t seed = 0;
    int n = 0;
    int lines = 0;
    int diameter = 0;
    bool in_omega = false;
    bool certified_before = false;
    bool lhp_before = false;
    int zero_count_before = 0;
    int tuned_nodes = 0;
    bool tune_feasible = false;
    bool certified_after = false;
    bool lhp_after = false;
    int zero_count_after = 0;
    double max_real_nonzero_after = 0.0;
    /// certified implies lhp with one zero mode, before and after tuning
    bool sound = false;
    std::string error;
    double seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    int failures() const;
    int certified_before() const;
    int certified_after() const;
    int unsound() const;
};

/// Per-case seed derived from the sweep seed and the case index.
std::uint64_t case_seed(std::uint64_t seed, int index);

/// Runs generate, solve, certify, tune, re-certify and eigen-check per case. Cases run on
/// up to `jobs` threads; rows come back sorted by case index.
SweepResult run_sweep(const SweepConfig& cfg);
SweepRow run_sweep_case(const SweepConfig& cfg, int index);

/// Timing is left out so equal seeds give byte-identical files.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace mugrid::cli
