#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mugrid/certificates.hpp"
#include "mugrid/control.hpp"
#include "mugrid/kron.hpp"
#include "mugrid/netmodel.hpp"
#include "mugrid/powerflow.hpp"
#include "mugrid/simulate.hpp"
#include "mugrid/spectral.hpp"

namespace mugrid::io {

using json = nlohmann::ordered_json;

/// Throws FormatError when the file is missing or not valid JSON.
json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Network file: nodes, lines, base, optional names. The `interface` key is read separately.
Network network_from_json(const json& j);
json network_to_json(const Network& net);
json network_to_json(const Network& net, const InterfaceParams& params);

/// Accepts {"interface": [...]} or a bare array of {id, m, d, p_set}.
InterfaceParams params_from_json(const json& j);
json params_to_json(const InterfaceParams& params);

/// Accepts a bare array or an object holding the array under `key`.
Eigen::VectorXd vector_from_json(const json& j, const std::string& key);
json vector_to_json(const Eigen::VectorXd& v);

json equilibrium_to_json(const Equilibrium& eq, const OmegaCheck& omega);
json spectrum_to_json(const Spectrum& s, bool with_values = true);
json cert_report_to_json(const CertReport& rep);
json control_plan_to_json(const ControlPlan& plan);
json reduction_trace_to_json(const ReductionTrace& trace);
json trajectory_summary_to_json(const Trajectory& traj, Convergence verdict, double tol);

/// Reads {defaults: {...}, nodes: [{id, ...}], margin, preference}.
TuneBounds bounds_from_json(const json& j);

/// Fixed-width table: node, lhs, rhs, S_i, satisfied.
std::string cert_table(const CertReport& rep);

/// Header `re,im`, one eigenvalue per row.
void write_spectrum_csv(std::ostream& os, const Spectrum& s);
/// Header `t,delta_0..delta_{n-1},omega_0..omega_{n-1}`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

}  // namespace mugrid::io
