#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "scem/contact.hpp"
#include "scem/forward.hpp"
#include "scem/inverse.hpp"
#include "scem/mesh.hpp"
#include "scem/phantom.hpp"
#include "scem/study.hpp"

namespace scem::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

Json read_json(const fs::path& path);
/// Pretty-printed with a trailing newline. Doubles round-trip exactly.
void write_json(const fs::path& path, const Json& value);

/// "default8", "default12", "default16", or a JSON file with
/// {"electrodes": [{"arc": [a, b]}, ...]}.
ElectrodeLayout load_layout(const std::string& name_or_path);
ElectrodeLayout layout_from_json(const Json& j);
Json to_json(const ElectrodeLayout& layout);

Json to_json(const Mesh& mesh);

/// {"kind", "electrodes": [{"arc": [a, b], "height": h}]}; custom profiles
/// carry "knots" and "values" per electrode instead of a height.
Json to_json(const ConductanceProfile& profile);
ConductanceProfile profile_from_json(const Json& j);

Json to_json(const ForwardSolution& solution);
Json to_json(const CurrentPattern& pattern);
CurrentPattern pattern_from_json(const Json& j);

Json to_json(const MeasurementFrame& frame);
MeasurementFrame frame_from_json(const Json& j);

Json to_json(const Phantom& phantom);
Phantom phantom_from_json(const Json& j);

/// Prior parameters only; the whitener is rebuilt on the reconstruction mesh.
struct PriorSpec {
    double mean = 0.25;
    double std = 0.25;
    double correlation_length = kTankCorrelationLength;
};
Json to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const Json& j);

// CSV outputs. Every writer overwrites its target.
void write_difference_curve(const fs::path& path, const DifferenceCurve& curve);
void write_scaling_curve(const fs::path& path, const ScalingCurve& curve);
void write_rates(const fs::path& path, const RateTable& table);
void write_deriv_rates(const fs::path& path, const DerivativeTable& table);
/// node, x, y, value for the DOF points of the mesh.
void write_nodal(const fs::path& path, std::span<const Point> points, std::span<const double> values,
                 const std::string& name);
void write_iterations(const fs::path& path, const LMResult& result);
/// Square matrix indexed by basis patterns, header row naming them.
void write_matrix(const fs::path& path, const Eigen::MatrixXd& matrix, const std::string& corner = "pattern");

}  // namespace scem::io
