#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scem/contact.hpp"
#include "scem/forward.hpp"
#include "scem/mesh.hpp"
#include "scem/phantom.hpp"

namespace scem {

/// Stacked electrode potentials for K drive patterns: entry j*M + m is the
/// potential of electrode m under pattern j, zero mean within each pattern.
struct MeasurementFrame {
    std::vector<CurrentPattern> patterns;
    Eigen::VectorXd voltages;
    double noise_std = 0.0;        // absolute standard deviation of the added noise
    double relative_noise = 0.0;   // noise_std / (max - min of the clean voltages)
    std::uint64_t seed = 0;
    int level = -1;                // mesh level the data was simulated on, if known
    int order = 1;
    std::string model;             // "box" or "hat", if synthetic

    std::size_t electrode_count() const;
    std::size_t pattern_count() const { return patterns.size(); }
    /// Re-centres every pattern's potentials to zero mean.
    void normalize();
};

/// Unknowns in log form: one value (homogeneous) or one per mesh vertex for
/// the conductivity, and one contact parameter per electrode.
struct ParameterVector {
    Eigen::VectorXd log_sigma;
    Eigen::VectorXd log_zeta;

    static ParameterVector homogeneous(double sigma, std::vector<double> contacts);
    static ParameterVector nodal(std::vector<double> sigma, std::vector<double> contacts);

    bool is_homogeneous() const { return log_sigma.size() == 1; }
    Eigen::Index size() const { return log_sigma.size() + log_zeta.size(); }
    Eigen::VectorXd stacked() const;
    void assign(const Eigen::VectorXd& x);

    ConductivityField conductivity() const;
    std::vector<double> sigma_values() const;
    std::vector<double> contacts() const;
};

/// Mesh and contact model used to predict data.
struct ForwardModel {
    std::shared_ptr<const Mesh> mesh;
    ProfileKind kind = ProfileKind::Box;

    ConductanceProfile profile(const ParameterVector& y) const;
};

/// Predicted stacked potentials.
Eigen::VectorXd simulate(const ForwardModel& model, const ParameterVector& y,
                         const std::vector<CurrentPattern>& patterns);

/// Default drive set: the M-1 independent patterns e_M - e_m.
std::vector<CurrentPattern> default_patterns(std::size_t electrodes);

struct SynthesisConfig {
    Phantom phantom;
    ElectrodeLayout layout = ElectrodeLayout::default16();
    ProfileKind kind = ProfileKind::Box;
    std::vector<double> contacts;   // one per electrode
    int fine_level = 7;
    int order = 1;
    double relative_noise = 0.0;    // std as a fraction of the voltage range
    std::uint64_t seed = 0;
    std::vector<CurrentPattern> patterns;  // empty: default_patterns
};

/// Forward solves on the fine mesh plus independent Gaussian noise with the
/// given relative level; deterministic in the seed.
MeasurementFrame synthesize_data(const SynthesisConfig& config);

/// Adds noise of standard deviation relative_noise * (max - min) to a clean
/// frame and re-centres each pattern.
void add_noise(MeasurementFrame& frame, double relative_noise, std::uint64_t seed);

/// d(predicted potentials) / d(log parameters), rows ordered as the frame.
Eigen::MatrixXd jacobian(const ForwardModel& model, const ParameterVector& y,
                         const std::vector<CurrentPattern>& patterns);

/// Squared-exponential Gaussian random field prior on the conductivity nodes.
struct PriorModel {
    double mean = 0.25;
    double std = 0.25;
    double correlation_length = 0.15;
    double noise_std = 0.0;
    Eigen::MatrixXd whitener;  // upper triangular, G^T G = noise_std^2 C^-1

    Eigen::Index size() const { return whitener.rows(); }
};

/// Correlation length of a 4 cm field in a tank of circumference 106 cm,
/// mapped to the unit square by perimeter ratio.
inline constexpr double kTankCorrelationLength = 4.0 * 4.0 / 106.0;

PriorModel build_prior(const Mesh& mesh, double mean, double std, double correlation_length, double noise_std);

struct LMConfig {
    double initial_damping = 1e-3;  // relative to trace(J^T J) / dim
    double damping_up = 10.0;
    double damping_down = 10.0;
    int max_iterations = 60;
    double gradient_tolerance = 1e-12;  // on |J^T r|_inf relative to the objective
    double step_tolerance = 1e-10;      // on |dx|_inf
    double objective_tolerance = 1e-14; // relative decrease of accepted steps
    double max_damping = 1e16;
};

struct IterationRecord {
    int iteration = 0;
    double data_misfit = 0.0;   // |U(y) - data|^2
    double prior_term = 0.0;    // |G (sigma - mean)|^2
    double lambda = 0.0;
    bool accepted = false;
};

struct LMResult {
    ParameterVector y;
    std::vector<IterationRecord> history;
    bool converged = false;
    std::string stop_reason;
    int iterations = 0;
    double objective = 0.0;
    double data_misfit = 0.0;
    double prior_term = 0.0;
};

struct HomogeneousFit {
    double sigma = 0.0;
    std::vector<double> contacts;
    double relative_discrepancy = 0.0;  // |U(y*) - data| / |data|
    LMResult lm;
};

/// Least-squares fit of one conductivity and M contact parameters.
HomogeneousFit fit_homogeneous(const MeasurementFrame& frame, const ForwardModel& model, double sigma0,
                               double zeta0, const LMConfig& config = {});

struct Reconstruction {
    std::vector<double> sigma;     // nodal, on the reconstruction mesh
    std::vector<double> contacts;
    double relative_discrepancy = 0.0;
    LMResult lm;
};

/// MAP estimate with the Gaussian prior on the nodal conductivity and
/// unregularized contacts. Refuses frames simulated on a mesh less than two
/// levels finer than the reconstruction mesh.
Reconstruction reconstruct_map(const MeasurementFrame& frame, const ForwardModel& model, const PriorModel& prior,
                               const ParameterVector& init, const LMConfig& config = {});

/// Relative L2(Omega) distance between two P1 fields on the same mesh.
double relative_l2_distance(const Mesh& mesh, const std::vector<double>& a, const std::vector<double>& b);

}  // namespace scem
