#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "scem/contact.hpp"
#include "scem/forward.hpp"
#include "scem/mesh.hpp"
#include "scem/shapederiv.hpp"

namespace scem {

/// Runs f(0..n-1) on up to `threads` workers. Results are stored by input
/// index, so the output never depends on the schedule. The first exception
/// (by index) is rethrown after all workers finish.
template <class F>
auto parallel_map(std::size_t n, std::size_t threads, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<std::unique_ptr<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::size_t next = 0;
    std::mutex lock;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> g(lock);
                if (next >= n) return;
                i = next++;
            }
            try {
                slots[i] = std::make_unique<R>(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// Logarithmically spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Electrode potentials for each drive pattern.
using PotentialSet = std::vector<Eigen::VectorXd>;

PotentialSet electrode_potentials(const ForwardSolver& solver, std::span<const CurrentPattern> patterns);

/// sqrt(sum |U_m - V_m|^2) / sqrt(sum |V_m|^2).
double relative_difference(const PotentialSet& U, const PotentialSet& reference);

/// Relative difference of the hat-model potentials against the box-model
/// potentials for the drive patterns e_M - e_m.
double relative_difference(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                           const ConductanceProfile& zeta_box, const ConductanceProfile& zeta_hat);

struct ScalingOptions {
    double lower_factor = 0.1;      // bracket [lower * zeta, upper * zeta]
    double upper_factor = 100.0;
    double relative_tolerance = 1e-4;
    double widen_factor = 10.0;     // applied once on the side where the optimum sits
};

struct ScalingResult {
    double zeta_box = 0.0;
    double zeta_hat = 0.0;          // optimal half-height
    double difference = 0.0;        // minimized relative difference
    double default_difference = 0.0;  // at zeta_hat = zeta_box
    int evaluations = 0;
    bool widened = false;
    bool at_bracket_edge = false;   // still on an edge after widening
};

/// Golden-section search over log(zeta_hat) for the half-height minimizing
/// the difference to the box model with height `zeta_box` (same on every
/// electrode).
ScalingResult optimize_scaling(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma, double zeta_box,
                               const ScalingOptions& options = {});

struct SweepFailure {
    double ratio = 0.0;
    std::string message;
};

struct DifferenceSample {
    double ratio = 0.0;  // sigma / zeta
    double difference = 0.0;
};

struct DifferenceCurve {
    std::vector<DifferenceSample> samples;
    std::vector<SweepFailure> failures;
    int level = 0;
    std::string models = "hat-vs-box";
};

struct ScalingSample {
    double ratio = 0.0;  // sigma / zeta_box
    ScalingResult result;
};

struct ScalingCurve {
    std::vector<ScalingSample> samples;
    std::vector<SweepFailure> failures;
    int level = 0;
};

/// Equal-parameter difference over sigma/zeta ratios with constant sigma.
DifferenceCurve difference_sweep(std::shared_ptr<const Mesh> mesh, double sigma, std::span<const double> ratios,
                                 std::size_t threads = 1);

/// Optimal hat scaling over sigma/zeta ratios with constant sigma.
ScalingCurve scaling_sweep(std::shared_ptr<const Mesh> mesh, double sigma, std::span<const double> ratios,
                           const ScalingOptions& options = {}, std::size_t threads = 1);

/// Conductivity for a given mesh (constant, or a phantom resampled per level).
using ConductivityProvider = std::function<ConductivityField(const Mesh&)>;

ConductivityProvider constant_conductivity(double sigma);

/// One model/order/parameter combination of a convergence study.
struct ConvergenceCase {
    std::string label;  // free text identifying the parameter set
    std::string model;  // "box" or "hat"
    int order = 1;
    ConductanceProfile zeta;
    ConductivityProvider sigma;
};

struct RateRow {
    std::string label;
    std::string model;
    int order = 1;
    int level = 0;
    double h = 0.0;
    double error = 0.0;
};

struct RateFit {
    std::string label;
    std::string model;
    int order = 1;
    double slope = 0.0;
    int first_level = 0;
    int last_level = 0;
};

struct RateTable {
    std::vector<RateRow> rows;
    std::vector<RateFit> fits;
    int reference_level = 0;

    const RateFit& fit(const std::string& label, const std::string& model, int order) const;
    std::vector<RateRow> series(const std::string& label, const std::string& model, int order) const;
};

struct DerivativeRow {
    std::string label;
    std::string model;
    int level = 0;
    double h = 0.0;
    std::array<double, 3> delta{};
};

struct DerivativeTable {
    std::vector<DerivativeRow> rows;
    int reference_level = 0;

    std::vector<DerivativeRow> series(const std::string& label, const std::string& model) const;
};

struct ConvergenceResult {
    RateTable rates;
    DerivativeTable derivatives;  // only P1 cases
};

struct ConvergenceOptions {
    std::vector<int> levels;
    int reference_level = 0;
    bool derivatives = false;
    std::size_t fit_points = 4;
    std::size_t threads = 1;
    /// Called after each finished case (index, total) for progress reporting.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Error of U against the reference level for every case and level, and
/// optionally the relative errors of the three derivative integrals, from a
/// single set of forward solves. Drive patterns are e_M - e_m.
ConvergenceResult convergence_suite(const ElectrodeLayout& layout, std::span<const ConvergenceCase> cases,
                                    const ConvergenceOptions& options);

RateTable convergence_study(const ElectrodeLayout& layout, std::span<const ConvergenceCase> cases,
                            std::vector<int> levels, int reference_level, std::size_t threads = 1);

DerivativeTable derivative_convergence(const ElectrodeLayout& layout, std::span<const ConvergenceCase> cases,
                                       std::vector<int> levels, int reference_level, std::size_t threads = 1);

/// Least-squares slope of log(error) against log(h) over the last `points`
/// rows (finest levels).
double fitted_slope(std::span<const RateRow> series, std::size_t points);

/// Relative error over pattern pairs n <= m, as used for the derivative
/// integrals.
double lower_triangle_relative_error(const Eigen::MatrixXd& value, const Eigen::MatrixXd& reference);

}  // namespace scem
