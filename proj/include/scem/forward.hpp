#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "scem/contact.hpp"
#include "scem/mesh.hpp"

namespace scem {

/// Isotropic real conductivity: a constant or a P1 field given by its values
/// at the mesh vertices.
class ConductivityField {
public:
    static ConductivityField constant(double value);
    static ConductivityField nodal(std::vector<double> vertex_values);

    bool is_constant() const { return values_.empty(); }
    double constant_value() const { return constant_; }
    std::span<const double> nodal_values() const { return values_; }

    double at_vertex(Index v) const { return is_constant() ? constant_ : values_[v]; }
    double min_value() const;
    double mean_value() const;
    ConductivityField scaled(double c) const;

    /// Throws ParameterError if the field is not strictly positive or, for
    /// nodal fields, does not match the vertex count.
    void check_against(const Mesh& mesh) const;

private:
    double constant_ = 0.0;
    std::vector<double> values_;
};

/// Exact P1 interpolation of vertex values from level `from` to the nested
/// finer level `to` (same diagonal orientation on both levels).
std::vector<double> prolongate(std::span<const double> values, int from, int to);

/// Net electrode currents; components must sum to zero.
class CurrentPattern {
public:
    explicit CurrentPattern(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const { return values_; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t m) const { return values_[static_cast<Eigen::Index>(m)]; }

    /// e_source - e_sink (0-based electrode indices).
    static CurrentPattern between(std::size_t electrodes, std::size_t source, std::size_t sink);

private:
    Eigen::VectorXd values_;
};

/// e_m - e_M, m = 1..M-1: the basis of zero-mean patterns used for the
/// measurement map and as Jacobian building blocks.
std::vector<CurrentPattern> basis_patterns(std::size_t electrodes);
/// e_M - e_m, m = 1..M-1: the drive patterns of the model-difference and
/// convergence experiments.
std::vector<CurrentPattern> difference_patterns(std::size_t electrodes);

/// How the additive constant of the potential is fixed.
///  ZeroMean      - U is expanded in {e_m - e_M}, so sum(U) = 0 directly.
///  LastElectrode - U_M = 0; the result is shifted to zero mean afterwards.
enum class Grounding { ZeroMean, LastElectrode };

std::string to_string(Grounding g);

struct ForwardSolution {
    Eigen::VectorXd u;  // DOF coefficients
    Eigen::VectorXd U;  // electrode potentials, zero mean
    CurrentPattern pattern;
    Grounding grounding = Grounding::ZeroMean;
    std::shared_ptr<const Mesh> mesh;

    /// Boundary trace of u at reference arclength s.
    double trace(double s) const;
    /// Derivative of the trace with respect to physical arclength.
    double tangential_derivative(double s) const;
};

/// Discrete form B((w,W),(v,V)) = (sigma grad w, grad v) + (zeta (W-w), V-v)
/// restricted to the grounded subspace. Unknowns are the DOFs of u followed
/// by M-1 electrode coefficients c with U = electrode_basis * c. Only the
/// upper triangle of `matrix` is stored.
struct GroundedSystem {
    std::shared_ptr<const Mesh> mesh;
    ConductivityField sigma;
    ConductanceProfile zeta;
    Grounding grounding = Grounding::ZeroMean;
    Eigen::SparseMatrix<double> matrix;
    Eigen::MatrixXd electrode_basis;  // M x (M-1)

    std::size_t dof_count() const { return mesh->dof_count(); }
    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// Number of Gauss points per boundary piece: exact for zeta * basis * basis
/// with piecewise-linear zeta (2 for P1, 3 for P2).
int boundary_gauss_points(int order);

GroundedSystem assemble(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                        const ConductanceProfile& zeta, Grounding grounding = Grounding::ZeroMean);

/// Sparse Cholesky factorization of a grounded system. The factor is
/// immutable after construction; solves are serialized internally.
class ForwardSolver {
public:
    explicit ForwardSolver(GroundedSystem system);
    ForwardSolver(ForwardSolver&&) noexcept;
    ForwardSolver& operator=(ForwardSolver&&) noexcept;
    ~ForwardSolver();

    const GroundedSystem& system() const { return system_; }
    const Mesh& mesh() const { return *system_.mesh; }

    ForwardSolution solve(const CurrentPattern& pattern) const;
    std::vector<ForwardSolution> solve(std::span<const CurrentPattern> patterns) const;

private:
    struct Factor;
    GroundedSystem system_;
    std::unique_ptr<Factor> factor_;
    std::unique_ptr<std::mutex> mutex_;
};

ForwardSolver make_solver(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                          const ConductanceProfile& zeta, Grounding grounding = Grounding::ZeroMean);

/// Current-to-voltage map in the basis {e_m - e_M}: R(n, m) = (e_n - e_M) . U(e_m - e_M).
struct MeasurementMap {
    Eigen::MatrixXd R;
    std::string basis = "e_m - e_M";
};

MeasurementMap measurement_map(const ForwardSolver& solver);
MeasurementMap measurement_map(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                               const ConductanceProfile& zeta);

/// Normal current density nu . sigma grad u on the boundary, evaluated from
/// the Robin identity zeta (U - u).
class BoundaryFlux {
public:
    BoundaryFlux(const ForwardSolution& solution, const ConductanceProfile& zeta);

    double operator()(double s) const;
    /// Integral of the flux over one electrode (0-based index).
    double electrode_current(std::size_t electrode) const;
    /// Integral over the whole boundary.
    double total_current() const;

private:
    const ForwardSolution* solution_;
    const ConductanceProfile* zeta_;
};

BoundaryFlux boundary_flux(const ForwardSolution& solution, const ConductanceProfile& zeta);

/// U_m - u(s) for the electrode m containing s under `zeta`'s layout; 0 on gaps.
double contact_gap(const ForwardSolution& solution, const ElectrodeLayout& layout, double s);
/// U_m - u(s) for a given electrode (0-based), valid on the closed arc.
double contact_gap_on(const ForwardSolution& solution, std::size_t electrode, double s);

}  // namespace scem
