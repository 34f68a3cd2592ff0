#pragma once

#include <functional>
#include <span>

#include <Eigen/Dense>

#include "scem/contact.hpp"
#include "scem/forward.hpp"

namespace scem {

using BoundaryFunction = std::function<double(double)>;

/// Boundary perturbation h split into its normal component h.nu and its
/// signed tangential magnitude along the counter-clockwise tangent.
struct PerturbationField {
    BoundaryFunction normal;
    BoundaryFunction tangential;

    static PerturbationField zero();
    /// h_nu = 1 and h_tau = 1 everywhere.
    static PerturbationField unit();
    /// Pure tangential translation of one electrode's support.
    static PerturbationField electrode_shift(const ElectrodeLayout& layout, std::size_t electrode);
    /// Boundary trace of the map (x, y) -> (x, (1 + eps) y), divided by eps.
    static PerturbationField vertical_stretch();

    PerturbationField operator+(const PerturbationField& other) const;
    PerturbationField operator*(double c) const;
};

/// Sum of principal curvatures; zero on the open sides of the square.
struct CurvatureField {
    BoundaryFunction kappa;

    static CurvatureField flat();
};

/// The three boundary integrals of the derivative sampling formula over all
/// pattern pairs, each an (K x K) symmetric matrix.
struct DerivativeIntegrals {
    Eigen::MatrixXd I1;  // zeta^2 (U - u)(U~ - u~)
    Eigen::MatrixXd I2;  // zeta' (U - u)(U~ - u~), with endpoint masses for boxes
    Eigen::MatrixXd I3;  // tangential derivatives of the traces
};

/// Integral of zeta^2 (U^a - u^a)(U^b - u^b) over the boundary.
double integral_I1(const ForwardSolution& a, const ForwardSolution& b, const ConductanceProfile& zeta);
/// Integral of the arclength derivative of zeta against the same product; for
/// a box profile the point masses evaluate the FEM trace at the endpoints.
double integral_I2(const ForwardSolution& a, const ForwardSolution& b, const ConductanceDerivative& zeta_dot);
/// Integral of the product of tangential derivatives of the two traces.
double integral_I3(const ForwardSolution& a, const ForwardSolution& b);

DerivativeIntegrals derivative_integrals(std::span<const ForwardSolution> solutions, const ConductanceProfile& zeta);

/// U'[h] . I~ assembled from the solutions for I and I~. The first term uses
/// the boundary flux from the Robin identity.
double shape_derivative(const ForwardSolution& sol, const ForwardSolution& sol_tilde, const ConductanceProfile& zeta,
                        const ConductanceDerivative& zeta_dot, const PerturbationField& h,
                        const CurvatureField& kappa, const ConductivityField& sigma);

/// Same value with the first term written as h_nu zeta (zeta / sigma - kappa)
/// (U - u)(U~ - u~), which is symmetric in the two solutions.
double shape_derivative_symmetric(const ForwardSolution& sol, const ForwardSolution& sol_tilde,
                                  const ConductanceProfile& zeta, const ConductanceDerivative& zeta_dot,
                                  const PerturbationField& h, const CurvatureField& kappa,
                                  const ConductivityField& sigma);

/// Derivative of the measurement map: entry (n, m) is U'[h](e_m - e_M) . (e_n - e_M).
Eigen::MatrixXd measurement_map_derivative(const ForwardSolver& solver, const PerturbationField& h,
                                           const CurvatureField& kappa);

}  // namespace scem
