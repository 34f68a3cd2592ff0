#include "scem/shapederiv.hpp"

#include <algorithm>
#include <cmath>

#include "scem/errors.hpp"
#include "scem/quadrature.hpp"

namespace scem {

PerturbationField PerturbationField::zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

PerturbationField PerturbationField::unit() {
    return {[](double) { return 1.0; }, [](double) { return 1.0; }};
}

PerturbationField PerturbationField::electrode_shift(const ElectrodeLayout& layout, std::size_t electrode) {
    const Arc arc = layout.arc(electrode);
    return {[](double) { return 0.0; },
            [arc](double s) { return (s >= arc.begin && s <= arc.end) ? 1.0 : 0.0; }};
}

PerturbationField PerturbationField::vertical_stretch() {
    // Top side moves outward; the vertical sides slide along themselves.
    return {[](double s) { return (s >= 2.0 && s < 3.0) ? 1.0 : 0.0; },
            [](double s) {
                if (s >= 1.0 && s < 2.0) return s - 1.0;
                if (s >= 3.0 && s < 4.0) return -(4.0 - s);
                return 0.0;
            }};
}

PerturbationField PerturbationField::operator+(const PerturbationField& other) const {
    return {[a = normal, b = other.normal](double s) { return a(s) + b(s); },
            [a = tangential, b = other.tangential](double s) { return a(s) + b(s); }};
}

PerturbationField PerturbationField::operator*(double c) const {
    return {[a = normal, c](double s) { return c * a(s); }, [a = tangential, c](double s) { return c * a(s); }};
}

CurvatureField CurvatureField::flat() {
    return {[](double) { return 0.0; }};
}

namespace {

void require_same_mesh(const ForwardSolution& a, const ForwardSolution& b) {
    if (!a.mesh || !b.mesh) throw ContractError("forward solution without a mesh");
    if (a.mesh != b.mesh &&
        (a.mesh->level() != b.mesh->level() || a.mesh->order() != b.mesh->order() ||
         a.mesh->dof_count() != b.mesh->dof_count() || a.u.size() != b.u.size())) {
        throw ContractError("solutions live on different meshes");
    }
}

void require_layout(const ForwardSolution& a, const ElectrodeLayout& layout) {
    if (static_cast<std::size_t>(a.U.size()) != layout.size()) {
        throw ContractError("profile and solution have different electrode counts");
    }
}

std::vector<double> merged_knots(const ConductanceDerivative& d) {
    std::vector<double> out;
    for (std::size_t m = 0; m < d.layout().size(); ++m) {
        const auto k = d.knots(m);
        out.insert(out.end(), k.begin(), k.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double gap_at(const ForwardSolution& sol, std::size_t electrode, double s) {
    return contact_gap_on(sol, electrode, s);
}

// Conductivity restricted to a boundary edge, linear between its vertices.
double boundary_sigma(const ForwardSolution& sol, const ConductivityField& sigma, const BoundaryQuadPoint& q) {
    if (sigma.is_constant()) return sigma.constant_value();
    const BoundaryEdge& e = sol.mesh->boundary_edges()[q.edge];
    return (1.0 - q.t) * sigma.at_vertex(e.vertices[0]) + q.t * sigma.at_vertex(e.vertices[1]);
}

// Electrode terms shared by the two forms: the tangential piece, and the
// gradient piece over the whole boundary.
double tangential_and_gradient_terms(const ForwardSolution& sol, const ForwardSolution& sol_tilde,
                                     const ConductanceDerivative& zeta_dot, const PerturbationField& h,
                                     const ConductivityField& sigma, int gauss) {
    const Mesh& mesh = *sol.mesh;
    const ElectrodeLayout& layout = zeta_dot.layout();
    const std::vector<double> knots = merged_knots(zeta_dot);
    double tangential = 0.0;
    double gradient = 0.0;
    for_each_boundary_point(mesh, knots, gauss, [&](const BoundaryQuadPoint& q) {
        const double hn = h.normal(q.s);
        if (hn != 0.0) {
            gradient += q.weight * hn * boundary_sigma(sol, sigma, q) * sol.tangential_derivative(q.s) *
                        sol_tilde.tangential_derivative(q.s);
        }
        const auto m = layout.electrode_at(q.s);
        if (!m) return;
        const double ht = h.tangential(q.s);
        if (ht == 0.0) return;
        tangential += q.weight * ht * zeta_dot.slope(q.s) * gap_at(sol, *m, q.s) * gap_at(sol_tilde, *m, q.s);
    });
    for (const DeltaWeight& d : zeta_dot.deltas()) {
        const double ht = h.tangential(d.s);
        if (ht == 0.0) continue;
        tangential += ht * d.weight * gap_at(sol, d.electrode, d.s) * gap_at(sol_tilde, d.electrode, d.s);
    }
    return tangential - gradient;
}

int shape_gauss_points(const Mesh& mesh) { return mesh.order() + 3; }

}  // namespace

double integral_I1(const ForwardSolution& a, const ForwardSolution& b, const ConductanceProfile& zeta) {
    require_same_mesh(a, b);
    require_layout(a, zeta.layout());
    double sum = 0.0;
    for_each_boundary_point(*a.mesh, zeta.breakpoints(), a.mesh->order() + 2, [&](const BoundaryQuadPoint& q) {
        const auto m = zeta.layout().electrode_at(q.s);
        if (!m) return;
        const double z = zeta.eval(q.s);
        if (z == 0.0) return;
        sum += q.weight * z * z * gap_at(a, *m, q.s) * gap_at(b, *m, q.s);
    });
    return sum;
}

double integral_I2(const ForwardSolution& a, const ForwardSolution& b, const ConductanceDerivative& zeta_dot) {
    require_same_mesh(a, b);
    require_layout(a, zeta_dot.layout());
    const ElectrodeLayout& layout = zeta_dot.layout();
    double sum = 0.0;
    for_each_boundary_point(*a.mesh, merged_knots(zeta_dot), a.mesh->order() + 1, [&](const BoundaryQuadPoint& q) {
        const auto m = layout.electrode_at(q.s);
        if (!m) return;
        const double slope = zeta_dot.slope(q.s);
        if (slope == 0.0) return;
        sum += q.weight * slope * gap_at(a, *m, q.s) * gap_at(b, *m, q.s);
    });
    for (const DeltaWeight& d : zeta_dot.deltas()) {
        sum += d.weight * gap_at(a, d.electrode, d.s) * gap_at(b, d.electrode, d.s);
    }
    return sum;
}

double integral_I3(const ForwardSolution& a, const ForwardSolution& b) {
    require_same_mesh(a, b);
    double sum = 0.0;
    const std::vector<double> none;
    for_each_boundary_point(*a.mesh, none, std::max(1, a.mesh->order()), [&](const BoundaryQuadPoint& q) {
        sum += q.weight * a.tangential_derivative(q.s) * b.tangential_derivative(q.s);
    });
    return sum;
}

DerivativeIntegrals derivative_integrals(std::span<const ForwardSolution> solutions, const ConductanceProfile& zeta) {
    const auto K = static_cast<Eigen::Index>(solutions.size());
    const ConductanceDerivative zeta_dot = arclength_derivative(zeta);
    DerivativeIntegrals out{Eigen::MatrixXd::Zero(K, K), Eigen::MatrixXd::Zero(K, K), Eigen::MatrixXd::Zero(K, K)};
    for (Eigen::Index m = 0; m < K; ++m) {
        const ForwardSolution& a = solutions[static_cast<std::size_t>(m)];
        for (Eigen::Index n = 0; n <= m; ++n) {
            const ForwardSolution& b = solutions[static_cast<std::size_t>(n)];
            out.I1(m, n) = out.I1(n, m) = integral_I1(a, b, zeta);
            out.I2(m, n) = out.I2(n, m) = integral_I2(a, b, zeta_dot);
            out.I3(m, n) = out.I3(n, m) = integral_I3(a, b);
        }
    }
    return out;
}

double shape_derivative(const ForwardSolution& sol, const ForwardSolution& sol_tilde, const ConductanceProfile& zeta,
                        const ConductanceDerivative& zeta_dot, const PerturbationField& h,
                        const CurvatureField& kappa, const ConductivityField& sigma) {
    require_same_mesh(sol, sol_tilde);
    require_layout(sol, zeta.layout());
    const int gauss = shape_gauss_points(*sol.mesh);
    const BoundaryFlux flux(sol, zeta);
    double normal = 0.0;
    for_each_boundary_point(*sol.mesh, zeta.breakpoints(), gauss, [&](const BoundaryQuadPoint& q) {
        const auto m = zeta.layout().electrode_at(q.s);
        if (!m) return;
        const double hn = h.normal(q.s);
        const double z = zeta.eval(q.s);
        if (hn == 0.0 || z == 0.0) return;
        const double normal_derivative = flux(q.s) / boundary_sigma(sol, sigma, q);
        normal += q.weight * hn * z * (normal_derivative - kappa.kappa(q.s) * gap_at(sol, *m, q.s)) *
                  gap_at(sol_tilde, *m, q.s);
    });
    return normal + tangential_and_gradient_terms(sol, sol_tilde, zeta_dot, h, sigma, gauss);
}

double shape_derivative_symmetric(const ForwardSolution& sol, const ForwardSolution& sol_tilde,
                                  const ConductanceProfile& zeta, const ConductanceDerivative& zeta_dot,
                                  const PerturbationField& h, const CurvatureField& kappa,
                                  const ConductivityField& sigma) {
    require_same_mesh(sol, sol_tilde);
    require_layout(sol, zeta.layout());
    const int gauss = shape_gauss_points(*sol.mesh);
    double normal = 0.0;
    for_each_boundary_point(*sol.mesh, zeta.breakpoints(), gauss, [&](const BoundaryQuadPoint& q) {
        const auto m = zeta.layout().electrode_at(q.s);
        if (!m) return;
        const double hn = h.normal(q.s);
        const double z = zeta.eval(q.s);
        if (hn == 0.0 || z == 0.0) return;
        normal += q.weight * hn * z * (z / boundary_sigma(sol, sigma, q) - kappa.kappa(q.s)) *
                  gap_at(sol, *m, q.s) * gap_at(sol_tilde, *m, q.s);
    });
    return normal + tangential_and_gradient_terms(sol, sol_tilde, zeta_dot, h, sigma, gauss);
}

Eigen::MatrixXd measurement_map_derivative(const ForwardSolver& solver, const PerturbationField& h,
                                           const CurvatureField& kappa) {
    const GroundedSystem& sys = solver.system();
    const std::size_t M = sys.zeta.electrode_count();
    const auto sols = solver.solve(basis_patterns(M));
    const ConductanceDerivative zeta_dot = arclength_derivative(sys.zeta);
    const auto K = static_cast<Eigen::Index>(M - 1);
    Eigen::MatrixXd D(K, K);
    for (Eigen::Index m = 0; m < K; ++m) {
        for (Eigen::Index n = 0; n < K; ++n) {
            D(n, m) = shape_derivative(sols[static_cast<std::size_t>(m)], sols[static_cast<std::size_t>(n)], sys.zeta,
                                       zeta_dot, h, kappa, sys.sigma);
        }
    }
    return D;
}

}  // namespace scem
