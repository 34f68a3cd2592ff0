#include "scem/forward.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/CholmodSupport>

#include "scem/basis.hpp"
#include "scem/errors.hpp"
#include "scem/quadrature.hpp"

namespace scem {

// ---------------------------------------------------------------------------
// Conductivity

ConductivityField ConductivityField::constant(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "conductivity must be positive, got " << value;
        throw ParameterError(msg.str());
    }
    ConductivityField f;
    f.constant_ = value;
    return f;
}

ConductivityField ConductivityField::nodal(std::vector<double> vertex_values) {
    if (vertex_values.empty()) throw ParameterError("nodal conductivity needs at least one value");
    for (double v : vertex_values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream msg;
            msg << "conductivity must be positive, got " << v;
            throw ParameterError(msg.str());
        }
    }
    ConductivityField f;
    f.values_ = std::move(vertex_values);
    return f;
}

double ConductivityField::min_value() const {
    if (is_constant()) return constant_;
    return *std::min_element(values_.begin(), values_.end());
}

double ConductivityField::mean_value() const {
    if (is_constant()) return constant_;
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

ConductivityField ConductivityField::scaled(double c) const {
    ConductivityField f = *this;
    f.constant_ *= c;
    for (double& v : f.values_) v *= c;
    return f;
}

void ConductivityField::check_against(const Mesh& mesh) const {
    if (!is_constant() && values_.size() != mesh.vertices().size()) {
        std::ostringstream msg;
        msg << "nodal conductivity has " << values_.size() << " values but the mesh has "
            << mesh.vertices().size() << " vertices";
        throw ContractError(msg.str());
    }
}

std::vector<double> prolongate(std::span<const double> values, int from, int to) {
    if (to < from) throw ContractError("prolongation target level must not be coarser");
    const long nc = (1L << from) + 1;
    if (static_cast<long>(values.size()) != nc * nc) {
        throw ContractError("prolongation input does not match the source level");
    }
    const long ratio = 1L << (to - from);
    const long nf = (1L << to) + 1;
    std::vector<double> out(static_cast<std::size_t>(nf * nf));
    auto at = [&](long i, long j) { return values[static_cast<std::size_t>(j * nc + i)]; };
    for (long J = 0; J < nf; ++J) {
        for (long I = 0; I < nf; ++I) {
            long i = std::min(I / ratio, nc - 2);
            long j = std::min(J / ratio, nc - 2);
            const double a = static_cast<double>(I - i * ratio) / static_cast<double>(ratio);
            const double b = static_cast<double>(J - j * ratio) / static_cast<double>(ratio);
            const double p00 = at(i, j), p10 = at(i + 1, j), p11 = at(i + 1, j + 1), p01 = at(i, j + 1);
            double v;
            if (a >= b) {
                v = p00 + a * (p10 - p00) + b * (p11 - p10);
            } else {
                v = p00 + b * (p01 - p00) + a * (p11 - p01);
            }
            out[static_cast<std::size_t>(J * nf + I)] = v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Current patterns

CurrentPattern::CurrentPattern(Eigen::VectorXd values) : values_(std::move(values)) {
    const double scale = std::max(1.0, values_.cwiseAbs().sum());
    if (std::abs(values_.sum()) > 1e-12 * scale) {
        throw ContractError("current pattern must be zero-mean");
    }
}

CurrentPattern CurrentPattern::between(std::size_t electrodes, std::size_t source, std::size_t sink) {
    if (source >= electrodes || sink >= electrodes || source == sink) {
        throw IndexError("invalid electrode pair for a current pattern");
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(electrodes));
    v[static_cast<Eigen::Index>(source)] = 1.0;
    v[static_cast<Eigen::Index>(sink)] = -1.0;
    return CurrentPattern(std::move(v));
}

std::vector<CurrentPattern> basis_patterns(std::size_t electrodes) {
    std::vector<CurrentPattern> out;
    for (std::size_t m = 0; m + 1 < electrodes; ++m) {
        out.push_back(CurrentPattern::between(electrodes, m, electrodes - 1));
    }
    return out;
}

std::vector<CurrentPattern> difference_patterns(std::size_t electrodes) {
    std::vector<CurrentPattern> out;
    for (std::size_t m = 0; m + 1 < electrodes; ++m) {
        out.push_back(CurrentPattern::between(electrodes, electrodes - 1, m));
    }
    return out;
}

std::string to_string(Grounding g) {
    return g == Grounding::ZeroMean ? "zero-mean" : "last-electrode";
}

// ---------------------------------------------------------------------------
// Solutions

double ForwardSolution::trace(double s) const {
    const std::size_t e = mesh->edge_at(s);
    const BoundaryEdge& edge = mesh->boundary_edges()[e];
    const double t = (s - edge.s0) / (edge.s1 - edge.s0);
    std::array<double, 3> phi{};
    const int order = mesh->order();
    edge_values(order, t, phi);
    const auto dofs = mesh->edge_dofs(e);
    double v = 0.0;
    for (std::size_t a = 0; a < dofs.size(); ++a) v += phi[a] * u[dofs[a]];
    return v;
}

double ForwardSolution::tangential_derivative(double s) const {
    const std::size_t e = mesh->edge_at(s);
    const BoundaryEdge& edge = mesh->boundary_edges()[e];
    const double t = (s - edge.s0) / (edge.s1 - edge.s0);
    const Point a = mesh->vertices()[edge.vertices[0]];
    const Point b = mesh->vertices()[edge.vertices[1]];
    const double length = std::hypot(b.x - a.x, b.y - a.y);
    std::array<double, 3> dphi{};
    edge_derivatives(mesh->order(), t, dphi);
    const auto dofs = mesh->edge_dofs(e);
    double v = 0.0;
    for (std::size_t k = 0; k < dofs.size(); ++k) v += dphi[k] * u[dofs[k]];
    return v / length;
}

double contact_gap(const ForwardSolution& solution, const ElectrodeLayout& layout, double s) {
    const auto m = layout.electrode_at(s);
    if (!m) return 0.0;
    return solution.U[static_cast<Eigen::Index>(*m)] - solution.trace(s);
}

double contact_gap_on(const ForwardSolution& solution, std::size_t electrode, double s) {
    return solution.U[static_cast<Eigen::Index>(electrode)] - solution.trace(s);
}

// ---------------------------------------------------------------------------
// Assembly

int boundary_gauss_points(int order) { return order == 1 ? 2 : 3; }

namespace {

Eigen::MatrixXd grounding_basis(std::size_t electrodes, Grounding grounding) {
    const auto M = static_cast<Eigen::Index>(electrodes);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M, M - 1);
    P.topRows(M - 1).setIdentity();
    if (grounding == Grounding::ZeroMean) P.row(M - 1).setConstant(-1.0);
    return P;
}

}  // namespace

GroundedSystem assemble(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                        const ConductanceProfile& zeta, Grounding grounding) {
    if (!mesh) throw ContractError("assemble: null mesh");
    sigma.check_against(*mesh);
    if (zeta.electrode_count() != mesh->layout().size()) {
        throw ContractError("conductance profile and mesh have different electrode counts");
    }

    const int order = mesh->order();
    const auto N = static_cast<Eigen::Index>(mesh->dof_count());
    const std::size_t M = zeta.electrode_count();
    const auto Mi = static_cast<Eigen::Index>(M);
    const Eigen::Index total = N + Mi - 1;
    const std::size_t nloc = mesh->dofs_per_triangle();
    const auto tris = mesh->triangles();
    const auto verts = mesh->vertices();

    // Upper bound on the upper-triangular entries per column.
    Eigen::VectorXi column_count = Eigen::VectorXi::Zero(total);
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto dofs = mesh->triangle_dofs(t);
        for (std::size_t a = 0; a < nloc; ++a) {
            for (std::size_t b = 0; b < nloc; ++b) {
                if (dofs[a] <= dofs[b]) ++column_count[dofs[b]];
            }
        }
    }
    const auto boundary_dofs = static_cast<int>(mesh->boundary_edges().size() * mesh->dofs_per_edge());
    for (Eigen::Index c = N; c < total; ++c) column_count[c] = boundary_dofs + Mi;
    for (auto e = 0; e < static_cast<int>(mesh->boundary_edges().size()); ++e) {
        for (Index d : mesh->edge_dofs(static_cast<std::size_t>(e))) column_count[d] += 2;
    }

    Eigen::SparseMatrix<double> A(total, total);
    A.reserve(column_count);
    auto add = [&A](Eigen::Index i, Eigen::Index j, double v) {
        if (i <= j) {
            A.coeffRef(i, j) += v;
        } else {
            A.coeffRef(j, i) += v;
        }
    };

    // Interior: (sigma grad u, grad v).
    std::array<Point, 6> grads{};
    std::array<double, 36> local{};
    const auto rule = triangle_rule_degree4();
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& tri = tris[t];
        const TriangleGeometry geo = triangle_geometry(verts[tri[0]], verts[tri[1]], verts[tri[2]]);
        if (!(geo.area > 1e-14 * mesh->h() * mesh->h())) {
            std::ostringstream msg;
            msg << "degenerate or inverted triangle " << t << " (area " << geo.area << ")";
            throw AssemblyError(msg.str());
        }
        const std::array<double, 3> sv = {sigma.at_vertex(tri[0]), sigma.at_vertex(tri[1]),
                                          sigma.at_vertex(tri[2])};
        local.fill(0.0);
        if (order == 1) {
            const double s_mean = (sv[0] + sv[1] + sv[2]) / 3.0;
            lagrange_gradients(1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, geo, grads);
            for (std::size_t a = 0; a < 3; ++a) {
                for (std::size_t b = 0; b < 3; ++b) local[a * 6 + b] = s_mean * geo.area * dot(grads[a], grads[b]);
            }
        } else {
            for (const TriangleQuadPoint& q : rule) {
                const double s_q = q.lambda[0] * sv[0] + q.lambda[1] * sv[1] + q.lambda[2] * sv[2];
                lagrange_gradients(2, q.lambda, geo, grads);
                const double w = q.weight * geo.area * s_q;
                for (std::size_t a = 0; a < 6; ++a) {
                    for (std::size_t b = 0; b < 6; ++b) local[a * 6 + b] += w * dot(grads[a], grads[b]);
                }
            }
        }
        const auto dofs = mesh->triangle_dofs(t);
        for (std::size_t a = 0; a < nloc; ++a) {
            for (std::size_t b = a; b < nloc; ++b) add(dofs[a], dofs[b], local[a * 6 + b]);
        }
    }

    // Boundary: (zeta (W - w), V - v). First in terms of U, then mapped to c.
    std::map<std::pair<Index, std::size_t>, double> coupling;  // int zeta phi_a on E_m
    std::vector<double> electrode_mass(M, 0.0);                 // int_{E_m} zeta
    std::array<double, 3> phi{};
    for_each_boundary_point(*mesh, zeta.breakpoints(), boundary_gauss_points(order),
                            [&](const BoundaryQuadPoint& q) {
        const auto m = zeta.layout().electrode_at(q.s);
        if (!m) return;
        const double z = zeta.eval(q.s);
        if (z == 0.0) return;
        edge_values(order, q.t, phi);
        const auto dofs = mesh->edge_dofs(q.edge);
        const double wz = q.weight * z;
        for (std::size_t a = 0; a < dofs.size(); ++a) {
            for (std::size_t b = a; b < dofs.size(); ++b) add(dofs[a], dofs[b], wz * phi[a] * phi[b]);
            coupling[{dofs[a], *m}] += wz * phi[a];
        }
        electrode_mass[*m] += wz;
    });
    for (std::size_t m = 0; m < M; ++m) {
        if (!(electrode_mass[m] > 0.0)) {
            std::ostringstream msg;
            msg << "electrode " << m + 1 << " carries no contact conductance; the grounded system is singular";
            throw SolverError(msg.str());
        }
    }

    const Eigen::MatrixXd P = grounding_basis(M, grounding);
    for (const auto& [key, value] : coupling) {
        const auto [dof, m] = key;
        for (Eigen::Index k = 0; k < Mi - 1; ++k) {
            const double p = P(static_cast<Eigen::Index>(m), k);
            if (p != 0.0) add(dof, N + k, -value * p);
        }
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Mi, Mi);
    for (std::size_t m = 0; m < M; ++m) D(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = electrode_mass[m];
    const Eigen::MatrixXd C = P.transpose() * D * P;
    for (Eigen::Index k = 0; k < Mi - 1; ++k) {
        for (Eigen::Index l = k; l < Mi - 1; ++l) {
            if (C(k, l) != 0.0) add(N + k, N + l, C(k, l));
        }
    }
    A.makeCompressed();

    GroundedSystem sys{std::move(mesh), sigma, zeta, grounding, std::move(A), P};
    return sys;
}

// ---------------------------------------------------------------------------
// Solver

struct ForwardSolver::Factor {
    // Simplicial mode avoids BLAS; a miscompiled or misdetected BLAS kernel
    // would otherwise corrupt the factor silently.
    Eigen::CholmodSimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Upper> llt;
};

ForwardSolver::ForwardSolver(GroundedSystem system)
    : system_(std::move(system)), factor_(std::make_unique<Factor>()), mutex_(std::make_unique<std::mutex>()) {
    factor_->llt.cholmod().print = 0;  // failures are reported by the exception below
    factor_->llt.compute(system_.matrix);
    if (factor_->llt.info() != Eigen::Success) {
        throw SolverError("sparse Cholesky factorization failed: grounded system is not positive definite");
    }
}

ForwardSolver::ForwardSolver(ForwardSolver&&) noexcept = default;
ForwardSolver& ForwardSolver::operator=(ForwardSolver&&) noexcept = default;
ForwardSolver::~ForwardSolver() = default;

std::vector<ForwardSolution> ForwardSolver::solve(std::span<const CurrentPattern> patterns) const {
    const std::size_t M = system_.zeta.electrode_count();
    const auto N = static_cast<Eigen::Index>(system_.dof_count());
    const auto total = static_cast<Eigen::Index>(system_.size());
    const auto K = static_cast<Eigen::Index>(patterns.size());
    if (K == 0) return {};
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(total, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const CurrentPattern& I = patterns[static_cast<std::size_t>(k)];
        if (I.size() != M) {
            throw ContractError("current pattern length does not match the electrode count");
        }
        rhs.col(k).tail(total - N) = system_.electrode_basis.transpose() * I.values();
    }
    Eigen::MatrixXd x;
    {
        std::lock_guard<std::mutex> lock(*mutex_);
        x = factor_->llt.solve(rhs);
        if (factor_->llt.info() != Eigen::Success) throw SolverError("sparse triangular solve failed");
    }
    std::vector<ForwardSolution> out;
    out.reserve(patterns.size());
    for (Eigen::Index k = 0; k < K; ++k) {
        Eigen::VectorXd U = system_.electrode_basis * x.col(k).tail(total - N);
        Eigen::VectorXd u = x.col(k).head(N);
        if (system_.grounding != Grounding::ZeroMean) {
            const double shift = U.mean();
            U.array() -= shift;
            u.array() -= shift;
        }
        if (!u.allFinite() || !U.allFinite()) throw SolverError("forward solve produced non-finite values");
        out.push_back(ForwardSolution{std::move(u), std::move(U), patterns[static_cast<std::size_t>(k)],
                                      system_.grounding, system_.mesh});
    }
    return out;
}

ForwardSolution ForwardSolver::solve(const CurrentPattern& pattern) const {
    auto v = solve(std::span<const CurrentPattern>(&pattern, 1));
    return std::move(v.front());
}

ForwardSolver make_solver(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                          const ConductanceProfile& zeta, Grounding grounding) {
    return ForwardSolver(assemble(std::move(mesh), sigma, zeta, grounding));
}

MeasurementMap measurement_map(const ForwardSolver& solver) {
    const std::size_t M = solver.system().zeta.electrode_count();
    const auto patterns = basis_patterns(M);
    const auto sols = solver.solve(patterns);
    const auto K = static_cast<Eigen::Index>(M - 1);
    MeasurementMap map;
    map.R.resize(K, K);
    for (Eigen::Index m = 0; m < K; ++m) {
        const Eigen::VectorXd& U = sols[static_cast<std::size_t>(m)].U;
        for (Eigen::Index n = 0; n < K; ++n) map.R(n, m) = U[n] - U[K];
    }
    return map;
}

MeasurementMap measurement_map(std::shared_ptr<const Mesh> mesh, const ConductivityField& sigma,
                               const ConductanceProfile& zeta) {
    return measurement_map(make_solver(std::move(mesh), sigma, zeta));
}

// ---------------------------------------------------------------------------
// Boundary flux

BoundaryFlux::BoundaryFlux(const ForwardSolution& solution, const ConductanceProfile& zeta)
    : solution_(&solution), zeta_(&zeta) {}

double BoundaryFlux::operator()(double s) const {
    const double z = zeta_->eval(s);
    if (z == 0.0) return 0.0;
    return z * contact_gap(*solution_, zeta_->layout(), s);
}

double BoundaryFlux::electrode_current(std::size_t electrode) const {
    const Arc& arc = zeta_->layout().arc(electrode);
    double sum = 0.0;
    for_each_boundary_point(*solution_->mesh, zeta_->breakpoints(), boundary_gauss_points(solution_->mesh->order()),
                            [&](double mid) { return arc.contains(mid); },
                            [&](const BoundaryQuadPoint& q) { sum += q.weight * (*this)(q.s); });
    return sum;
}

double BoundaryFlux::total_current() const {
    double sum = 0.0;
    for (std::size_t m = 0; m < zeta_->electrode_count(); ++m) sum += electrode_current(m);
    return sum;
}

BoundaryFlux boundary_flux(const ForwardSolution& solution, const ConductanceProfile& zeta) {
    return BoundaryFlux(solution, zeta);
}

}  // namespace scem
