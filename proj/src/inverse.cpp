#include "scem/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "scem/basis.hpp"
#include "scem/errors.hpp"
#include "scem/quadrature.hpp"

namespace scem {

// ---------------------------------------------------------------------------
// Frames and parameters

std::size_t MeasurementFrame::electrode_count() const {
    return patterns.empty() ? 0 : patterns.front().size();
}

void MeasurementFrame::normalize() {
    const auto M = static_cast<Eigen::Index>(electrode_count());
    if (M == 0) return;
    if (voltages.size() != M * static_cast<Eigen::Index>(patterns.size())) {
        throw ContractError("frame voltages do not match its patterns");
    }
    for (std::size_t j = 0; j < patterns.size(); ++j) {
        auto block = voltages.segment(static_cast<Eigen::Index>(j) * M, M);
        block.array() -= block.mean();
    }
}

ParameterVector ParameterVector::homogeneous(double sigma, std::vector<double> contacts) {
    return nodal({sigma}, std::move(contacts));
}

ParameterVector ParameterVector::nodal(std::vector<double> sigma, std::vector<double> contacts) {
    if (sigma.empty() || contacts.empty()) throw ParameterError("parameter vector needs conductivity and contacts");
    ParameterVector y;
    y.log_sigma.resize(static_cast<Eigen::Index>(sigma.size()));
    y.log_zeta.resize(static_cast<Eigen::Index>(contacts.size()));
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (!(sigma[i] > 0.0)) throw ParameterError("conductivity must be positive");
        y.log_sigma[static_cast<Eigen::Index>(i)] = std::log(sigma[i]);
    }
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        if (!(contacts[i] > 0.0)) throw ParameterError("contact parameters must be positive");
        y.log_zeta[static_cast<Eigen::Index>(i)] = std::log(contacts[i]);
    }
    return y;
}

Eigen::VectorXd ParameterVector::stacked() const {
    Eigen::VectorXd x(size());
    x << log_sigma, log_zeta;
    return x;
}

void ParameterVector::assign(const Eigen::VectorXd& x) {
    if (x.size() != size()) throw ContractError("parameter vector size mismatch");
    log_sigma = x.head(log_sigma.size());
    log_zeta = x.tail(log_zeta.size());
}

ConductivityField ParameterVector::conductivity() const {
    if (is_homogeneous()) return ConductivityField::constant(std::exp(log_sigma[0]));
    return ConductivityField::nodal(sigma_values());
}

std::vector<double> ParameterVector::sigma_values() const {
    std::vector<double> out(static_cast<std::size_t>(log_sigma.size()));
    for (Eigen::Index i = 0; i < log_sigma.size(); ++i) out[static_cast<std::size_t>(i)] = std::exp(log_sigma[i]);
    return out;
}

std::vector<double> ParameterVector::contacts() const {
    std::vector<double> out(static_cast<std::size_t>(log_zeta.size()));
    for (Eigen::Index i = 0; i < log_zeta.size(); ++i) out[static_cast<std::size_t>(i)] = std::exp(log_zeta[i]);
    return out;
}

ConductanceProfile ForwardModel::profile(const ParameterVector& y) const {
    if (static_cast<std::size_t>(y.log_zeta.size()) != mesh->layout().size()) {
        throw ContractError("contact parameter count does not match the electrode count");
    }
    return make_profile(mesh->layout(), kind, y.contacts());
}

std::vector<CurrentPattern> default_patterns(std::size_t electrodes) { return difference_patterns(electrodes); }

namespace {

void check_patterns(const std::vector<CurrentPattern>& patterns, std::size_t M) {
    if (patterns.empty()) throw ContractError("no current patterns");
    for (const auto& p : patterns) {
        if (p.size() != M) throw ContractError("current pattern length does not match the electrode count");
    }
}

// Solutions for the basis e_a - e_M, a = 1..M-1.
struct BasisSolve {
    std::vector<ForwardSolution> solutions;
    ConductanceProfile zeta;
};

BasisSolve solve_basis(const ForwardModel& model, const ParameterVector& y) {
    const ConductanceProfile zeta = model.profile(y);
    const ConductivityField sigma = y.conductivity();
    if (!y.is_homogeneous() && static_cast<std::size_t>(y.log_sigma.size()) != model.mesh->vertices().size()) {
        throw ContractError("nodal conductivity does not match the reconstruction mesh");
    }
    const ForwardSolver solver = make_solver(model.mesh, sigma, zeta);
    return {solver.solve(basis_patterns(zeta.electrode_count())), zeta};
}

Eigen::VectorXd predictions(const BasisSolve& basis, const std::vector<CurrentPattern>& patterns) {
    const std::size_t M = basis.zeta.electrode_count();
    const auto Mi = static_cast<Eigen::Index>(M);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Mi * static_cast<Eigen::Index>(patterns.size()));
    for (std::size_t j = 0; j < patterns.size(); ++j) {
        auto block = out.segment(static_cast<Eigen::Index>(j) * Mi, Mi);
        for (std::size_t a = 0; a + 1 < M; ++a) block += patterns[j][a] * basis.solutions[a].U;
    }
    return out;
}

// Derivatives of the form B with respect to each conductivity parameter,
// evaluated on all pairs of basis solutions.
std::vector<Eigen::MatrixXd> conductivity_sensitivities(const BasisSolve& basis, bool homogeneous) {
    const Mesh& mesh = *basis.solutions.front().mesh;
    const auto K = static_cast<Eigen::Index>(basis.solutions.size());
    const std::size_t count = homogeneous ? 1 : mesh.vertices().size();
    std::vector<Eigen::MatrixXd> G(count, Eigen::MatrixXd::Zero(K, K));
    const auto tris = mesh.triangles();
    const auto verts = mesh.vertices();
    const int order = mesh.order();
    const std::size_t nloc = mesh.dofs_per_triangle();
    std::array<Point, 6> grads{};
    std::vector<Point> g(static_cast<std::size_t>(K));
    Eigen::MatrixXd local(K, K);

    auto accumulate_gradients = [&](std::span<const Index> dofs) {
        for (Eigen::Index a = 0; a < K; ++a) {
            Point p{0.0, 0.0};
            const Eigen::VectorXd& u = basis.solutions[static_cast<std::size_t>(a)].u;
            for (std::size_t i = 0; i < nloc; ++i) {
                p.x += u[dofs[i]] * grads[i].x;
                p.y += u[dofs[i]] * grads[i].y;
            }
            g[static_cast<std::size_t>(a)] = p;
        }
        for (Eigen::Index a = 0; a < K; ++a) {
            for (Eigen::Index b = 0; b <= a; ++b) {
                local(a, b) = local(b, a) = dot(g[static_cast<std::size_t>(a)], g[static_cast<std::size_t>(b)]);
            }
        }
    };

    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto& tri = tris[t];
        const TriangleGeometry geo = triangle_geometry(verts[tri[0]], verts[tri[1]], verts[tri[2]]);
        const auto dofs = mesh.triangle_dofs(t);
        if (order == 1) {
            lagrange_gradients(1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, geo, grads);
            accumulate_gradients(dofs);
            if (homogeneous) {
                G[0] += geo.area * local;
            } else {
                for (int v = 0; v < 3; ++v) G[static_cast<std::size_t>(tri[v])] += (geo.area / 3.0) * local;
            }
        } else {
            for (const TriangleQuadPoint& q : triangle_rule_degree4()) {
                lagrange_gradients(2, q.lambda, geo, grads);
                accumulate_gradients(dofs);
                const double w = q.weight * geo.area;
                if (homogeneous) {
                    G[0] += w * local;
                } else {
                    for (int v = 0; v < 3; ++v) G[static_cast<std::size_t>(tri[v])] += (w * q.lambda[v]) * local;
                }
            }
        }
    }
    return G;
}

std::vector<Eigen::MatrixXd> contact_sensitivities(const BasisSolve& basis) {
    const Mesh& mesh = *basis.solutions.front().mesh;
    const ConductanceProfile& zeta = basis.zeta;
    const std::size_t M = zeta.electrode_count();
    const auto K = static_cast<Eigen::Index>(basis.solutions.size());
    std::vector<Eigen::MatrixXd> G(M, Eigen::MatrixXd::Zero(K, K));
    Eigen::VectorXd gap(K);
    for_each_boundary_point(mesh, zeta.breakpoints(), boundary_gauss_points(mesh.order()),
                            [&](const BoundaryQuadPoint& q) {
        const auto m = zeta.layout().electrode_at(q.s);
        if (!m) return;
        const double w = q.weight * zeta.shape(*m, q.s);
        if (w == 0.0) return;
        for (Eigen::Index a = 0; a < K; ++a) gap[a] = contact_gap_on(basis.solutions[static_cast<std::size_t>(a)], *m, q.s);
        G[*m].noalias() += w * gap * gap.transpose();
    });
    return G;
}

Eigen::MatrixXd assemble_jacobian(const BasisSolve& basis, const ParameterVector& y,
                                  const std::vector<CurrentPattern>& patterns) {
    const std::size_t M = basis.zeta.electrode_count();
    const auto Mi = static_cast<Eigen::Index>(M);
    const auto K = Mi - 1;
    const auto P = static_cast<Eigen::Index>(patterns.size());
    Eigen::MatrixXd A(P, K);  // drive patterns in the basis
    for (Eigen::Index j = 0; j < P; ++j) {
        for (Eigen::Index a = 0; a < K; ++a) A(j, a) = patterns[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)];
    }
    Eigen::MatrixXd D(Mi, K);  // e_k - 1/M in the basis
    for (Eigen::Index k = 0; k < Mi; ++k) {
        for (Eigen::Index a = 0; a < K; ++a) D(k, a) = (k == a ? 1.0 : 0.0) - 1.0 / static_cast<double>(M);
    }
    const auto sigma_G = conductivity_sensitivities(basis, y.is_homogeneous());
    const auto zeta_G = contact_sensitivities(basis);
    const std::vector<double> sigma = y.sigma_values();
    const std::vector<double> contacts = y.contacts();

    Eigen::MatrixXd J(P * Mi, y.size());
    auto fill = [&](Eigen::Index column, const Eigen::MatrixXd& G, double scale) {
        const Eigen::MatrixXd X = -(A * G * D.transpose());
        for (Eigen::Index j = 0; j < P; ++j) {
            for (Eigen::Index k = 0; k < Mi; ++k) J(j * Mi + k, column) = scale * X(j, k);
        }
    };
    for (std::size_t p = 0; p < sigma_G.size(); ++p) fill(static_cast<Eigen::Index>(p), sigma_G[p], sigma[p]);
    const auto offset = static_cast<Eigen::Index>(sigma_G.size());
    for (std::size_t m = 0; m < M; ++m) fill(offset + static_cast<Eigen::Index>(m), zeta_G[m], contacts[m]);
    return J;
}

}  // namespace

Eigen::VectorXd simulate(const ForwardModel& model, const ParameterVector& y,
                         const std::vector<CurrentPattern>& patterns) {
    check_patterns(patterns, model.mesh->layout().size());
    return predictions(solve_basis(model, y), patterns);
}

Eigen::MatrixXd jacobian(const ForwardModel& model, const ParameterVector& y,
                         const std::vector<CurrentPattern>& patterns) {
    check_patterns(patterns, model.mesh->layout().size());
    return assemble_jacobian(solve_basis(model, y), y, patterns);
}

// ---------------------------------------------------------------------------
// Synthetic data

void add_noise(MeasurementFrame& frame, double relative_noise, std::uint64_t seed) {
    if (!(relative_noise >= 0.0)) throw ParameterError("noise level must be nonnegative");
    const double range = frame.voltages.maxCoeff() - frame.voltages.minCoeff();
    frame.relative_noise = relative_noise;
    frame.noise_std = relative_noise * range;
    frame.seed = seed;
    if (relative_noise > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, frame.noise_std);
        for (Eigen::Index i = 0; i < frame.voltages.size(); ++i) frame.voltages[i] += normal(rng);
    }
    frame.normalize();
}

MeasurementFrame synthesize_data(const SynthesisConfig& config) {
    if (config.contacts.size() != config.layout.size()) {
        throw ParameterError("synthesis needs one contact parameter per electrode");
    }
    auto mesh = std::make_shared<const Mesh>(build_mesh(config.fine_level, config.layout, config.order));
    const ConductanceProfile zeta = make_profile(config.layout, config.kind, config.contacts);
    const ForwardSolver solver = make_solver(mesh, config.phantom.on(*mesh), zeta);
    MeasurementFrame frame;
    frame.patterns = config.patterns.empty() ? default_patterns(config.layout.size()) : config.patterns;
    check_patterns(frame.patterns, config.layout.size());
    const auto sols = solver.solve(frame.patterns);
    const auto M = static_cast<Eigen::Index>(config.layout.size());
    frame.voltages.resize(M * static_cast<Eigen::Index>(sols.size()));
    for (std::size_t j = 0; j < sols.size(); ++j) frame.voltages.segment(static_cast<Eigen::Index>(j) * M, M) = sols[j].U;
    frame.level = config.fine_level;
    frame.order = config.order;
    frame.model = to_string(config.kind);
    add_noise(frame, config.relative_noise, config.seed);
    return frame;
}

// ---------------------------------------------------------------------------
// Prior

PriorModel build_prior(const Mesh& mesh, double mean, double std, double correlation_length, double noise_std) {
    if (!(mean > 0.0) || !(std > 0.0) || !(correlation_length > 0.0) || !(noise_std >= 0.0)) {
        throw ParameterError("prior mean, standard deviation and correlation length must be positive");
    }
    const auto verts = mesh.vertices();
    const auto n = static_cast<Eigen::Index>(verts.size());
    // Reverse the node order so that the lower Cholesky factor of the
    // permuted covariance becomes an upper factor R with C = R R^T; then
    // G = noise * R^-1 is upper triangular and G^T G = noise^2 C^-1.
    Eigen::MatrixXd C(n, n);
    const double var = std * std;
    const double inv = 1.0 / (2.0 * correlation_length * correlation_length);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point a = verts[static_cast<std::size_t>(n - 1 - i)];
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Point b = verts[static_cast<std::size_t>(n - 1 - j)];
            const double d2 = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
            C(i, j) = C(j, i) = var * std::exp(-d2 * inv);
        }
        C(i, i) += 1e-8 * var;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success) throw NumericalError("prior covariance is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    const Eigen::MatrixXd R = L.reverse();  // reversing rows and columns turns lower into upper
    PriorModel prior;
    prior.mean = mean;
    prior.std = std;
    prior.correlation_length = correlation_length;
    prior.noise_std = noise_std;
    prior.whitener = noise_std * R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));
    return prior;
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt

namespace {

struct Evaluation {
    Eigen::VectorXd data_residual;
    Eigen::VectorXd prior_residual;
    Eigen::MatrixXd jacobian;  // rows: data then prior
    double data_misfit = 0.0;
    double prior_term = 0.0;
    double objective() const { return data_misfit + prior_term; }
};

class Problem {
public:
    Problem(const MeasurementFrame& frame, const ForwardModel& model, const PriorModel* prior)
        : frame_(frame), model_(model), prior_(prior) {}

    Evaluation evaluate(const ParameterVector& y, bool with_jacobian) const {
        const BasisSolve basis = solve_basis(model_, y);
        Evaluation e;
        e.data_residual = predictions(basis, frame_.patterns) - frame_.voltages;
        e.data_misfit = e.data_residual.squaredNorm();
        Eigen::MatrixXd Jd;
        if (with_jacobian) Jd = assemble_jacobian(basis, y, frame_.patterns);
        if (prior_ != nullptr) {
            const Eigen::VectorXd sigma = y.log_sigma.array().exp();
            e.prior_residual = prior_->whitener * (sigma.array() - prior_->mean).matrix();
            e.prior_term = e.prior_residual.squaredNorm();
            if (with_jacobian) {
                e.jacobian = Eigen::MatrixXd::Zero(Jd.rows() + prior_->size(), y.size());
                e.jacobian.topRows(Jd.rows()) = Jd;
                e.jacobian.block(Jd.rows(), 0, prior_->size(), prior_->size()) =
                    prior_->whitener * sigma.asDiagonal();
            }
        } else if (with_jacobian) {
            e.jacobian = std::move(Jd);
        }
        return e;
    }

    Eigen::VectorXd residual(const Evaluation& e) const {
        if (prior_ == nullptr) return e.data_residual;
        Eigen::VectorXd r(e.data_residual.size() + e.prior_residual.size());
        r << e.data_residual, e.prior_residual;
        return r;
    }

private:
    const MeasurementFrame& frame_;
    const ForwardModel& model_;
    const PriorModel* prior_;
};

LMResult levenberg_marquardt(const Problem& problem, ParameterVector y, const LMConfig& config) {
    if (!(config.initial_damping > 0.0) || !(config.damping_up > 1.0) || !(config.damping_down > 1.0) ||
        config.max_iterations < 1) {
        throw ParameterError("invalid Levenberg-Marquardt configuration");
    }
    LMResult result;
    Evaluation current = problem.evaluate(y, true);
    const auto n = y.size();
    double lambda = -1.0;
    result.history.push_back({0, current.data_misfit, current.prior_term, 0.0, true});
    int iteration = 0;
    while (iteration < config.max_iterations) {
        ++iteration;
        const Eigen::VectorXd r = problem.residual(current);
        const Eigen::MatrixXd JtJ = current.jacobian.transpose() * current.jacobian;
        const Eigen::VectorXd g = current.jacobian.transpose() * r;
        if (lambda < 0.0) lambda = config.initial_damping * JtJ.trace() / static_cast<double>(n);
        if (g.cwiseAbs().maxCoeff() <= config.gradient_tolerance * std::max(current.objective(), 1e-300)) {
            result.converged = true;
            result.stop_reason = "gradient";
            break;
        }
        bool accepted = false;
        bool converged = false;
        while (lambda <= config.max_damping) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += lambda;
            const Eigen::VectorXd dx = A.ldlt().solve(-g);
            ParameterVector trial = y;
            trial.assign(y.stacked() + dx);
            Evaluation next;
            // exp() of the trial must stay a normal positive number
            bool ok = dx.allFinite() && (y.stacked() + dx).cwiseAbs().maxCoeff() < 600.0;
            if (ok) {
                try {
                    next = problem.evaluate(trial, false);
                } catch (const NumericalError&) {
                    ok = false;
                }
            }
            if (ok && next.objective() < current.objective()) {
                const double decrease = (current.objective() - next.objective()) / current.objective();
                y = trial;
                current = problem.evaluate(y, true);
                lambda /= config.damping_down;
                accepted = true;
                result.history.push_back({iteration, current.data_misfit, current.prior_term, lambda, true});
                if (dx.cwiseAbs().maxCoeff() <= config.step_tolerance) {
                    converged = true;
                    result.stop_reason = "step";
                } else if (decrease <= config.objective_tolerance) {
                    converged = true;
                    result.stop_reason = "objective";
                }
                break;
            }
            result.history.push_back({iteration, ok ? next.data_misfit : NAN, ok ? next.prior_term : NAN, lambda,
                                      false});
            lambda *= config.damping_up;
        }
        if (converged) {
            result.converged = true;
            break;
        }
        if (!accepted) {
            // No decrease at any damping: the current point is stationary to
            // working precision.
            result.converged = true;
            result.stop_reason = "no further decrease";
            break;
        }
    }
    if (result.stop_reason.empty()) result.stop_reason = "max iterations";
    result.iterations = iteration;
    result.objective = current.objective();
    result.data_misfit = current.data_misfit;
    result.prior_term = current.prior_term;
    result.y = std::move(y);
    return result;
}

void check_frame(const MeasurementFrame& frame, const ForwardModel& model) {
    if (!model.mesh) throw ContractError("forward model without a mesh");
    check_patterns(frame.patterns, model.mesh->layout().size());
    const auto expected = static_cast<Eigen::Index>(frame.patterns.size() * model.mesh->layout().size());
    if (frame.voltages.size() != expected) throw ContractError("frame voltages do not match its patterns");
}

}  // namespace

HomogeneousFit fit_homogeneous(const MeasurementFrame& frame, const ForwardModel& model, double sigma0,
                               double zeta0, const LMConfig& config) {
    check_frame(frame, model);
    const std::size_t M = model.mesh->layout().size();
    const ParameterVector init = ParameterVector::homogeneous(sigma0, std::vector<double>(M, zeta0));
    const Problem problem(frame, model, nullptr);
    HomogeneousFit fit;
    fit.lm = levenberg_marquardt(problem, init, config);
    fit.sigma = std::exp(fit.lm.y.log_sigma[0]);
    fit.contacts = fit.lm.y.contacts();
    fit.relative_discrepancy = std::sqrt(fit.lm.data_misfit) / frame.voltages.norm();
    return fit;
}

Reconstruction reconstruct_map(const MeasurementFrame& frame, const ForwardModel& model, const PriorModel& prior,
                               const ParameterVector& init, const LMConfig& config) {
    check_frame(frame, model);
    const Index nodes = static_cast<Index>(model.mesh->vertices().size());
    if (prior.size() != nodes) {
        std::ostringstream msg;
        msg << "prior has " << prior.size() << " nodes but the reconstruction mesh has " << nodes;
        throw ContractError(msg.str());
    }
    if (init.is_homogeneous() || init.log_sigma.size() != nodes) {
        throw ContractError("initial conductivity must be nodal on the reconstruction mesh");
    }
    if (frame.level >= 0 && frame.level < model.mesh->level() + 2) {
        std::ostringstream msg;
        msg << "data simulated on level " << frame.level << " is too close to the reconstruction level "
            << model.mesh->level() << " (need at least two levels finer)";
        throw ContractError(msg.str());
    }
    const Problem problem(frame, model, &prior);
    Reconstruction rec;
    rec.lm = levenberg_marquardt(problem, init, config);
    rec.sigma = rec.lm.y.sigma_values();
    rec.contacts = rec.lm.y.contacts();
    rec.relative_discrepancy = std::sqrt(rec.lm.data_misfit) / frame.voltages.norm();
    return rec;
}

double relative_l2_distance(const Mesh& mesh, const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != mesh.vertices().size() || b.size() != a.size()) {
        throw ContractError("fields do not match the mesh vertices");
    }
    const auto verts = mesh.vertices();
    double num = 0.0, den = 0.0;
    for (const auto& t : mesh.triangles()) {
        const double area = signed_area(verts[t[0]], verts[t[1]], verts[t[2]]);
        double dd = 0.0, ds = 0.0, bb = 0.0, bs = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double d = a[t[i]] - b[t[i]];
            dd += d * d;
            ds += d;
            bb += b[t[i]] * b[t[i]];
            bs += b[t[i]];
        }
        num += area / 12.0 * (dd + ds * ds);
        den += area / 12.0 * (bb + bs * bs);
    }
    return std::sqrt(num / den);
}

}  // namespace scem
