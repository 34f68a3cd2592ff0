#include <gtest/gtest.h>

#include <cmath>

#include "scem/errors.hpp"
#include "scem/inverse.hpp"

using namespace scem;

namespace {

std::shared_ptr<const Mesh> mesh_at(int level, ElectrodeLayout layout = ElectrodeLayout::default8()) {
    return std::make_shared<const Mesh>(build_mesh(level, layout));
}

std::vector<double> ramp_contacts(std::size_t m, double base) {
    std::vector<double> z;
    for (std::size_t k = 0; k < m; ++k) z.push_back(base * (1.0 + 0.3 * std::sin(1.7 * static_cast<double>(k))));
    return z;
}

// worst per-column relative error of the analytic Jacobian against central
// differences in log parameters
double jacobian_check(const ForwardModel& model, const ParameterVector& y, double eps) {
    const auto patterns = default_patterns(y.log_zeta.size());
    const Eigen::MatrixXd J = jacobian(model, y, patterns);
    double worst = 0.0;
    for (Eigen::Index c = 0; c < y.size(); ++c) {
        ParameterVector a = y, b = y;
        Eigen::VectorXd xp = y.stacked(), xm = y.stacked();
        xp[c] += eps;
        xm[c] -= eps;
        a.assign(xp);
        b.assign(xm);
        const Eigen::VectorXd fd = (simulate(model, a, patterns) - simulate(model, b, patterns)) / (2 * eps);
        worst = std::max(worst, (fd - J.col(c)).norm() / J.col(c).norm());
    }
    return worst;
}

}  // namespace

TEST(Inverse, ParameterVectorRoundTrip) {
    auto y = ParameterVector::homogeneous(0.5, {1.0, 2.0, 3.0});
    EXPECT_TRUE(y.is_homogeneous());
    EXPECT_EQ(y.size(), 4);
    y.assign(y.stacked() * 2.0);
    EXPECT_NEAR(y.conductivity().constant_value(), 0.25, 1e-15);
    EXPECT_NEAR(y.contacts()[2], 9.0, 1e-13);
    EXPECT_THROW(ParameterVector::homogeneous(-1.0, {1.0}), ParameterError);
}

TEST(Inverse, JacobianMatchesFiniteDifferences) {
    const auto mesh = mesh_at(4);
    std::vector<double> sigma;
    for (const Point& p : mesh->vertices()) sigma.push_back(1.0 + 0.5 * p.x * p.y + 0.2 * p.x);
    for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
        const ForwardModel model{mesh, kind};
        EXPECT_LT(jacobian_check(model, ParameterVector::homogeneous(1.3, ramp_contacts(8, 15.0)), 1e-4), 1e-5);
        EXPECT_LT(jacobian_check(model, ParameterVector::nodal(sigma, ramp_contacts(8, 15.0)), 1e-4), 1e-5);
    }
}

TEST(Inverse, HomogeneousColumnIsSumOfNodalColumns) {
    const auto mesh = mesh_at(4);
    const ForwardModel model{mesh, ProfileKind::Hat};
    const auto z = ramp_contacts(8, 20.0);
    const auto patterns = default_patterns(8);
    const auto Jh = jacobian(model, ParameterVector::homogeneous(0.8, z), patterns);
    const auto Jn = jacobian(model, ParameterVector::nodal(std::vector<double>(mesh->vertices().size(), 0.8), z), patterns);
    const Eigen::Index n = static_cast<Eigen::Index>(mesh->vertices().size());
    const Eigen::VectorXd sum = Jn.leftCols(n).rowwise().sum();
    EXPECT_LT((sum - Jh.col(0)).norm(), 1e-10 * Jh.col(0).norm());
    EXPECT_LT((Jn.rightCols(8) - Jh.rightCols(8)).norm(), 1e-10 * Jh.norm());
}

TEST(Inverse, PredictionsHaveZeroMeanPerPattern) {
    const ForwardModel model{mesh_at(4), ProfileKind::Box};
    const auto U = simulate(model, ParameterVector::homogeneous(2.0, ramp_contacts(8, 5.0)), default_patterns(8));
    ASSERT_EQ(U.size(), 7 * 8);
    for (Eigen::Index j = 0; j < 7; ++j) EXPECT_NEAR(U.segment(8 * j, 8).sum(), 0.0, 1e-13);
}

TEST(Inverse, SynthesisIsDeterministicInSeed) {
    SynthesisConfig c;
    c.phantom.background = 0.5;
    c.layout = ElectrodeLayout::default8();
    c.contacts = ramp_contacts(8, 10.0);
    c.fine_level = 4;
    c.relative_noise = 1e-2;
    c.seed = 3;
    const auto a = synthesize_data(c);
    const auto b = synthesize_data(c);
    EXPECT_EQ(a.voltages, b.voltages);
    EXPECT_EQ(a.level, 4);
    c.seed = 4;
    const auto d = synthesize_data(c);
    EXPECT_NE(a.voltages, d.voltages);
    c.relative_noise = 0.0;
    const auto clean = synthesize_data(c);
    const double range = clean.voltages.maxCoeff() - clean.voltages.minCoeff();
    EXPECT_NEAR(a.noise_std, 1e-2 * range, 1e-15);
    // realized noise has roughly the requested size
    const double realized = (a.voltages - clean.voltages).norm() / std::sqrt(static_cast<double>(a.voltages.size()));
    EXPECT_GT(realized, 0.5 * a.noise_std);
    EXPECT_LT(realized, 1.5 * a.noise_std);
}

TEST(Inverse, NoiselessHomogeneousFitIsExact) {
    for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
        SynthesisConfig c;
        c.phantom.background = 0.7;
        c.layout = ElectrodeLayout::default8();
        c.kind = kind;
        c.contacts = ramp_contacts(8, 12.0);
        c.fine_level = 4;
        const auto frame = synthesize_data(c);
        const auto fit = fit_homogeneous(frame, ForwardModel{mesh_at(4), kind}, 0.25, 40.0);
        EXPECT_NEAR(fit.sigma, 0.7, 1e-6 * 0.7) << fit.lm.stop_reason;
        for (std::size_t m = 0; m < 8; ++m) EXPECT_NEAR(fit.contacts[m], c.contacts[m], 1e-4 * c.contacts[m]);
        EXPECT_LT(fit.relative_discrepancy, 1e-8);
    }
}

TEST(Inverse, ObjectiveNeverIncreases) {
    SynthesisConfig c;
    c.phantom.background = 0.3;
    c.phantom.inclusions.push_back({Inclusion::Shape::Disk, {0.4, 0.6}, 0.2, 0.03});
    c.phantom.base_level = 6;
    c.layout = ElectrodeLayout::default8();
    c.contacts = ramp_contacts(8, 10.0);
    c.fine_level = 6;
    c.relative_noise = 2e-3;
    c.seed = 1;
    const auto frame = synthesize_data(c);
    const auto mesh = mesh_at(4);
    const ForwardModel model{mesh, ProfileKind::Box};
    const auto prior = build_prior(*mesh, 0.25, 0.25, kTankCorrelationLength, frame.noise_std);
    const auto init = ParameterVector::nodal(std::vector<double>(mesh->vertices().size(), 0.3), c.contacts);
    LMConfig cfg;
    cfg.max_iterations = 15;
    const auto rec = reconstruct_map(frame, model, prior, init, cfg);
    double last = INFINITY;
    for (const auto& it : rec.lm.history) {
        if (!it.accepted) continue;
        EXPECT_LE(it.data_misfit + it.prior_term, last);
        last = it.data_misfit + it.prior_term;
    }
    EXPECT_NEAR(rec.lm.objective, rec.lm.data_misfit + rec.lm.prior_term, 1e-12 * rec.lm.objective);
}

TEST(Inverse, RefusesInverseCrime) {
    SynthesisConfig c;
    c.layout = ElectrodeLayout::default8();
    c.contacts = ramp_contacts(8, 10.0);
    c.fine_level = 5;
    const auto frame = synthesize_data(c);
    const auto mesh = mesh_at(4);
    const auto prior = build_prior(*mesh, 1.0, 0.5, 0.2, 1e-3);
    const auto init = ParameterVector::nodal(std::vector<double>(mesh->vertices().size(), 1.0), c.contacts);
    EXPECT_THROW(reconstruct_map(frame, ForwardModel{mesh, ProfileKind::Box}, prior, init), ContractError);
    EXPECT_THROW(reconstruct_map(frame, ForwardModel{mesh, ProfileKind::Box}, prior,
                                 ParameterVector::homogeneous(1.0, c.contacts)),
                 ContractError);
}

TEST(Inverse, PriorWhitensCovariance) {
    const Mesh mesh = build_mesh(3, ElectrodeLayout::default8());
    const double noise = 3e-3, std = 0.25, ell = 0.15;
    const auto prior = build_prior(mesh, 0.25, std, ell, noise);
    const auto v = mesh.vertices();
    const auto n = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd C(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dx = v[i].x - v[j].x, dy = v[i].y - v[j].y;
            C(i, j) = std * std * (std::exp(-(dx * dx + dy * dy) / (2 * ell * ell)) + (i == j ? 1e-8 : 0.0));
        }
    }
    const Eigen::MatrixXd& G = prior.whitener;
    ASSERT_EQ(G.rows(), n);
    EXPECT_LE(G.triangularView<Eigen::StrictlyLower>().toDenseMatrix().cwiseAbs().maxCoeff(), 0.0);
    const Eigen::MatrixXd W = G * C * G.transpose() / (noise * noise);
    EXPECT_LT((W - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Inverse, ContactInitializerDoesNotMatter) {
    SynthesisConfig c;
    c.phantom.background = 0.25;
    c.layout = ElectrodeLayout::default8();
    c.kind = ProfileKind::Hat;
    c.contacts = ramp_contacts(8, 120.0);
    c.fine_level = 6;
    c.relative_noise = 2e-3;
    c.seed = 11;
    const auto frame = synthesize_data(c);
    const ForwardModel model{mesh_at(4), ProfileKind::Hat};
    const auto ref = fit_homogeneous(frame, model, 0.25, 70.0);
    for (double z0 : {20.0, 200.0}) {
        const auto fit = fit_homogeneous(frame, model, 0.25, z0);
        EXPECT_NEAR(fit.sigma, ref.sigma, 1e-4 * ref.sigma);
        for (std::size_t m = 0; m < 8; ++m) EXPECT_NEAR(fit.contacts[m], ref.contacts[m], 1e-4 * ref.contacts[m]);
    }
}

TEST(Inverse, RelativeL2Distance) {
    const Mesh mesh = build_mesh(3, ElectrodeLayout::default8());
    const std::size_t n = mesh.vertices().size();
    std::vector<double> a(n, 2.0), b(n, 1.0);
    EXPECT_NEAR(relative_l2_distance(mesh, a, b), 1.0, 1e-14);
    EXPECT_EQ(relative_l2_distance(mesh, b, b), 0.0);
    // linear field x against zero-offset reference: |x|^2 = 1/3
    std::vector<double> x, one(n, 1.0);
    for (const Point& p : mesh.vertices()) x.push_back(1.0 + p.x);
    EXPECT_NEAR(relative_l2_distance(mesh, x, one), std::sqrt(1.0 / 3.0), 1e-14);
}
