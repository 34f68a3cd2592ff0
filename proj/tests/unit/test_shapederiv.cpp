#include <gtest/gtest.h>

#include <cmath>

#include "scem/shapederiv.hpp"

using namespace scem;

namespace {

struct Square {
    ElectrodeLayout layout = ElectrodeLayout::default8();
    std::shared_ptr<const Mesh> mesh;
    ConductivityField sigma = ConductivityField::constant(1.0);
    ConductanceProfile zeta;
    ForwardSolver solver;

    Square(int level, ProfileKind kind, double height = 20.0)
        : mesh(std::make_shared<const Mesh>(build_mesh(level, layout))),
          zeta(make_profile(layout, kind, height)),
          solver(make_solver(mesh, sigma, zeta)) {}
};

}  // namespace

TEST(ShapeDerivative, LinearInPerturbation) {
    const Square s(5, ProfileKind::Hat);
    const auto dz = arclength_derivative(s.zeta);
    const auto a = s.solver.solve(CurrentPattern::between(8, 7, 0));
    const auto b = s.solver.solve(CurrentPattern::between(8, 2, 5));
    const auto k = CurvatureField::flat();
    const auto h1 = PerturbationField::vertical_stretch();
    const auto h2 = PerturbationField::electrode_shift(s.layout, 3);
    const double d1 = shape_derivative(a, b, s.zeta, dz, h1, k, s.sigma);
    const double d2 = shape_derivative(a, b, s.zeta, dz, h2, k, s.sigma);
    const double d12 = shape_derivative(a, b, s.zeta, dz, h1 * 2.0 + h2 * (-0.5), k, s.sigma);
    EXPECT_NEAR(d12, 2.0 * d1 - 0.5 * d2, 1e-12 * (std::abs(d1) + std::abs(d2)));
    EXPECT_EQ(shape_derivative(a, b, s.zeta, dz, PerturbationField::zero(), k, s.sigma), 0.0);
}

TEST(ShapeDerivative, FluxAndSymmetricFormsAgree) {
    for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
        const Square s(6, kind);
        const auto dz = arclength_derivative(s.zeta);
        const auto a = s.solver.solve(CurrentPattern::between(8, 7, 1));
        const auto b = s.solver.solve(CurrentPattern::between(8, 3, 6));
        const auto h = PerturbationField::unit();
        const double flux = shape_derivative(a, b, s.zeta, dz, h, CurvatureField::flat(), s.sigma);
        const double sym = shape_derivative_symmetric(a, b, s.zeta, dz, h, CurvatureField::flat(), s.sigma);
        // equal up to the discretization error of the flux identity
        EXPECT_NEAR(flux, sym, 2e-2 * std::abs(sym));
        // the symmetric form is symmetric in the two solutions
        const double swapped = shape_derivative_symmetric(b, a, s.zeta, dz, h, CurvatureField::flat(), s.sigma);
        EXPECT_NEAR(sym, swapped, 1e-12 * std::abs(sym));
    }
}

TEST(ShapeDerivative, MapDerivativeIsSymmetric) {
    for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
        const Square s(5, kind);
        const auto D = measurement_map_derivative(s.solver, PerturbationField::vertical_stretch(),
                                                  CurvatureField::flat());
        ASSERT_EQ(D.rows(), 7);
        EXPECT_LE((D - D.transpose()).cwiseAbs().maxCoeff(), 1e-10 * D.norm());
    }
}

TEST(ShapeDerivative, IntegralsAreSymmetricMatrices) {
    const Square s(5, ProfileKind::Box);
    const auto sols = s.solver.solve(difference_patterns(8));
    const auto d = derivative_integrals(sols, s.zeta);
    for (const auto* M : {&d.I1, &d.I2, &d.I3}) {
        ASSERT_EQ(M->rows(), 7);
        EXPECT_LE((*M - M->transpose()).cwiseAbs().maxCoeff(), 1e-12 * M->norm());
    }
    EXPECT_NEAR(d.I1(2, 4), integral_I1(sols[2], sols[4], s.zeta), 1e-14);
    EXPECT_GT(d.I3(0, 0), 0.0);
}

// Central differences of the FEM measurement map under an electrode shift
// (profile moved along the boundary) and a vertical stretch (re-meshed
// square of height 1 + eps).
TEST(ShapeDerivative, FiniteDifferenceOracle) {
    const double eps = 1e-4;
    for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
        const Square s(6, kind);
        {
            const auto D = measurement_map_derivative(s.solver, PerturbationField::electrode_shift(s.layout, 1),
                                                      CurvatureField::flat());
            const auto Rp = measurement_map(s.mesh, s.sigma, make_profile(s.layout.shifted(1, eps), kind, 20.0)).R;
            const auto Rm = measurement_map(s.mesh, s.sigma, make_profile(s.layout.shifted(1, -eps), kind, 20.0)).R;
            const Eigen::MatrixXd F = (Rp - Rm) / (2 * eps);
            EXPECT_LT((D - F).norm() / F.norm(), 1e-3);
        }
        {
            const auto D = measurement_map_derivative(s.solver, PerturbationField::vertical_stretch(),
                                                      CurvatureField::flat());
            auto stretched = [&](double e) {
                return std::make_shared<const Mesh>(s.mesh->deformed([e](Point p) { return Point{p.x, (1 + e) * p.y}; }));
            };
            const auto Rp = measurement_map(stretched(eps), s.sigma, s.zeta).R;
            const auto Rm = measurement_map(stretched(-eps), s.sigma, s.zeta).R;
            const Eigen::MatrixXd F = (Rp - Rm) / (2 * eps);
            // level 6: hat about 2.4%, box about 13% (box converges slowly)
            EXPECT_LT((D - F).norm() / F.norm(), kind == ProfileKind::Hat ? 0.04 : 0.2);
        }
    }
}
