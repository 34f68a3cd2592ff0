#include <gtest/gtest.h>

#include <cmath>

#include "scem/errors.hpp"
#include "scem/forward.hpp"

using namespace scem;

namespace {

std::shared_ptr<const Mesh> mesh_at(int level, int order = 1, ElectrodeLayout layout = ElectrodeLayout::default8()) {
    return std::make_shared<const Mesh>(build_mesh(level, layout, order));
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(Forward, ZeroPatternGivesZeroSolution) {
    const auto solver = make_solver(mesh_at(4), ConductivityField::constant(1.0),
                                    make_profile(ElectrodeLayout::default8(), ProfileKind::Hat, 20.0));
    const auto sol = solver.solve(CurrentPattern(Eigen::VectorXd::Zero(8)));
    EXPECT_EQ(sol.u.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(sol.U.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forward, NonZeroMeanPatternRejected) {
    Eigen::VectorXd I = Eigen::VectorXd::Zero(8);
    I[0] = 1.0;
    try {
        CurrentPattern p(I);
        FAIL() << "expected a contract error";
    } catch (const ContractError& e) {
        EXPECT_STREQ(e.what(), "current pattern must be zero-mean");
    }
    EXPECT_THROW(CurrentPattern::between(8, 8, 0), IndexError);
}

TEST(Forward, ElectrodePotentialsHaveZeroMean) {
    for (int order : {1, 2}) {
        const auto solver = make_solver(mesh_at(4, order), ConductivityField::constant(2.0),
                                        make_profile(ElectrodeLayout::default8(), ProfileKind::Box, 7.0));
        for (const auto& sol : solver.solve(difference_patterns(8))) EXPECT_NEAR(sol.U.sum(), 0.0, 1e-13);
    }
}

TEST(Forward, JointScalingHalvesPotentials) {
    const auto mesh = mesh_at(5);
    const auto layout = ElectrodeLayout::default8();
    const auto p = CurrentPattern::between(8, 7, 3);
    const auto a = make_solver(mesh, ConductivityField::constant(1.0), make_profile(layout, ProfileKind::Hat, 20.0)).solve(p);
    const auto b = make_solver(mesh, ConductivityField::constant(2.0), make_profile(layout, ProfileKind::Hat, 40.0)).solve(p);
    EXPECT_LT(rel(2.0 * b.U, a.U), 1e-12);
    EXPECT_LT(rel(2.0 * b.u, a.u), 1e-12);
}

TEST(Forward, MirrorSymmetry) {
    // Under a symmetry of the square that swaps the two driven electrodes the
    // pattern changes sign, so U must be odd under the induced permutation.
    const auto layout = ElectrodeLayout::default8();
    const auto solver = make_solver(mesh_at(6), ConductivityField::constant(1.0), make_profile(layout, ProfileKind::Box, 20.0));
    auto check = [&](std::size_t a, std::size_t b, auto&& map) {
        std::vector<std::size_t> image(8);
        for (std::size_t k = 0; k < 8; ++k) image[k] = *layout.electrode_at(std::fmod(map(layout.arc(k).midpoint()) + 8.0, 4.0));
        ASSERT_EQ(image[a], b);
        const auto sol = solver.solve(CurrentPattern::between(8, a, b));
        for (std::size_t k = 0; k < 8; ++k) {
            EXPECT_NEAR(sol.U[static_cast<Eigen::Index>(k)], -sol.U[static_cast<Eigen::Index>(image[k])], 1e-12);
        }
    };
    check(7, 3, [](double s) { return s + 2.0; });  // half turn about the centre
    check(7, 0, [](double s) { return -s; });       // reflection in the diagonal y = x
    check(1, 4, [](double s) { return 3.0 - s; });  // reflection in y = 1/2
}

TEST(Forward, MeasurementMapIsSymmetric) {
    const auto layout = ElectrodeLayout::default8();
    std::vector<double> heights{5, 10, 20, 40, 3, 8, 13, 30};
    for (int order : {1, 2}) {
        for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
            const auto R = measurement_map(mesh_at(5, order), ConductivityField::constant(1.3),
                                           make_profile(layout, kind, heights)).R;
            EXPECT_LE((R - R.transpose()).cwiseAbs().maxCoeff(), 1e-10 * R.norm());
        }
    }
}

TEST(Forward, MeasurementMapScalesInversely) {
    const auto layout = ElectrodeLayout::default8();
    const auto mesh = mesh_at(4);
    const auto R1 = measurement_map(mesh, ConductivityField::constant(1.0), make_profile(layout, ProfileKind::Hat, 10.0)).R;
    const auto R3 = measurement_map(mesh, ConductivityField::constant(3.0), make_profile(layout, ProfileKind::Hat, 30.0)).R;
    EXPECT_LT((3.0 * R3 - R1).norm() / R1.norm(), 1e-12);
}

TEST(Forward, TwoElectrodesGivePositiveResistance) {
    const ElectrodeLayout layout({{0.25, 0.5}, {2.25, 2.5}});
    const auto R = measurement_map(mesh_at(4, 1, layout), ConductivityField::constant(1.0),
                                   make_profile(layout, ProfileKind::Box, 10.0)).R;
    ASSERT_EQ(R.rows(), 1);
    EXPECT_GT(R(0, 0), 0.0);
}

TEST(Forward, ElectrodeWithoutContactIsSingular) {
    const auto layout = ElectrodeLayout::default8();
    std::vector<std::vector<double>> knots, values;
    for (std::size_t m = 0; m < 8; ++m) {
        knots.push_back({layout.arc(m).begin, layout.arc(m).end});
        values.push_back(m == 2 ? std::vector<double>{0.0, 0.0} : std::vector<double>{1.0, 1.0});
    }
    EXPECT_THROW(make_solver(mesh_at(4), ConductivityField::constant(1.0), make_custom_profile(layout, knots, values)),
                 SolverError);
}

TEST(Forward, ConductivityValidation) {
    EXPECT_THROW(ConductivityField::constant(0.0), ParameterError);
    EXPECT_THROW(ConductivityField::nodal({1.0, -1.0}), ParameterError);
    const auto layout = ElectrodeLayout::default8();
    EXPECT_THROW(make_solver(mesh_at(3), ConductivityField::nodal(std::vector<double>(10, 1.0)),
                             make_profile(layout, ProfileKind::Box, 1.0)),
                 ContractError);
}

TEST(Forward, CurrentRecoveryFromFlux) {
    const auto layout = ElectrodeLayout::default8();
    for (int order : {1, 2}) {
        for (ProfileKind kind : {ProfileKind::Box, ProfileKind::Hat}) {
            const auto zeta = make_profile(layout, kind, {5, 10, 20, 40, 3, 8, 13, 30});
            const auto solver = make_solver(mesh_at(6, order), ConductivityField::constant(1.0), zeta);
            Eigen::VectorXd I(8);
            I << 1.0, -0.5, 0.25, 2.0, -1.5, 0.0, -0.75, -0.5;
            const auto sol = solver.solve(CurrentPattern(I));
            const BoundaryFlux flux(sol, zeta);
            for (std::size_t m = 0; m < 8; ++m) {
                EXPECT_NEAR(flux.electrode_current(m), I[static_cast<Eigen::Index>(m)], 1e-6 * I.norm());
            }
            EXPECT_NEAR(flux.total_current(), 0.0, 1e-10);
            EXPECT_EQ(flux(1.0), 0.0);  // gap
        }
    }
}

TEST(Forward, GroundingConventionsAgree) {
    const auto layout = ElectrodeLayout::default8();
    const auto mesh = mesh_at(5);
    const auto zeta = make_profile(layout, ProfileKind::Hat, 20.0);
    const auto p = CurrentPattern::between(8, 2, 6);
    const auto a = make_solver(mesh, ConductivityField::constant(1.0), zeta, Grounding::ZeroMean).solve(p);
    const auto b = make_solver(mesh, ConductivityField::constant(1.0), zeta, Grounding::LastElectrode).solve(p);
    EXPECT_LT(rel(b.U, a.U), 1e-11);
}

TEST(Forward, NodalConstantMatchesConstantField) {
    const auto layout = ElectrodeLayout::default8();
    for (int order : {1, 2}) {
        const auto mesh = mesh_at(4, order);
        const auto zeta = make_profile(layout, ProfileKind::Box, 20.0);
        const auto p = CurrentPattern::between(8, 7, 0);
        const auto a = make_solver(mesh, ConductivityField::constant(1.7), zeta).solve(p);
        const auto b = make_solver(mesh, ConductivityField::nodal(std::vector<double>(mesh->vertices().size(), 1.7)), zeta)
                           .solve(p);
        EXPECT_LT(rel(b.U, a.U), 1e-12);
    }
}

TEST(Forward, ProlongationIsExactInterpolation) {
    // a linear field is reproduced exactly
    const Mesh coarse = build_mesh(3, ElectrodeLayout::default8());
    const Mesh fine = build_mesh(5, ElectrodeLayout::default8());
    std::vector<double> v;
    for (const Point& p : coarse.vertices()) v.push_back(1.0 + 2.0 * p.x - 0.5 * p.y);
    const auto w = prolongate(v, 3, 5);
    ASSERT_EQ(w.size(), fine.vertices().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Point p = fine.vertices()[i];
        EXPECT_NEAR(w[i], 1.0 + 2.0 * p.x - 0.5 * p.y, 1e-14);
    }
}

// Box model, sigma = 1, sigma/zeta = 0.05, I = e_8 - e_1 on the eight-electrode
// square. The reference values come from a level-10 P1 solve (1025^2 nodes);
// a level-8 P2 solve agrees with them to 1.5e-5.
TEST(Forward, LevelSevenAgainstReference) {
    Eigen::VectorXd reference(8);
    reference << -0.66942550470851503, -0.090479799591439078, -0.057325410411053192, -0.0081396328271039556,
        0.0081396328271118937, 0.057325410411047745, 0.090479799591426657, 0.66942550470852491;
    Eigen::VectorXd level7(8);
    level7 << -0.66832365398154814, -0.090512712016068947, -0.057336054537186786, -0.008142880712624128,
        0.0081428807126374299, 0.057336054537191428, 0.090512712016067198, 0.66832365398153204;
    const auto layout = ElectrodeLayout::default8();
    const auto sol = make_solver(mesh_at(7), ConductivityField::constant(1.0), make_profile(layout, ProfileKind::Box, 20.0))
                         .solve(CurrentPattern::between(8, 7, 0));
    EXPECT_LT(rel(sol.U, level7), 1e-10);
    const double err = rel(sol.U, reference);
    EXPECT_GT(err, 5e-4);
    EXPECT_LT(err, 2e-3);
}
