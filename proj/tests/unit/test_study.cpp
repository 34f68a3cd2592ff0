#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "scem/errors.hpp"
#include "scem/study.hpp"

using namespace scem;

namespace {

std::shared_ptr<const Mesh> mesh_at(int level) {
    return std::make_shared<const Mesh>(build_mesh(level, ElectrodeLayout::default8()));
}

}  // namespace

TEST(Study, LogGrid) {
    const auto g = log_grid(1e-4, 10.0, 20);
    ASSERT_EQ(g.size(), 20u);
    EXPECT_DOUBLE_EQ(g.front(), 1e-4);
    EXPECT_DOUBLE_EQ(g.back(), 10.0);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(1e5, 1.0 / 19.0), 1e-12);
}

TEST(Study, ParallelMapKeepsOrderAndRethrows) {
    const auto a = parallel_map(50, 1, [](std::size_t i) { return static_cast<double>(i * i); });
    const auto b = parallel_map(50, 4, [](std::size_t i) { return static_cast<double>(i * i); });
    EXPECT_EQ(a, b);
    EXPECT_THROW(parallel_map(10, 3,
                              [](std::size_t i) {
                                  if (i == 6) throw std::runtime_error("six");
                                  return i;
                              }),
                 std::runtime_error);
}

TEST(Study, IdenticalModelsHaveZeroDifference) {
    const auto layout = ElectrodeLayout::default8();
    const auto box = make_profile(layout, ProfileKind::Box, 20.0);
    EXPECT_EQ(relative_difference(mesh_at(4), ConductivityField::constant(1.0), box, box), 0.0);
}

TEST(Study, DifferenceDependsOnlyOnRatio) {
    const auto layout = ElectrodeLayout::default8();
    const auto mesh = mesh_at(5);
    for (double ratio : {1e-3, 5e-2, 1.0}) {
        const double a = relative_difference(mesh, ConductivityField::constant(1.0),
                                             make_profile(layout, ProfileKind::Box, 1.0 / ratio),
                                             make_profile(layout, ProfileKind::Hat, 1.0 / ratio));
        const double b = relative_difference(mesh, ConductivityField::constant(10.0),
                                             make_profile(layout, ProfileKind::Box, 10.0 / ratio),
                                             make_profile(layout, ProfileKind::Hat, 10.0 / ratio));
        EXPECT_NEAR(a, b, 1e-8 * a);
    }
}

TEST(Study, OptimalScalingBeatsDefault) {
    const auto mesh = mesh_at(5);
    const auto r = optimize_scaling(mesh, ConductivityField::constant(1.0), 20.0);
    EXPECT_LE(r.difference, r.default_difference);
    EXPECT_GT(r.zeta_hat, 20.0);
    EXPECT_FALSE(r.at_bracket_edge);
    // a nearby half-height is no better
    const auto layout = ElectrodeLayout::default8();
    const auto box = make_profile(layout, ProfileKind::Box, 20.0);
    for (double f : {0.97, 1.03}) {
        const double d = relative_difference(mesh, ConductivityField::constant(1.0), box,
                                             make_profile(layout, ProfileKind::Hat, f * r.zeta_hat));
        EXPECT_GE(d, r.difference * (1 - 1e-6));
    }
}

TEST(Study, SweepRecordsEverySample) {
    const auto ratios = log_grid(1e-2, 1.0, 3);
    const auto curve = difference_sweep(mesh_at(4), 1.0, ratios, 2);
    ASSERT_EQ(curve.samples.size(), 3u);
    EXPECT_TRUE(curve.failures.empty());
    EXPECT_EQ(curve.level, 4);
    for (const auto& s : curve.samples) EXPECT_GT(s.difference, 0.0);
}

TEST(Study, FittedSlope) {
    std::vector<RateRow> rows;
    for (int level = 3; level <= 7; ++level) {
        const double h = std::ldexp(1.0, -level);
        rows.push_back({"x", "box", 1, level, h, 3.0 * h * h * (level == 3 ? 5.0 : 1.0)});
    }
    EXPECT_NEAR(fitted_slope(rows, 4), 2.0, 1e-12);
    EXPECT_GT(fitted_slope(rows, 5), 2.0);  // the inflated coarse level steepens the fit
}

TEST(Study, ReferenceMustBeFiner) {
    const auto layout = ElectrodeLayout::default8();
    std::vector<ConvergenceCase> cases{
        {"c", "box", 1, make_profile(layout, ProfileKind::Box, 20.0), constant_conductivity(1.0)}};
    EXPECT_THROW(convergence_study(layout, cases, {3, 4, 5}, 5), ContractError);
}

TEST(Study, ConvergenceErrorsDecrease) {
    const auto layout = ElectrodeLayout::default8();
    std::vector<ConvergenceCase> cases{
        {"c", "hat", 1, make_profile(layout, ProfileKind::Hat, 1.0 / 0.03), constant_conductivity(1.0)},
        {"c", "hat", 2, make_profile(layout, ProfileKind::Hat, 1.0 / 0.03), constant_conductivity(1.0)}};
    const auto table = convergence_study(layout, cases, {3, 4, 5}, 7);
    for (int order : {1, 2}) {
        const auto s = table.series("c", "hat", order);
        ASSERT_EQ(s.size(), 3u);
        EXPECT_GT(s[0].error, s[1].error);
        EXPECT_GT(s[1].error, s[2].error);
    }
    EXPECT_GT(table.fit("c", "hat", 2).slope, table.fit("c", "hat", 1).slope);
}
