#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <utility>

#include "scem/errors.hpp"
#include "scem/mesh.hpp"

using namespace scem;

TEST(Mesh, LevelThreeCounts) {
    const Mesh mesh = build_mesh(3, ElectrodeLayout::default8());
    EXPECT_EQ(mesh.vertices().size(), 81u);
    EXPECT_EQ(mesh.triangles().size(), 128u);
    // 8 edges per side
    EXPECT_EQ(mesh.boundary_edges().size(), 32u);
    int tagged = 0;
    for (const auto& e : mesh.boundary_edges()) tagged += e.electrode != 0;
    EXPECT_EQ(tagged, 16);
    EXPECT_DOUBLE_EQ(mesh.h(), 0.125);
}

TEST(Mesh, NodeCountFormula) {
    for (int level = 2; level <= 7; ++level) {
        const Mesh mesh = build_mesh(level, ElectrodeLayout({{0.25, 0.5}, {2.25, 2.5}}));
        const std::size_t n = (1u << level) + 1;
        EXPECT_EQ(mesh.vertices().size(), n * n);
        EXPECT_DOUBLE_EQ(mesh.h(), std::ldexp(1.0, -level));
    }
}

TEST(Mesh, FinestPaperLevel) {
    const Mesh mesh = build_mesh(11, ElectrodeLayout::default8());
    EXPECT_EQ(mesh.vertices().size(), 2049u * 2049u);
}

TEST(Mesh, TrianglesPositiveAndTile) {
    for (int order : {1, 2}) {
        const Mesh mesh = build_mesh(5, ElectrodeLayout::default8(), order);
        const auto v = mesh.vertices();
        double total = 0.0;
        for (const auto& t : mesh.triangles()) {
            const double a = signed_area(v[t[0]], v[t[1]], v[t[2]]);
            EXPECT_GT(a, 0.0);
            total += a;
        }
        EXPECT_NEAR(total, 1.0, 1e-13);
    }
}

TEST(Mesh, BoundaryTilesPerimeter) {
    const Mesh mesh = build_mesh(6, ElectrodeLayout::default16());
    double length = 0.0;
    double expected_start = 0.0;
    for (const auto& e : mesh.boundary_edges()) {
        EXPECT_DOUBLE_EQ(e.s0, expected_start);
        expected_start = e.s1;
        const Point a = mesh.vertices()[e.vertices[0]], b = mesh.vertices()[e.vertices[1]];
        length += std::hypot(b.x - a.x, b.y - a.y);
    }
    EXPECT_DOUBLE_EQ(expected_start, 4.0);
    EXPECT_NEAR(length, 4.0, 1e-13);
}

TEST(Mesh, RefinementNestsNodes) {
    const Mesh coarse = build_mesh(4, ElectrodeLayout::default8());
    const Mesh fine = build_mesh(5, ElectrodeLayout::default8());
    std::set<std::pair<double, double>> fine_nodes;
    for (const Point& p : fine.vertices()) fine_nodes.insert({p.x, p.y});
    for (const Point& p : coarse.vertices()) EXPECT_TRUE(fine_nodes.count({p.x, p.y})) << p.x << ' ' << p.y;
}

TEST(Mesh, ArclengthConvention) {
    auto expect_point = [](double s, double x, double y) {
        const Point p = arclength_to_point(s);
        EXPECT_NEAR(p.x, x, 1e-15);
        EXPECT_NEAR(p.y, y, 1e-15);
    };
    expect_point(0.0, 0.0, 0.0);
    expect_point(1.5, 1.0, 0.5);
    expect_point(2.5, 0.5, 1.0);
    expect_point(3.999, 0.0, 0.001);
    EXPECT_THROW(arclength_to_point(4.0), DomainError);
    EXPECT_THROW(arclength_to_point(-0.1), DomainError);
}

TEST(Mesh, ElectrodeEdges) {
    const auto layout = ElectrodeLayout::default8();
    const Mesh m3 = build_mesh(3, layout);
    const Mesh m4 = build_mesh(4, layout);
    for (int e = 1; e <= 8; ++e) {
        const auto edges3 = electrode_edges(m3, e);
        ASSERT_EQ(edges3.size(), 2u);
        EXPECT_EQ(electrode_edges(m4, e).size(), 4u);
        const Arc& arc = layout.arc(static_cast<std::size_t>(e - 1));
        EXPECT_DOUBLE_EQ(m3.boundary_edges()[edges3.front()].s0, arc.begin);
        EXPECT_DOUBLE_EQ(m3.boundary_edges()[edges3.back()].s1, arc.end);
    }
    EXPECT_THROW(electrode_edges(m3, 0), IndexError);
    EXPECT_THROW(electrode_edges(m3, 9), IndexError);
}

TEST(Mesh, PreconditionErrors) {
    EXPECT_THROW(build_mesh(3, ElectrodeLayout({{0.3, 0.5}, {2.25, 2.5}})), AlignmentError);
    EXPECT_THROW(build_mesh(1, ElectrodeLayout::default8()), ContractError);
    EXPECT_THROW(ElectrodeLayout({{0.25, 0.5}, {0.375, 0.625}}), LayoutError);
    EXPECT_THROW(ElectrodeLayout({{0.25, 0.5}, {0.5, 0.75}}), LayoutError);  // touching, no gap
    EXPECT_THROW(ElectrodeLayout({{0.75, 1.25}, {2.25, 2.5}}), LayoutError);  // spans a corner
    EXPECT_THROW(ElectrodeLayout({{0.25, 0.5}}), LayoutError);
}

TEST(Mesh, SecondOrderDofGrid) {
    const Mesh p2 = build_mesh(4, ElectrodeLayout::default8(), 2);
    const Mesh p1 = build_mesh(5, ElectrodeLayout::default8(), 1);
    EXPECT_EQ(p2.dof_count(), p1.vertices().size());
    EXPECT_EQ(p2.vertices().size(), 17u * 17u);
    EXPECT_DOUBLE_EQ(p2.h(), 1.0 / 16.0);
}
