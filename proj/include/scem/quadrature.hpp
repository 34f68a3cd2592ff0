#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <span>
#include <vector>

#include "scem/mesh.hpp"

namespace scem {

struct QuadratureRule1D {
    std::vector<double> points;   // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule on [0,1], exact for degree 2n-1 (1 <= n <= 5).
const QuadratureRule1D& gauss_legendre(int n);

/// Barycentric point with weight relative to the triangle area.
struct TriangleQuadPoint {
    std::array<double, 3> lambda;
    double weight;
};

/// Six-point symmetric rule, exact for polynomials of degree 4.
std::span<const TriangleQuadPoint> triangle_rule_degree4();

/// A quadrature node on the boundary: edge index, reference arclength s,
/// local edge coordinate t in [0,1] and weight in physical length.
struct BoundaryQuadPoint {
    std::size_t edge;
    double s;
    double t;
    double weight;
};

/// Visits Gauss nodes on every boundary edge. Edges are split at the given
/// sorted breakpoints so that piecewise-polynomial coefficients with kinks or
/// jumps there are integrated exactly. If `only_inside` is given, only
/// sub-pieces whose midpoint satisfies the predicate are visited.
template <class Visit, class Keep>
void for_each_boundary_point(const Mesh& mesh, std::span<const double> breakpoints, int gauss_points,
                             Keep&& only_inside, Visit&& visit) {
    const QuadratureRule1D& rule = gauss_legendre(gauss_points);
    const auto edges = mesh.boundary_edges();
    const auto verts = mesh.vertices();
    std::vector<double> cuts;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const BoundaryEdge& edge = edges[e];
        const Point a = verts[edge.vertices[0]];
        const Point b = verts[edge.vertices[1]];
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double length = std::sqrt(dx * dx + dy * dy);
        const double ref_length = edge.s1 - edge.s0;
        cuts.assign({edge.s0});
        auto lo = std::upper_bound(breakpoints.begin(), breakpoints.end(), edge.s0);
        for (auto it = lo; it != breakpoints.end() && *it < edge.s1; ++it) {
            if (*it > cuts.back()) cuts.push_back(*it);
        }
        cuts.push_back(edge.s1);
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double sa = cuts[p], sb = cuts[p + 1];
            if (!only_inside(0.5 * (sa + sb))) continue;
            const double scale = length * (sb - sa) / ref_length;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double s = sa + rule.points[q] * (sb - sa);
                visit(BoundaryQuadPoint{e, s, (s - edge.s0) / ref_length, rule.weights[q] * scale});
            }
        }
    }
}

template <class Visit>
void for_each_boundary_point(const Mesh& mesh, std::span<const double> breakpoints, int gauss_points,
                             Visit&& visit) {
    for_each_boundary_point(mesh, breakpoints, gauss_points, [](double) { return true; },
                            std::forward<Visit>(visit));
}

}  // namespace scem
