#pragma once

#include <array>
#include <span>

#include "scem/mesh.hpp"

namespace scem {

/// Affine geometry of a triangle: area and gradients of the barycentric
/// coordinates.
struct TriangleGeometry {
    double area = 0.0;
    std::array<Point, 3> grad_lambda{};
};

TriangleGeometry triangle_geometry(Point a, Point b, Point c);

/// Values of the P1 (3) or P2 (6) Lagrange basis at barycentric point
/// `lambda`. P2 ordering: vertices 0,1,2 then edge midpoints 01, 12, 20.
void lagrange_values(int order, const std::array<double, 3>& lambda, std::span<double> out);

/// Gradients of the same basis functions.
void lagrange_gradients(int order, const std::array<double, 3>& lambda, const TriangleGeometry& geo,
                        std::span<Point> out);

/// Edge trace basis at local coordinate t in [0,1]: (start, end) for P1 and
/// (start, end, midpoint) for P2.
void edge_values(int order, double t, std::span<double> out);
/// d/dt of the edge trace basis.
void edge_derivatives(int order, double t, std::span<double> out);

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

}  // namespace scem
