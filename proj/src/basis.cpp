#include "scem/basis.hpp"

#include <cmath>

#include "scem/quadrature.hpp"

namespace scem {

const QuadratureRule1D& gauss_legendre(int n) {
    static const std::array<QuadratureRule1D, 5> rules = [] {
        // Nodes/weights on [-1,1], mapped to [0,1] below.
        const std::array<std::vector<double>, 5> x = {
            std::vector<double>{0.0},
            std::vector<double>{-0.57735026918962576451, 0.57735026918962576451},
            std::vector<double>{-0.77459666924148337704, 0.0, 0.77459666924148337704},
            std::vector<double>{-0.86113631159405257522, -0.33998104358485626480,
                                0.33998104358485626480, 0.86113631159405257522},
            std::vector<double>{-0.90617984593866399280, -0.53846931010568309104, 0.0,
                                0.53846931010568309104, 0.90617984593866399280}};
        const std::array<std::vector<double>, 5> w = {
            std::vector<double>{2.0},
            std::vector<double>{1.0, 1.0},
            std::vector<double>{0.55555555555555555556, 0.88888888888888888889, 0.55555555555555555556},
            std::vector<double>{0.34785484513745385737, 0.65214515486254614263,
                                0.65214515486254614263, 0.34785484513745385737},
            std::vector<double>{0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889,
                                0.47862867049936646804, 0.23692688505618908751}};
        std::array<QuadratureRule1D, 5> out;
        for (std::size_t k = 0; k < 5; ++k) {
            for (std::size_t q = 0; q < x[k].size(); ++q) {
                out[k].points.push_back(0.5 * (x[k][q] + 1.0));
                out[k].weights.push_back(0.5 * w[k][q]);
            }
        }
        return out;
    }();
    if (n < 1 || n > 5) n = std::clamp(n, 1, 5);
    return rules[static_cast<std::size_t>(n - 1)];
}

std::span<const TriangleQuadPoint> triangle_rule_degree4() {
    static const std::array<TriangleQuadPoint, 6> rule = [] {
        constexpr double a = 0.445948490915965;
        constexpr double wa = 0.223381589678011;
        constexpr double b = 0.091576213509771;
        constexpr double wb = 0.109951743655322;
        return std::array<TriangleQuadPoint, 6>{
            TriangleQuadPoint{{a, a, 1.0 - 2.0 * a}, wa}, TriangleQuadPoint{{a, 1.0 - 2.0 * a, a}, wa},
            TriangleQuadPoint{{1.0 - 2.0 * a, a, a}, wa}, TriangleQuadPoint{{b, b, 1.0 - 2.0 * b}, wb},
            TriangleQuadPoint{{b, 1.0 - 2.0 * b, b}, wb}, TriangleQuadPoint{{1.0 - 2.0 * b, b, b}, wb}};
    }();
    return rule;
}

TriangleGeometry triangle_geometry(Point a, Point b, Point c) {
    TriangleGeometry g;
    g.area = signed_area(a, b, c);
    const double inv = 1.0 / (2.0 * g.area);
    g.grad_lambda[0] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
    g.grad_lambda[1] = {(c.y - a.y) * inv, (a.x - c.x) * inv};
    g.grad_lambda[2] = {(a.y - b.y) * inv, (b.x - a.x) * inv};
    return g;
}

void lagrange_values(int order, const std::array<double, 3>& l, std::span<double> out) {
    if (order == 1) {
        out[0] = l[0];
        out[1] = l[1];
        out[2] = l[2];
        return;
    }
    for (int i = 0; i < 3; ++i) out[i] = l[i] * (2.0 * l[i] - 1.0);
    out[3] = 4.0 * l[0] * l[1];
    out[4] = 4.0 * l[1] * l[2];
    out[5] = 4.0 * l[2] * l[0];
}

void lagrange_gradients(int order, const std::array<double, 3>& l, const TriangleGeometry& geo,
                        std::span<Point> out) {
    const auto& g = geo.grad_lambda;
    if (order == 1) {
        out[0] = g[0];
        out[1] = g[1];
        out[2] = g[2];
        return;
    }
    for (int i = 0; i < 3; ++i) {
        const double f = 4.0 * l[i] - 1.0;
        out[i] = {f * g[i].x, f * g[i].y};
    }
    auto edge = [&](int i, int j) {
        return Point{4.0 * (l[i] * g[j].x + l[j] * g[i].x), 4.0 * (l[i] * g[j].y + l[j] * g[i].y)};
    };
    out[3] = edge(0, 1);
    out[4] = edge(1, 2);
    out[5] = edge(2, 0);
}

void edge_values(int order, double t, std::span<double> out) {
    if (order == 1) {
        out[0] = 1.0 - t;
        out[1] = t;
        return;
    }
    out[0] = (1.0 - t) * (1.0 - 2.0 * t);
    out[1] = t * (2.0 * t - 1.0);
    out[2] = 4.0 * t * (1.0 - t);
}

void edge_derivatives(int order, double t, std::span<double> out) {
    if (order == 1) {
        out[0] = -1.0;
        out[1] = 1.0;
        return;
    }
    out[0] = 4.0 * t - 3.0;
    out[1] = 4.0 * t - 1.0;
    out[2] = 4.0 - 8.0 * t;
}

}  // namespace scem
