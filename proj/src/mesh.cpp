#include "scem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "scem/errors.hpp"

namespace scem {

namespace {

constexpr int kMinLevel = 2;
constexpr int kMaxLevel = 12;
constexpr double kAlignTol = 1e-9;

int side_of(double s) {
    return std::min(3, static_cast<int>(std::floor(s)));
}

void check_arclength(double s) {
    if (!(s >= 0.0 && s < kPerimeter)) {
        std::ostringstream msg;
        msg << "arclength " << s << " outside [0, 4)";
        throw DomainError(msg.str());
    }
}

bool on_grid(double x, double h) {
    const double k = x / h;
    return std::abs(k - std::round(k)) <= kAlignTol * std::max(1.0, k);
}

}  // namespace

Point arclength_to_point(double s) {
    check_arclength(s);
    const int side = side_of(s);
    const double t = s - side;
    switch (side) {
        case 0: return {t, 0.0};
        case 1: return {1.0, t};
        case 2: return {1.0 - t, 1.0};
        default: return {0.0, 1.0 - t};
    }
}

Point outward_normal(double s) {
    check_arclength(s);
    switch (side_of(s)) {
        case 0: return {0.0, -1.0};
        case 1: return {1.0, 0.0};
        case 2: return {0.0, 1.0};
        default: return {-1.0, 0.0};
    }
}

Point unit_tangent(double s) {
    check_arclength(s);
    switch (side_of(s)) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

ElectrodeLayout::ElectrodeLayout(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    if (arcs_.size() < 2) {
        throw LayoutError("at least two electrodes are required");
    }
    for (const Arc& a : arcs_) {
        if (!(a.begin >= 0.0 && a.end <= kPerimeter && a.begin < a.end)) {
            std::ostringstream msg;
            msg << "invalid electrode arc [" << a.begin << ", " << a.end << ")";
            throw LayoutError(msg.str());
        }
        const double side = std::floor(a.begin);
        if (!(a.begin > side && a.end < side + 1.0)) {
            std::ostringstream msg;
            msg << "electrode arc [" << a.begin << ", " << a.end << ") touches or spans a corner";
            throw LayoutError(msg.str());
        }
    }
    std::sort(arcs_.begin(), arcs_.end(),
              [](const Arc& l, const Arc& r) { return l.begin < r.begin; });
    for (std::size_t m = 1; m < arcs_.size(); ++m) {
        if (!(arcs_[m].begin > arcs_[m - 1].end)) {
            std::ostringstream msg;
            msg << "electrodes " << m << " and " << m + 1 << " overlap or touch";
            throw LayoutError(msg.str());
        }
    }
}

std::optional<std::size_t> ElectrodeLayout::electrode_at(double s) const {
    auto it = std::upper_bound(arcs_.begin(), arcs_.end(), s,
                               [](double v, const Arc& a) { return v < a.begin; });
    if (it == arcs_.begin()) return std::nullopt;
    --it;
    if (it->contains(s)) return static_cast<std::size_t>(it - arcs_.begin());
    return std::nullopt;
}

ElectrodeLayout ElectrodeLayout::shifted(std::size_t index, double offset) const {
    std::vector<Arc> arcs = arcs_;
    Arc& a = arcs.at(index);
    a.begin += offset;
    a.end += offset;
    return ElectrodeLayout(std::move(arcs));
}

ElectrodeLayout ElectrodeLayout::default8() {
    std::vector<Arc> arcs;
    for (int side = 0; side < 4; ++side) {
        arcs.push_back({side + 0.125, side + 0.375});
        arcs.push_back({side + 0.625, side + 0.875});
    }
    return ElectrodeLayout(std::move(arcs));
}

ElectrodeLayout ElectrodeLayout::default12() {
    std::vector<Arc> arcs;
    for (int side = 0; side < 4; ++side) {
        arcs.push_back({side + 0.125, side + 0.25});
        arcs.push_back({side + 0.4375, side + 0.5625});
        arcs.push_back({side + 0.75, side + 0.875});
    }
    return ElectrodeLayout(std::move(arcs));
}

ElectrodeLayout ElectrodeLayout::default16() {
    std::vector<Arc> arcs;
    for (int side = 0; side < 4; ++side) {
        for (int k = 0; k < 4; ++k) {
            const double centre = side + (2 * k + 1) / 8.0;
            arcs.push_back({centre - 1.0 / 32.0, centre + 1.0 / 32.0});
        }
    }
    return ElectrodeLayout(std::move(arcs));
}

Mesh::Mesh(int level, int order, ElectrodeLayout layout)
    : level_(level),
      order_(order),
      h_(std::ldexp(1.0, -level)),
      side_vertices_((Index{1} << level) + 1),
      layout_(std::move(layout)) {}

std::span<const Index> Mesh::triangle_dofs(std::size_t t) const {
    const std::size_t k = dofs_per_triangle();
    return std::span<const Index>(triangle_dofs_).subspan(t * k, k);
}

std::span<const Index> Mesh::edge_dofs(std::size_t e) const {
    const std::size_t k = dofs_per_edge();
    return std::span<const Index>(edge_dofs_).subspan(e * k, k);
}

std::size_t Mesh::edge_at(double s) const {
    check_arclength(s);
    const auto k = static_cast<std::size_t>(std::floor(s / h_));
    return std::min(k, edges_.size() - 1);
}

Index Mesh::vertex_dof(Index i, Index j) const {
    if (order_ == 1) return j * side_vertices_ + i;
    const Index m = 2 * side_vertices_ - 1;
    return 2 * j * m + 2 * i;
}

Mesh Mesh::deformed(const std::function<Point(Point)>& map) const {
    Mesh out = *this;
    out.reference_ = false;
    for (Point& p : out.vertices_) p = map(p);
    if (order_ == 1) {
        out.dof_points_ = out.vertices_;
        return out;
    }
    const Index n = side_vertices_ - 1;
    const Index m = 2 * n + 1;
    auto vtx = [&](Index i, Index j) { return out.vertices_[j * side_vertices_ + i]; };
    auto mid = [](Point a, Point b) { return Point{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; };
    for (Index J = 0; J < m; ++J) {
        for (Index I = 0; I < m; ++I) {
            Point& p = out.dof_points_[J * m + I];
            const bool io = I % 2 != 0;
            const bool jo = J % 2 != 0;
            if (!io && !jo) {
                p = vtx(I / 2, J / 2);
            } else if (io && !jo) {
                p = mid(vtx((I - 1) / 2, J / 2), vtx((I + 1) / 2, J / 2));
            } else if (!io && jo) {
                p = mid(vtx(I / 2, (J - 1) / 2), vtx(I / 2, (J + 1) / 2));
            } else {
                p = mid(vtx((I - 1) / 2, (J - 1) / 2), vtx((I + 1) / 2, (J + 1) / 2));
            }
        }
    }
    return out;
}

Mesh build_mesh(int level, const ElectrodeLayout& layout, int order) {
    if (level < kMinLevel || level > kMaxLevel) {
        std::ostringstream msg;
        msg << "refinement level " << level << " outside [" << kMinLevel << ", " << kMaxLevel << "]";
        throw ContractError(msg.str());
    }
    if (order != 1 && order != 2) {
        throw ContractError("element order must be 1 or 2");
    }
    const double h = std::ldexp(1.0, -level);
    for (std::size_t m = 0; m < layout.size(); ++m) {
        const Arc& a = layout.arc(m);
        if (!on_grid(a.begin, h) || !on_grid(a.end, h)) {
            std::ostringstream msg;
            msg << "electrode " << m + 1 << " arc [" << a.begin << ", " << a.end
                << ") is not aligned with the level-" << level << " boundary grid (h = " << h << ")";
            throw AlignmentError(msg.str());
        }
    }

    Mesh mesh(level, order, layout);
    const Index n = Index{1} << level;
    const Index nv = n + 1;
    auto vid = [nv](Index i, Index j) { return j * nv + i; };

    mesh.vertices_.resize(static_cast<std::size_t>(nv) * nv);
    for (Index j = 0; j < nv; ++j) {
        for (Index i = 0; i < nv; ++i) {
            mesh.vertices_[vid(i, j)] = {i * h, j * h};
        }
    }

    mesh.triangles_.reserve(2 * static_cast<std::size_t>(n) * n);
    mesh.triangle_dofs_.reserve(2 * static_cast<std::size_t>(n) * n * mesh.dofs_per_triangle());
    const Index m = 2 * n + 1;  // P2 DOFs per side
    auto did = [m](Index I, Index J) { return J * m + I; };
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const Index a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            mesh.triangles_.push_back({a, b, c});
            mesh.triangles_.push_back({a, c, d});
            if (order == 1) {
                mesh.triangle_dofs_.insert(mesh.triangle_dofs_.end(), {a, b, c, a, c, d});
            } else {
                const Index I = 2 * i, J = 2 * j;
                mesh.triangle_dofs_.insert(
                    mesh.triangle_dofs_.end(),
                    {did(I, J), did(I + 2, J), did(I + 2, J + 2),
                     did(I + 1, J), did(I + 2, J + 1), did(I + 1, J + 1)});
                mesh.triangle_dofs_.insert(
                    mesh.triangle_dofs_.end(),
                    {did(I, J), did(I + 2, J + 2), did(I, J + 2),
                     did(I + 1, J + 1), did(I + 1, J + 2), did(I, J + 1)});
            }
        }
    }

    if (order == 1) {
        mesh.dof_points_ = mesh.vertices_;
    } else {
        mesh.dof_points_.resize(static_cast<std::size_t>(m) * m);
        const double hh = 0.5 * h;
        for (Index J = 0; J < m; ++J) {
            for (Index I = 0; I < m; ++I) mesh.dof_points_[did(I, J)] = {I * hh, J * hh};
        }
    }

    mesh.edges_.reserve(4 * static_cast<std::size_t>(n));
    for (Index k = 0; k < 4 * n; ++k) {
        const Index side = k / n;
        const Index p = k % n;
        BoundaryEdge e;
        Index mid = 0;
        switch (side) {
            case 0:
                e.vertices = {vid(p, 0), vid(p + 1, 0)};
                mid = did(2 * p + 1, 0);
                break;
            case 1:
                e.vertices = {vid(n, p), vid(n, p + 1)};
                mid = did(2 * n, 2 * p + 1);
                break;
            case 2:
                e.vertices = {vid(n - p, n), vid(n - p - 1, n)};
                mid = did(2 * n - 2 * p - 1, 2 * n);
                break;
            default:
                e.vertices = {vid(0, n - p), vid(0, n - p - 1)};
                mid = did(0, 2 * n - 2 * p - 1);
                break;
        }
        e.s0 = k * h;
        e.s1 = (k + 1) * h;
        if (auto el = layout.electrode_at(0.5 * (e.s0 + e.s1))) e.electrode = static_cast<int>(*el) + 1;
        mesh.edges_.push_back(e);
        if (order == 1) {
            mesh.edge_dofs_.insert(mesh.edge_dofs_.end(), {e.vertices[0], e.vertices[1]});
        } else {
            auto to_dof = [&](Index v) {
                const Index i = v % nv, j = v / nv;
                return did(2 * i, 2 * j);
            };
            mesh.edge_dofs_.insert(mesh.edge_dofs_.end(),
                                   {to_dof(e.vertices[0]), to_dof(e.vertices[1]), mid});
        }
    }
    return mesh;
}

std::vector<std::size_t> electrode_edges(const Mesh& mesh, int number) {
    if (number < 1 || static_cast<std::size_t>(number) > mesh.layout().size()) {
        std::ostringstream msg;
        msg << "electrode number " << number << " outside [1, " << mesh.layout().size() << "]";
        throw IndexError(msg.str());
    }
    std::vector<std::size_t> out;
    const auto edges = mesh.boundary_edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].electrode == number) out.push_back(e);
    }
    return out;
}

double signed_area(Point a, Point b, Point c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace scem
