#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace scem {

using Index = std::int32_t;

/// Perimeter of the unit square; boundary arclength lives in [0, kPerimeter).
inline constexpr double kPerimeter = 4.0;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Half-open arclength interval [begin, end) on the boundary of the unit square.
struct Arc {
    double begin = 0.0;
    double end = 0.0;

    double width() const { return end - begin; }
    double midpoint() const { return 0.5 * (begin + end); }
    bool contains(double s) const { return s >= begin && s < end; }
};

/// Maps boundary arclength to a point on the unit square. The origin is the
/// corner (0,0) and the boundary is traversed counter-clockwise, so sides are
/// bottom [0,1), right [1,2), top [2,3) and left [3,4).
Point arclength_to_point(double s);

/// Outward unit normal of the side containing arclength s (corners belong to
/// the side that starts there).
Point outward_normal(double s);

/// Counter-clockwise unit tangent of the side containing arclength s.
Point unit_tangent(double s);

/// M >= 2 well-separated electrodes, each strictly inside one side of the
/// square. Arcs are stored sorted by arclength; electrode numbers used in
/// files and messages are 1-based, indices into vectors are 0-based.
class ElectrodeLayout {
public:
    explicit ElectrodeLayout(std::vector<Arc> arcs);

    std::size_t size() const { return arcs_.size(); }
    const Arc& arc(std::size_t index) const { return arcs_.at(index); }
    std::span<const Arc> arcs() const { return arcs_; }

    /// 0-based index of the electrode whose arc contains s, if any.
    std::optional<std::size_t> electrode_at(double s) const;

    /// Shifted copy: electrode `index` moved by `offset` along the boundary.
    ElectrodeLayout shifted(std::size_t index, double offset) const;

    /// Eight electrodes of width 1/4, two centred on each side halve.
    static ElectrodeLayout default8();
    /// Twelve electrodes of width 1/8, three per side.
    static ElectrodeLayout default12();
    /// Sixteen electrodes of width 1/16, four per side (tank-like layout).
    static ElectrodeLayout default16();

private:
    std::vector<Arc> arcs_;
};

struct BoundaryEdge {
    std::array<Index, 2> vertices{};  // counter-clockwise
    double s0 = 0.0;                  // reference arclength interval
    double s1 = 0.0;
    int electrode = 0;                // 1..M, 0 on gaps
};

/// Structured triangulation of the unit square at refinement level k
/// (2^k + 1 vertices per side). Each grid square is cut by its (i,j)-(i+1,j+1)
/// diagonal. Order-2 meshes add the edge midpoints as degrees of freedom;
/// the DOF grid of an order-2 mesh at level k is the vertex grid of level k+1.
///
/// Meshes are immutable after construction.
class Mesh {
public:
    int level() const { return level_; }
    int order() const { return order_; }
    /// Width of a boundary edge, 2^-level.
    double h() const { return h_; }
    /// Vertices per side, 2^level + 1.
    Index side_vertices() const { return side_vertices_; }

    std::span<const Point> vertices() const { return vertices_; }
    std::span<const std::array<Index, 3>> triangles() const { return triangles_; }
    std::span<const BoundaryEdge> boundary_edges() const { return edges_; }
    const ElectrodeLayout& layout() const { return layout_; }

    std::size_t dof_count() const { return dof_points_.size(); }
    std::span<const Point> dof_points() const { return dof_points_; }
    /// 3 DOFs (P1) or 6 DOFs (P2: vertices, then midpoints of edges 01, 12, 20).
    std::span<const Index> triangle_dofs(std::size_t t) const;
    /// 2 DOFs (P1) or 3 DOFs (P2: start, end, midpoint) along a boundary edge.
    std::span<const Index> edge_dofs(std::size_t e) const;
    std::size_t dofs_per_triangle() const { return order_ == 1 ? 3 : 6; }
    std::size_t dofs_per_edge() const { return order_ == 1 ? 2 : 3; }

    /// Index of the boundary edge whose reference interval contains s.
    std::size_t edge_at(double s) const;

    /// DOF index of vertex (i, j) of the structured grid.
    Index vertex_dof(Index i, Index j) const;

    /// Copy with every vertex moved by `map`. Boundary edges keep their
    /// reference arclength intervals, so a coefficient defined on the
    /// reference boundary is transported with the deformation. Only affine
    /// elements are supported: P2 midpoints are placed at the midpoints of
    /// the mapped vertices.
    Mesh deformed(const std::function<Point(Point)>& map) const;

    /// True if the mesh is the undeformed unit square.
    bool is_reference() const { return reference_; }

    friend Mesh build_mesh(int level, const ElectrodeLayout& layout, int order);

private:
    Mesh(int level, int order, ElectrodeLayout layout);

    int level_;
    int order_;
    double h_;
    Index side_vertices_;
    bool reference_ = true;
    ElectrodeLayout layout_;
    std::vector<Point> vertices_;
    std::vector<std::array<Index, 3>> triangles_;
    std::vector<BoundaryEdge> edges_;
    std::vector<Point> dof_points_;
    std::vector<Index> triangle_dofs_;
    std::vector<Index> edge_dofs_;
};

/// Builds the level-k mesh. Requires level >= 2 and every electrode endpoint
/// to be a multiple of 2^-level; throws AlignmentError otherwise.
Mesh build_mesh(int level, const ElectrodeLayout& layout, int order = 1);

/// Boundary edge indices of electrode `number` (1-based), in arclength order.
std::vector<std::size_t> electrode_edges(const Mesh& mesh, int number);

/// Signed area of a triangle (positive for counter-clockwise orientation).
double signed_area(Point a, Point b, Point c);

}  // namespace scem
