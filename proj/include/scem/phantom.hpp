#pragma once

#include <string>
#include <vector>

#include "scem/forward.hpp"
#include "scem/mesh.hpp"

namespace scem {

/// One localized feature added to (disk) or blended into (gaussian) the
/// background conductivity.
struct Inclusion {
    enum class Shape { Disk, Gaussian };
    Shape shape = Shape::Disk;
    Point center;
    double radius = 0.1;  // disk radius or gaussian standard deviation
    double value = 1.0;   // disk: conductivity inside; gaussian: peak offset
};

/// Conductivity phantom on the unit square. Fields are sampled at the
/// vertices of `base_level` and prolongated exactly to finer meshes, so the
/// P1 conductivity is the same function on every level at or above it.
struct Phantom {
    double background = 1.0;
    std::vector<Inclusion> inclusions;
    int base_level = 4;

    double value(Point p) const;
    /// Nodal field on `mesh`; meshes coarser than the base level are sampled
    /// directly.
    ConductivityField on(const Mesh& mesh) const;
    /// Nodal values on the vertex grid of `level`, without prolongation.
    std::vector<double> sample(int level) const;
};

}  // namespace scem
