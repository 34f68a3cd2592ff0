#include "scem/phantom.hpp"

#include <cmath>

#include "scem/errors.hpp"

namespace scem {

double Phantom::value(Point p) const {
    double v = background;
    for (const Inclusion& inc : inclusions) {
        const double dx = p.x - inc.center.x, dy = p.y - inc.center.y;
        const double r2 = dx * dx + dy * dy;
        if (inc.shape == Inclusion::Shape::Disk) {
            if (r2 <= inc.radius * inc.radius) v = inc.value;
        } else {
            v += inc.value * std::exp(-r2 / (2.0 * inc.radius * inc.radius));
        }
    }
    return v;
}

std::vector<double> Phantom::sample(int level) const {
    const long n = (1L << level) + 1;
    const double h = 1.0 / static_cast<double>(n - 1);
    std::vector<double> out(static_cast<std::size_t>(n * n));
    for (long j = 0; j < n; ++j) {
        for (long i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(j * n + i)] =
                value({static_cast<double>(i) * h, static_cast<double>(j) * h});
        }
    }
    return out;
}

ConductivityField Phantom::on(const Mesh& mesh) const {
    if (!mesh.is_reference()) throw ContractError("phantoms are defined on the undeformed square");
    if (mesh.level() <= base_level) return ConductivityField::nodal(sample(mesh.level()));
    return ConductivityField::nodal(prolongate(sample(base_level), base_level, mesh.level()));
}

}  // namespace scem
