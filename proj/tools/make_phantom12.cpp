// Writes the twelve-electrode phantom with random contacts used by the
// convergence study on an inhomogeneous conductivity:
//
//   scem_make_phantom12 data/phantom12.json
//
// Box ratios sigma_mean / zeta are stratified log-uniform over [1e-4, 10],
// one draw per stratum, shuffled over the electrodes. Each hat half-height is
// the optimal scaling for that box height at level 7 with constant sigma equal
// to the phantom mean. The draws go through std::uniform_real_distribution,
// whose output is library specific; the committed file came from libstdc++.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include "scem/io.hpp"
#include "scem/study.hpp"

using namespace scem;

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: scem_make_phantom12 OUTPUT.json\n";
        return 2;
    }
    Phantom ph;
    ph.background = 1.0;
    ph.base_level = 4;
    ph.inclusions.push_back({Inclusion::Shape::Gaussian, {0.3, 0.65}, 0.12, 0.8});
    ph.inclusions.push_back({Inclusion::Shape::Gaussian, {0.68, 0.3}, 0.1, -0.5});
    ph.inclusions.push_back({Inclusion::Shape::Gaussian, {0.7, 0.75}, 0.08, 0.4});
    const auto samples = ph.sample(ph.base_level);
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());

    const auto layout = ElectrodeLayout::default12();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double lo = std::log(1e-4), hi = std::log(10.0);
    std::vector<double> strata;
    for (int m = 0; m < 12; ++m) strata.push_back(lo + (m + unit(rng)) / 12.0 * (hi - lo));
    std::shuffle(strata.begin(), strata.end(), rng);

    const auto mesh = std::make_shared<const Mesh>(build_mesh(7, layout, 1));
    std::vector<double> box, hat;
    for (int m = 0; m < 12; ++m) {
        const double ratio = std::exp(strata[static_cast<std::size_t>(m)]);
        const auto sc = optimize_scaling(mesh, ConductivityField::constant(mean), mean / ratio);
        box.push_back(mean / ratio);
        hat.push_back(sc.zeta_hat);
        std::cerr << "electrode " << m + 1 << ": ratio " << ratio << ", box " << box.back() << ", hat " << hat.back()
                  << '\n';
    }
    const io::Json j = {{"layout", "default12"},
                        {"phantom", io::to_json(ph)},
                        {"contacts", {{"box", box}, {"hat", hat}}},
                        {"mean_conductivity", mean}};
    io::write_json(argv[1], j);
}
