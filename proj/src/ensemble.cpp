#include "gemeit/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "gemeit/quadrature.hpp"

namespace gemeit {

DensityProfile flat_profile() {
    return [](double) { return 1.0; };
}

DensityProfile gaussian_profile(double z_center, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_profile: width must be positive");
    return [z_center, width](double z) {
        const double u = (z - z_center) / width;
        return std::exp(-2.0 * u * u);
    };
}

std::vector<double> EnsembleParams::coupling_on_grid(const SimGrid& grid) const {
    std::vector<double> kappa(grid.nz);
    for (std::size_t i = 0; i < grid.nz; ++i)
        kappa[i] = coupling_gN_over_c * pumping_efficiency * density_profile(grid.z_at(i));
    return kappa;
}

double calibrate_coupling(double optical_depth, double gamma_ge,
                          const DensityProfile& profile, const SimGrid& grid,
                          double field_coupling) {
    if (optical_depth < 0.0) throw std::invalid_argument("calibrate_coupling: optical_depth must be >= 0");
    if (!(gamma_ge > 0.0)) throw std::invalid_argument("calibrate_coupling: gamma_ge must be positive");
    if (field_coupling == 0.0) throw std::invalid_argument("calibrate_coupling: zero field coupling");
    std::vector<double> prof(grid.nz);
    for (std::size_t i = 0; i < grid.nz; ++i) {
        prof[i] = profile(grid.z_at(i));
        if (prof[i] < 0.0) throw std::invalid_argument("calibrate_coupling: density profile must be >= 0");
    }
    const double integral = total_integral(prof, grid.dz());
    if (optical_depth == 0.0) return 0.0;
    if (!(integral > 0.0)) throw std::invalid_argument("calibrate_coupling: density profile integrates to zero");
    return optical_depth * gamma_ge / (2.0 * field_coupling * integral);
}

EnsembleParams finalize_ensemble(EnsembleParams p, const SimGrid& grid) {
    if (p.pumping_efficiency < 0.0 || p.pumping_efficiency > 1.0)
        throw std::invalid_argument("finalize_ensemble: pumping_efficiency must lie in [0, 1]");
    if (p.gamma_gs < 0.0) throw std::invalid_argument("finalize_ensemble: gamma_gs must be >= 0");
    p.coupling_gN_over_c =
        calibrate_coupling(p.optical_depth, p.gamma_ge, p.density_profile, grid, p.field_coupling);
    return p;
}

} // namespace gemeit
