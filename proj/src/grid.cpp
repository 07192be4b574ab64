#include "gemeit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gemeit {

std::vector<double> SimGrid::z_axis() const {
    std::vector<double> z(nz);
    for (std::size_t i = 0; i < nz; ++i) z[i] = z_at(i);
    return z;
}

std::vector<double> SimGrid::t_axis() const {
    std::vector<double> t(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) t[s] = t_at(s);
    return t;
}

std::size_t SimGrid::sample_index(double t) const {
    const double s = t / dt();
    const long idx = std::lround(s);
    return static_cast<std::size_t>(std::clamp<long>(idx, 0, static_cast<long>(n_samples - 1)));
}

SimGrid make_grid(double z_min, double z_max, std::size_t nz,
                  double t_max, std::size_t n_samples) {
    if (nz < 2) throw std::invalid_argument("make_grid: nz must be >= 2");
    if (n_samples < 2) throw std::invalid_argument("make_grid: n_samples must be >= 2");
    if (!(z_max > z_min)) throw std::invalid_argument("make_grid: z_max must exceed z_min");
    if (!(t_max > 0.0)) throw std::invalid_argument("make_grid: t_max must be positive");
    return SimGrid{z_min, z_max, nz, t_max, n_samples};
}

} // namespace gemeit
