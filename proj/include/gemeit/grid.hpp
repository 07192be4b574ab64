#pragma once

#include <cstddef>
#include <vector>

namespace gemeit {

// Discrete space-time canvas shared by all modules.
// Units: z in mm, t in microseconds. Both axes include their endpoints,
// so dz = (z_max - z_min) / (nz - 1) and dt = t_max / (n_samples - 1).
struct SimGrid {
    double z_min = 0.0;
    double z_max = 1.0;
    std::size_t nz = 2;
    double t_max = 1.0;
    std::size_t n_samples = 2;

    double dz() const { return (z_max - z_min) / static_cast<double>(nz - 1); }
    double dt() const { return t_max / static_cast<double>(n_samples - 1); }
    double z_at(std::size_t i) const { return z_min + dz() * static_cast<double>(i); }
    double t_at(std::size_t s) const { return dt() * static_cast<double>(s); }
    double z_center() const { return 0.5 * (z_min + z_max); }
    double length() const { return z_max - z_min; }

    std::vector<double> z_axis() const;
    std::vector<double> t_axis() const;

    // Index of the output sample closest to time t.
    std::size_t sample_index(double t) const;
};

// Validating constructor. Throws std::invalid_argument when nz < 2,
// n_samples < 2, z_max <= z_min or t_max <= 0.
SimGrid make_grid(double z_min, double z_max, std::size_t nz,
                  double t_max, std::size_t n_samples);

} // namespace gemeit
