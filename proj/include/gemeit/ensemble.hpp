#pragma once

#include <functional>
#include <vector>

#include "gemeit/grid.hpp"

namespace gemeit {

// Relative atomic density N(z), normalized so the peak over the grid is 1.
using DensityProfile = std::function<double(double)>;

DensityProfile flat_profile();
// Gaussian with 1/e^2 half-width `width` (mm) centered at z_center,
// truncated at the grid ends by construction.
DensityProfile gaussian_profile(double z_center, double width);

// Atomic and optical constants entering the three-level equations.
// Angular rates in rad/us, lengths in mm. The coupling prefactor is
// calibrated against the optical depth: a steady-state resonant run with
// the control off transmits amplitude e^(-optical_depth/2) across the
// full profile (at pumping_efficiency 1).
struct EnsembleParams {
    double gamma_ge = 18.0;          // optical coherence decay (rad/us)
    double gamma_gs = 0.01;          // spinwave coherence decay (rad/us)
    bool spinwave_decay_like_paper = false; // reuse gamma_ge in the spinwave equation
    double optical_depth = 0.0;      // resonant intensity OD over the profile
    double pumping_efficiency = 1.0; // fraction of atoms in the useful state
    double field_coupling = 1.0;     // g in d(sigma_ge)/dt = i g E + ...
    DensityProfile density_profile = flat_profile();
    double coupling_gN_over_c = 0.0; // peak gN/c (rad/us per mm), set by calibration

    double spinwave_gamma() const { return spinwave_decay_like_paper ? gamma_ge : gamma_gs; }

    // gN/c on the lattice, including the pumping-efficiency density factor.
    std::vector<double> coupling_on_grid(const SimGrid& grid) const;
};

// Peak value of gN/c such that the resonant control-off amplitude
// transmission is e^(-d/2): peak = d * gamma_ge / (2 g * integral of the
// profile over the grid). Throws on a zero-integral profile or d < 0.
double calibrate_coupling(double optical_depth, double gamma_ge,
                          const DensityProfile& profile, const SimGrid& grid,
                          double field_coupling = 1.0);

// Convenience: validate fields and fill in coupling_gN_over_c.
EnsembleParams finalize_ensemble(EnsembleParams params, const SimGrid& grid);

} // namespace gemeit
