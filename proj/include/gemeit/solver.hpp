#pragma once

#include <span>
#include <utility>

#include "gemeit/ensemble.hpp"
#include "gemeit/envelope.hpp"
#include "gemeit/field_state.hpp"
#include "gemeit/grid.hpp"
#include "gemeit/schedule.hpp"

namespace gemeit {

enum class RkPair {
    dp45,       // Dormand-Prince 5(4), advances the 5th-order solution
    fehlberg78, // 13-stage Fehlberg 7(8) pair, advances the 8th-order solution
};

struct SolverConfig {
    double rel_tolerance = 1e-6;
    // The default absolute floor sits below any physical magnitude so the
    // weighted error is homogeneous in the state; scaling the input then
    // reproduces the step sequence exactly (the linearity invariant).
    double abs_tolerance = 1e-300;
    double max_step = 0.5;      // us
    double initial_step = 1e-3; // us
    RkPair method = RkPair::fehlberg78;
};

int design_order(RkPair method);   // order of the advancing solution
int embedded_order(RkPair method); // lower order of the pair (controller exponent)

// Right-hand sides of the coherence equations at one lattice point:
//   d(sigma_ge)/dt = i g E + i Omega sigma_gs - (gamma_ge + i Delta) sigma_ge
//   d(sigma_gs)/dt = i conj(Omega) sigma_ge
//                    - (gamma_s + i (delta - delta_ACStark)) sigma_gs
// with gamma_s = params.spinwave_gamma().
std::pair<cplx, cplx> obe_rhs(cplx sigma_ge, cplx sigma_gs, cplx E,
                              const DriveSample& drive, const EnsembleParams& params);

// Signal field from the left boundary at one instant:
//   E(z) = boundary_E + i * integral_0^z kappa(z') sigma_ge(z') dz'
// evaluated with the 4th-order composite rule (cubic-interpolated midpoints).
// kappa is gN/c on the lattice. E(z_min) = boundary_E exactly.
void spatial_sweep(std::span<const cplx> sigma_ge_column, cplx boundary_E,
                   std::span<const double> kappa, double dz, std::span<cplx> e_out);

struct StepDecision {
    bool accepted = false;
    double next_step = 0.0;
};

// Embedded-pair step control: accept when the weighted error is <= 1;
// next_step = current * clamp(0.9 err^(-1/(p+1)), 0.2, 5.0) capped at
// max_step, where p is the lower order of the pair.
StepDecision step_controller(double error_estimate, double current_step,
                             double max_step, int lower_order);

struct IntegrationStats {
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::size_t rhs_evaluations = 0;
};

struct IntegrationResult {
    FieldState state;
    IntegrationStats stats;
};

// Integrate the three-level equations across [0, grid.t_max] with the input
// envelope injected as the left boundary condition E(z_min, t). Every
// internal stage rebuilds E from that stage's sigma_ge via spatial_sweep.
// Dense output on the grid's sample times by cubic Hermite interpolation.
// Throws std::runtime_error on step-size underflow below 1e-6 us
// (stiffness) or on a non-finite state.
IntegrationResult integrate(const ComplexEnvelope& input, const ProtocolSchedule& schedule,
                            const EnsembleParams& params, const SimGrid& grid,
                            const SolverConfig& config);

} // namespace gemeit
