#pragma once

#include <complex>

#include "nmit/response.hpp"
#include "nmit/steady_state.hpp"

namespace nmit {

enum class DemodMethod {
  /// Periodic steady state by multiple shooting over one drive period, then
  /// demodulation over that period. Needs no transient decay, so it also works
  /// for weakly damped or linearly unstable operating points.
  periodic,
  /// Integrate from rest, discard the transient fraction, demodulate the tail.
  transient,
};

struct TrajectorySpec {
  double t_end = 0.0;               // s; 0 selects a default per operation
  double dt = 0.0;                  // s; 0 selects the automatic step
  double transient_fraction = 0.75; // transient method only, in [0.5, 0.95]
  bool drive_on = true;
  DemodMethod method = DemodMethod::periodic;
  /// Mechanical damping used by relax_nonlinear in place of gamma_n (0 keeps gamma_n).
  /// The fixed point does not depend on it.
  double relaxation_damping = 0.0;
  /// relax_nonlinear stops once every state derivative is below this fraction of its peak.
  double convergence_tol = 1e-6;
  /// Upper bound on rate * segment length for the shooting segments.
  double max_segment_growth = 4.0;
};

/// Throws ValidationError for dt < 0, t_end < 0 or a transient fraction outside [0.5, 0.95].
void validate(const TrajectorySpec& spec);

/// Classical state of the nonlinear equations of motion.
struct NonlinearState {
  double x = 0.0;
  double p = 0.0;
  cplx c1;
  cplx c2;
};

/// Right-hand side of the nonlinear equations of motion without probe:
///   x' = p/m
///   p' = -hbar g_n k |c1|^2 sin(2kx) + sigma - damping p
///   c1' = -(i delta_d + gamma) c1 + i J c2 + i g_n cos^2(kx) c1 + Omega_d
///   c2' = -(i delta_d - kappa) c2 + i J c1
NonlinearState nonlinear_rhs(const DerivedQuantities& d, const SystemParams& p, double delta_d, double sigma,
                             double damping, const NonlinearState& s);

struct RelaxResult {
  NonlinearState state;
  bool converged = false;
  double t = 0.0;
  long steps = 0;
};

/// Integrates the nonlinear dynamics from rest with fixed-step RK4 until every
/// derivative has dropped below convergence_tol of its running peak, or t_end.
/// Requires p.delta_d and a self-consistent trap (sigma is the Coulomb force).
/// Throws InstabilityError on divergence.
RelaxResult relax_nonlinear(const DerivedQuantities& d, const SystemParams& p, const TrajectorySpec& spec);

struct DemodResult {
  cplx value;        // c1+ / eps_p estimate
  cplx raw;          // projection before normalization
  double window = 0.0;  // s
  long periods = 0;
  bool window_adjusted = false;
  long steps = 0;
  int segments = 0;
  DemodMethod method = DemodMethod::periodic;
};

/// Time-domain estimate of c1+/eps_p from the linearized fluctuation dynamics
/// driven by eps_p e^{-i delta t}, projected onto e^{-i delta t}.
DemodResult demodulated_response(const OperatingPoint& op, double delta, const TrajectorySpec& spec = {});

/// What demodulated_response measures according to the sideband solution: c1+/eps_p,
/// except at delta = 0 where both sidebands share the drive frequency and the
/// projection picks up c1+ + c1- together.
cplx demodulation_target(const SidebandSolution& sol);

/// Default integrator step for the linearized dynamics at this detuning.
double automatic_step(const OperatingPoint& op, double delta);

}  // namespace nmit
