#pragma once

#include <complex>

#include "nmit/params.hpp"

namespace nmit {

using cplx = std::complex<double>;

/// Classical fixed point of the driven two-cavity + nanosphere system and the
/// effective parameters the linear response needs.
struct SteadyState {
  double x_ns = 0.0;  // m, principal branch 0 <= 2k x_ns < pi/2 for sigma >= 0
  double p_ns = 0.0;
  cplx c1s;
  cplx c2s;
  double omega_n = 0.0;   // effective trap frequency, rad/s
  double G_n = 0.0;       // g_n k sin(2k x_ns)
  cplx G_eff;             // G_n c1s
  double delta_c = 0.0;   // delta_d - g_n cos^2(k x_ns)
  double delta_d = 0.0;   // drive detuning actually used
  double sigma_implied = 0.0;  // hbar g_n k |c1s|^2 sin(2k x_ns), N
  int fixed_point_count = 1;   // > 1 flags several trap positions on the principal branch
  int iterations = 0;

  bool multiple_fixed_points() const { return fixed_point_count > 1; }
};

/// Everything the response and oracle layers need about one configuration.
struct OperatingPoint {
  SystemParams params;
  DerivedQuantities derived;
  SteadyState steady;
};

/// Intracavity field of the passive cavity for given detunings (no trap physics).
cplx passive_cavity_field(const DerivedQuantities& d, const SystemParams& p, double delta_d, double delta_c);

/// Trap position fixed externally through s = sin(2k x_ns).
/// Throws DomainError for |s| > 1 and UnstableTrapError when cos(2k x_ns) <= 0.
SteadyState solve_prescribed(const DerivedQuantities& d, const SystemParams& p, double s);

/// Trap position balancing the optical restoring force against the Coulomb
/// force sigma, by damped fixed-point iteration (relaxation 0.5) on
///   x -> asin(sigma / (hbar g_n k |c1s(x)|^2)) / (2k).
/// Throws NoTrapSolutionError when the asin argument leaves [-1, 1] and
/// IterationLimitError after 10^4 iterations.
SteadyState solve_selfconsistent(const DerivedQuantities& d, const SystemParams& p, double sigma);

/// Dispatches on p.trap.
SteadyState solve_steady_state(const DerivedQuantities& d, const SystemParams& p);

OperatingPoint make_operating_point(const SystemParams& p);

}  // namespace nmit
