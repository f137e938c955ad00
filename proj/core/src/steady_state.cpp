#include "nmit/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "nmit/constants.hpp"
#include "nmit/errors.hpp"

namespace nmit {
namespace {

using constants::hbar;

constexpr double kRelaxation = 0.5;
constexpr int kMaxIterations = 10000;
constexpr double kAbsTolX = 1e-18;
constexpr double kRelTolX = 1e-12;
constexpr int kMultiplicityScan = 512;

struct TrapGeometry {
  double x = 0.0;
  double sin2kx = 0.0;
  double cos2kx = 1.0;
  double cos2_kx = 1.0;  // cos^2(k x) = (1 + cos 2kx) / 2
};

TrapGeometry geometry_from_x(double k, double x) {
  TrapGeometry g;
  g.x = x;
  g.sin2kx = std::sin(2.0 * k * x);
  g.cos2kx = std::cos(2.0 * k * x);
  g.cos2_kx = 0.5 * (1.0 + g.cos2kx);
  return g;
}

TrapGeometry geometry_from_s(double k, double s) {
  TrapGeometry g;
  g.x = std::asin(s) / (2.0 * k);
  g.sin2kx = s;
  g.cos2kx = std::sqrt(1.0 - s * s);
  g.cos2_kx = 0.5 * (1.0 + g.cos2kx);
  return g;
}

double trap_frequency(const DerivedQuantities& d, const TrapGeometry& g, cplx c1s) {
  const double w2 = 2.0 * hbar * d.g_n * d.k * d.k * std::norm(c1s) * g.cos2kx / d.mass_m;
  return w2 > 0.0 ? std::sqrt(w2) : 0.0;
}

// Largest optical restoring force scale hbar g_n k |c1s|^2.
double force_scale(const DerivedQuantities& d, cplx c1s) { return hbar * d.g_n * d.k * std::norm(c1s); }

SteadyState assemble(const DerivedQuantities& d, const SystemParams& p, const TrapGeometry& g, double delta_d) {
  if (!(g.cos2kx > 0.0)) {
    throw UnstableTrapError("cos(2k x_ns) = " + std::to_string(g.cos2kx) + " <= 0: no optical restoring curvature");
  }
  SteadyState ss;
  ss.x_ns = g.x;
  ss.p_ns = 0.0;
  ss.delta_d = delta_d;
  ss.delta_c = delta_d - d.g_n * g.cos2_kx;
  ss.c1s = passive_cavity_field(d, p, ss.delta_d, ss.delta_c);
  if (p.hop_J != 0.0) {
    const cplx active(p.kappa, -delta_d);
    if (std::abs(active) == 0.0) throw SingularityError("lossless partner cavity driven on resonance");
    ss.c2s = cplx(0.0, -p.hop_J) * ss.c1s / active;
  }
  ss.omega_n = trap_frequency(d, g, ss.c1s);
  ss.G_n = d.g_n * d.k * g.sin2kx;
  ss.G_eff = ss.G_n * ss.c1s;
  ss.sigma_implied = force_scale(d, ss.c1s) * g.sin2kx;
  return ss;
}

// Finds delta_d with delta_c(delta_d) = omega_n(delta_d). `solve_at` returns the
// steady state for a trial detuning; h(delta_d) = omega_n - delta_c is positive at
// delta_d = 0 and negative once the drive is detuned far enough.
SteadyState bisect_red_sideband(const std::function<SteadyState(double)>& solve_at, double scale) {
  auto h_sign = [&](double dd, SteadyState* out) -> int {
    try {
      SteadyState ss = solve_at(dd);
      if (out) *out = ss;
      const double h = ss.omega_n - ss.delta_c;
      return h > 0.0 ? 1 : (h < 0.0 ? -1 : 0);
    } catch (const NoTrapSolutionError&) {
      // Too far detuned to hold the sphere against the Coulomb force.
      return -1;
    } catch (const SingularityError&) {
      // Only at delta_d = 0 with kappa = 0: c1s -> 0, so omega_n -> 0 > delta_c.
      if (dd == 0.0) return 1;
      throw;
    }
  };

  SteadyState best;
  double lo = 0.0;
  const int s_lo = h_sign(lo, &best);
  if (s_lo == 0) return best;
  if (s_lo < 0) throw DomainError("red-sideband detuning search: no trap at zero drive detuning");

  double hi = scale;
  int guard = 0;
  while (h_sign(hi, nullptr) > 0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw DomainError("red-sideband detuning search: no sign change");
  }
  for (int i = 0; i < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int sm = h_sign(mid, nullptr);
    if (sm == 0) {
      lo = hi = mid;
      break;
    }
    (sm > 0 ? lo : hi) = mid;
  }
  return solve_at(0.5 * (lo + hi));
}

double detuning_scale(const DerivedQuantities& d, const SystemParams& p) {
  return std::max({p.gamma, std::abs(p.kappa), std::abs(p.hop_J), d.g_n, 1.0});
}

struct FixedPointResult {
  double x = 0.0;
  int iterations = 0;
  int count = 1;
};

// Damped iteration of x -> asin(sigma / F(x)) / 2k at fixed delta_d.
FixedPointResult trap_fixed_point(const DerivedQuantities& d, const SystemParams& p, double sigma, double delta_d) {
  FixedPointResult r;
  if (sigma == 0.0) return r;

  auto field_at = [&](double x) {
    const TrapGeometry g = geometry_from_x(d.k, x);
    return passive_cavity_field(d, p, delta_d, delta_d - d.g_n * g.cos2_kx);
  };
  auto image = [&](double x) {
    const double scale = force_scale(d, field_at(x));
    const double arg = sigma / scale;
    if (!(scale > 0.0) || !(arg <= 1.0)) {
      throw NoTrapSolutionError("Coulomb force " + std::to_string(sigma) + " N exceeds the optical restoring force " +
                                std::to_string(scale) + " N");
    }
    return std::asin(arg) / (2.0 * d.k);
  };

  double x = 0.0;
  double step = 0.0;
  for (r.iterations = 1; r.iterations <= kMaxIterations; ++r.iterations) {
    const double next = x + kRelaxation * (image(x) - x);
    step = std::abs(next - x);
    x = next;
    if (step < kAbsTolX || step < kRelTolX * std::abs(x)) break;
  }
  if (r.iterations > kMaxIterations) {
    throw IterationLimitError("trap fixed point did not converge in " + std::to_string(kMaxIterations) + " iterations",
                              step);
  }

  // Count force-balance roots on the principal branch and keep the smallest.
  auto balance = [&](double xx) { return force_scale(d, field_at(xx)) * std::sin(2.0 * d.k * xx) - sigma; };
  const double x_edge = constants::pi / (4.0 * d.k);
  int roots = 0;
  double first_lo = -1.0;
  double prev_x = 0.0;
  double prev_f = balance(0.0);
  for (int i = 1; i <= kMultiplicityScan; ++i) {
    const double xi = x_edge * i / (kMultiplicityScan + 1);
    const double fi = balance(xi);
    if ((prev_f < 0.0) != (fi < 0.0)) {
      if (roots == 0) first_lo = prev_x;
      ++roots;
    }
    prev_x = xi;
    prev_f = fi;
  }
  r.count = std::max(roots, 1);
  const double first_hi = first_lo + x_edge / (kMultiplicityScan + 1);
  if (roots > 1 && first_lo >= 0.0 && first_hi < x) {
    double lo = first_lo;
    double hi = first_hi;
    const bool lo_neg = balance(lo) < 0.0;
    for (int i = 0; i < 200 && hi - lo > kAbsTolX; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((balance(mid) < 0.0) == lo_neg ? lo : hi) = mid;
    }
    r.x = 0.5 * (lo + hi);
  } else {
    r.x = x;
  }
  return r;
}

}  // namespace

cplx passive_cavity_field(const DerivedQuantities& d, const SystemParams& p, double delta_d, double delta_c) {
  if (p.hop_J == 0.0) return d.Omega_d / cplx(p.gamma, delta_c);
  const cplx active(p.kappa, -delta_d);
  const cplx den = cplx(p.gamma, delta_c) * active - p.hop_J * p.hop_J;
  if (std::abs(den) == 0.0) throw SingularityError("steady-state denominator vanishes");
  return active * d.Omega_d / den;
}

SteadyState solve_prescribed(const DerivedQuantities& d, const SystemParams& p, double s) {
  if (!(std::abs(s) <= 1.0)) throw DomainError("|sin(2k x_ns)| must be <= 1, got " + std::to_string(s));
  const TrapGeometry g = geometry_from_s(d.k, s);
  if (!(g.cos2kx > 0.0)) throw UnstableTrapError("s = +-1 puts the sphere at the trap edge");

  if (p.delta_d) return assemble(d, p, g, *p.delta_d);
  return bisect_red_sideband([&](double dd) { return assemble(d, p, g, dd); }, detuning_scale(d, p));
}

SteadyState solve_selfconsistent(const DerivedQuantities& d, const SystemParams& p, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  auto solve_at = [&](double dd) {
    const FixedPointResult fp = trap_fixed_point(d, p, sigma, dd);
    SteadyState ss = assemble(d, p, geometry_from_x(d.k, fp.x), dd);
    ss.fixed_point_count = fp.count;
    ss.iterations = fp.iterations;
    return ss;
  };
  if (p.delta_d) return solve_at(*p.delta_d);
  return bisect_red_sideband(solve_at, detuning_scale(d, p));
}

SteadyState solve_steady_state(const DerivedQuantities& d, const SystemParams& p) {
  if (const auto* t = std::get_if<PrescribedTrap>(&p.trap)) return solve_prescribed(d, p, t->s);
  return solve_selfconsistent(d, p, std::get<SelfConsistentTrap>(p.trap).sigma);
}

OperatingPoint make_operating_point(const SystemParams& p) {
  OperatingPoint op;
  op.params = p;
  op.derived = derive(p);
  op.steady = solve_steady_state(op.derived, op.params);
  return op;
}

}  // namespace nmit
