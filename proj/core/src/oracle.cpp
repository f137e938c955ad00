#include "nmit/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

#include "nmit/constants.hpp"
#include "nmit/errors.hpp"
#include "rk4.hpp"

namespace nmit {
namespace {

using constants::hbar;
using constants::two_pi;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr double kStepsPerTimescale = 200.0;
constexpr double kMaxSteps = 1e8;
constexpr double kDivergence = 1e12;

// Smallest of the given time scales, ignoring non-positive entries.
double shortest(std::initializer_list<double> scales) {
  double best = std::numeric_limits<double>::infinity();
  for (double s : scales) {
    if (s > 0.0 && std::isfinite(s)) best = std::min(best, s);
  }
  return best;
}

double period_of(double rate) { return rate != 0.0 ? two_pi / std::abs(rate) : 0.0; }
double inverse(double rate) { return rate != 0.0 ? 1.0 / std::abs(rate) : 0.0; }

Vec6 pack(const NonlinearState& s) {
  Vec6 v;
  v << s.x, s.p, s.c1.real(), s.c1.imag(), s.c2.real(), s.c2.imag();
  return v;
}

NonlinearState unpack(const Vec6& v) { return {v(0), v(1), cplx(v(2), v(3)), cplx(v(4), v(5))}; }

// Linearized fluctuation dynamics in scaled coordinates
// (x / x_ref, p / p_ref, Re dc1, Im dc1, Re dc2, Im dc2).
struct LinearDynamics {
  Mat6 drift = Mat6::Zero();
  double delta = 0.0;
  double drive = 0.0;

  Vec6 operator()(double t, const Vec6& v) const {
    Vec6 dv = drift * v;
    if (drive != 0.0) {
      dv(2) += drive * std::cos(delta * t);
      dv(3) -= drive * std::sin(delta * t);
    }
    return dv;
  }
};

LinearDynamics linear_dynamics(const OperatingPoint& op, double delta, double drive) {
  const SystemParams& p = op.params;
  const SteadyState& ss = op.steady;
  const double m = op.derived.mass_m;
  const cplx G = ss.G_eff;
  const double x_ref = std::abs(G) > 0.0 ? p.gamma / std::abs(G) : 1.0 / op.derived.k;
  const double p_ref = m * std::max(ss.omega_n, p.gamma) * x_ref;

  LinearDynamics dyn;
  dyn.delta = delta;
  dyn.drive = drive;
  Mat6& a = dyn.drift;
  // x' = p / m ; p' = -m w^2 x - gamma_n p - hbar (G dc1* + G* dc1)
  a(0, 1) = p_ref / (m * x_ref);
  a(1, 0) = -m * ss.omega_n * ss.omega_n * x_ref / p_ref;
  a(1, 1) = -p.gamma_n;
  a(1, 2) = -2.0 * hbar * G.real() / p_ref;
  a(1, 3) = -2.0 * hbar * G.imag() / p_ref;
  auto put = [&a](int r, int c, cplx z) {
    a(r, c) += z.real();
    a(r, c + 1) -= z.imag();
    a(r + 1, c) += z.imag();
    a(r + 1, c + 1) += z.real();
  };
  // dc1' = -(i delta_c + gamma) dc1 + i J dc2 - i G dx
  put(2, 2, cplx(-p.gamma, -ss.delta_c));
  put(2, 4, cplx(0.0, p.hop_J));
  const cplx from_x = cplx(0.0, -1.0) * G * x_ref;
  a(2, 0) = from_x.real();
  a(3, 0) = from_x.imag();
  // dc2' = (kappa - i delta_d) dc2 + i J dc1
  put(4, 4, cplx(p.kappa, -ss.delta_d));
  put(4, 2, cplx(0.0, p.hop_J));
  return dyn;
}

double linear_rate_bound(const OperatingPoint& op) {
  const SystemParams& p = op.params;
  return p.gamma + std::abs(p.kappa) + std::abs(p.hop_J) + p.gamma_n;
}

DemodResult demod_periodic(const OperatingPoint& op, double delta, const TrajectorySpec& spec, double drive) {
  const double omega_n = op.steady.omega_n;
  double period = period_of(delta);
  // A constant drive is periodic with any window. Half a trap period keeps the
  // weakly damped mechanical Floquet multiplier near -1 instead of +1.
  if (period == 0.0) period = omega_n > 0.0 ? 0.5 * two_pi / omega_n : 1.0 / op.params.gamma;

  const double h_target = spec.dt > 0.0 ? spec.dt : automatic_step(op, delta);
  const int segments =
      std::max(1, static_cast<int>(std::ceil(linear_rate_bound(op) * period / spec.max_segment_growth)));
  const double tau = period / segments;
  const long n = std::max(1L, static_cast<long>(std::ceil(tau / h_target)));
  if (static_cast<double>(n) * segments > kMaxSteps) {
    throw ValidationError("dt", "shooting would need more than 1e8 steps per period");
  }
  const double h = tau / static_cast<double>(n);

  LinearDynamics dyn = linear_dynamics(op, delta, drive);
  LinearDynamics free_dyn = dyn;
  free_dyn.drive = 0.0;

  auto propagate = [&](const LinearDynamics& f, Vec6 y, double t0) {
    for (long i = 0; i < n; ++i) y = detail::rk4_step(f, t0 + static_cast<double>(i) * h, y, h);
    return y;
  };

  // The homogeneous propagator is the same on every segment.
  Mat6 phi;
  for (int c = 0; c < 6; ++c) phi.col(c) = propagate(free_dyn, Vec6::Unit(c), 0.0);

  const int dim = 6 * segments;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd b(dim);
  for (int j = 0; j < segments; ++j) {
    const int next = (j + 1) % segments;
    a.block<6, 6>(6 * next, 6 * j) -= phi;
    b.segment<6>(6 * next) = propagate(dyn, Vec6::Zero(), j * tau);
  }
  for (int r = 0; r < dim; ++r) {
    const double s = a.row(r).cwiseAbs().maxCoeff();
    a.row(r) /= s;
    b(r) /= s;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-15)) {
    throw InstabilityError("no periodic response: Floquet multiplier at 1", std::abs(lu.determinant()));
  }
  const Eigen::VectorXd starts = lu.solve(b);

  cplx acc{0.0, 0.0};
  for (int j = 0; j < segments; ++j) {
    Vec6 y = starts.segment<6>(6 * j);
    const double t0 = j * tau;
    for (long i = 0; i < n; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      acc += cplx(y(2), y(3)) * std::polar(1.0, delta * t);
      y = detail::rk4_step(dyn, t, y, h);
    }
  }

  DemodResult r;
  r.method = DemodMethod::periodic;
  r.raw = acc / (static_cast<double>(n) * segments);
  r.window = period;
  r.periods = 1;
  r.segments = segments;
  r.steps = static_cast<long>(n) * (6 + 2L * segments);
  return r;
}

DemodResult demod_transient(const OperatingPoint& op, double delta, const TrajectorySpec& spec, double drive) {
  const double h_target = spec.dt > 0.0 ? spec.dt : automatic_step(op, delta);
  double t_end = spec.t_end;
  if (t_end <= 0.0) {
    const double slowest = std::min(op.params.gamma, op.params.gamma_n > 0.0 ? op.params.gamma_n : op.params.gamma);
    t_end = 20.0 / slowest;
  }

  const double beat = period_of(delta);
  long per_period = 0;
  double h = h_target;
  if (beat > 0.0) {
    per_period = std::max(1L, static_cast<long>(std::ceil(beat / h_target)));
    h = beat / static_cast<double>(per_period);
  }
  const double total_steps = std::floor(t_end / h);
  if (total_steps > kMaxSteps) {
    throw ValidationError("t_end", "t_end / dt exceeds 1e8 steps; shorten t_end or use the periodic method");
  }
  const long steps = static_cast<long>(total_steps);

  const double raw_window = (1.0 - spec.transient_fraction) * static_cast<double>(steps) * h;
  long window_steps = 0;
  DemodResult r;
  r.method = DemodMethod::transient;
  if (beat > 0.0) {
    r.periods = static_cast<long>(std::floor(raw_window / beat));
    if (r.periods < 1) throw DomainError("demodulation window shorter than one beat period");
    window_steps = r.periods * per_period;
  } else {
    window_steps = std::max(1L, static_cast<long>(std::floor(raw_window / h)));
  }
  r.window = static_cast<double>(window_steps) * h;
  r.window_adjusted = std::abs(r.window - raw_window) > 1e-12 * raw_window;

  const LinearDynamics dyn = linear_dynamics(op, delta, drive);
  const double bound = kDivergence * std::max(std::abs(drive) / op.params.gamma, 1.0);
  const long start = steps - window_steps;
  Vec6 y = Vec6::Zero();
  cplx acc{0.0, 0.0};
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * h;
    if (i >= start) acc += cplx(y(2), y(3)) * std::polar(1.0, delta * t);
    y = detail::rk4_step(dyn, t, y, h);
    const double mag = y.cwiseAbs().maxCoeff();
    if (!(mag < bound)) throw InstabilityError("linearized trajectory diverges", mag);
  }
  r.raw = acc / static_cast<double>(window_steps);
  r.steps = steps;
  return r;
}

}  // namespace

void validate(const TrajectorySpec& spec) {
  if (!(spec.dt >= 0.0) || !std::isfinite(spec.dt)) throw ValidationError("dt", "must be >= 0 (0 = automatic)");
  if (!(spec.t_end >= 0.0) || !std::isfinite(spec.t_end)) throw ValidationError("t_end", "must be >= 0");
  if (!(spec.transient_fraction >= 0.5 && spec.transient_fraction <= 0.95)) {
    throw ValidationError("transient_fraction", "must lie in [0.5, 0.95]");
  }
  if (spec.dt > 0.0 && spec.t_end > 0.0 && spec.t_end / spec.dt > kMaxSteps) {
    throw ValidationError("t_end", "t_end / dt exceeds 1e8 steps");
  }
  if (!(spec.relaxation_damping >= 0.0)) throw ValidationError("relaxation_damping", "must be >= 0");
  if (!(spec.convergence_tol > 0.0)) throw ValidationError("convergence_tol", "must be > 0");
  if (!(spec.max_segment_growth > 0.0)) throw ValidationError("max_segment_growth", "must be > 0");
}

cplx demodulation_target(const SidebandSolution& sol) {
  return sol.delta == 0.0 ? sol.a1_plus + std::conj(sol.a1_minus_conj) : sol.a1_plus;
}

double automatic_step(const OperatingPoint& op, double delta) {
  const SystemParams& p = op.params;
  const SteadyState& ss = op.steady;
  const double scale = shortest({period_of(ss.omega_n), period_of(ss.delta_c), inverse(p.gamma), inverse(p.kappa),
                                 inverse(p.hop_J), period_of(ss.delta_d), period_of(delta)});
  return scale / kStepsPerTimescale;
}

NonlinearState nonlinear_rhs(const DerivedQuantities& d, const SystemParams& p, double delta_d, double sigma,
                             double damping, const NonlinearState& s) {
  const double two_kx = 2.0 * d.k * s.x;
  const double cos2_kx = 0.5 * (1.0 + std::cos(two_kx));
  constexpr cplx I{0.0, 1.0};
  NonlinearState ds;
  ds.x = s.p / d.mass_m;
  ds.p = -hbar * d.g_n * d.k * std::norm(s.c1) * std::sin(two_kx) + sigma - damping * s.p;
  ds.c1 = -(I * delta_d + p.gamma) * s.c1 + I * p.hop_J * s.c2 + I * d.g_n * cos2_kx * s.c1 + d.Omega_d;
  ds.c2 = -(I * delta_d - p.kappa) * s.c2 + I * p.hop_J * s.c1;
  return ds;
}

RelaxResult relax_nonlinear(const DerivedQuantities& d, const SystemParams& p, const TrajectorySpec& spec) {
  validate(spec);
  if (!p.delta_d) throw DomainError("relax_nonlinear needs an explicit drive detuning delta_d");
  const auto* trap = std::get_if<SelfConsistentTrap>(&p.trap);
  if (!trap) throw DomainError("relax_nonlinear needs trap_mode = selfconsistent (the Coulomb force sigma)");
  const double delta_d = *p.delta_d;
  const double sigma = trap->sigma;
  const double damping = spec.relaxation_damping > 0.0 ? spec.relaxation_damping : p.gamma_n;

  double h = spec.dt;
  if (h <= 0.0) {
    const double c_scale = d.Omega_d / p.gamma;
    const double w_est = std::sqrt(2.0 * hbar * d.g_n * d.k * d.k * c_scale * c_scale / d.mass_m);
    h = shortest({inverse(p.gamma), inverse(p.kappa), inverse(p.hop_J), period_of(delta_d), inverse(damping),
                  period_of(w_est), inverse(d.g_n)}) /
        kStepsPerTimescale;
  }
  const double max_steps = spec.t_end > 0.0 ? std::ceil(spec.t_end / h) : kMaxSteps;

  auto rhs = [&](double, const Vec6& v) { return pack(nonlinear_rhs(d, p, delta_d, sigma, damping, unpack(v))); };

  const double field_bound = kDivergence * std::max(d.Omega_d / p.gamma, 1.0);
  const double x_bound = kDivergence / d.k;
  RelaxResult r;
  Vec6 y = Vec6::Zero();
  Eigen::Vector4d peak = Eigen::Vector4d::Zero();
  for (; r.steps < max_steps; ++r.steps) {
    y = detail::rk4_step(rhs, r.t, y, h);
    r.t += h;
    const NonlinearState s = unpack(y);
    if (!std::isfinite(y.squaredNorm()) || std::abs(s.c1) > field_bound || std::abs(s.c2) > field_bound ||
        std::abs(s.x) > x_bound) {
      throw InstabilityError("nonlinear trajectory diverges", std::max(std::abs(s.c1), std::abs(s.c2)));
    }
    const NonlinearState ds = nonlinear_rhs(d, p, delta_d, sigma, damping, s);
    const Eigen::Vector4d rate(std::abs(ds.x), std::abs(ds.p), std::abs(ds.c1), std::abs(ds.c2));
    peak = peak.cwiseMax(rate);
    if ((rate.array() <= spec.convergence_tol * peak.array()).all()) {
      r.converged = true;
      ++r.steps;
      break;
    }
  }
  r.state = unpack(y);
  return r;
}

DemodResult demodulated_response(const OperatingPoint& op, double delta, const TrajectorySpec& spec) {
  validate(spec);
  const double eps_p = op.derived.eps_p > 0.0 ? op.derived.eps_p : 1.0;
  const double drive = spec.drive_on ? eps_p : 0.0;
  DemodResult r = spec.method == DemodMethod::periodic ? demod_periodic(op, delta, spec, drive)
                                                       : demod_transient(op, delta, spec, drive);
  r.value = r.raw / eps_p;
  return r;
}

}  // namespace nmit
