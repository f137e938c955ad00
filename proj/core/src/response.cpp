#include "nmit/response.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "nmit/constants.hpp"
#include "nmit/errors.hpp"

namespace nmit {
namespace {

using constants::hbar;
constexpr cplx I{0.0, 1.0};
constexpr double kSingularRcond = 1e-14;

// Row then column equilibration, LU, and a singularity check.
template <int N>
Eigen::Matrix<cplx, N, 1> solve_equilibrated(Eigen::Matrix<cplx, N, N> a, Eigen::Matrix<cplx, N, 1> b, double* rcond) {
  Eigen::Matrix<double, N, 1> row;
  Eigen::Matrix<double, N, 1> col;
  for (int i = 0; i < N; ++i) {
    const double m = a.row(i).cwiseAbs().maxCoeff();
    row(i) = m > 0.0 ? 1.0 / m : 1.0;
    a.row(i) *= row(i);
    b(i) *= row(i);
  }
  for (int j = 0; j < N; ++j) {
    const double m = a.col(j).cwiseAbs().maxCoeff();
    col(j) = m > 0.0 ? 1.0 / m : 1.0;
    a.col(j) *= col(j);
  }
  Eigen::PartialPivLU<Eigen::Matrix<cplx, N, N>> lu(a);
  *rcond = lu.rcond();
  if (!(*rcond > kSingularRcond)) {
    const double det = std::abs(lu.determinant());
    throw InstabilityError("sideband system is singular (|det| = " + std::to_string(det) + ")", det);
  }
  Eigen::Matrix<cplx, N, 1> y = lu.solve(b);
  for (int j = 0; j < N; ++j) y(j) *= col(j);
  return y;
}

}  // namespace

SidebandSolution solve_sideband_system(const OperatingPoint& op, double delta) {
  const SystemParams& p = op.params;
  const SteadyState& ss = op.steady;
  const double m = op.derived.mass_m;
  const double eps_p = op.derived.eps_p > 0.0 ? op.derived.eps_p : 1.0;
  const cplx G = ss.G_eff;
  const cplx Gc = std::conj(G);
  const double J = p.hop_J;

  const cplx mech = m * (ss.omega_n * ss.omega_n - delta * delta - I * p.gamma_n * delta);
  const cplx cav_plus = cplx(p.gamma, ss.delta_c - delta);
  const cplx cav_minus = cplx(p.gamma, -(ss.delta_c + delta));

  SidebandSolution sol;
  sol.delta = delta;
  if (J == 0.0) {
    // The active cavity is decoupled; its amplitudes vanish identically.
    Eigen::Matrix3cd a;
    a << mech, hbar * Gc, hbar * G,
         I * G, cav_plus, 0.0,
         -I * Gc, 0.0, cav_minus;
    Eigen::Vector3cd b(0.0, eps_p, 0.0);
    const Eigen::Vector3cd y = solve_equilibrated<3>(a, b, &sol.rcond);
    sol.x_plus = y(0);
    sol.a1_plus = y(1) / eps_p;
    sol.a1_minus_conj = y(2) / eps_p;
  } else {
    const cplx act_plus = cplx(-p.kappa, ss.delta_d - delta);
    const cplx act_minus = cplx(-p.kappa, -(ss.delta_d + delta));
    Eigen::Matrix<cplx, 5, 5> a;
    a << mech, hbar * Gc, hbar * G, 0.0, 0.0,
         I * G, cav_plus, 0.0, -I * J, 0.0,
         -I * Gc, 0.0, cav_minus, 0.0, I * J,
         0.0, -I * J, 0.0, act_plus, 0.0,
         0.0, 0.0, I * J, 0.0, act_minus;
    Eigen::Matrix<cplx, 5, 1> b;
    b << 0.0, eps_p, 0.0, 0.0, 0.0;
    const Eigen::Matrix<cplx, 5, 1> y = solve_equilibrated<5>(a, b, &sol.rcond);
    sol.x_plus = y(0);
    sol.a1_plus = y(1) / eps_p;
    sol.a1_minus_conj = y(2) / eps_p;
    sol.a2_plus = y(3) / eps_p;
    sol.a2_minus_conj = y(4) / eps_p;
  }
  sol.eps_T = 2.0 * p.gamma * sol.a1_plus;
  sol.chi = sol.eps_T.real();
  sol.eta = std::norm(1.0 - sol.eps_T);
  return sol;
}

cplx closed_form_c1plus(const OperatingPoint& op, double delta, SymbolMap map) {
  const SystemParams& p = op.params;
  const SteadyState& ss = op.steady;
  const double rate12 = map == SymbolMap::printed ? p.kappa : p.gamma;
  const double rate34 = map == SymbolMap::printed ? p.gamma : p.kappa;

  const cplx G1 = rate12 + I * (ss.delta_c - delta);
  const cplx G2 = rate12 - I * (ss.delta_c + delta);
  const cplx G3 = -rate34 + I * (ss.delta_d - delta);
  const cplx G4 = -rate34 - I * (ss.delta_d + delta);
  const double J2 = p.hop_J * p.hop_J;
  const cplx W1 = J2 + G1 * G3;
  const cplx W2 = J2 + G2 * G4;
  const cplx W3 = J2 * (G3 - G4);
  const cplx Gamma_n = ss.omega_n * ss.omega_n - I * delta * p.gamma_n - delta * delta;
  const cplx xi = I * hbar * std::norm(ss.G_eff) / op.derived.mass_m;

  const cplx num = (G3 * W2 * Gamma_n + xi * G3 * G4) * op.derived.eps_p;
  const cplx den = W1 * W2 * Gamma_n - xi * (W3 + G3 * G4 * (G2 - G1));
  if (std::abs(den) == 0.0 || !std::isfinite(std::abs(den))) throw SingularityError("closed-form denominator vanishes");
  return num / den;
}

double absorption(double gamma, cplx a1_plus) { return (2.0 * gamma * a1_plus).real(); }
double absorption(const SidebandSolution& sol) { return sol.eps_T.real(); }
double transmission(double gamma, cplx a1_plus) { return std::norm(1.0 - 2.0 * gamma * a1_plus); }
double transmission(const SidebandSolution& sol) { return std::norm(1.0 - sol.eps_T); }

std::string_view to_string(PtPhase phase) {
  switch (phase) {
    case PtPhase::pt_symmetric: return "PT_SYMMETRIC";
    case PtPhase::broken: return "BROKEN";
    case PtPhase::exceptional_point: return "EXCEPTIONAL_POINT";
  }
  return "BROKEN";
}

PhaseReport classify_phase(double J, double kappa, double gamma, double delta_d) {
  if (!(gamma > 0.0)) throw DomainError("classify_phase: gamma must be > 0");
  PhaseReport r;
  r.j_threshold_pt = 0.5 * (kappa + gamma);
  if (kappa > 0.0) r.j_threshold_aux = std::sqrt(kappa * gamma);

  const double a = r.j_threshold_pt;
  const cplx split = std::sqrt(cplx(J * J - a * a, 0.0));
  const cplx centre(delta_d, 0.5 * (kappa - gamma));
  r.eigenvalues = {centre + split, centre - split};

  const double scale = std::max(std::abs(a), std::abs(J));
  if (std::abs(std::abs(J) - a) <= 1e-12 * scale) {
    r.phase = PtPhase::exceptional_point;
  } else {
    r.phase = std::abs(J) > a ? PtPhase::pt_symmetric : PtPhase::broken;
  }
  const double growth = std::max(r.eigenvalues[0].imag(), r.eigenvalues[1].imag());
  r.amplifying = growth > 1e-12 * std::max({gamma, std::abs(kappa), std::abs(J)});
  return r;
}

double linear_growth_rate(const OperatingPoint& op) {
  const SystemParams& p = op.params;
  const SteadyState& ss = op.steady;
  const double m = op.derived.mass_m;
  const cplx G = ss.G_eff;

  // State (x, p, Re c1, Im c1, Re c2, Im c2); coordinates scaled so the
  // couplings are O(rate) and the eigen solver sees a balanced matrix.
  const double x_ref = std::abs(G) > 0.0 ? p.gamma / std::abs(G) : 1.0;
  const double p_ref = m * std::max(ss.omega_n, p.gamma) * x_ref;

  Eigen::Matrix<double, 6, 6> a = Eigen::Matrix<double, 6, 6>::Zero();
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
  put(2, 2, cplx(-p.gamma, -ss.delta_c));
  put(2, 4, cplx(0.0, p.hop_J));
  const cplx drive_x = -I * G * x_ref;
  a(2, 0) += drive_x.real();
  a(3, 0) += drive_x.imag();
  put(4, 4, cplx(p.kappa, -ss.delta_d));
  put(4, 2, cplx(0.0, p.hop_J));

  Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace nmit
