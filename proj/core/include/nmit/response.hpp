#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>

#include "nmit/steady_state.hpp"

namespace nmit {

/// First-order probe response at one probe-drive detuning delta = omega_p - omega_d.
///
/// Cavity amplitudes are normalized by the probe amplitude eps_p; x_plus is the
/// mechanical amplitude in metres at the configured probe power.
struct SidebandSolution {
  double delta = 0.0;
  cplx x_plus;
  cplx a1_plus;        // c1+ / eps_p
  cplx a1_minus_conj;  // (c1-)* / eps_p
  cplx a2_plus;        // c2+ / eps_p
  cplx a2_minus_conj;  // (c2-)* / eps_p
  cplx eps_T;          // 2 gamma c1+ / eps_p
  double chi = 0.0;
  double eta = 0.0;
  double rcond = 0.0;  // reciprocal condition estimate of the equilibrated system
};

/// Solves the five coupled sideband amplitude equations obtained from the
/// linearized fluctuation dynamics with delta_O = O+ e^{-i delta t} + O- e^{i delta t}
/// (x- = conj(x+) because the displacement is real):
///
///   m (omega_n^2 - delta^2 - i gamma_n delta) x+ = -hbar (G* A+ + G Am)
///   [gamma + i(delta_c - delta)] A+ = i J B+ - i G x+ + eps_p
///   [gamma - i(delta_c + delta)] Am = -i J Bm + i G* x+
///   [-kappa + i(delta_d - delta)] B+ = i J A+
///   [-kappa - i(delta_d + delta)] Bm = -i J Am
///
/// with A+ = c1+, Am = (c1-)*, B+ = c2+, Bm = (c2-)*.
/// Throws InstabilityError (carrying |det| of the equilibrated matrix) when the
/// system is numerically singular.
SidebandSolution solve_sideband_system(const OperatingPoint& op, double delta);

/// Which cavity rate sits in G1..G4 of the printed closed form.
enum class SymbolMap {
  printed,    // G1, G2 carry kappa; G3, G4 carry gamma (literal transcription)
  exchanged,  // G1, G2 carry gamma; G3, G4 carry kappa (agrees with the linear solve)
};

/// Closed-form c1+ (not normalized: includes eps_p):
///   c1+ = [G3 W2 Gn + xi G3 G4] eps_p / (W1 W2 Gn - xi [W3 + G3 G4 (G2 - G1)])
/// with W1 = J^2 + G1 G3, W2 = J^2 + G2 G4, W3 = J^2 (G3 - G4),
/// Gn = omega_n^2 - i delta gamma_n - delta^2 and xi = i hbar |G|^2 / m.
/// Diagnostic only; solve_sideband_system is the reference.
cplx closed_form_c1plus(const OperatingPoint& op, double delta, SymbolMap map = SymbolMap::exchanged);

/// chi = Re[eps_T].
double absorption(const SidebandSolution& sol);
double absorption(double gamma, cplx a1_plus);
/// eta = |1 - 2 gamma c1+/eps_p|^2.
double transmission(const SidebandSolution& sol);
double transmission(double gamma, cplx a1_plus);

enum class PtPhase { pt_symmetric, broken, exceptional_point };
std::string_view to_string(PtPhase phase);

struct PhaseReport {
  double j_threshold_pt = 0.0;              // (kappa + gamma) / 2
  std::optional<double> j_threshold_aux;    // sqrt(kappa gamma), kappa > 0 only
  PtPhase phase = PtPhase::broken;
  std::array<cplx, 2> eigenvalues;          // supermode frequencies, loss = negative imaginary part
  bool amplifying = false;                  // some supermode grows in time
};

/// Supermodes of [[delta_d - i gamma, J], [J, delta_d + i kappa]].
/// The exceptional point is reported when |J - (kappa+gamma)/2| <= 1e-12 relative.
PhaseReport classify_phase(double J, double kappa, double gamma, double delta_d);

/// Largest real part among the eigenvalues of the full linearized drift matrix
/// (x, p, Re/Im dc1, Re/Im dc2). Positive means the operating point is unstable.
double linear_growth_rate(const OperatingPoint& op);

}  // namespace nmit
