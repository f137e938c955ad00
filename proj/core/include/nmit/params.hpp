#pragma once

#include <optional>
#include <variant>

namespace nmit {

/// Trap position fixed through s = sin(2k x_ns).
struct PrescribedTrap {
  double s = 0.1;
};

/// Trap position solved from a constant Coulomb force sigma (N).
struct SelfConsistentTrap {
  double sigma = 0.0;
};

using TrapMode = std::variant<PrescribedTrap, SelfConsistentTrap>;

/// Physical inputs, SI units throughout. Rates are angular (rad/s).
struct SystemParams {
  double lambda = 1064e-9;
  double power_drive = 0.2e-3;
  double power_probe = 0.2e-6;
  double gamma = 0.0;    // passive-cavity decay
  double kappa = 0.0;    // active-cavity gain (>0 gain, <0 loss)
  double gamma_n = 0.0;  // nanosphere damping
  double hop_J = 0.0;
  double rho = 2300.0;
  double radius_a = 60e-9;
  double eps_r = 2.0;
  double cavity_L = 25e-3;
  double waist_w = 20e-6;
  /// Drive detuning omega_c - omega_d. Empty: choose it so that Delta_c = omega_n.
  std::optional<double> delta_d;
  TrapMode trap = PrescribedTrap{};
  /// Nanosphere-mirror separation, only used to turn charges into sigma.
  double mirror_distance_d = 10e-6;
};

struct DerivedQuantities {
  double omega_c = 0.0;
  double k = 0.0;
  double volume = 0.0;
  double mass_m = 0.0;
  double mode_volume = 0.0;
  double g_n = 0.0;
  double Omega_d = 0.0;
  double eps_p = 0.0;
};

/// Throws ValidationError naming the first offending field.
void validate(const SystemParams& p);

/// Pure: identical inputs give bit-identical outputs.
DerivedQuantities derive(const SystemParams& p);

/// First-order Coulomb force Q1 Q2 / (4 pi eps0 d^2).
double coulomb_sigma(double q1, double q2, double distance);

}  // namespace nmit
