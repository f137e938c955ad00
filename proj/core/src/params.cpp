#include "nmit/params.hpp"

#include <cmath>
#include <string>

#include "nmit/constants.hpp"
#include "nmit/errors.hpp"

namespace nmit {
namespace {

void require_finite(const char* field, double v) {
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

void require_positive(const char* field, double v) {
  require_finite(field, v);
  if (!(v > 0.0)) throw ValidationError(field, "must be > 0, got " + std::to_string(v));
}

}  // namespace

void validate(const SystemParams& p) {
  require_positive("lambda", p.lambda);
  require_positive("rho", p.rho);
  require_positive("radius_a", p.radius_a);
  require_positive("cavity_L", p.cavity_L);
  require_positive("waist_w", p.waist_w);
  require_positive("gamma", p.gamma);
  require_positive("mirror_distance_d", p.mirror_distance_d);
  require_finite("power_drive", p.power_drive);
  require_finite("power_probe", p.power_probe);
  require_finite("kappa", p.kappa);
  require_finite("gamma_n", p.gamma_n);
  require_finite("hop_J", p.hop_J);
  require_finite("eps_r", p.eps_r);
  if (p.power_drive < 0.0) throw ValidationError("power_drive", "must be >= 0");
  if (p.power_probe < 0.0) throw ValidationError("power_probe", "must be >= 0");
  if (p.gamma_n < 0.0) throw ValidationError("gamma_n", "must be >= 0");
  if (p.eps_r < 1.0) throw ValidationError("eps_r", "must be >= 1");
  if (p.delta_d) require_finite("delta_d", *p.delta_d);

  if (const auto* t = std::get_if<PrescribedTrap>(&p.trap)) {
    require_finite("trap_s", t->s);
    if (std::abs(t->s) > 1.0) throw ValidationError("trap_s", "|s| must be <= 1");
  } else {
    const auto& sc = std::get<SelfConsistentTrap>(p.trap);
    require_finite("sigma", sc.sigma);
    if (sc.sigma < 0.0) throw ValidationError("sigma", "must be >= 0");
  }
}

DerivedQuantities derive(const SystemParams& p) {
  validate(p);
  using constants::hbar;
  using constants::pi;

  DerivedQuantities d;
  d.omega_c = constants::two_pi * constants::c / p.lambda;
  d.k = constants::two_pi / p.lambda;
  d.volume = 4.0 / 3.0 * pi * p.radius_a * p.radius_a * p.radius_a;
  d.mass_m = p.rho * d.volume;
  d.mode_volume = pi / 4.0 * p.cavity_L * p.waist_w * p.waist_w;
  d.g_n = 3.0 * d.volume / (4.0 * d.mode_volume) * ((p.eps_r - 1.0) / (p.eps_r + 2.0)) * d.omega_c;
  // Drive and probe sit within a few MHz of omega_c; the amplitude uses omega_c for both.
  const double photon_energy = hbar * d.omega_c;
  d.Omega_d = std::sqrt(2.0 * p.gamma * p.power_drive / photon_energy);
  d.eps_p = std::sqrt(2.0 * p.gamma * p.power_probe / photon_energy);
  return d;
}

double coulomb_sigma(double q1, double q2, double distance) {
  require_positive("mirror_distance_d", distance);
  return q1 * q2 / (4.0 * constants::pi * constants::epsilon_0 * distance * distance);
}

}  // namespace nmit
