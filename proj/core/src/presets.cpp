#include "nmit/presets.hpp"

#include <array>
#include <string>

#include "nmit/constants.hpp"
#include "nmit/errors.hpp"

namespace nmit {
namespace {

constexpr std::array kPresets = {Preset::textbody, Preset::fig2caption, Preset::fig2, Preset::fig3,
                                 Preset::fig4,     Preset::fig5,        Preset::fig6, Preset::custom};

SystemParams textbody() {
  SystemParams p;
  p.lambda = 1064e-9;
  p.power_drive = 0.2e-3;
  p.power_probe = 0.2e-6;
  p.gamma = constants::two_pi * 215e3;
  p.kappa = 0.0;
  p.gamma_n = constants::two_pi * 0.003;
  p.hop_J = 0.0;
  p.rho = 2300.0;
  p.radius_a = 60e-9;
  p.eps_r = 2.0;
  p.cavity_L = 25e-3;
  p.waist_w = 20e-6;
  p.delta_d.reset();
  p.trap = PrescribedTrap{0.1};
  return p;
}

}  // namespace

Preset parse_preset(std::string_view name) {
  for (Preset p : kPresets) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

std::string_view to_string(Preset p) {
  switch (p) {
    case Preset::textbody: return "textbody";
    case Preset::fig2caption: return "fig2caption";
    case Preset::fig2: return "fig2";
    case Preset::fig3: return "fig3";
    case Preset::fig4: return "fig4";
    case Preset::fig5: return "fig5";
    case Preset::fig6: return "fig6";
    case Preset::custom: return "custom";
  }
  return "custom";
}

std::span<const Preset> all_presets() { return kPresets; }

SystemParams preset_params(Preset preset) {
  SystemParams p = textbody();
  switch (preset) {
    case Preset::textbody:
    case Preset::custom:
    case Preset::fig2:
      break;
    case Preset::fig2caption:
      p.gamma = constants::two_pi * 6e4;
      p.cavity_L = 0.01;
      break;
    case Preset::fig3:
      p.hop_J = 0.5 * p.gamma;
      break;
    case Preset::fig4:
      p.kappa = p.gamma;
      p.hop_J = 0.5 * p.gamma;
      break;
    case Preset::fig5:
    case Preset::fig6:
      p.hop_J = 0.9 * p.gamma;
      p.kappa = 0.4 * p.gamma;
      break;
  }
  return p;
}

}  // namespace nmit
