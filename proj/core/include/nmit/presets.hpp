#pragma once

#include <span>
#include <string_view>

#include "nmit/params.hpp"

namespace nmit {

enum class Preset { textbody, fig2caption, fig2, fig3, fig4, fig5, fig6, custom };

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset p);
std::span<const Preset> all_presets();

/// Resolved physical parameters for a preset.
///
/// `textbody` carries the parameter inventory of the model description
/// (gamma = 2pi x 215 kHz, L = 25 mm); `fig2caption` swaps in the caption values
/// (gamma = 2pi x 60 kHz, L = 10 mm). The figure presets start from `textbody`:
///
///   fig2  J = 0, kappa = 0, s = 0.1
///   fig3  kappa = 0, J = 0.5 gamma   (neutral active cavity)
///   fig4  kappa = gamma, J = 0.5 gamma
///   fig5  J = 0.9 gamma, kappa = 0.4 gamma
///   fig6  J = 0.9 gamma, kappa = 0.4 gamma
///
/// gamma_n = 0.003 Hz is read as 2pi x 0.003 rad/s.
SystemParams preset_params(Preset p);

}  // namespace nmit
