#pragma once

#include <filesystem>
#include <string_view>

#include "nmit/params.hpp"

namespace nmit {

// Plain-text parameter files: one `key = value` per line, `#` starts a comment.
// Rates carry a unit suffix: `_hz` values are multiplied by 2*pi, `_rads` are
// used as given. Unknown or repeated keys are rejected.
//
//   gamma_hz = 215e3
//   kappa_over_gamma = 0.8
//   hop_J_over_gamma = 0.9
//   delta_d = auto
//   trap_mode = selfconsistent
//   sigma = 1e-20
SystemParams parse_config(std::string_view text, SystemParams base);
SystemParams load_config(const std::filesystem::path& path, SystemParams base);

}  // namespace nmit
