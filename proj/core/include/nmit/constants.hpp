#pragma once

#include <numbers>

namespace nmit::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
/// Reduced Planck constant, J s.
inline constexpr double hbar = 1.054571817e-34;
/// Speed of light in vacuum, m/s.
inline constexpr double c = 2.99792458e8;
/// Vacuum permittivity, F/m.
inline constexpr double epsilon_0 = 8.8541878128e-12;

}  // namespace nmit::constants
