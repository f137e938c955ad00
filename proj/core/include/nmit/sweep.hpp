#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nmit/presets.hpp"
#include "nmit/steady_state.hpp"

namespace nmit {

enum class AxisName { delta_over_omega_n, J_over_gamma, kappa_over_gamma, s };
enum class Output { chi, eta, c1plus, c1minus, phase, growth };

AxisName parse_axis_name(std::string_view name);
std::string_view to_string(AxisName name);
Output parse_output(std::string_view name);
std::string_view to_string(Output out);

struct SweepAxis {
  AxisName name = AxisName::delta_over_omega_n;
  std::vector<double> values;  // strictly increasing, at least two

  static SweepAxis linspace(AxisName name, double min, double max, int points);
  /// "name:min:max:points" or "name=v1,v2,...".
  static SweepAxis parse(std::string_view text);
};

/// Discrete values of one parameter emitted side by side as column groups,
/// e.g. chi[s=0] and chi[s=0.1].
struct SweepVariants {
  AxisName name = AxisName::s;
  std::vector<double> values;
};

struct SweepSpec {
  SweepAxis axis1 = SweepAxis::linspace(AxisName::delta_over_omega_n, -2.0, 2.0, 2001);
  std::optional<SweepAxis> axis2;
  std::optional<SweepVariants> variants;
  Preset preset = Preset::custom;
  std::vector<Output> outputs{Output::chi, Output::eta};
  /// Probe detuning used when delta_over_omega_n is not swept.
  double delta_over_omega_n = 1.0;
};

/// Throws ValidationError before any computation.
void validate(const SweepSpec& spec, const SystemParams& params);

SweepSpec preset_sweep(Preset preset);

/// A cell is a number or a text flag ("unstable", phase labels).
using Cell = std::variant<double, std::string>;

struct TableMetadata {
  Preset preset = Preset::custom;
  SystemParams params;
  DerivedQuantities derived;
  std::optional<SteadyState> steady;  // base operating point, when it exists
  std::string version;
  std::string timestamp;  // empty: omitted from output
};

struct SpectrumTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  TableMetadata metadata;
};

inline constexpr std::string_view kUnstable = "unstable";

/// Evaluates one grid point: axis2 index j (0 without axis2), axis1 index i.
/// Row order in run_sweep is axis2 outer, axis1 inner, and every row equals
/// evaluate_row on its own.
std::vector<Cell> evaluate_row(const SweepSpec& spec, const SystemParams& params, std::size_t i, std::size_t j);

std::vector<std::string> sweep_columns(const SweepSpec& spec);

/// Points whose sideband system is singular, or whose steady state fails, are
/// written as "unstable" instead of aborting. threads = 0 uses the hardware count.
SpectrumTable run_sweep(const SweepSpec& spec, const SystemParams& params, unsigned threads = 1);

std::string library_version();

}  // namespace nmit
