#include "nmit/sweep.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "nmit/emit.hpp"
#include "nmit/errors.hpp"
#include "nmit/response.hpp"

#ifndef NMIT_VERSION
#define NMIT_VERSION "0.1.0"
#endif

namespace nmit {
namespace {

constexpr std::array kAxisNames = {AxisName::delta_over_omega_n, AxisName::J_over_gamma, AxisName::kappa_over_gamma,
                                   AxisName::s};
constexpr std::array kOutputs = {Output::chi, Output::eta, Output::c1plus, Output::c1minus, Output::phase,
                                 Output::growth};

double to_number(std::string_view field, std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(std::string(field), "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void validate_axis_values(std::string_view field, AxisName name, const std::vector<double>& values) {
  const std::string f(field);
  if (values.size() < 2) throw ValidationError(f, "needs at least 2 points");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw ValidationError(f, "non-finite value");
    if (i > 0 && !(values[i] > values[i - 1])) throw ValidationError(f, "values must be strictly increasing (min < max)");
  }
  if (name == AxisName::s && (values.front() < -1.0 || values.back() >= 1.0)) {
    throw ValidationError(f, "s must lie in [-1, 1)");
  }
}

// Parameters for one grid point. Returns the probe ratio delta/omega_n.
double apply(AxisName name, double value, SystemParams& p, double delta_ratio) {
  switch (name) {
    case AxisName::delta_over_omega_n: return value;
    case AxisName::J_over_gamma: p.hop_J = value * p.gamma; break;
    case AxisName::kappa_over_gamma: p.kappa = value * p.gamma; break;
    case AxisName::s: p.trap = PrescribedTrap{value}; break;
  }
  return delta_ratio;
}

std::size_t cells_per_output(Output out) { return (out == Output::c1plus || out == Output::c1minus) ? 2 : 1; }

void append_outputs(const SweepSpec& spec, const SystemParams& p, double delta_ratio, std::vector<Cell>& row) {
  std::optional<OperatingPoint> op;
  try {
    op = make_operating_point(p);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error&) {
  }

  std::optional<SidebandSolution> sol;
  if (op) {
    try {
      sol = solve_sideband_system(*op, delta_ratio * op->steady.omega_n);
    } catch (const InstabilityError&) {
    }
  }

  for (Output out : spec.outputs) {
    switch (out) {
      case Output::phase: {
        const double dd = op ? op->steady.delta_d : p.delta_d.value_or(0.0);
        row.emplace_back(std::string(to_string(classify_phase(p.hop_J, p.kappa, p.gamma, dd).phase)));
        break;
      }
      case Output::growth:
        if (op) {
          row.emplace_back(linear_growth_rate(*op));
        } else {
          row.emplace_back(std::string(kUnstable));
        }
        break;
      default:
        if (!sol) {
          for (std::size_t c = 0; c < cells_per_output(out); ++c) row.emplace_back(std::string(kUnstable));
          break;
        }
        if (out == Output::chi) row.emplace_back(sol->chi);
        if (out == Output::eta) row.emplace_back(sol->eta);
        if (out == Output::c1plus) {
          row.emplace_back(sol->a1_plus.real());
          row.emplace_back(sol->a1_plus.imag());
        }
        if (out == Output::c1minus) {
          row.emplace_back(sol->a1_minus_conj.real());
          row.emplace_back(sol->a1_minus_conj.imag());
        }
        break;
    }
  }
}

}  // namespace

AxisName parse_axis_name(std::string_view name) {
  for (AxisName a : kAxisNames) {
    if (to_string(a) == name) return a;
  }
  throw ValidationError("axis", "unknown axis '" + std::string(name) + "'");
}

std::string_view to_string(AxisName name) {
  switch (name) {
    case AxisName::delta_over_omega_n: return "delta_over_omega_n";
    case AxisName::J_over_gamma: return "J_over_gamma";
    case AxisName::kappa_over_gamma: return "kappa_over_gamma";
    case AxisName::s: return "s";
  }
  return "s";
}

Output parse_output(std::string_view name) {
  for (Output o : kOutputs) {
    if (to_string(o) == name) return o;
  }
  throw ValidationError("outputs", "unknown output '" + std::string(name) + "'");
}

std::string_view to_string(Output out) {
  switch (out) {
    case Output::chi: return "chi";
    case Output::eta: return "eta";
    case Output::c1plus: return "c1plus";
    case Output::c1minus: return "c1minus";
    case Output::phase: return "phase";
    case Output::growth: return "growth";
  }
  return "chi";
}

SweepAxis SweepAxis::linspace(AxisName name, double min, double max, int points) {
  if (points < 2) throw ValidationError(std::string(to_string(name)), "needs at least 2 points");
  if (!(min < max)) throw ValidationError(std::string(to_string(name)), "min must be < max");
  SweepAxis a;
  a.name = name;
  a.values.resize(static_cast<std::size_t>(points));
  const double step = (max - min) / (points - 1);
  for (int i = 0; i < points; ++i) a.values[static_cast<std::size_t>(i)] = min + step * i;
  a.values.back() = max;
  return a;
}

SweepAxis SweepAxis::parse(std::string_view text) {
  if (const auto eq = text.find('='); eq != std::string_view::npos) {
    SweepAxis a;
    a.name = parse_axis_name(text.substr(0, eq));
    for (auto v : split(text.substr(eq + 1), ',')) a.values.push_back(to_number(to_string(a.name), v));
    validate_axis_values(to_string(a.name), a.name, a.values);
    return a;
  }
  const auto parts = split(text, ':');
  if (parts.size() != 4) throw ValidationError("axis", "expected name:min:max:points or name=v1,v2,...");
  const AxisName name = parse_axis_name(parts[0]);
  const double points = to_number("points", parts[3]);
  if (points != std::floor(points)) throw ValidationError("points", "must be an integer");
  return linspace(name, to_number("min", parts[1]), to_number("max", parts[2]), static_cast<int>(points));
}

void validate(const SweepSpec& spec, const SystemParams& params) {
  validate(params);
  validate_axis_values("axis1", spec.axis1.name, spec.axis1.values);
  std::vector<AxisName> names{spec.axis1.name};
  if (spec.axis2) {
    validate_axis_values("axis2", spec.axis2->name, spec.axis2->values);
    names.push_back(spec.axis2->name);
  }
  if (spec.variants) {
    if (spec.variants->values.empty()) throw ValidationError("variants", "needs at least one value");
    for (double v : spec.variants->values) {
      if (!std::isfinite(v)) throw ValidationError("variants", "non-finite value");
      if (spec.variants->name == AxisName::s && std::abs(v) >= 1.0) throw ValidationError("variants", "s must lie in (-1, 1)");
    }
    if (spec.variants->name == AxisName::delta_over_omega_n) {
      throw ValidationError("variants", "delta_over_omega_n cannot be a variant");
    }
    names.push_back(spec.variants->name);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) throw ValidationError("axis", "axis names must be distinct");
    }
  }
  const bool sweeps_s = std::find(names.begin(), names.end(), AxisName::s) != names.end();
  if (sweeps_s && !std::holds_alternative<PrescribedTrap>(params.trap)) {
    throw ValidationError("trap_mode", "sweeping s requires trap_mode = prescribed");
  }
  if (spec.outputs.empty()) throw ValidationError("outputs", "at least one output is required");
  if (!std::isfinite(spec.delta_over_omega_n)) throw ValidationError("delta_over_omega_n", "must be finite");
}

SweepSpec preset_sweep(Preset preset) {
  SweepSpec spec;
  spec.preset = preset;
  switch (preset) {
    case Preset::fig2:
      spec.variants = SweepVariants{AxisName::s, {0.0, 0.1}};
      spec.outputs = {Output::chi};
      break;
    case Preset::fig3:
      spec.variants = SweepVariants{AxisName::J_over_gamma, {0.0, 0.2, 0.5, 0.9}};
      spec.outputs = {Output::chi};
      break;
    case Preset::fig4:
      spec.axis1 = SweepAxis::linspace(AxisName::delta_over_omega_n, -2.0, 2.0, 401);
      spec.axis2 = SweepAxis::linspace(AxisName::J_over_gamma, 0.0, 1.0, 11);
      spec.outputs = {Output::chi};
      break;
    case Preset::fig5:
      spec.axis2 = SweepAxis{AxisName::kappa_over_gamma, {0.0, 0.4, 0.8, 1.0}};
      spec.outputs = {Output::eta, Output::phase};
      break;
    case Preset::fig6:
      spec.variants = SweepVariants{AxisName::s, {0.0, 0.05, 0.1}};
      spec.outputs = {Output::eta};
      break;
    case Preset::textbody:
    case Preset::fig2caption:
    case Preset::custom:
      break;
  }
  return spec;
}

std::vector<std::string> sweep_columns(const SweepSpec& spec) {
  std::vector<std::string> cols{std::string(to_string(spec.axis1.name))};
  if (spec.axis2) cols.emplace_back(to_string(spec.axis2->name));
  const std::size_t groups = spec.variants ? spec.variants->values.size() : 1;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::string suffix = spec.variants ? "[" + std::string(to_string(spec.variants->name)) + "=" +
                                                   format_double(spec.variants->values[g]) + "]"
                                             : "";
    for (Output out : spec.outputs) {
      const std::string base(to_string(out));
      if (cells_per_output(out) == 2) {
        cols.push_back(base + "_re" + suffix);
        cols.push_back(base + "_im" + suffix);
      } else {
        cols.push_back(base + suffix);
      }
    }
  }
  return cols;
}

std::vector<Cell> evaluate_row(const SweepSpec& spec, const SystemParams& params, std::size_t i, std::size_t j) {
  std::vector<Cell> row;
  const double v1 = spec.axis1.values.at(i);
  row.emplace_back(v1);
  SystemParams base = params;
  double ratio = apply(spec.axis1.name, v1, base, spec.delta_over_omega_n);
  if (spec.axis2) {
    const double v2 = spec.axis2->values.at(j);
    row.emplace_back(v2);
    ratio = apply(spec.axis2->name, v2, base, ratio);
  }
  if (spec.variants) {
    for (double v : spec.variants->values) {
      SystemParams p = base;
      apply(spec.variants->name, v, p, ratio);
      append_outputs(spec, p, ratio, row);
    }
  } else {
    append_outputs(spec, base, ratio, row);
  }
  return row;
}

SpectrumTable run_sweep(const SweepSpec& spec, const SystemParams& params, unsigned threads) {
  validate(spec, params);

  SpectrumTable table;
  table.columns = sweep_columns(spec);
  table.metadata.preset = spec.preset;
  table.metadata.params = params;
  table.metadata.derived = derive(params);
  table.metadata.version = library_version();
  try {
    table.metadata.steady = solve_steady_state(table.metadata.derived, params);
  } catch (const Error&) {
  }

  const std::size_t n1 = spec.axis1.values.size();
  const std::size_t n2 = spec.axis2 ? spec.axis2->values.size() : 1;
  const std::size_t total = n1 * n2;
  table.rows.resize(total);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t k = next++; k < total && !failed; k = next++) {
      try {
        table.rows[k] = evaluate_row(spec, params, k % n1, k / n1);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

std::string library_version() { return NMIT_VERSION; }

}  // namespace nmit
