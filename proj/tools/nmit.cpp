// nmit: steady states, probe spectra and sweeps for the two-cavity levitated
// nanosphere model.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nmit/config.hpp"
#include "nmit/emit.hpp"
#include "nmit/errors.hpp"
#include "nmit/oracle.hpp"
#include "nmit/presets.hpp"
#include "nmit/response.hpp"
#include "nmit/steady_state.hpp"
#include "nmit/sweep.hpp"

namespace {

using json = nlohmann::ordered_json;

enum Exit { ok = 0, invalid = 1, unstable = 2, failure = 3 };

struct Globals {
  std::string config;
  std::string preset;
  std::string output;
  std::string format = "csv";
  bool no_timestamp = false;
  unsigned threads = 1;
  bool strict = false;
};

struct Resolved {
  nmit::Preset preset = nmit::Preset::custom;
  nmit::SystemParams params;
};

Resolved resolve(const Globals& g) {
  Resolved r;
  r.preset = g.preset.empty() ? nmit::Preset::custom : nmit::parse_preset(g.preset);
  r.params = nmit::preset_params(r.preset);
  if (!g.config.empty()) r.params = nmit::load_config(g.config, r.params);
  nmit::validate(r.params);
  return r;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const Globals& g, const std::string& text) {
  if (g.output.empty() || g.output == "-") {
    std::cout << text;
    return;
  }
  // same temp-then-rename dance as emit()
  const auto tmp = g.output + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw nmit::IoError("cannot open " + tmp + " for writing");
  const bool good = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !good) throw nmit::IoError("write failed for " + tmp);
  if (std::rename(tmp.c_str(), g.output.c_str()) != 0) throw nmit::IoError("cannot move output to " + g.output);
}

json complex_json(nmit::cplx z) { return json::array({z.real(), z.imag()}); }

json steady_json(const nmit::SteadyState& s) {
  json j;
  j["x_ns"] = s.x_ns;
  j["p_ns"] = s.p_ns;
  j["c1s"] = complex_json(s.c1s);
  j["c2s"] = complex_json(s.c2s);
  j["omega_n"] = s.omega_n;
  j["G_n"] = s.G_n;
  j["G_eff"] = complex_json(s.G_eff);
  j["delta_c"] = s.delta_c;
  j["delta_d"] = s.delta_d;
  j["sigma_implied"] = s.sigma_implied;
  j["fixed_point_count"] = s.fixed_point_count;
  j["iterations"] = s.iterations;
  return j;
}

json derived_json(const nmit::DerivedQuantities& d) {
  json j;
  j["omega_c"] = d.omega_c;
  j["k"] = d.k;
  j["volume"] = d.volume;
  j["mass_m"] = d.mass_m;
  j["mode_volume"] = d.mode_volume;
  j["g_n"] = d.g_n;
  j["Omega_d"] = d.Omega_d;
  j["eps_p"] = d.eps_p;
  return j;
}

std::vector<nmit::Output> parse_outputs(const std::vector<std::string>& names) {
  std::vector<nmit::Output> out;
  for (const auto& n : names) out.push_back(nmit::parse_output(n));
  return out;
}

nmit::SweepVariants parse_variants(const std::string& text) {
  const auto axis = nmit::SweepAxis::parse(text);
  return {axis.name, axis.values};
}

bool has_unstable(const nmit::SpectrumTable& t) {
  for (const auto& row : t.rows) {
    for (const auto& c : row) {
      if (const auto* s = std::get_if<std::string>(&c); s && *s == nmit::kUnstable) return true;
    }
  }
  return false;
}

int finish_table(const Globals& g, nmit::SpectrumTable table) {
  if (!g.no_timestamp) table.metadata.timestamp = utc_now();
  const auto fmt = nmit::parse_format(g.format);
  if (g.output.empty() || g.output == "-") {
    std::cout << nmit::format_table(table, fmt);
  } else {
    nmit::emit(table, fmt, g.output);
  }
  if (g.strict && has_unstable(table)) {
    std::cerr << "nmit: unstable grid points present\n";
    return unstable;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PT-symmetric opto-nanomechanics: steady state, NMIT spectra and sweeps"};
  app.set_version_flag("--version", nmit::library_version());
  app.require_subcommand(1);
  app.fallthrough();  // global flags may also follow the subcommand

  Globals g;
  app.add_option("--config", g.config, "key = value parameter file")->check(CLI::ExistingFile);
  app.add_option("--preset", g.preset, "textbody, fig2caption, fig2 .. fig6, custom");
  app.add_option("--output,-o", g.output, "output path (default stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--no-timestamp", g.no_timestamp, "omit the timestamp from JSON metadata");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_flag("--strict", g.strict, "exit 2 when any point is unstable");

  auto* derive_cmd = app.add_subcommand("derive", "derived constants as JSON");
  auto* steady_cmd = app.add_subcommand("steady", "classical steady state as JSON");

  auto* spectrum_cmd = app.add_subcommand("spectrum", "probe spectrum versus delta/omega_n");
  std::string spectrum_axis = "delta_over_omega_n:-2:2:2001";
  std::vector<std::string> spectrum_outputs{"chi", "eta"};
  spectrum_cmd->add_option("--axis", spectrum_axis, "delta_over_omega_n:min:max:points");
  spectrum_cmd->add_option("--outputs", spectrum_outputs, "chi eta c1plus c1minus phase growth")->delimiter(',');

  auto* sweep_cmd = app.add_subcommand("sweep", "1D/2D parameter sweep");
  std::string axis1, axis2, variants;
  std::vector<std::string> sweep_outputs;
  double sweep_delta = 1.0;
  sweep_cmd->add_option("--axis1", axis1, "name:min:max:points or name=v1,v2,..");
  sweep_cmd->add_option("--axis2", axis2, "second axis (outer loop)");
  sweep_cmd->add_option("--variants", variants, "name=v1,v2,.. emitted as column groups");
  sweep_cmd->add_option("--outputs", sweep_outputs, "chi eta c1plus c1minus phase growth")->delimiter(',');
  sweep_cmd->add_option("--delta", sweep_delta, "delta/omega_n when it is not swept");

  auto* phase_cmd = app.add_subcommand("phase", "PT phase of the two-cavity supermodes as JSON");

  auto* oracle_cmd = app.add_subcommand("oracle", "canonical solve vs time-domain demodulation (CSV)");
  double o_min = -2.0, o_max = 2.0;
  int o_points = 41;
  std::string o_method = "periodic";
  oracle_cmd->add_option("--min", o_min, "lowest delta/omega_n");
  oracle_cmd->add_option("--max", o_max, "highest delta/omega_n");
  oracle_cmd->add_option("--points", o_points, "number of detunings")->check(CLI::Range(2, 100000));
  oracle_cmd->add_option("--method", o_method, "periodic or transient")
      ->check(CLI::IsMember({"periodic", "transient"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const Resolved r = resolve(g);

    if (*derive_cmd) {
      json j;
      j["preset"] = std::string(nmit::to_string(r.preset));
      j["derived"] = derived_json(nmit::derive(r.params));
      write_text(g, j.dump(2) + "\n");
      return ok;
    }

    if (*steady_cmd) {
      const auto op = nmit::make_operating_point(r.params);
      json j;
      j["preset"] = std::string(nmit::to_string(r.preset));
      j["steady"] = steady_json(op.steady);
      j["growth_rate"] = nmit::linear_growth_rate(op);
      if (op.steady.multiple_fixed_points()) std::cerr << "nmit: warning: several trap positions exist\n";
      write_text(g, j.dump(2) + "\n");
      return ok;
    }

    if (*phase_cmd) {
      double dd = r.params.delta_d.value_or(0.0);
      if (!r.params.delta_d) {
        try {
          dd = nmit::make_operating_point(r.params).steady.delta_d;
        } catch (const nmit::ValidationError&) {
          throw;
        } catch (const nmit::Error& e) {
          std::cerr << "nmit: steady state unavailable (" << e.what() << "), using delta_d = 0\n";
        }
      }
      const auto rep = nmit::classify_phase(r.params.hop_J, r.params.kappa, r.params.gamma, dd);
      json j;
      j["phase"] = std::string(nmit::to_string(rep.phase));
      j["j_threshold_pt"] = rep.j_threshold_pt;
      j["j_threshold_aux"] = rep.j_threshold_aux ? json(*rep.j_threshold_aux) : json(nullptr);
      j["eigenvalues"] = json::array({complex_json(rep.eigenvalues[0]), complex_json(rep.eigenvalues[1])});
      j["amplifying"] = rep.amplifying;
      write_text(g, j.dump(2) + "\n");
      return ok;
    }

    if (*spectrum_cmd) {
      nmit::SweepSpec spec;
      spec.preset = r.preset;
      spec.axis1 = nmit::SweepAxis::parse(spectrum_axis);
      if (spec.axis1.name != nmit::AxisName::delta_over_omega_n) {
        throw nmit::ValidationError("axis", "spectrum sweeps delta_over_omega_n only; use `sweep` for others");
      }
      spec.outputs = parse_outputs(spectrum_outputs);
      return finish_table(g, nmit::run_sweep(spec, r.params, g.threads));
    }

    if (*sweep_cmd) {
      nmit::SweepSpec spec = nmit::preset_sweep(r.preset);
      if (!axis1.empty()) spec.axis1 = nmit::SweepAxis::parse(axis1);
      if (!axis2.empty()) spec.axis2 = nmit::SweepAxis::parse(axis2);
      if (!variants.empty()) spec.variants = parse_variants(variants);
      if (!sweep_outputs.empty()) spec.outputs = parse_outputs(sweep_outputs);
      spec.delta_over_omega_n = sweep_delta;
      return finish_table(g, nmit::run_sweep(spec, r.params, g.threads));
    }

    if (*oracle_cmd) {
      const auto op = nmit::make_operating_point(r.params);
      nmit::TrajectorySpec ts;
      ts.method = o_method == "periodic" ? nmit::DemodMethod::periodic : nmit::DemodMethod::transient;
      const auto axis = nmit::SweepAxis::linspace(nmit::AxisName::delta_over_omega_n, o_min, o_max, o_points);
      std::string out = "delta_over_omega_n,canonical_re,canonical_im,oracle_re,oracle_im,rel_error\n";
      bool any_unstable = false;
      for (double v : axis.values) {
        const double delta = v * op.steady.omega_n;
        out += nmit::format_double(v);
        try {
          const auto sol = nmit::solve_sideband_system(op, delta);
          const auto dem = nmit::demodulated_response(op, delta, ts);
          const nmit::cplx ref = nmit::demodulation_target(sol);
          const double err = std::abs(dem.value - ref) / std::abs(ref);
          for (double x : {ref.real(), ref.imag(), dem.value.real(), dem.value.imag(), err}) {
            out += ',' + nmit::format_double(x);
          }
        } catch (const nmit::InstabilityError&) {
          any_unstable = true;
          for (int c = 0; c < 5; ++c) out += ",unstable";
        }
        out += '\n';
      }
      write_text(g, out);
      return (g.strict && any_unstable) ? unstable : ok;
    }
  } catch (const nmit::ValidationError& e) {
    std::cerr << "nmit: invalid input: " << e.what() << '\n';
    return invalid;
  } catch (const nmit::DomainError& e) {
    std::cerr << "nmit: invalid input: " << e.what() << '\n';
    return invalid;
  } catch (const nmit::InstabilityError& e) {
    std::cerr << "nmit: unstable: " << e.what() << '\n';
    return g.strict ? unstable : failure;
  } catch (const nmit::Error& e) {
    std::cerr << "nmit: " << e.what() << '\n';
    return failure;
  }
  return ok;
}
