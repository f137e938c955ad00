#include "nmit/emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>

#include "json.hpp"
#include "nmit/errors.hpp"

namespace nmit {
namespace {

using json = nlohmann::ordered_json;

// JSON has no inf/nan; they travel as strings and come back as doubles.
json cell_to_json(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (std::isfinite(v)) return v;
  return format_double(v);
}

Cell cell_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ValidationError("data", "cells must be numbers or strings");
  const auto s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return s;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }
cplx complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json params_json(const SystemParams& p) {
  json j;
  j["lambda"] = p.lambda;
  j["power_drive"] = p.power_drive;
  j["power_probe"] = p.power_probe;
  j["gamma"] = p.gamma;
  j["kappa"] = p.kappa;
  j["gamma_n"] = p.gamma_n;
  j["hop_J"] = p.hop_J;
  j["rho"] = p.rho;
  j["radius_a"] = p.radius_a;
  j["eps_r"] = p.eps_r;
  j["cavity_L"] = p.cavity_L;
  j["waist_w"] = p.waist_w;
  j["delta_d"] = p.delta_d ? json(*p.delta_d) : json("auto");
  if (const auto* t = std::get_if<PrescribedTrap>(&p.trap)) {
    j["trap_mode"] = "prescribed";
    j["trap_s"] = t->s;
  } else {
    j["trap_mode"] = "selfconsistent";
    j["sigma"] = std::get<SelfConsistentTrap>(p.trap).sigma;
  }
  j["mirror_distance_d"] = p.mirror_distance_d;
  return j;
}

SystemParams params_from(const json& j) {
  SystemParams p;
  p.lambda = j.at("lambda").get<double>();
  p.power_drive = j.at("power_drive").get<double>();
  p.power_probe = j.at("power_probe").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.kappa = j.at("kappa").get<double>();
  p.gamma_n = j.at("gamma_n").get<double>();
  p.hop_J = j.at("hop_J").get<double>();
  p.rho = j.at("rho").get<double>();
  p.radius_a = j.at("radius_a").get<double>();
  p.eps_r = j.at("eps_r").get<double>();
  p.cavity_L = j.at("cavity_L").get<double>();
  p.waist_w = j.at("waist_w").get<double>();
  if (j.at("delta_d").is_number()) p.delta_d = j.at("delta_d").get<double>();
  if (j.at("trap_mode").get<std::string>() == "prescribed") {
    p.trap = PrescribedTrap{j.at("trap_s").get<double>()};
  } else {
    p.trap = SelfConsistentTrap{j.at("sigma").get<double>()};
  }
  p.mirror_distance_d = j.at("mirror_distance_d").get<double>();
  return p;
}

json derived_json(const DerivedQuantities& d) {
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

DerivedQuantities derived_from(const json& j) {
  DerivedQuantities d;
  d.omega_c = j.at("omega_c").get<double>();
  d.k = j.at("k").get<double>();
  d.volume = j.at("volume").get<double>();
  d.mass_m = j.at("mass_m").get<double>();
  d.mode_volume = j.at("mode_volume").get<double>();
  d.g_n = j.at("g_n").get<double>();
  d.Omega_d = j.at("Omega_d").get<double>();
  d.eps_p = j.at("eps_p").get<double>();
  return d;
}

json steady_json(const SteadyState& s) {
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

SteadyState steady_from(const json& j) {
  SteadyState s;
  s.x_ns = j.at("x_ns").get<double>();
  s.p_ns = j.at("p_ns").get<double>();
  s.c1s = complex_from(j.at("c1s"));
  s.c2s = complex_from(j.at("c2s"));
  s.omega_n = j.at("omega_n").get<double>();
  s.G_n = j.at("G_n").get<double>();
  s.G_eff = complex_from(j.at("G_eff"));
  s.delta_c = j.at("delta_c").get<double>();
  s.delta_d = j.at("delta_d").get<double>();
  s.sigma_implied = j.at("sigma_implied").get<double>();
  s.fixed_point_count = j.at("fixed_point_count").get<int>();
  s.iterations = j.at("iterations").get<int>();
  return s;
}

std::string to_csv(const SpectrumTable& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (const auto* s = std::get_if<std::string>(&row[c])) {
        out += *s;
      } else {
        out += format_double(std::get<double>(row[c]));
      }
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const SpectrumTable& t) {
  json j;
  j["columns"] = t.columns;
  json data = json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    json col = json::array();
    for (const auto& row : t.rows) col.push_back(cell_to_json(row.at(c)));
    data[t.columns[c]] = std::move(col);
  }
  j["data"] = std::move(data);
  json meta;
  meta["preset"] = std::string(to_string(t.metadata.preset));
  meta["version"] = t.metadata.version;
  if (!t.metadata.timestamp.empty()) meta["timestamp"] = t.metadata.timestamp;
  meta["params"] = params_json(t.metadata.params);
  meta["derived"] = derived_json(t.metadata.derived);
  if (t.metadata.steady) meta["steady"] = steady_json(*t.metadata.steady);
  j["metadata"] = std::move(meta);
  return j.dump(2) + '\n';
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ValidationError("format", "expected csv or json, got '" + std::string(name) + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_table(const SpectrumTable& table, Format format) {
  return format == Format::csv ? to_csv(table) : to_json(table);
}

void emit(const SpectrumTable& table, Format format, const std::filesystem::path& path) {
  const std::string text = format_table(table, format);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

SpectrumTable parse_json_table(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("json", e.what());
  }
  try {
    SpectrumTable t;
    t.columns = j.at("columns").get<std::vector<std::string>>();
    const auto& data = j.at("data");
    std::size_t n = 0;
    if (!t.columns.empty()) n = data.at(t.columns.front()).size();
    t.rows.assign(n, {});
    for (const auto& name : t.columns) {
      const auto& col = data.at(name);
      if (col.size() != n) throw ValidationError("data", "column '" + name + "' has a different length");
      for (std::size_t r = 0; r < n; ++r) t.rows[r].push_back(cell_from_json(col[r]));
    }
    const auto& meta = j.at("metadata");
    t.metadata.preset = parse_preset(meta.at("preset").get<std::string>());
    t.metadata.version = meta.at("version").get<std::string>();
    if (meta.contains("timestamp")) t.metadata.timestamp = meta.at("timestamp").get<std::string>();
    t.metadata.params = params_from(meta.at("params"));
    t.metadata.derived = derived_from(meta.at("derived"));
    if (meta.contains("steady")) t.metadata.steady = steady_from(meta.at("steady"));
    return t;
  } catch (const json::exception& e) {
    throw ValidationError("json", e.what());
  }
}

}  // namespace nmit
