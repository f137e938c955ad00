#include "nmit/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "nmit/constants.hpp"
#include "nmit/errors.hpp"
#include "nmit/presets.hpp"

namespace nmit {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError(key, "expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

// Rate keys exist in two spellings; returns the value in rad/s.
std::optional<double> take_rate(std::map<std::string, std::string>& kv, const std::string& stem) {
  const auto hz = kv.find(stem + "_hz");
  const auto rads = kv.find(stem + "_rads");
  if (hz != kv.end() && rads != kv.end()) {
    throw ValidationError(stem, "given both as _hz and _rads");
  }
  std::optional<double> out;
  if (hz != kv.end()) {
    out = constants::two_pi * parse_number(hz->first, hz->second);
    kv.erase(hz);
  } else if (rads != kv.end()) {
    out = parse_number(rads->first, rads->second);
    kv.erase(rads);
  }
  return out;
}

std::optional<double> take_number(std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  const double v = parse_number(key, it->second);
  kv.erase(it);
  return v;
}

std::optional<std::string> take_text(std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  std::string v = it->second;
  kv.erase(it);
  return v;
}

}  // namespace

SystemParams parse_config(std::string_view text, SystemParams base) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ValidationError("line " + std::to_string(line_no), "empty key or value");
    }
    if (!kv.emplace(key, value).second) throw ValidationError(key, "repeated key");
  }

  SystemParams p = base;
  if (auto name = take_text(kv, "preset")) p = preset_params(parse_preset(*name));

  if (auto v = take_number(kv, "lambda")) p.lambda = *v;
  if (auto v = take_number(kv, "power_drive")) p.power_drive = *v;
  if (auto v = take_number(kv, "power_probe")) p.power_probe = *v;
  if (auto v = take_rate(kv, "gamma")) p.gamma = *v;
  const auto kappa = take_rate(kv, "kappa");
  if (kappa) p.kappa = *kappa;
  if (auto v = take_rate(kv, "gamma_n")) p.gamma_n = *v;
  const auto hop = take_rate(kv, "hop_J");
  if (hop) p.hop_J = *hop;
  if (auto v = take_number(kv, "rho")) p.rho = *v;
  if (auto v = take_number(kv, "radius_a")) p.radius_a = *v;
  if (auto v = take_number(kv, "eps_r")) p.eps_r = *v;
  if (auto v = take_number(kv, "cavity_L")) p.cavity_L = *v;
  if (auto v = take_number(kv, "waist_w")) p.waist_w = *v;
  if (auto v = take_number(kv, "mirror_distance_d")) p.mirror_distance_d = *v;

  // Ratios are resolved against the final gamma.
  const auto kappa_ratio = take_number(kv, "kappa_over_gamma");
  const auto hop_ratio = take_number(kv, "hop_J_over_gamma");
  if (kappa_ratio && kappa) throw ValidationError("kappa_over_gamma", "conflicts with kappa_hz/kappa_rads");
  if (hop_ratio && hop) throw ValidationError("hop_J_over_gamma", "conflicts with hop_J_hz/hop_J_rads");
  if (kappa_ratio) p.kappa = *kappa_ratio * p.gamma;
  if (hop_ratio) p.hop_J = *hop_ratio * p.gamma;

  if (auto auto_dd = kv.find("delta_d"); auto_dd != kv.end()) {
    if (auto_dd->second != "auto") throw ValidationError("delta_d", "only 'auto' is accepted without a unit suffix");
    p.delta_d.reset();
    kv.erase(auto_dd);
  }
  if (auto v = take_rate(kv, "delta_d")) p.delta_d = *v;

  const auto mode = take_text(kv, "trap_mode");
  const auto s = take_number(kv, "trap_s");
  const auto sigma = take_number(kv, "sigma");
  const auto q1 = take_number(kv, "charge_q1");
  const auto q2 = take_number(kv, "charge_q2");
  if (q1.has_value() != q2.has_value()) throw ValidationError("charge_q1", "charge_q1 and charge_q2 come as a pair");
  if (sigma && q1) throw ValidationError("sigma", "give either sigma or the charges, not both");

  std::string resolved_mode = mode.value_or(std::holds_alternative<PrescribedTrap>(p.trap) ? "prescribed" : "selfconsistent");
  if (resolved_mode == "prescribed") {
    if (sigma || q1) throw ValidationError("sigma", "only used with trap_mode = selfconsistent");
    auto t = std::holds_alternative<PrescribedTrap>(p.trap) ? std::get<PrescribedTrap>(p.trap) : PrescribedTrap{};
    if (s) t.s = *s;
    p.trap = t;
  } else if (resolved_mode == "selfconsistent") {
    if (s) throw ValidationError("trap_s", "only used with trap_mode = prescribed");
    auto t = std::holds_alternative<SelfConsistentTrap>(p.trap) ? std::get<SelfConsistentTrap>(p.trap) : SelfConsistentTrap{};
    if (sigma) t.sigma = *sigma;
    if (q1) t.sigma = coulomb_sigma(*q1, *q2, p.mirror_distance_d);
    p.trap = t;
  } else {
    throw ValidationError("trap_mode", "expected 'prescribed' or 'selfconsistent', got '" + resolved_mode + "'");
  }

  if (!kv.empty()) throw ValidationError(kv.begin()->first, "unknown config key");
  validate(p);
  return p;
}

SystemParams load_config(const std::filesystem::path& path, SystemParams base) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), base);
}

}  // namespace nmit
