#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nmit/emit.hpp"
#include "nmit/errors.hpp"
#include "nmit/presets.hpp"
#include "nmit/response.hpp"
#include "nmit/sweep.hpp"

using namespace nmit;

namespace {

bool same_bits(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return false;
  if (const auto* s = std::get_if<std::string>(&a)) return *s == std::get<std::string>(b);
  const double x = std::get<double>(a), y = std::get<double>(b);
  return std::memcmp(&x, &y, sizeof x) == 0;
}

SweepSpec small(int points, std::vector<Output> outputs) {
  SweepSpec s;
  s.axis1 = SweepAxis::linspace(AxisName::delta_over_omega_n, -2.0, 2.0, points);
  s.outputs = std::move(outputs);
  return s;
}

}  // namespace

TEST_CASE("two-point sweep gives a three-line CSV") {
  const auto t = run_sweep(small(2, {Output::eta}), preset_params(Preset::fig2));
  REQUIRE(t.rows.size() == 2);
  const auto csv = format_table(t, Format::csv);
  CHECK(csv.rfind("delta_over_omega_n,eta\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("axis parsing") {
  const auto a = SweepAxis::parse("J_over_gamma:0:1:11");
  CHECK(a.name == AxisName::J_over_gamma);
  REQUIRE(a.values.size() == 11);
  CHECK(a.values.front() == 0.0);
  CHECK(a.values.back() == 1.0);
  const auto b = SweepAxis::parse("kappa_over_gamma=0,0.4,0.8,1.0");
  CHECK(b.values == std::vector<double>{0.0, 0.4, 0.8, 1.0});
  CHECK_THROWS_AS(SweepAxis::parse("J_over_gamma:0:1:1"), ValidationError);
  CHECK_THROWS_AS(SweepAxis::parse("J_over_gamma:1:0:5"), ValidationError);
  CHECK_THROWS_AS(SweepAxis::parse("power:0:1:5"), ValidationError);
  CHECK_THROWS_AS(SweepAxis::parse("s=0.2,0.1"), ValidationError);
  CHECK_THROWS_AS(SweepAxis::parse("s:0:1:2.5"), ValidationError);
  CHECK(parse_output("c1minus") == Output::c1minus);
  CHECK_THROWS_AS(parse_output("temperature"), ValidationError);
}

TEST_CASE("spec validation runs before any work") {
  const auto p = preset_params(Preset::fig2);
  SweepSpec s = small(5, {Output::chi});
  s.axis2 = SweepAxis::linspace(AxisName::delta_over_omega_n, 0.0, 1.0, 3);
  CHECK_THROWS_AS(run_sweep(s, p), ValidationError);

  s = small(5, {Output::chi});
  s.axis2 = SweepAxis::linspace(AxisName::s, 0.0, 0.2, 3);
  SystemParams sc = p;
  sc.trap = SelfConsistentTrap{0.0};
  CHECK_THROWS_AS(run_sweep(s, sc), ValidationError);

  s = small(5, {});
  CHECK_THROWS_AS(run_sweep(s, p), ValidationError);

  SystemParams bad = p;
  bad.rho = -1.0;
  CHECK_THROWS_AS(run_sweep(small(5, {Output::chi}), bad), ValidationError);
}

TEST_CASE("columns") {
  auto s = preset_sweep(Preset::fig2);
  CHECK(sweep_columns(s) == std::vector<std::string>{"delta_over_omega_n", "chi[s=0]", "chi[s=0.1]"});
  s = small(3, {Output::c1plus, Output::phase});
  s.axis2 = SweepAxis::linspace(AxisName::J_over_gamma, 0.0, 1.0, 2);
  CHECK(sweep_columns(s) ==
        std::vector<std::string>{"delta_over_omega_n", "J_over_gamma", "c1plus_re", "c1plus_im", "phase"});
}

TEST_CASE("row order is axis2 outer, axis1 inner") {
  SweepSpec s = small(3, {Output::chi});
  s.axis2 = SweepAxis{AxisName::J_over_gamma, {0.1, 0.2}};
  const auto t = run_sweep(s, preset_params(Preset::fig3));
  REQUIRE(t.rows.size() == 6);
  CHECK(std::get<double>(t.rows[1][0]) == 0.0);
  CHECK(std::get<double>(t.rows[1][1]) == 0.1);
  CHECK(std::get<double>(t.rows[4][1]) == 0.2);
}

TEST_CASE("a grid point evaluated alone equals its row") {
  SweepSpec s = small(21, {Output::chi, Output::eta, Output::c1minus});
  s.axis2 = SweepAxis::linspace(AxisName::kappa_over_gamma, 0.0, 0.6, 4);
  const auto p = preset_params(Preset::fig5);
  const auto t = run_sweep(s, p, 3);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < 21; i += 5) {
      const auto row = evaluate_row(s, p, i, j);
      const auto& inside = t.rows[j * 21 + i];
      REQUIRE(row.size() == inside.size());
      for (std::size_t c = 0; c < row.size(); ++c) CHECK(same_bits(row[c], inside[c]));
    }
  }

  // and equals a direct solve at the same parameters
  SystemParams q = p;
  q.kappa = std::get<double>(t.rows[21 + 15][1]) * p.gamma;
  const auto op = make_operating_point(q);
  const double r = std::get<double>(t.rows[21 + 15][0]);
  const auto sol = solve_sideband_system(op, r * op.steady.omega_n);
  CHECK(std::get<double>(t.rows[21 + 15][2]) == sol.chi);
}

TEST_CASE("thread count does not change a single bit") {
  auto s = preset_sweep(Preset::fig5);
  s.axis1 = SweepAxis::linspace(AxisName::delta_over_omega_n, -2.0, 2.0, 101);
  const auto p = preset_params(Preset::fig5);
  const auto a = format_table(run_sweep(s, p, 1), Format::csv);
  const auto b = format_table(run_sweep(s, p, 4), Format::csv);
  CHECK(a == b);
}

TEST_CASE("fig5 phase annotation switches at the exceptional point") {
  auto s = preset_sweep(Preset::fig5);
  s.axis1 = SweepAxis::linspace(AxisName::delta_over_omega_n, 0.5, 1.5, 3);
  const auto p = preset_params(Preset::fig5);
  const auto t = run_sweep(s, p);
  REQUIRE(t.columns.back() == "phase");
  REQUIRE(t.rows.size() == 12);
  const char* expected[] = {"PT_SYMMETRIC", "PT_SYMMETRIC", "EXCEPTIONAL_POINT", "BROKEN"};
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::get<std::string>(t.rows[j * 3 + i].back()) == expected[j]);
  }
}

TEST_CASE("singular points are flagged, not fatal") {
  // Same construction as the response test: G = 0, lasing-threshold probe.
  SystemParams p = preset_params(Preset::textbody);
  p.trap = PrescribedTrap{0.0};
  p.delta_d = 4e5;
  const auto d = derive(p);
  const double u = p.gamma, v = u + d.g_n;
  p.kappa = p.gamma * v / u;
  p.hop_J = std::sqrt(p.gamma * p.kappa + u * v);
  const auto op = make_operating_point(p);
  const double r0 = (op.steady.delta_c - u) / op.steady.omega_n;

  SweepSpec s;
  s.axis1 = SweepAxis{AxisName::delta_over_omega_n, {r0 - 0.5, r0, r0 + 0.5}};
  s.outputs = {Output::chi, Output::phase};
  const auto t = run_sweep(s, p);
  CHECK(std::holds_alternative<double>(t.rows[0][1]));
  CHECK(std::get<std::string>(t.rows[1][1]) == "unstable");
  CHECK(std::get<std::string>(t.rows[1][2]) == "PT_SYMMETRIC");
  CHECK(std::holds_alternative<double>(t.rows[2][1]));
  CHECK(format_table(t, Format::csv).find(",unstable,PT_SYMMETRIC\n") != std::string::npos);
}

TEST_CASE("shortest round-trip decimals") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(1e-300) == "1e-300");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(format_double(third)) == third);
}

TEST_CASE("JSON round trip") {
  auto s = small(7, {Output::chi, Output::c1plus, Output::phase});
  s.variants = SweepVariants{AxisName::s, {0.0, 0.1}};
  auto t = run_sweep(s, preset_params(Preset::fig2));
  t.metadata.timestamp = "2026-10-17T00:00:00Z";
  const auto text = format_table(t, Format::json);
  const auto back = parse_json_table(text);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    REQUIRE(back.rows[r].size() == t.rows[r].size());
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) CHECK(same_bits(back.rows[r][c], t.rows[r][c]));
  }
  CHECK(back.metadata.timestamp == t.metadata.timestamp);
  CHECK(back.metadata.params.gamma == t.metadata.params.gamma);
  REQUIRE(back.metadata.steady.has_value());
  CHECK(back.metadata.steady->c1s == t.metadata.steady->c1s);
  CHECK(format_table(back, Format::json) == text);

  t.metadata.timestamp.clear();
  CHECK(format_table(t, Format::json).find("timestamp") == std::string::npos);
}

TEST_CASE("emit writes atomically and reports unwritable paths") {
  const auto t = run_sweep(small(3, {Output::eta}), preset_params(Preset::fig2));
  const auto dir = std::filesystem::temp_directory_path() / "nmit_emit_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "t.csv";
  emit(t, Format::csv, path);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == format_table(t, Format::csv));
  CHECK_FALSE(std::filesystem::exists(dir / "t.csv.tmp"));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(emit(t, Format::csv, "/nonexistent-dir/x.csv"), IoError);
  CHECK_THROWS_AS(parse_format("xml"), ValidationError);
}
