#include <cmath>

#include "doctest.h"
#include "nmit/config.hpp"
#include "nmit/errors.hpp"
#include "nmit/presets.hpp"

using namespace nmit;

namespace {
const SystemParams kBase = preset_params(Preset::textbody);
}

TEST_CASE("config: units and comments") {
  const auto p = parse_config(
      "# passive cavity\n"
      "gamma_hz = 60e3   # caption value\n"
      "kappa_rads = 1000\n"
      "\n"
      "cavity_L = 0.01\n",
      kBase);
  CHECK(p.gamma == doctest::Approx(2.0 * M_PI * 60e3).epsilon(1e-15));
  CHECK(p.kappa == 1000.0);
  CHECK(p.cavity_L == 0.01);
  CHECK(p.radius_a == kBase.radius_a);
}

TEST_CASE("config: ratios follow the final gamma") {
  const auto p = parse_config("hop_J_over_gamma = 0.9\nkappa_over_gamma = 0.4\ngamma_rads = 100\n", kBase);
  CHECK(p.hop_J == doctest::Approx(90.0));
  CHECK(p.kappa == doctest::Approx(40.0));
}

TEST_CASE("config: preset key and delta_d") {
  auto p = parse_config("preset = fig4\ndelta_d_hz = 1e5\n", kBase);
  CHECK(p.kappa == p.gamma);
  REQUIRE(p.delta_d.has_value());
  CHECK(*p.delta_d == doctest::Approx(2.0 * M_PI * 1e5));
  p = parse_config("delta_d = auto\n", p);
  CHECK_FALSE(p.delta_d.has_value());
}

TEST_CASE("config: trap modes") {
  auto p = parse_config("trap_mode = selfconsistent\nsigma = 1e-20\n", kBase);
  CHECK(std::get<SelfConsistentTrap>(p.trap).sigma == 1e-20);

  p = parse_config("trap_mode = selfconsistent\ncharge_q1 = 1.602176634e-19\ncharge_q2 = 1.602176634e-19\n", kBase);
  CHECK(std::get<SelfConsistentTrap>(p.trap).sigma == doctest::Approx(coulomb_sigma(1.602176634e-19, 1.602176634e-19, 10e-6)));

  p = parse_config("trap_s = 0.3\n", kBase);
  CHECK(std::get<PrescribedTrap>(p.trap).s == 0.3);
}

TEST_CASE("config: errors name the key") {
  auto fails_on = [](const char* text, const char* field) {
    try {
      parse_config(text, kBase);
    } catch (const ValidationError& e) {
      CHECK(e.field() == field);
      return;
    }
    FAIL("no ValidationError for: " << text);
  };
  fails_on("colour = blue\n", "colour");
  fails_on("gamma_hz = 1\ngamma_hz = 2\n", "gamma_hz");
  fails_on("gamma_hz = 1\ngamma_rads = 2\n", "gamma");
  fails_on("kappa_hz = 1\nkappa_over_gamma = 0.5\n", "kappa_over_gamma");
  fails_on("gamma_hz = fast\n", "gamma_hz");
  fails_on("gamma = 1\n", "gamma");
  fails_on("radius_a = -1\n", "radius_a");
  fails_on("trap_s = 0.1\ntrap_mode = selfconsistent\n", "trap_s");
  fails_on("trap_mode = sideways\n", "trap_mode");
  fails_on("charge_q1 = 1e-19\ntrap_mode = selfconsistent\n", "charge_q1");
  fails_on("just words\n", "line 1");
  fails_on("preset = fig9\n", "preset");
}

TEST_CASE("config: missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/params.cfg", kBase), IoError);
}
