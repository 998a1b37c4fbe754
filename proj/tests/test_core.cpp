#include <cmath>

#include "doctest.h"
#include "gesture/core.hpp"

using namespace gesture;

TEST_CASE("derived constants of the default front end") {
  const RadarConfig cfg;
  const auto d = derive_constants(cfg);
  CHECK(d.bandwidth == doctest::Approx(4e9));
  CHECK(d.range_resolution == doctest::Approx(299'792'458.0 / 8e9).epsilon(1e-12));
  CHECK(std::abs(d.range_resolution - 0.0375) / 0.0375 <= 1e-3);
  CHECK(d.max_range == doctest::Approx(32.0 * 299'792'458.0 / 8e9).epsilon(1e-12));
  CHECK(d.wavelength == doctest::Approx(299'792'458.0 / 60.5e9).epsilon(1e-12));
  CHECK(d.chirp_duration == doctest::Approx(32e-6));
  CHECK(d.max_velocity == doctest::Approx(d.wavelength / 1.2e-3).epsilon(1e-12));
  CHECK(d.velocity_resolution == doctest::Approx(d.wavelength / (2.0 * 32 * 300e-6)).epsilon(1e-12));
}

TEST_CASE("bin conversions") {
  const RadarConfig cfg;
  const auto d = derive_constants(cfg);
  CHECK(bin_to_range(0, cfg) == 0.0);
  CHECK(bin_to_range(16, cfg) == doctest::Approx(16 * d.range_resolution));
  CHECK_THROWS_AS(bin_to_range(32, cfg), ValidationError);
  CHECK(doppler_bin_to_velocity(16, cfg) == 0.0);
  CHECK(doppler_bin_to_velocity(20, cfg) == doctest::Approx(4 * d.velocity_resolution));
  CHECK(doppler_bin_to_velocity(0, cfg) == doctest::Approx(-16 * d.velocity_resolution));
  CHECK_THROWS_AS(doppler_bin_to_velocity(32, cfg), ValidationError);
}

TEST_CASE("config validation names the offending field") {
  auto expect_bad = [](RadarConfig c, const char* field) {
    try {
      c.validate();
      FAIL("expected a ValidationError for " << field);
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  RadarConfig c;
  CHECK_NOTHROW(c.validate());
  c.f_high = c.f_low;
  expect_bad(c, "f_high");
  c = {};
  c.num_samples = 63;
  expect_bad(c, "num_samples");
  c = {};
  c.num_chirps = 0;
  expect_bad(c, "num_chirps");
  c = {};
  c.t_prt = 10e-6;
  expect_bad(c, "t_prt");
  c = {};
  c.frame_rate = 0.0;
  expect_bad(c, "frame_rate");
  c = {};
  c.antenna_spacing_wavelengths = -0.5;
  expect_bad(c, "antenna_spacing_wavelengths");
}

TEST_CASE("class names round trip") {
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    const auto c = class_from_index(i);
    CHECK(class_index(c) == i);
    CHECK(parse_class(class_name(c)) == c);
  }
  CHECK(class_index(GestureClass::Background) == 5);
  CHECK(parse_class("swipe_left") == GestureClass::SwipeLeft);
  CHECK(parse_class("PUSH") == GestureClass::Push);
  CHECK(parse_class("swipe-down") == GestureClass::SwipeDown);
  CHECK_FALSE(parse_class("wave").has_value());
}

TEST_CASE("raw frame layout and validation") {
  const RadarConfig cfg;
  RawFrame f(cfg);
  CHECK(f.data().size() == 3 * 32 * 64);
  f.at(2, 31, 63) = 1.5f;
  CHECK(f.data().back() == 1.5f);
  f.at(1, 0, 0) = 2.0f;
  CHECK(f.data()[32 * 64] == 2.0f);
  CHECK(f.matches(cfg));
  CHECK_NOTHROW(f.validate(cfg));
  f.at(0, 3, 3) = std::nanf("");
  CHECK_THROWS_AS(f.validate(cfg), ValidationError);
  RadarConfig other = cfg;
  other.num_rx = 2;
  CHECK_FALSE(RawFrame(cfg).matches(other));
}
