#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gesture/sim.hpp"

using namespace gesture;
using namespace gesture::sim;

TEST_CASE("noiseless frame equals the closed-form beat signal") {
  const RadarConfig cfg;
  const auto d = derive_constants(cfg);
  const PointTarget t{.range = 0.43, .velocity = 0.8, .azimuth = 0.2, .elevation = -0.15, .amplitude = 0.7,
                      .initial_phase = 0.4};
  Rng rng(1);
  const auto frame = synthesize_frame(std::span(&t, 1), cfg, 0.0, rng);
  const double spacing = kPi;  // 2π·d/λ with d = λ/2
  const double rx_phase[3] = {0.0, spacing * std::sin(t.azimuth), spacing * std::sin(t.elevation)};
  double worst = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < cfg.num_chirps; c += 5) {
      const double rc = t.range - t.velocity * static_cast<double>(c) * cfg.t_prt;
      const double fb = 2.0 * d.bandwidth * t.range / (d.chirp_duration * kSpeedOfLight);
      for (std::size_t s = 0; s < cfg.num_samples; ++s) {
        const double expected = t.amplitude * std::cos(2.0 * kPi * fb * static_cast<double>(s) / cfg.adc_rate +
                                                       4.0 * kPi * rc / d.wavelength + t.initial_phase + rx_phase[r]);
        worst = std::max(worst, std::abs(frame.at(r, c, s) - expected));
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("beat frequency of one range bin is one fast-time bin") {
  const RadarConfig cfg;
  const auto d = derive_constants(cfg);
  CHECK(beat_frequency(d.range_resolution, cfg) * d.chirp_duration == doctest::Approx(1.0));
}

TEST_CASE("noise has the requested standard deviation") {
  const RadarConfig cfg;
  Rng rng(5);
  const auto frame = synthesize_frame({}, cfg, 0.5, rng);
  double sum = 0.0, sq = 0.0;
  for (float v : frame.data()) {
    sum += v;
    sq += double(v) * v;
  }
  const double n = static_cast<double>(frame.data().size());
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("targets outside the unambiguous region are rejected") {
  const RadarConfig cfg;
  const auto d = derive_constants(cfg);
  CHECK_THROWS_AS(validate_target({.range = d.max_range}, cfg), ValidationError);
  CHECK_THROWS_AS(validate_target({.range = 0.5, .velocity = d.max_velocity}, cfg), ValidationError);
  CHECK_THROWS_AS(validate_target({.range = 0.5, .amplitude = -1.0}, cfg), ValidationError);
  CHECK_NOTHROW(validate_target({.range = d.max_range}, cfg, true));
  Rng rng(0);
  const PointTarget far{.range = 2.0};
  CHECK_THROWS_AS(synthesize_frame(std::span(&far, 1), cfg, 0.0, rng), ValidationError);
}

TEST_CASE("mirrored swipes negate the swept angle") {
  const RadarConfig cfg;
  const GestureParams params;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed), c(seed), e(seed);
    const auto right = gesture_trajectory(GestureClass::SwipeRight, params, cfg, a);
    const auto left = gesture_trajectory(GestureClass::SwipeLeft, params, cfg, b);
    const auto up = gesture_trajectory(GestureClass::SwipeUp, params, cfg, c);
    const auto down = gesture_trajectory(GestureClass::SwipeDown, params, cfg, e);
    REQUIRE(right.duration_frames == left.duration_frames);
    for (std::size_t k = 0; k < right.duration_frames; ++k) {
      CHECK(left.trajectory[k].azimuth == -right.trajectory[k].azimuth);
      CHECK(left.trajectory[k].range == right.trajectory[k].range);
      CHECK(down.trajectory[k].elevation == -up.trajectory[k].elevation);
      if (k > 0) {
        CHECK(right.trajectory[k].azimuth > right.trajectory[k - 1].azimuth);
        CHECK(up.trajectory[k].elevation > up.trajectory[k - 1].elevation);
      }
    }
  }
}

TEST_CASE("every gesture is closest to the sensor mid-gesture") {
  const RadarConfig cfg;
  const GestureParams params;
  for (std::size_t g = 0; g < kNumGestures; ++g) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(100 + seed);
      const auto s = gesture_trajectory(class_from_index(g), params, cfg, rng);
      const auto& tr = s.trajectory;
      const auto it = std::min_element(tr.begin(), tr.end(), [](auto& x, auto& y) { return x.range < y.range; });
      const auto k = static_cast<double>(it - tr.begin());
      const double mid = (static_cast<double>(s.duration_frames) - 1.0) / 2.0;
      CHECK(std::abs(k - mid) <= 1.0);
      CHECK(it->range >= 0.3);
      CHECK(it->range <= 1.0);
      // Approaching first, receding after the closest point.
      CHECK(tr.front().velocity > 0.0);
      CHECK(tr.back().velocity < 0.0);
    }
  }
}

TEST_CASE("background has no trajectory") {
  Rng rng(0);
  CHECK_THROWS_AS(gesture_trajectory(GestureClass::Background, {}, {}, rng), ValidationError);
}

TEST_CASE("body drift stays inside its bounds") {
  const RadarConfig cfg;
  Rng rng(9);
  const auto body = random_body(rng);
  const auto scene = background_sequence(500, body, 0.1, cfg, rng);
  REQUIRE(scene.frames.size() == 500);
  for (const auto& f : scene.frames) {
    REQUIRE(f.size() == 1);
    CHECK(f[0].range >= body.min_range);
    CHECK(f[0].range <= body.max_range);
    CHECK(std::abs(f[0].velocity) <= body.max_speed);
  }
  const auto empty = background_sequence(10, std::nullopt, 0.1, cfg, rng);
  for (const auto& f : empty.frames) CHECK(f.empty());
}

TEST_CASE("rendering places scripts and annotates frames") {
  const RadarConfig cfg;
  Rng rng(4);
  auto script = gesture_trajectory(GestureClass::Push, {}, cfg, rng);
  const std::size_t n = script.duration_frames;
  const auto scene = background_sequence(60, std::nullopt, 0.05, cfg, rng);
  std::vector<Placement> placements{{script, 10}};
  const auto full = render_frames(placements, scene, cfg, 77, 0, 60);
  REQUIRE(full.frames.size() == 60);
  for (std::size_t k = 0; k < 60; ++k) {
    const bool inside = k >= 10 && k < 10 + n;
    CHECK(full.annotations[k].frame == k);
    CHECK(full.annotations[k].hand_present == inside);
    CHECK(full.annotations[k].label == (inside ? GestureClass::Push : GestureClass::Background));
    if (inside) CHECK(full.annotations[k].state == script.trajectory[k - 10]);
  }

  SUBCASE("sub-ranges equal the same frames of a full render") {
    const auto part = render_frames(placements, scene, cfg, 77, 12, 30);
    REQUIRE(part.frames.size() == 18);
    for (std::size_t k = 0; k < 18; ++k) {
      CHECK(part.frames[k] == full.frames[12 + k]);
      CHECK(part.annotations[k].frame == 12 + k);
    }
  }
  SUBCASE("overlapping or out-of-range placements are rejected") {
    std::vector<Placement> overlap{{script, 5}, {script, 5 + n - 1}};
    CHECK_THROWS_AS(render_frames(overlap, scene, cfg, 1, 0, 60), ValidationError);
    std::vector<Placement> late{{script, 60 - n + 1}};
    CHECK_THROWS_AS(render_frames(late, scene, cfg, 1, 0, 60), ValidationError);
    CHECK_THROWS_AS(render_frames(placements, scene, cfg, 1, 10, 61), ValidationError);
  }
}

TEST_CASE("samples are deterministic in the seed") {
  const RadarConfig cfg;
  for (auto g : {GestureClass::SwipeUp, GestureClass::Background}) {
    Rng a(42), b(42), c(43);
    const auto x = simulate_sample(g, {}, cfg, a);
    const auto y = simulate_sample(g, {}, cfg, b);
    const auto z = simulate_sample(g, {}, cfg, c);
    CHECK(x.frames.size() == 100);
    CHECK(x.frames == y.frames);
    CHECK_FALSE(x.frames == z.frames);
  }
}

TEST_CASE("sample windows are checked against the gesture duration") {
  SampleOptions opt;
  opt.window_frames = 30;
  Rng rng(1);
  CHECK_THROWS_AS(simulate_sample(GestureClass::Push, opt, {}, rng), ValidationError);
}
