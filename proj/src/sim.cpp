#include "gesture/sim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace gesture::sim {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

void validate_target(const PointTarget& target, const RadarConfig& config, bool allow_aliasing) {
  const auto d = derive_constants(config);
  auto fail = [](const std::string& what) { throw ValidationError("invalid point target: " + what); };
  if (!std::isfinite(target.range) || !std::isfinite(target.velocity) || !std::isfinite(target.azimuth) ||
      !std::isfinite(target.elevation) || !std::isfinite(target.amplitude) || !std::isfinite(target.initial_phase)) {
    fail("non-finite field");
  }
  if (target.amplitude < 0.0) fail("amplitude must be >= 0");
  if (std::abs(target.azimuth) > kPi / 2 || std::abs(target.elevation) > kPi / 2) fail("angle beyond +-pi/2");
  if (target.range <= 0.0) fail("range must be positive");
  if (!allow_aliasing) {
    if (target.range >= d.max_range) fail("range " + std::to_string(target.range) + " m >= max_range");
    if (std::abs(target.velocity) >= d.max_velocity) fail("|velocity| >= v_max");
  }
}

double beat_frequency(double range, const RadarConfig& config) {
  const auto d = derive_constants(config);
  return 2.0 * d.bandwidth * range / (d.chirp_duration * kSpeedOfLight);
}

RawFrame synthesize_frame(std::span<const PointTarget> targets, const RadarConfig& config, double sigma_noise,
                          Rng& rng, const SynthesisOptions& options) {
  const auto d = derive_constants(config);
  if (!(sigma_noise >= 0.0) || !std::isfinite(sigma_noise)) throw ValidationError("sigma_noise must be >= 0");
  for (const auto& t : targets) validate_target(t, config, options.allow_aliasing);

  const std::size_t R = config.num_rx, C = config.num_chirps, S = config.num_samples;
  std::vector<double> acc(R * C * S, 0.0);
  std::vector<std::complex<double>> carrier(S);

  for (const auto& t : targets) {
    double amp = t.amplitude;
    if (options.inverse_square_falloff) amp *= std::pow(options.reference_range / t.range, 2.0);
    const double spacing = 2.0 * kPi * config.antenna_spacing_wavelengths;
    const double rx_phase[3] = {0.0, spacing * std::sin(t.azimuth), spacing * std::sin(t.elevation)};

    // Stop-and-hop: the beat frequency is fixed for the burst, motion across
    // chirps only advances the carrier phase.
    const double omega = 2.0 * kPi * beat_frequency(t.range, config) / config.adc_rate;
    const std::complex<double> step = std::polar(1.0, omega);
    std::complex<double> w(1.0, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      carrier[s] = w;
      w = {w.real() * step.real() - w.imag() * step.imag(), w.real() * step.imag() + w.imag() * step.real()};
    }
    for (std::size_t c = 0; c < C; ++c) {
      const double r_chirp = t.range - t.velocity * static_cast<double>(c) * config.t_prt;
      const double base_phase = 4.0 * kPi * r_chirp / d.wavelength + t.initial_phase;
      for (std::size_t r = 0; r < R; ++r) {
        const double phase = base_phase + (r < 3 ? rx_phase[r] : 0.0);
        const std::complex<double> ph = std::polar(amp, phase);
        double* out = &acc[(r * C + c) * S];
        for (std::size_t s = 0; s < S; ++s) out[s] += ph.real() * carrier[s].real() - ph.imag() * carrier[s].imag();
      }
    }
  }

  RawFrame frame(config);
  auto& samples = frame.data();
  if (sigma_noise > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma_noise);
    for (std::size_t i = 0; i < acc.size(); ++i) samples[i] = static_cast<float>(acc[i] + noise(rng));
  } else {
    for (std::size_t i = 0; i < acc.size(); ++i) samples[i] = static_cast<float>(acc[i]);
  }
  return frame;
}

GestureScript gesture_trajectory(GestureClass gesture, const GestureParams& params, const RadarConfig& config,
                                 Rng& rng) {
  if (gesture == GestureClass::Background) {
    throw ValidationError("gesture_trajectory: Background has no trajectory, use background_sequence");
  }
  if (params.duration_lo < 3 || params.duration_hi < params.duration_lo) {
    throw ValidationError("gesture duration range must satisfy 3 <= lo <= hi");
  }
  if (!(params.swipe_arc_lo >= 0.0 && params.swipe_arc_hi >= params.swipe_arc_lo &&
        params.swipe_arc_hi < params.min_distance_lo)) {
    throw ValidationError("swipe arc range must satisfy 0 <= lo <= hi < min_distance_lo");
  }
  const auto d = derive_constants(config);
  const double dt = 1.0 / config.frame_rate;

  // Draw order is identical for every class.
  GestureDraw draw;
  draw.min_distance = uniform(rng, params.min_distance_lo, params.min_distance_hi);
  draw.aspect = uniform(rng, -params.aspect_max, params.aspect_max);
  draw.elevation_offset = uniform(rng, -params.elevation_offset_max, params.elevation_offset_max);
  const double lateral = uniform(rng, params.lateral_extent_lo, params.lateral_extent_hi);
  const double depth = uniform(rng, params.push_depth_lo, params.push_depth_hi);
  draw.arc = uniform(rng, params.swipe_arc_lo, params.swipe_arc_hi);
  draw.duration = uniform_index(rng, params.duration_lo, params.duration_hi);
  draw.amplitude = uniform(rng, params.amplitude_lo, params.amplitude_hi);
  draw.initial_phase = uniform(rng, -kPi, kPi);
  std::vector<double> jitter(draw.duration);
  std::normal_distribution<double> jitter_dist(0.0, params.amplitude_jitter);
  for (auto& j : jitter) j = std::max(0.0, 1.0 + jitter_dist(rng));

  const bool push = gesture == GestureClass::Push;
  draw.extent = push ? depth : lateral;

  const std::size_t n = draw.duration;
  const double active_time = static_cast<double>(n) * dt;
  GestureScript script;
  script.gesture = gesture;
  script.duration_frames = n;
  script.draw = draw;
  script.trajectory.reserve(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    PointTarget p;
    p.initial_phase = draw.initial_phase;

    // Amplitude fades in and out over ramp_fraction of the duration.
    const double ramp = std::max(params.ramp_fraction, 1e-9);
    const double env = std::min({1.0, u / ramp, (1.0 - u) / ramp});
    p.amplitude = draw.amplitude * std::sin(0.5 * kPi * std::clamp(env, 0.0, 1.0)) * jitter[k];

    if (push) {
      p.range = draw.min_distance + depth * 0.5 * (1.0 + std::cos(2.0 * kPi * u));
      p.velocity = depth * kPi * std::sin(2.0 * kPi * u) / active_time;
      p.azimuth = draw.aspect;
      p.elevation = draw.elevation_offset;
    } else {
      // Parabolic path in the swipe plane: farthest at both ends, closest
      // mid-swipe, with the swept angle strictly monotonic.
      const double x = -lateral * std::cos(kPi * u);
      const double x_rate = lateral * kPi * std::sin(kPi * u) / active_time;
      const double c = std::cos(kPi * u);
      const double z = draw.min_distance + draw.arc * c * c;
      const double z_rate = -draw.arc * kPi * std::sin(2.0 * kPi * u) / active_time;
      p.range = std::hypot(z, x);
      p.velocity = -(x * x_rate + z * z_rate) / p.range;
      const double sweep = std::atan2(x, z);
      switch (gesture) {
        case GestureClass::SwipeRight:
          p.azimuth = draw.aspect + sweep;
          p.elevation = draw.elevation_offset;
          break;
        case GestureClass::SwipeLeft:
          p.azimuth = -(draw.aspect + sweep);
          p.elevation = draw.elevation_offset;
          break;
        case GestureClass::SwipeUp:
          p.azimuth = draw.aspect;
          p.elevation = draw.elevation_offset + sweep;
          break;
        case GestureClass::SwipeDown:
          p.azimuth = draw.aspect;
          p.elevation = -(draw.elevation_offset + sweep);
          break;
        default:
          break;
      }
    }
    if (p.range >= d.max_range || std::abs(p.velocity) >= d.max_velocity) {
      throw ValidationError("gesture parameters produce a trajectory outside the unambiguous region");
    }
    script.trajectory.push_back(p);
  }
  return script;
}

BodyDrift random_body(Rng& rng, const BodyDrift& bounds) {
  BodyDrift body = bounds;
  body.start.range = uniform(rng, bounds.min_range, bounds.max_range);
  body.start.velocity = uniform(rng, -bounds.max_speed, bounds.max_speed);
  body.start.azimuth = uniform(rng, -0.5, 0.5);
  body.start.elevation = uniform(rng, -0.35, 0.1);
  body.start.amplitude = uniform(rng, 0.5, 1.5);
  body.start.initial_phase = uniform(rng, -kPi, kPi);
  return body;
}

SceneSequence background_sequence(std::size_t duration_frames, const std::optional<BodyDrift>& body,
                                  double sigma_noise, const RadarConfig& config, Rng& rng) {
  if (duration_frames < 1) throw ValidationError("background duration must be >= 1 frame");
  if (!(sigma_noise >= 0.0)) throw ValidationError("sigma_noise must be >= 0");
  SceneSequence scene;
  scene.sigma_noise = sigma_noise;
  scene.frames.resize(duration_frames);
  if (!body) return scene;

  if (body->min_range <= 0.0 || body->max_range <= body->min_range || body->max_speed < 0.0) {
    throw ValidationError("invalid body drift bounds");
  }
  validate_target(body->start, config);
  const double dt = 1.0 / config.frame_rate;
  std::normal_distribution<double> accel(0.0, body->accel_std);
  std::normal_distribution<double> wobble(0.0, body->angle_std);
  PointTarget state = body->start;
  state.range = std::clamp(state.range, body->min_range, body->max_range);
  state.velocity = std::clamp(state.velocity, -body->max_speed, body->max_speed);
  for (std::size_t k = 0; k < duration_frames; ++k) {
    scene.frames[k].push_back(state);
    state.velocity = std::clamp(state.velocity + accel(rng), -body->max_speed, body->max_speed);
    state.range -= state.velocity * dt;
    if (state.range < body->min_range) {
      state.range = body->min_range;
      state.velocity = -std::abs(state.velocity);
    } else if (state.range > body->max_range) {
      state.range = body->max_range;
      state.velocity = std::abs(state.velocity);
    }
    state.azimuth = std::clamp(state.azimuth + wobble(rng), -1.0, 1.0);
    state.elevation = std::clamp(state.elevation + wobble(rng), -0.6, 0.3);
  }
  return scene;
}

RenderedSequence render_sequence(std::span<const Placement> placements, const SceneSequence& background,
                                 const RadarConfig& config, Rng& rng, const SynthesisOptions& options) {
  const std::uint64_t noise_seed = rng();
  return render_frames(placements, background, config, noise_seed, 0, background.frames.size(), options);
}

RenderedSequence render_frames(std::span<const Placement> placements, const SceneSequence& background,
                               const RadarConfig& config, std::uint64_t noise_seed, std::size_t begin,
                               std::size_t end, const SynthesisOptions& options) {
  const std::size_t total = background.frames.size();
  if (begin > end || end > total) {
    throw ValidationError("frame range [" + std::to_string(begin) + ", " + std::to_string(end) + ") outside the " +
                          std::to_string(total) + "-frame timeline");
  }
  std::vector<const Placement*> order;
  for (const auto& p : placements) {
    if (p.script.trajectory.size() != p.script.duration_frames) {
      throw ValidationError("gesture script trajectory length differs from its duration");
    }
    if (p.start_frame + p.script.duration_frames > total) {
      throw ValidationError("gesture placed at frame " + std::to_string(p.start_frame) + " exceeds the " +
                            std::to_string(total) + "-frame timeline");
    }
    order.push_back(&p);
  }
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->start_frame < b->start_frame; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->start_frame < order[i - 1]->start_frame + order[i - 1]->script.duration_frames) {
      throw ValidationError("gesture placements overlap at frame " + std::to_string(order[i]->start_frame));
    }
  }

  RenderedSequence out;
  out.frames.reserve(end - begin);
  out.annotations.resize(end - begin);
  std::size_t next = 0;
  std::vector<PointTarget> targets;
  for (std::size_t k = begin; k < end; ++k) {
    while (next < order.size() && k >= order[next]->start_frame + order[next]->script.duration_frames) ++next;
    targets = background.frames[k];
    auto& ann = out.annotations[k - begin];
    ann.frame = k;
    if (!targets.empty()) ann.state = targets.front();
    else ann.state = PointTarget{.range = 0.0, .velocity = 0.0, .azimuth = 0.0, .elevation = 0.0, .amplitude = 0.0};
    if (next < order.size() && k >= order[next]->start_frame) {
      const auto& hand = order[next]->script.trajectory[k - order[next]->start_frame];
      targets.push_back(hand);
      ann.label = order[next]->script.gesture;
      ann.hand_present = true;
      ann.state = hand;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(noise_seed), static_cast<std::uint32_t>(noise_seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    Rng frame_rng(seq);
    out.frames.push_back(synthesize_frame(targets, config, background.sigma_noise, frame_rng, options));
  }
  return out;
}

SampleScene plan_sample(GestureClass gesture, const SampleOptions& options, const RadarConfig& config, Rng& rng) {
  std::optional<BodyDrift> body;
  std::vector<Placement> placements;
  double body_floor = 0.7;
  if (gesture != GestureClass::Background) {
    auto script = gesture_trajectory(gesture, options.params, config, rng);
    const std::size_t n = script.duration_frames;
    if (n + 2 * options.onset_margin > options.window_frames) {
      throw ValidationError("sample window too short for the gesture duration");
    }
    const std::size_t start = uniform_index(rng, options.onset_margin, options.window_frames - n - options.onset_margin);
    body_floor = std::max(body_floor, script.draw.min_distance + 0.2);
    placements.push_back(Placement{std::move(script), start});
  }
  if (uniform(rng, 0.0, 1.0) < options.body_probability) {
    BodyDrift bounds;
    bounds.min_range = body_floor;
    bounds.max_range = std::max(bounds.max_range, body_floor + 0.05);
    body = random_body(rng, bounds);
  }
  SampleScene out;
  out.scene = background_sequence(options.window_frames, body, options.sigma_noise, config, rng);
  out.placements = std::move(placements);
  out.noise_seed = rng();
  return out;
}

RenderedSequence simulate_sample(GestureClass gesture, const SampleOptions& options, const RadarConfig& config,
                                 Rng& rng) {
  const auto plan = plan_sample(gesture, options, config, rng);
  return render_frames(plan.placements, plan.scene, config, plan.noise_seed, 0, plan.scene.frames.size());
}

}  // namespace gesture::sim
