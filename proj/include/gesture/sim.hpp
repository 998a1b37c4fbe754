#pragma once

// Point-target FMCW simulator. Produces raw ADC frames with known ground
// truth so that every later stage can be checked against the physics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "gesture/core.hpp"

namespace gesture::sim {

using Rng = std::mt19937_64;

struct PointTarget {
  double range = 0.5;         // m
  double velocity = 0.0;      // m/s, approach positive
  double azimuth = 0.0;       // rad
  double elevation = 0.0;     // rad
  double amplitude = 1.0;     // linear
  double initial_phase = 0.0; // rad

  bool operator==(const PointTarget&) const = default;
};

struct SynthesisOptions {
  // Scale amplitudes by (reference_range / R)^2.
  bool inverse_square_falloff = false;
  double reference_range = 0.6;
  // Accept targets at or beyond max_range / v_max (aliased ground truth).
  bool allow_aliasing = false;
};

/// Throws ValidationError when the target cannot be represented unambiguously.
void validate_target(const PointTarget& target, const RadarConfig& config, bool allow_aliasing = false);

/// IF beat frequency of a stationary reflector at `range`: 2·B·R / (T_c·c0).
double beat_frequency(double range, const RadarConfig& config);

/// Real-valued IF samples of all targets plus i.i.d. Gaussian noise. Each
/// burst is a stop-and-hop snapshot: the beat frequency follows the target's
/// range at the first chirp, and motion across chirps advances the phase.
/// Receive channel 0 is the reference antenna, 1 is offset horizontally and
/// 2 vertically; further channels carry no angle-dependent phase.
RawFrame synthesize_frame(std::span<const PointTarget> targets, const RadarConfig& config, double sigma_noise,
                          Rng& rng, const SynthesisOptions& options = {});

/// Randomization ranges for the parametric gesture models.
struct GestureParams {
  double min_distance_lo = 0.45;  // closest approach of the hand [m]
  double min_distance_hi = 0.90;
  double aspect_max = 30.0 * kPi / 180.0;  // person position relative to boresight
  double elevation_offset_max = 10.0 * kPi / 180.0;
  double lateral_extent_lo = 0.20;  // swipe half-width [m]
  double lateral_extent_hi = 0.35;
  double swipe_arc_lo = 0.08;  // extra boresight distance at the ends of a swipe [m]
  double swipe_arc_hi = 0.15;
  double push_depth_lo = 0.12;  // push travel [m]
  double push_depth_hi = 0.25;
  std::size_t duration_lo = 16;  // active frames
  std::size_t duration_hi = 28;
  double amplitude_lo = 0.6;
  double amplitude_hi = 1.2;
  double amplitude_jitter = 0.05;  // relative, per frame
  double ramp_fraction = 0.2;      // amplitude fade in/out as a fraction of the duration
};

/// The random draws behind one script, kept for reproducibility.
struct GestureDraw {
  double min_distance = 0.0;
  double aspect = 0.0;
  double elevation_offset = 0.0;
  double extent = 0.0;  // lateral half-width for swipes, travel for push
  double arc = 0.0;     // swipe arc depth
  double amplitude = 0.0;
  double initial_phase = 0.0;
  std::size_t duration = 0;
};

struct GestureScript {
  GestureClass gesture = GestureClass::Push;
  std::size_t duration_frames = 0;
  std::vector<PointTarget> trajectory;
  GestureDraw draw;
};

/// Parametric hand trajectory for one gesture. Swipes move the hand along a
/// shallow arc that is closest to the sensor mid-swipe; a push moves it
/// radially in and out.
/// Scripts drawn with the same rng state share all random draws, so mirrored
/// swipes are exact negations of each other in the swept angle.
GestureScript gesture_trajectory(GestureClass gesture, const GestureParams& params, const RadarConfig& config,
                                 Rng& rng);

/// Slowly drifting body reflector used for background activity.
struct BodyDrift {
  PointTarget start{.range = 0.9, .velocity = 0.0, .azimuth = 0.0, .elevation = -0.1, .amplitude = 1.0};
  double max_speed = 0.3;     // |v| bound [m/s]
  double accel_std = 0.04;    // per-frame velocity random walk [m/s]
  double angle_std = 0.01;    // per-frame angle random walk [rad]
  double min_range = 0.7;
  double max_range = 1.1;
};

/// Targets present in every frame of a sequence plus the noise level.
struct SceneSequence {
  std::vector<std::vector<PointTarget>> frames;  // index == frame number
  double sigma_noise = 0.0;
};

SceneSequence background_sequence(std::size_t duration_frames, const std::optional<BodyDrift>& body,
                                  double sigma_noise, const RadarConfig& config, Rng& rng);

/// Random body drift start inside the documented bounds.
BodyDrift random_body(Rng& rng, const BodyDrift& bounds = {});

struct Placement {
  GestureScript script;
  std::size_t start_frame = 0;
};

struct FrameAnnotation {
  std::size_t frame = 0;
  GestureClass label = GestureClass::Background;
  bool hand_present = false;
  PointTarget state;  // hand if present, else the body if present, else zeros
};

struct RenderedSequence {
  std::vector<RawFrame> frames;
  std::vector<FrameAnnotation> annotations;
};

/// Places scripts on the background timeline and synthesizes every frame.
/// Throws ValidationError when scripts overlap or exceed the timeline.
RenderedSequence render_sequence(std::span<const Placement> placements, const SceneSequence& background,
                                 const RadarConfig& config, Rng& rng, const SynthesisOptions& options = {});

/// Frames [begin, end) only. Frame k draws its noise from a stream seeded by
/// (noise_seed, k), so any sub-range equals the same frames of a full render.
RenderedSequence render_frames(std::span<const Placement> placements, const SceneSequence& background,
                               const RadarConfig& config, std::uint64_t noise_seed, std::size_t begin,
                               std::size_t end, const SynthesisOptions& options = {});

/// Simulator defaults used for datasets.
struct SampleOptions {
  std::size_t window_frames = 100;
  double sigma_noise = 0.1;
  double body_probability = 0.5;
  // Active segment starts inside [onset_margin, window - duration - onset_margin].
  std::size_t onset_margin = 10;
  GestureParams params;
};

/// Everything random about a sample, drawn before any frame is rendered.
struct SampleScene {
  std::vector<Placement> placements;
  SceneSequence scene;
  std::uint64_t noise_seed = 0;
};

SampleScene plan_sample(GestureClass gesture, const SampleOptions& options, const RadarConfig& config, Rng& rng);

/// One fixed-length recording containing a single gesture (or none, for
/// Background), mirroring a labelled window of a recording session.
RenderedSequence simulate_sample(GestureClass gesture, const SampleOptions& options, const RadarConfig& config,
                                 Rng& rng);

}  // namespace gesture::sim
