#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gesture {

/// Raised when a configuration or argument violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for malformed files (bad magic, inconsistent shapes, truncation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Chirp and burst parameters of the FMCW front end.
///
/// Only the primary parameters are stored; every physical quantity derived
/// from them is recomputed through derive_constants().
struct RadarConfig {
  double f_low = 58.5e9;
  double f_high = 62.5e9;
  std::size_t num_samples = 64;  // S, fast time
  std::size_t num_chirps = 32;   // C, slow time
  std::size_t num_rx = 3;        // R
  double adc_rate = 2e6;
  double t_prt = 300e-6;
  double frame_rate = 33.3;
  double antenna_spacing_wavelengths = 0.5;

  /// Throws ValidationError naming the first violated field.
  void validate() const;

  std::size_t range_bins() const { return num_samples / 2; }
  std::size_t frame_size() const { return num_rx * num_chirps * num_samples; }

  bool operator==(const RadarConfig&) const = default;
};

struct DerivedConstants {
  double bandwidth;         // B [Hz]
  double range_resolution;  // Δr [m]
  double max_range;         // (S/2)·Δr [m]
  double wavelength;        // λ at the center frequency [m]
  double chirp_duration;    // T_c = S / adc_rate [s]
  double max_velocity;      // λ / (4·t_prt) [m/s]
  double velocity_resolution;  // λ / (2·C·t_prt) [m/s]
};

DerivedConstants derive_constants(const RadarConfig& config);

/// Range in meters of fast-time bin `bin` (0 ≤ bin < S/2).
double bin_to_range(std::size_t bin, const RadarConfig& config);

/// Radial velocity of a center-shifted Doppler bin; bin C/2 is zero Doppler.
double doppler_bin_to_velocity(std::size_t bin, const RadarConfig& config);

/// Gesture classes with their stable integer encoding. Background is 5.
enum class GestureClass : unsigned char {
  SwipeLeft = 0,
  SwipeRight = 1,
  SwipeUp = 2,
  SwipeDown = 3,
  Push = 4,
  Background = 5,
};

inline constexpr std::size_t kNumClasses = 6;
inline constexpr std::size_t kNumGestures = 5;

std::string_view class_name(GestureClass c);
/// Accepts the canonical names case-insensitively, with or without
/// separators ("swipe_left", "SwipeLeft", "push").
std::optional<GestureClass> parse_class(std::string_view name);
GestureClass class_from_index(std::size_t index);
inline std::size_t class_index(GestureClass c) { return static_cast<std::size_t>(c); }

/// The five per-frame scattering characteristics of the tracked hand.
struct FeatureVector {
  double range = 0.0;      // m
  double velocity = 0.0;   // m/s, approaching targets positive
  double azimuth = 0.0;    // rad
  double elevation = 0.0;  // rad
  double magnitude = 0.0;  // linear

  static constexpr std::size_t kSize = 5;
  std::array<double, kSize> as_array() const { return {range, velocity, azimuth, elevation, magnitude}; }
  bool operator==(const FeatureVector&) const = default;
};

/// One burst of real ADC samples laid out as [rx][chirp][sample].
class RawFrame {
 public:
  RawFrame() = default;
  RawFrame(std::size_t num_rx, std::size_t num_chirps, std::size_t num_samples);
  explicit RawFrame(const RadarConfig& config)
      : RawFrame(config.num_rx, config.num_chirps, config.num_samples) {}

  std::size_t num_rx() const { return num_rx_; }
  std::size_t num_chirps() const { return num_chirps_; }
  std::size_t num_samples() const { return num_samples_; }

  float& at(std::size_t rx, std::size_t chirp, std::size_t sample) {
    return samples_[(rx * num_chirps_ + chirp) * num_samples_ + sample];
  }
  float at(std::size_t rx, std::size_t chirp, std::size_t sample) const {
    return samples_[(rx * num_chirps_ + chirp) * num_samples_ + sample];
  }

  std::vector<float>& data() { return samples_; }
  const std::vector<float>& data() const { return samples_; }

  bool matches(const RadarConfig& config) const;
  /// Throws ValidationError when the shape differs from `config` or a sample is not finite.
  void validate(const RadarConfig& config) const;

  bool operator==(const RawFrame&) const = default;

 private:
  std::size_t num_rx_ = 0;
  std::size_t num_chirps_ = 0;
  std::size_t num_samples_ = 0;
  std::vector<float> samples_;
};

}  // namespace gesture
