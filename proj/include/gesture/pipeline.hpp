#pragma once

// Per-frame radar processing: one RawFrame in, one FeatureVector out.
//
// remove_dc -> fast_time_fft -> remove_static -> integrate_profile ->
// detect_target -> doppler_at_bin -> doppler_peak -> monopulse_angles
//
// Only the detected range bin is transformed along slow time, so a frame
// costs R·C fast-time FFTs plus R slow-time FFTs and no range-Doppler map is
// ever formed.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gesture/core.hpp"

namespace gesture::pipeline {

using Complex = std::complex<double>;

/// One-sided fast-time spectrum laid out as [rx][chirp][bin].
class RangeSpectrum {
 public:
  RangeSpectrum() = default;
  RangeSpectrum(std::size_t num_rx, std::size_t num_chirps, std::size_t num_bins)
      : num_rx_(num_rx), num_chirps_(num_chirps), num_bins_(num_bins), data_(num_rx * num_chirps * num_bins) {}

  std::size_t num_rx() const { return num_rx_; }
  std::size_t num_chirps() const { return num_chirps_; }
  std::size_t num_bins() const { return num_bins_; }

  Complex& at(std::size_t rx, std::size_t chirp, std::size_t bin) {
    return data_[(rx * num_chirps_ + chirp) * num_bins_ + bin];
  }
  const Complex& at(std::size_t rx, std::size_t chirp, std::size_t bin) const {
    return data_[(rx * num_chirps_ + chirp) * num_bins_ + bin];
  }
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

 private:
  std::size_t num_rx_ = 0;
  std::size_t num_chirps_ = 0;
  std::size_t num_bins_ = 0;
  std::vector<Complex> data_;
};

/// Center-shifted slow-time spectrum of a single range bin, [rx][doppler bin].
class DopplerProfile {
 public:
  DopplerProfile() = default;
  DopplerProfile(std::size_t num_rx, std::size_t num_bins)
      : num_rx_(num_rx), num_bins_(num_bins), data_(num_rx * num_bins) {}

  std::size_t num_rx() const { return num_rx_; }
  std::size_t num_bins() const { return num_bins_; }
  Complex& at(std::size_t rx, std::size_t bin) { return data_[rx * num_bins_ + bin]; }
  const Complex& at(std::size_t rx, std::size_t bin) const { return data_[rx * num_bins_ + bin]; }

 private:
  std::size_t num_rx_ = 0;
  std::size_t num_bins_ = 0;
  std::vector<Complex> data_;
};

using RangeProfile = std::vector<double>;

enum class DopplerWindow { Rectangular, Hann };

struct DetectionConfig {
  double gaussian_sigma = 1.0;       // bins
  double detection_threshold = 0.0;  // smoothed integrated amplitude
  DopplerWindow doppler_window = DopplerWindow::Rectangular;
  std::array<std::size_t, 3> channel_roles{0, 1, 2};  // reference, horizontal, vertical

  void validate() const;

  /// Threshold calibrated to `factor` times the median integrated profile of
  /// pure-noise frames at `sigma_noise`; deterministic for a given seed.
  static DetectionConfig calibrated(const RadarConfig& radar, double sigma_noise, double factor = 8.0,
                                    std::size_t frames = 64, std::uint64_t seed = 0);
};

struct TargetDetection {
  std::size_t range_bin = 0;
  double range = 0.0;
  bool above_threshold = false;
};

struct DopplerPeak {
  std::size_t bin = 0;
  double magnitude = 0.0;
};

struct MonopulseResult {
  double azimuth = 0.0;
  double elevation = 0.0;
  bool degenerate = false;  // a channel had zero amplitude at the bin
};

/// Transform work performed, by length.
struct TransformStats {
  std::size_t fast_time_ffts = 0;
  std::size_t fast_time_length = 0;
  std::size_t slow_time_ffts = 0;
  std::size_t slow_time_length = 0;
  std::size_t largest_buffer = 0;  // complex elements in the largest intermediate
};

RawFrame remove_dc(const RawFrame& frame);

/// Length-S DFT of each real chirp, keeping bins [0, S/2).
RangeSpectrum fast_time_fft(const RawFrame& frame, TransformStats* stats = nullptr);

/// Subtracts the complex mean over chirps for every (rx, bin).
RangeSpectrum remove_static(const RangeSpectrum& spectrum);

/// profile[bin] = Σ_rx Σ_chirp |spectrum|
RangeProfile integrate_profile(const RangeSpectrum& spectrum);

/// Convolution with a normalized Gaussian truncated at ±3σ, half-sample
/// symmetric reflection at the borders.
RangeProfile gaussian_smooth(const RangeProfile& profile, double sigma);

/// Local maxima; a plateau counts once, at its first bin. Border bins compare
/// against their single neighbor.
std::vector<std::size_t> local_maxima(const RangeProfile& values);

/// Closest smoothed local maximum at or above the threshold, otherwise the
/// global maximum of the smoothed profile with above_threshold = false.
TargetDetection detect_target(const RangeProfile& profile, const DetectionConfig& det, const RadarConfig& config);

/// Slow-time spectrum of `bin` on every channel. Approaching targets land
/// above the center bin C/2.
DopplerProfile doppler_at_bin(const RangeSpectrum& spectrum, std::size_t bin, const DetectionConfig& det,
                              TransformStats* stats = nullptr);

/// Argmax of the channel-integrated magnitude.
DopplerPeak doppler_peak(const DopplerProfile& doppler);

MonopulseResult monopulse_angles(const DopplerProfile& doppler, std::size_t doppler_bin, const RadarConfig& config,
                                 const std::array<std::size_t, 3>& roles = {0, 1, 2});

/// Every intermediate of one frame, for inspection and plotting.
struct FrameAnalysis {
  RangeProfile profile;
  RangeProfile smoothed;
  TargetDetection detection;
  DopplerPeak doppler;
  MonopulseResult angles;
  FeatureVector features;
  TransformStats stats;
};

FrameAnalysis analyze_frame(const RawFrame& frame, const DetectionConfig& det, const RadarConfig& config);

FeatureVector extract_features(const RawFrame& frame, const DetectionConfig& det, const RadarConfig& config);

std::vector<FeatureVector> extract_sequence(const std::vector<RawFrame>& frames, const DetectionConfig& det,
                                            const RadarConfig& config);

}  // namespace gesture::pipeline
