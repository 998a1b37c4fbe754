#include "gesture/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "gesture/fft.hpp"
#include "gesture/sim.hpp"

namespace gesture::pipeline {

namespace {

const fft::Plan& plan_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<fft::Plan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<fft::Plan>(n);
  return *slot;
}

void note_buffer(TransformStats* stats, std::size_t elements) {
  if (stats) stats->largest_buffer = std::max(stats->largest_buffer, elements);
}

}  // namespace

void DetectionConfig::validate() const {
  if (!(gaussian_sigma > 0.0) || !std::isfinite(gaussian_sigma)) {
    throw ValidationError("detection config: gaussian_sigma must be > 0");
  }
  if (!(detection_threshold >= 0.0) || !std::isfinite(detection_threshold)) {
    throw ValidationError("detection config: detection_threshold must be >= 0");
  }
}

DetectionConfig DetectionConfig::calibrated(const RadarConfig& radar, double sigma_noise, double factor,
                                            std::size_t frames, std::uint64_t seed) {
  if (frames == 0) throw ValidationError("threshold calibration needs at least one frame");
  sim::Rng rng(seed);
  std::vector<double> values;
  values.reserve(frames * radar.range_bins());
  for (std::size_t i = 0; i < frames; ++i) {
    const auto frame = sim::synthesize_frame({}, radar, sigma_noise, rng);
    const auto profile = integrate_profile(remove_static(fast_time_fft(remove_dc(frame))));
    values.insert(values.end(), profile.begin(), profile.end());
  }
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  DetectionConfig det;
  det.detection_threshold = factor * *mid;
  return det;
}

RawFrame remove_dc(const RawFrame& frame) {
  RawFrame out = frame;
  const std::size_t S = frame.num_samples();
  if (S == 0) return out;
  for (std::size_t r = 0; r < frame.num_rx(); ++r) {
    for (std::size_t c = 0; c < frame.num_chirps(); ++c) {
      double sum = 0.0;
      for (std::size_t s = 0; s < S; ++s) sum += frame.at(r, c, s);
      const double mean = sum / static_cast<double>(S);
      for (std::size_t s = 0; s < S; ++s) out.at(r, c, s) = static_cast<float>(frame.at(r, c, s) - mean);
    }
  }
  return out;
}

RangeSpectrum fast_time_fft(const RawFrame& frame, TransformStats* stats) {
  const std::size_t S = frame.num_samples();
  const std::size_t bins = S / 2;
  RangeSpectrum out(frame.num_rx(), frame.num_chirps(), bins);
  note_buffer(stats, out.data().size());
  const auto& plan = plan_for(S);
  std::vector<Complex> buf(S);
  for (std::size_t r = 0; r < frame.num_rx(); ++r) {
    for (std::size_t c = 0; c < frame.num_chirps(); ++c) {
      for (std::size_t s = 0; s < S; ++s) buf[s] = Complex(frame.at(r, c, s), 0.0);
      plan.execute(buf, -1);
      for (std::size_t b = 0; b < bins; ++b) out.at(r, c, b) = buf[b];
      if (stats) ++stats->fast_time_ffts;
    }
  }
  if (stats) stats->fast_time_length = S;
  return out;
}

RangeSpectrum remove_static(const RangeSpectrum& spectrum) {
  RangeSpectrum out = spectrum;
  const std::size_t C = spectrum.num_chirps();
  if (C == 0) return out;
  for (std::size_t r = 0; r < spectrum.num_rx(); ++r) {
    for (std::size_t b = 0; b < spectrum.num_bins(); ++b) {
      Complex mean{};
      for (std::size_t c = 0; c < C; ++c) mean += spectrum.at(r, c, b);
      mean /= static_cast<double>(C);
      for (std::size_t c = 0; c < C; ++c) out.at(r, c, b) -= mean;
    }
  }
  return out;
}

RangeProfile integrate_profile(const RangeSpectrum& spectrum) {
  RangeProfile profile(spectrum.num_bins(), 0.0);
  for (std::size_t r = 0; r < spectrum.num_rx(); ++r) {
    for (std::size_t c = 0; c < spectrum.num_chirps(); ++c) {
      for (std::size_t b = 0; b < spectrum.num_bins(); ++b) profile[b] += std::sqrt(std::norm(spectrum.at(r, c, b)));
    }
  }
  return profile;
}

RangeProfile gaussian_smooth(const RangeProfile& profile, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gaussian_smooth: sigma must be > 0");
  const auto n = static_cast<std::ptrdiff_t>(profile.size());
  if (n == 0) return {};
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * static_cast<double>(k * k) / (sigma * sigma));
    kernel[static_cast<std::size_t>(k + radius)] = w;
    norm += w;
  }
  for (auto& w : kernel) w /= norm;

  auto reflect = [n](std::ptrdiff_t i) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return i;
  };
  RangeProfile out(profile.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
      acc += kernel[static_cast<std::size_t>(k + radius)] * profile[static_cast<std::size_t>(reflect(i + k))];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<std::size_t> local_maxima(const RangeProfile& values) {
  std::vector<std::size_t> maxima;
  const std::size_t n = values.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] == values[i]) ++j;
    const bool above_left = i == 0 || values[i] > values[i - 1];
    const bool above_right = j + 1 == n || values[i] > values[j + 1];
    if (above_left && above_right) maxima.push_back(i);
    i = j + 1;
  }
  return maxima;
}

TargetDetection detect_target(const RangeProfile& profile, const DetectionConfig& det, const RadarConfig& config) {
  det.validate();
  if (profile.size() != config.range_bins()) {
    throw ValidationError("detect_target: profile length does not equal S/2");
  }
  const auto smoothed = gaussian_smooth(profile, det.gaussian_sigma);
  TargetDetection out;
  for (std::size_t m : local_maxima(smoothed)) {
    if (smoothed[m] >= det.detection_threshold) {
      out.range_bin = m;
      out.above_threshold = true;
      out.range = bin_to_range(m, config);
      return out;
    }
  }
  out.range_bin = static_cast<std::size_t>(std::max_element(smoothed.begin(), smoothed.end()) - smoothed.begin());
  out.above_threshold = false;
  out.range = bin_to_range(out.range_bin, config);
  return out;
}

DopplerProfile doppler_at_bin(const RangeSpectrum& spectrum, std::size_t bin, const DetectionConfig& det,
                              TransformStats* stats) {
  if (bin >= spectrum.num_bins()) {
    throw ValidationError("doppler_at_bin: range bin " + std::to_string(bin) + " out of range");
  }
  const std::size_t C = spectrum.num_chirps();
  DopplerProfile out(spectrum.num_rx(), C);
  note_buffer(stats, spectrum.num_rx() * C);
  const auto& plan = plan_for(C);
  std::vector<double> window(C, 1.0);
  if (det.doppler_window == DopplerWindow::Hann && C > 1) {
    for (std::size_t c = 0; c < C; ++c) {
      window[c] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(c) / static_cast<double>(C - 1)));
    }
  }
  std::vector<Complex> buf(C);
  for (std::size_t r = 0; r < spectrum.num_rx(); ++r) {
    for (std::size_t c = 0; c < C; ++c) buf[c] = spectrum.at(r, c, bin) * window[c];
    // Positive kernel exponent: the slow-time phase of an approaching target
    // decreases chirp to chirp, which then maps to positive frequencies.
    plan.execute(buf, +1);
    for (std::size_t k = 0; k < C; ++k) out.at(r, k) = buf[(k + C - C / 2) % C];
    if (stats) ++stats->slow_time_ffts;
  }
  if (stats) stats->slow_time_length = C;
  return out;
}

DopplerPeak doppler_peak(const DopplerProfile& doppler) {
  DopplerPeak peak;
  double best = -1.0;
  for (std::size_t k = 0; k < doppler.num_bins(); ++k) {
    double sum = 0.0;
    for (std::size_t r = 0; r < doppler.num_rx(); ++r) sum += std::abs(doppler.at(r, k));
    if (sum > best) {
      best = sum;
      peak.bin = k;
    }
  }
  peak.magnitude = std::max(best, 0.0);
  return peak;
}

MonopulseResult monopulse_angles(const DopplerProfile& doppler, std::size_t doppler_bin, const RadarConfig& config,
                                 const std::array<std::size_t, 3>& roles) {
  if (doppler_bin >= doppler.num_bins()) throw ValidationError("monopulse_angles: doppler bin out of range");
  MonopulseResult out;
  const double scale = 2.0 * kPi * config.antenna_spacing_wavelengths;
  auto angle = [&](std::size_t offset_rx) {
    if (roles[0] >= doppler.num_rx() || offset_rx >= doppler.num_rx()) {
      out.degenerate = true;
      return 0.0;
    }
    const Complex ref = doppler.at(roles[0], doppler_bin);
    const Complex off = doppler.at(offset_rx, doppler_bin);
    if (std::abs(ref) <= std::numeric_limits<double>::min() || std::abs(off) <= std::numeric_limits<double>::min()) {
      out.degenerate = true;
      return 0.0;
    }
    const double dphi = std::arg(off * std::conj(ref));
    return std::asin(std::clamp(dphi / scale, -1.0, 1.0));
  };
  out.azimuth = angle(roles[1]);
  out.elevation = angle(roles[2]);
  return out;
}

FrameAnalysis analyze_frame(const RawFrame& frame, const DetectionConfig& det, const RadarConfig& config) {
  frame.validate(config);
  FrameAnalysis a;
  const auto spectrum = remove_static(fast_time_fft(remove_dc(frame), &a.stats));
  a.profile = integrate_profile(spectrum);
  a.smoothed = gaussian_smooth(a.profile, det.gaussian_sigma);
  a.detection = detect_target(a.profile, det, config);
  const auto doppler = doppler_at_bin(spectrum, a.detection.range_bin, det, &a.stats);
  a.doppler = doppler_peak(doppler);
  a.angles = monopulse_angles(doppler, a.doppler.bin, config, det.channel_roles);
  a.features.range = a.detection.range;
  a.features.velocity = doppler_bin_to_velocity(a.doppler.bin, config);
  a.features.azimuth = a.angles.azimuth;
  a.features.elevation = a.angles.elevation;
  a.features.magnitude = a.doppler.magnitude;
  return a;
}

FeatureVector extract_features(const RawFrame& frame, const DetectionConfig& det, const RadarConfig& config) {
  return analyze_frame(frame, det, config).features;
}

std::vector<FeatureVector> extract_sequence(const std::vector<RawFrame>& frames, const DetectionConfig& det,
                                            const RadarConfig& config) {
  std::vector<FeatureVector> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(extract_features(f, det, config));
  return out;
}

}  // namespace gesture::pipeline
