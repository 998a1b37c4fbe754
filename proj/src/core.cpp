#include "gesture/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace gesture {

void RadarConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ValidationError(std::string("invalid radar config: ") + field + " " + what);
  };
  require(std::isfinite(f_low) && f_low > 0.0, "f_low", "must be positive");
  require(std::isfinite(f_high) && f_high > f_low, "f_high", "must exceed f_low");
  require(num_samples >= 2 && num_samples % 2 == 0, "num_samples", "must be an even count >= 2");
  require(num_chirps >= 1, "num_chirps", "must be >= 1");
  require(num_rx >= 1, "num_rx", "must be >= 1");
  require(std::isfinite(adc_rate) && adc_rate > 0.0, "adc_rate", "must be positive");
  require(std::isfinite(t_prt) && t_prt >= static_cast<double>(num_samples) / adc_rate, "t_prt",
          "must be >= num_samples / adc_rate");
  require(std::isfinite(frame_rate) && frame_rate > 0.0, "frame_rate", "must be positive");
  require(std::isfinite(antenna_spacing_wavelengths) && antenna_spacing_wavelengths > 0.0,
          "antenna_spacing_wavelengths", "must be positive");
}

DerivedConstants derive_constants(const RadarConfig& config) {
  config.validate();
  DerivedConstants d{};
  d.bandwidth = config.f_high - config.f_low;
  d.range_resolution = kSpeedOfLight / (2.0 * d.bandwidth);
  d.max_range = static_cast<double>(config.range_bins()) * d.range_resolution;
  d.wavelength = kSpeedOfLight / (0.5 * (config.f_low + config.f_high));
  d.chirp_duration = static_cast<double>(config.num_samples) / config.adc_rate;
  d.max_velocity = d.wavelength / (4.0 * config.t_prt);
  d.velocity_resolution = d.wavelength / (2.0 * static_cast<double>(config.num_chirps) * config.t_prt);
  return d;
}

double bin_to_range(std::size_t bin, const RadarConfig& config) {
  if (bin >= config.range_bins()) {
    throw ValidationError("range bin " + std::to_string(bin) + " out of [0, " +
                          std::to_string(config.range_bins()) + ")");
  }
  return static_cast<double>(bin) * derive_constants(config).range_resolution;
}

double doppler_bin_to_velocity(std::size_t bin, const RadarConfig& config) {
  if (bin >= config.num_chirps) {
    throw ValidationError("doppler bin " + std::to_string(bin) + " out of [0, " +
                          std::to_string(config.num_chirps) + ")");
  }
  const auto center = static_cast<double>(config.num_chirps / 2);
  return (static_cast<double>(bin) - center) * derive_constants(config).velocity_resolution;
}

namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "SwipeLeft", "SwipeRight", "SwipeUp", "SwipeDown", "Push", "Background"};

std::string normalized(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '_' || ch == '-' || ch == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

}  // namespace

std::string_view class_name(GestureClass c) { return kClassNames.at(class_index(c)); }

std::optional<GestureClass> parse_class(std::string_view name) {
  const auto key = normalized(name);
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (normalized(kClassNames[i]) == key) return class_from_index(i);
  }
  if (key.size() == 1 && key[0] >= '0' && key[0] <= '5') return class_from_index(static_cast<std::size_t>(key[0] - '0'));
  return std::nullopt;
}

GestureClass class_from_index(std::size_t index) {
  if (index >= kNumClasses) throw ValidationError("class index " + std::to_string(index) + " out of range");
  return static_cast<GestureClass>(index);
}

RawFrame::RawFrame(std::size_t num_rx, std::size_t num_chirps, std::size_t num_samples)
    : num_rx_(num_rx),
      num_chirps_(num_chirps),
      num_samples_(num_samples),
      samples_(num_rx * num_chirps * num_samples, 0.0f) {}

bool RawFrame::matches(const RadarConfig& config) const {
  return num_rx_ == config.num_rx && num_chirps_ == config.num_chirps && num_samples_ == config.num_samples;
}

void RawFrame::validate(const RadarConfig& config) const {
  if (!matches(config)) {
    throw ValidationError("raw frame shape [" + std::to_string(num_rx_) + "x" + std::to_string(num_chirps_) + "x" +
                          std::to_string(num_samples_) + "] does not match the radar config");
  }
  if (!std::all_of(samples_.begin(), samples_.end(), [](float v) { return std::isfinite(v); })) {
    throw ValidationError("raw frame contains non-finite samples");
  }
}

}  // namespace gesture
