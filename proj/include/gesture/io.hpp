#pragma once

// File formats:
//   radar config   flat "key = value" text, '#' comments
//   RFR1           raw frame sequences, little-endian f32
//   LFS1           labeled feature sequences
//   CSV            annotations, features, range profiles, dataset manifests,
//                  training history, class probabilities

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesture/core.hpp"
#include "gesture/dataset.hpp"
#include "gesture/sim.hpp"

namespace gesture::io {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const fs::path& path);
std::string read_text(const fs::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const fs::path& path, std::string_view text);

RadarConfig parse_radar_config(std::string_view text);
RadarConfig load_radar_config(const fs::path& path);
std::string format_radar_config(const RadarConfig& config);

/// Fixed 9-significant-digit formatting used by every CSV writer.
std::string format_number(double v);

// RFR1: "RFR1", u32 version = 1, u32 R, u32 C, u32 S, u32 frame_count,
// then f32 samples in [frame][rx][chirp][sample] order.
std::vector<std::uint8_t> encode_raw_sequence(std::span<const RawFrame> frames, const RadarConfig& config);
std::vector<RawFrame> decode_raw_sequence(std::span<const std::uint8_t> bytes, const RadarConfig& config);
void save_raw_sequence(const fs::path& path, std::span<const RawFrame> frames, const RadarConfig& config);
std::vector<RawFrame> load_raw_sequence(const fs::path& path, const RadarConfig& config);

// Annotation sidecar: frame_index,class,range,velocity,azimuth,elevation
std::string annotations_csv(std::span<const sim::FrameAnnotation> annotations);
std::vector<sim::FrameAnnotation> parse_annotations_csv(std::string_view text);

// Features: frame,range_m,velocity_mps,azimuth_rad,elevation_rad,magnitude
std::string features_csv(std::span<const FeatureVector> features);
std::vector<FeatureVector> parse_features_csv(std::string_view text);

// One row per frame: frame,bin0..bin{S/2-1} of the integrated range profile.
std::string profiles_csv(std::span<const std::vector<double>> profiles);

// LFS1: "LFS1", u32 T, T×5 f32 features, T u8 labels.
std::vector<std::uint8_t> encode_labeled(const dataset::LabeledSequence& seq);
dataset::LabeledSequence decode_labeled(std::span<const std::uint8_t> bytes);
void save_labeled(const fs::path& path, const dataset::LabeledSequence& seq);
dataset::LabeledSequence load_labeled(const fs::path& path);

// Labels as CSV: frame,label
std::string labels_csv(std::span<const GestureClass> labels);

// Dataset manifest: path,class,split. Relative paths resolve against the
// manifest's directory.
struct ManifestEntry {
  std::string path;
  GestureClass gesture = GestureClass::Background;
  std::string split;  // "train", "val", "test" or empty
  bool operator==(const ManifestEntry&) const = default;
};

std::string manifest_csv(std::span<const ManifestEntry> entries);
std::vector<ManifestEntry> parse_manifest_csv(std::string_view text);
std::vector<ManifestEntry> load_manifest(const fs::path& path);
fs::path resolve_entry(const fs::path& manifest_path, const ManifestEntry& entry);

// Class probabilities: frame,p_SwipeLeft,...,p_Background
std::string probabilities_csv(std::span<const std::array<double, kNumClasses>> probs);
std::vector<std::array<double, kNumClasses>> parse_probabilities_csv(std::string_view text);

/// Splits simple comma separated text (no quoting) into rows, skipping the
/// header and blank lines.
std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text, std::size_t expected_columns,
                                                     std::string_view what);

}  // namespace gesture::io
