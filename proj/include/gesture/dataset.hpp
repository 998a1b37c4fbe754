#pragma once

// Training material: label refinement, raw-level augmentation by gesture
// injection, and train/validation splitting.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "gesture/core.hpp"

namespace gesture::dataset {

using Rng = std::mt19937_64;

/// Raised when a gesture window has no frame above the amplitude gate.
class RejectedSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledSequence {
  std::vector<FeatureVector> features;
  std::vector<GestureClass> labels;

  std::size_t size() const { return features.size(); }
  void validate() const;
  /// The gesture this sequence carries, Background when it has none.
  GestureClass sequence_class() const;
  bool operator==(const LabeledSequence&) const = default;
};

struct LabelConfig {
  double amplitude_threshold = 200.0;  // magnitude gate for the range search
  std::size_t label_len = 10;          // frames, ~300 ms at 33.3 Hz

  void validate() const;
};

/// Frame of minimum range among frames with magnitude >= threshold; ties
/// resolve to the earliest frame. Throws RejectedSample if no frame passes.
std::size_t refined_label_start(std::span<const FeatureVector> features, const LabelConfig& cfg);

/// Labels `label_len` frames starting at the refined start (clipped at T),
/// everything else Background.
std::vector<GestureClass> refine_label(std::span<const FeatureVector> features, GestureClass gesture,
                                       const LabelConfig& cfg);

/// Symmetric tapered-cosine window; alpha = 0 is rectangular, 1 is Hann.
std::vector<double> tukey_window(std::size_t n, double alpha);

enum class MixMode {
  Crossfade,  // (1 - w)·background + w·gesture
  Additive,   // background + w·gesture
};

struct AugmentConfig {
  double tukey_alpha = 0.5;
  std::size_t min_gap = 5;  // frames between injected gestures
  std::size_t gestures_min = 1;
  std::size_t gestures_max = 3;
  std::uint64_t seed = 0;
  MixMode mode = MixMode::Crossfade;

  void validate() const;
};

/// Blends `gesture` into `background` starting at `position`; frames outside
/// the span are returned unchanged.
std::vector<RawFrame> inject_gesture(std::span<const RawFrame> background, std::span<const RawFrame> gesture,
                                     std::size_t position, const AugmentConfig& cfg);

struct GestureClip {
  std::span<const RawFrame> frames;
  GestureClass gesture = GestureClass::Background;
};

struct InjectedSpan {
  std::size_t start = 0;
  std::size_t length = 0;
  GestureClass gesture = GestureClass::Background;
  std::size_t clip_index = 0;  // index into the clips passed to compose_sequence

  std::size_t end() const { return start + length; }
  bool operator==(const InjectedSpan&) const = default;
};

struct ComposedSequence {
  std::vector<RawFrame> frames;
  std::vector<InjectedSpan> spans;  // sorted by start
};

/// Injects every clip at a random position such that spans never overlap
/// and consecutive spans are at least min_gap frames apart. The clips are
/// placed in random order; the free frames are split uniformly at random
/// among the gaps. Throws ValidationError when the clips cannot fit.
ComposedSequence compose_sequence(std::span<const RawFrame> background, std::span<const GestureClip> clips,
                                  const AugmentConfig& cfg, Rng& rng);

/// Labels a composed sequence by refining each span on its own features.
/// Spans without a confident frame stay Background; their count is returned
/// through `rejected` when given.
LabeledSequence label_composed(std::span<const FeatureVector> features, std::span<const InjectedSpan> spans,
                               const LabelConfig& cfg, std::size_t* rejected = nullptr);

/// Consecutive non-overlapping windows; a trailing partial window is dropped.
std::vector<LabeledSequence> split_windows(const LabeledSequence& seq, std::size_t window);

struct SplitRatio {
  std::size_t train = 3;
  std::size_t val = 1;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Seeded split with at least one validation item. The validation count is
/// floor(n·val / (train + val)), raised to 1. When stratified, every class
/// contributes its proportional share (largest remainder first).
SplitIndices split_train_val(std::span<const GestureClass> classes, SplitRatio ratio, std::uint64_t seed,
                             bool stratified = true);

}  // namespace gesture::dataset
