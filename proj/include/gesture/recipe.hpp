#pragma once

// End-to-end synthetic workflow shared by the CLI and the acceptance suite:
// simulate labelled recordings, augment them by gesture injection, train the
// network and score it on long composed sequences.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "gesture/dataset.hpp"
#include "gesture/eval.hpp"
#include "gesture/model.hpp"
#include "gesture/pipeline.hpp"
#include "gesture/sim.hpp"

namespace gesture::recipe {

/// Independent stream seed for (base, stream, index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Callers write results by index, so output is independent
/// of the worker count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

struct CorpusOptions {
  std::size_t gestures_per_class = 300;
  std::size_t background_sequences = 60;
  std::size_t augmented_sequences = 2000;  // composed windows, window_frames long
  std::size_t clip_before = 22;            // frames kept before the refined label start
  std::size_t clip_after = 22;             // frames kept from the label start on
  sim::SampleOptions sample;
  dataset::LabelConfig label;
  dataset::AugmentConfig augment{.gestures_min = 2, .gestures_max = 2};
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

struct Corpus {
  std::vector<dataset::LabeledSequence> sequences;  // all window_frames long
  std::size_t rejected = 0;                         // samples without a confident frame
};

/// Raw frames of labelled sample `index` of `gesture`; deterministic in the seed.
sim::RenderedSequence corpus_sample(GestureClass gesture, std::size_t index, const CorpusOptions& options,
                                    const RadarConfig& config);

/// Frames [start − before, start + after) of the same sample, rendered
/// without synthesizing the rest of it.
std::vector<RawFrame> corpus_clip(GestureClass gesture, std::size_t index, std::size_t label_start,
                                  const CorpusOptions& options, const RadarConfig& config);

/// Crops [start − before, start + after) around the refined label start.
std::vector<RawFrame> gesture_clip(const std::vector<RawFrame>& frames, std::size_t label_start,
                                   std::size_t before, std::size_t after);

Corpus build_corpus(const CorpusOptions& options, const RadarConfig& config, const pipeline::DetectionConfig& det);

struct TestSetOptions {
  std::size_t sequences = 9;
  std::size_t gestures_per_sequence = 50;
  std::size_t min_gap = 10;
  double length_factor = 1.3;  // background length relative to the occupied frames
  std::uint64_t seed = 1001;
};

struct TestSequence {
  dataset::LabeledSequence labeled;
  std::vector<dataset::InjectedSpan> spans;
  std::size_t rejected = 0;
};

/// Long sequences of randomly ordered gestures injected into drifting
/// background, labelled by per-span refinement.
std::vector<TestSequence> build_test_set(const TestSetOptions& test, const CorpusOptions& corpus,
                                         const RadarConfig& config, const pipeline::DetectionConfig& det);

/// Streams a whole sequence through the 32-bit network with persistent state.
std::vector<eval::ProbRow> stream_probabilities(const std::vector<FeatureVector>& features,
                                                const model::GruParams& params, const RadarConfig& config);

eval::EvalReport evaluate_sequences(const std::vector<TestSequence>& sequences, const model::GruParams& params,
                                    const eval::EvalConfig& cfg, const RadarConfig& config);

}  // namespace gesture::recipe
