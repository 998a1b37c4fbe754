#include "gesture/recipe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace gesture::recipe {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum Stream : std::uint64_t {
  kSampleStream = 16,  // + class index
  kBackgroundStream = 2,
  kAugmentStream = 3,
  kTestStream = 4,
};

// Backgrounds that receive injected gestures keep the moving person behind
// the closest approach of any hand.
sim::BodyDrift far_body_bounds() {
  sim::BodyDrift b;
  b.min_range = 0.95;
  b.max_range = 1.15;
  return b;
}

std::vector<RawFrame> composition_background(std::size_t frames, double sigma_noise, const RadarConfig& config,
                                             sim::Rng& rng) {
  const auto body = sim::random_body(rng, far_body_bounds());
  const auto scene = sim::background_sequence(frames, body, sigma_noise, config, rng);
  return sim::render_sequence({}, scene, config, rng).frames;
}

sim::SampleScene plan_corpus_sample(GestureClass gesture, std::size_t index, const CorpusOptions& options,
                                    const RadarConfig& config) {
  sim::Rng rng(derive_seed(options.seed, kSampleStream + class_index(gesture), index));
  return sim::plan_sample(gesture, options.sample, config, rng);
}

std::pair<std::size_t, std::size_t> clip_bounds(std::size_t total, std::size_t label_start, std::size_t before,
                                                std::size_t after) {
  return {label_start >= before ? label_start - before : 0, std::min(total, label_start + after)};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(splitmix(base) ^ stream) ^ index);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

sim::RenderedSequence corpus_sample(GestureClass gesture, std::size_t index, const CorpusOptions& options,
                                    const RadarConfig& config) {
  const auto plan = plan_corpus_sample(gesture, index, options, config);
  return sim::render_frames(plan.placements, plan.scene, config, plan.noise_seed, 0, plan.scene.frames.size());
}

std::vector<RawFrame> corpus_clip(GestureClass gesture, std::size_t index, std::size_t label_start,
                                  const CorpusOptions& options, const RadarConfig& config) {
  const auto plan = plan_corpus_sample(gesture, index, options, config);
  const auto [lo, hi] = clip_bounds(plan.scene.frames.size(), label_start, options.clip_before, options.clip_after);
  return sim::render_frames(plan.placements, plan.scene, config, plan.noise_seed, lo, hi).frames;
}

std::vector<RawFrame> gesture_clip(const std::vector<RawFrame>& frames, std::size_t label_start, std::size_t before,
                                   std::size_t after) {
  const auto [lo, hi] = clip_bounds(frames.size(), label_start, before, after);
  return {frames.begin() + static_cast<std::ptrdiff_t>(lo), frames.begin() + static_cast<std::ptrdiff_t>(hi)};
}

Corpus build_corpus(const CorpusOptions& options, const RadarConfig& config, const pipeline::DetectionConfig& det) {
  options.augment.validate();
  const std::size_t window = options.sample.window_frames;
  const std::size_t n_gestures = kNumGestures * options.gestures_per_class;

  // Labelled gesture recordings. The label start of each is kept so the
  // augmentation stage can cut clips around it.
  struct Labelled {
    dataset::LabeledSequence seq;
    std::size_t label_start = 0;
    bool rejected = false;
  };
  std::vector<Labelled> labelled(n_gestures);
  parallel_for(n_gestures, options.threads, [&](std::size_t k) {
    const auto gesture = class_from_index(k / options.gestures_per_class);
    const auto sample = corpus_sample(gesture, k % options.gestures_per_class, options, config);
    auto& out = labelled[k];
    out.seq.features = pipeline::extract_sequence(sample.frames, det, config);
    try {
      out.label_start = dataset::refined_label_start(out.seq.features, options.label);
      out.seq.labels = dataset::refine_label(out.seq.features, gesture, options.label);
    } catch (const dataset::RejectedSample&) {
      out.rejected = true;
    }
  });

  std::vector<dataset::LabeledSequence> background(options.background_sequences);
  parallel_for(options.background_sequences, options.threads, [&](std::size_t i) {
    sim::Rng rng(derive_seed(options.seed, kBackgroundStream, i));
    const auto sample = sim::simulate_sample(GestureClass::Background, options.sample, config, rng);
    background[i].features = pipeline::extract_sequence(sample.frames, det, config);
    background[i].labels.assign(window, GestureClass::Background);
  });

  std::vector<std::size_t> usable;
  for (std::size_t k = 0; k < n_gestures; ++k) {
    if (!labelled[k].rejected) usable.push_back(k);
  }

  std::vector<dataset::LabeledSequence> augmented;
  std::vector<std::size_t> augmented_rejected;
  if (!usable.empty()) {
    augmented.resize(options.augmented_sequences);
    augmented_rejected.resize(options.augmented_sequences, 0);
    parallel_for(options.augmented_sequences, options.threads, [&](std::size_t i) {
      sim::Rng rng(derive_seed(options.seed, kAugmentStream, i));
      const auto frames = composition_background(window, options.sample.sigma_noise, config, rng);
      const std::size_t count = std::uniform_int_distribution<std::size_t>(options.augment.gestures_min,
                                                                            options.augment.gestures_max)(rng);
      std::vector<std::vector<RawFrame>> clip_frames;
      std::vector<GestureClass> clip_classes;
      std::size_t occupied = 0;
      for (std::size_t c = 0; c < count; ++c) {
        const std::size_t k = usable[std::uniform_int_distribution<std::size_t>(0, usable.size() - 1)(rng)];
        const auto gesture = class_from_index(k / options.gestures_per_class);
        auto clip = corpus_clip(gesture, k % options.gestures_per_class, labelled[k].label_start, options, config);
        const std::size_t need = clip.size() + (clip_frames.empty() ? 0 : options.augment.min_gap);
        if (occupied + need > window) break;
        occupied += need;
        clip_frames.push_back(std::move(clip));
        clip_classes.push_back(gesture);
      }
      std::vector<dataset::GestureClip> clips;
      for (std::size_t c = 0; c < clip_frames.size(); ++c) clips.push_back({clip_frames[c], clip_classes[c]});
      const auto composed = dataset::compose_sequence(frames, clips, options.augment, rng);
      const auto features = pipeline::extract_sequence(composed.frames, det, config);
      augmented[i] = dataset::label_composed(features, composed.spans, options.label, &augmented_rejected[i]);
    });
  }

  Corpus corpus;
  for (auto& l : labelled) {
    if (l.rejected) {
      ++corpus.rejected;
    } else {
      corpus.sequences.push_back(std::move(l.seq));
    }
  }
  for (auto& b : background) corpus.sequences.push_back(std::move(b));
  for (std::size_t i = 0; i < augmented.size(); ++i) {
    corpus.sequences.push_back(std::move(augmented[i]));
    corpus.rejected += augmented_rejected[i];
  }
  return corpus;
}

std::vector<TestSequence> build_test_set(const TestSetOptions& test, const CorpusOptions& corpus,
                                         const RadarConfig& config, const pipeline::DetectionConfig& det) {
  CorpusOptions held_out = corpus;
  held_out.seed = derive_seed(test.seed, kTestStream, 0);
  dataset::AugmentConfig augment = corpus.augment;
  augment.min_gap = test.min_gap;

  std::vector<TestSequence> out(test.sequences);
  parallel_for(test.sequences, corpus.threads, [&](std::size_t s) {
    sim::Rng rng(derive_seed(test.seed, kTestStream, s + 1));
    std::vector<std::vector<RawFrame>> clip_frames;
    std::vector<GestureClass> clip_classes;
    std::size_t occupied = 0;
    // Sample indices are disjoint across sequences.
    std::size_t index = s * test.gestures_per_sequence * 4;
    while (clip_frames.size() < test.gestures_per_sequence) {
      const auto gesture = class_from_index(std::uniform_int_distribution<std::size_t>(0, kNumGestures - 1)(rng));
      const auto sample = corpus_sample(gesture, index++, held_out, config);
      const auto features = pipeline::extract_sequence(sample.frames, det, config);
      std::size_t start = 0;
      try {
        start = dataset::refined_label_start(features, corpus.label);
      } catch (const dataset::RejectedSample&) {
        continue;
      }
      clip_frames.push_back(gesture_clip(sample.frames, start, corpus.clip_before, corpus.clip_after));
      clip_classes.push_back(gesture);
      occupied += clip_frames.back().size() + test.min_gap;
    }
    std::vector<dataset::GestureClip> clips;
    for (std::size_t k = 0; k < clip_frames.size(); ++k) clips.push_back({clip_frames[k], clip_classes[k]});

    const auto length = static_cast<std::size_t>(std::ceil(static_cast<double>(occupied) * test.length_factor));
    const auto background = composition_background(length, corpus.sample.sigma_noise, config, rng);
    const auto composed = dataset::compose_sequence(background, clips, augment, rng);
    auto& seq = out[s];
    seq.spans = composed.spans;
    const auto features = pipeline::extract_sequence(composed.frames, det, config);
    seq.labeled = dataset::label_composed(features, composed.spans, corpus.label, &seq.rejected);
  });
  return out;
}

std::vector<eval::ProbRow> stream_probabilities(const std::vector<FeatureVector>& features,
                                                const model::GruParams& params, const RadarConfig& config) {
  model::GruStream stream(params.cast<float>());
  std::vector<eval::ProbRow> probs;
  probs.reserve(features.size());
  for (const auto& f : features) {
    const auto p = stream.step(model::encode_features(f, config));
    eval::ProbRow row;
    for (std::size_t c = 0; c < kNumClasses; ++c) row[c] = p[c];
    probs.push_back(row);
  }
  return probs;
}

eval::EvalReport evaluate_sequences(const std::vector<TestSequence>& sequences, const model::GruParams& params,
                                    const eval::EvalConfig& cfg, const RadarConfig& config) {
  eval::EvalReport total;
  for (const auto& seq : sequences) {
    const auto probs = stream_probabilities(seq.labeled.features, params, config);
    const auto events = eval::extract_events(probs, cfg);
    const auto refs = eval::references_from_labels(seq.labeled.labels);
    total += eval::match_events(events, refs, cfg);
  }
  return total;
}

}  // namespace gesture::recipe
