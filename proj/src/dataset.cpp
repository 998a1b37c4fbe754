#include "gesture/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gesture::dataset {

void LabeledSequence::validate() const {
  if (features.size() != labels.size()) {
    throw ValidationError("labeled sequence: " + std::to_string(features.size()) + " feature rows but " +
                          std::to_string(labels.size()) + " labels");
  }
  for (auto l : labels) {
    if (class_index(l) >= kNumClasses) throw ValidationError("labeled sequence: invalid class value");
  }
}

GestureClass LabeledSequence::sequence_class() const {
  for (auto l : labels) {
    if (l != GestureClass::Background) return l;
  }
  return GestureClass::Background;
}

void LabelConfig::validate() const {
  if (label_len < 1) throw ValidationError("label config: label_len must be >= 1");
  if (!(amplitude_threshold >= 0.0)) throw ValidationError("label config: amplitude_threshold must be >= 0");
}

std::size_t refined_label_start(std::span<const FeatureVector> features, const LabelConfig& cfg) {
  cfg.validate();
  std::size_t best = features.size();
  for (std::size_t t = 0; t < features.size(); ++t) {
    if (features[t].magnitude < cfg.amplitude_threshold) continue;
    if (best == features.size() || features[t].range < features[best].range) best = t;
  }
  if (best == features.size()) throw RejectedSample("no confident gesture frame above the amplitude threshold");
  return best;
}

std::vector<GestureClass> refine_label(std::span<const FeatureVector> features, GestureClass gesture,
                                       const LabelConfig& cfg) {
  cfg.validate();
  if (gesture == GestureClass::Background) throw ValidationError("refine_label: Background has no gesture label");
  if (features.size() < cfg.label_len) {
    throw ValidationError("refine_label: sequence shorter than the label length");
  }
  const std::size_t start = refined_label_start(features, cfg);
  std::vector<GestureClass> labels(features.size(), GestureClass::Background);
  const std::size_t stop = std::min(features.size(), start + cfg.label_len);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(start), labels.begin() + static_cast<std::ptrdiff_t>(stop),
            gesture);
  return labels;
}

std::vector<double> tukey_window(std::size_t n, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("tukey_window: alpha must lie in [0, 1]");
  std::vector<double> w(n, 1.0);
  if (n < 2 || alpha == 0.0) return w;
  const double span = alpha * static_cast<double>(n - 1) / 2.0;
  const auto width = static_cast<std::size_t>(std::floor(span));
  for (std::size_t k = 0; k <= width && k < n; ++k) {
    const double v = 0.5 * (1.0 + std::cos(kPi * (-1.0 + static_cast<double>(k) / span)));
    w[k] = v;
    w[n - 1 - k] = v;
  }
  return w;
}

void AugmentConfig::validate() const {
  if (!(tukey_alpha >= 0.0 && tukey_alpha <= 1.0)) throw ValidationError("augment config: tukey_alpha outside [0, 1]");
  if (gestures_max < gestures_min) throw ValidationError("augment config: gestures_max < gestures_min");
}

namespace {

void blend_into(std::vector<RawFrame>& frames, std::span<const RawFrame> gesture, std::size_t position,
                const AugmentConfig& cfg) {
  const auto w = tukey_window(gesture.size(), cfg.tukey_alpha);
  for (std::size_t k = 0; k < gesture.size(); ++k) {
    auto& dst = frames[position + k].data();
    const auto& g = gesture[k].data();
    if (g.size() != dst.size()) throw ValidationError("inject_gesture: frame shapes differ");
    const double wk = w[k];
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const double b = dst[i];
      const double mixed = cfg.mode == MixMode::Crossfade ? (1.0 - wk) * b + wk * g[i] : b + wk * g[i];
      dst[i] = static_cast<float>(mixed);
    }
  }
}

}  // namespace

std::vector<RawFrame> inject_gesture(std::span<const RawFrame> background, std::span<const RawFrame> gesture,
                                     std::size_t position, const AugmentConfig& cfg) {
  cfg.validate();
  if (position + gesture.size() > background.size()) {
    throw ValidationError("inject_gesture: span [" + std::to_string(position) + ", " +
                          std::to_string(position + gesture.size()) + ") exceeds the " +
                          std::to_string(background.size()) + "-frame background");
  }
  std::vector<RawFrame> out(background.begin(), background.end());
  blend_into(out, gesture, position, cfg);
  return out;
}

ComposedSequence compose_sequence(std::span<const RawFrame> background, std::span<const GestureClip> clips,
                                  const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  std::size_t occupied = 0;
  for (const auto& c : clips) occupied += c.frames.size();
  if (!clips.empty()) occupied += (clips.size() - 1) * cfg.min_gap;
  if (occupied > background.size()) {
    throw ValidationError("compose_sequence: " + std::to_string(clips.size()) + " gestures need " +
                          std::to_string(occupied) + " frames but the background has " +
                          std::to_string(background.size()) + " (overflow " +
                          std::to_string(occupied - background.size()) + ")");
  }

  std::vector<std::size_t> order(clips.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  // Distribute the free frames over the clips.size() + 1 gaps.
  const std::size_t slack = background.size() - occupied;
  std::vector<std::size_t> cuts(clips.size());
  std::uniform_int_distribution<std::size_t> pick(0, slack);
  for (auto& c : cuts) c = pick(rng);
  std::sort(cuts.begin(), cuts.end());

  ComposedSequence out;
  out.frames.assign(background.begin(), background.end());
  std::size_t cursor = 0;
  std::size_t prev_cut = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    cursor += cuts[i] - prev_cut;
    prev_cut = cuts[i];
    const auto& clip = clips[order[i]];
    blend_into(out.frames, clip.frames, cursor, cfg);
    out.spans.push_back(InjectedSpan{cursor, clip.frames.size(), clip.gesture, order[i]});
    cursor += clip.frames.size() + cfg.min_gap;
  }
  return out;
}

LabeledSequence label_composed(std::span<const FeatureVector> features, std::span<const InjectedSpan> spans,
                               const LabelConfig& cfg, std::size_t* rejected) {
  LabeledSequence seq;
  seq.features.assign(features.begin(), features.end());
  seq.labels.assign(features.size(), GestureClass::Background);
  std::size_t skipped = 0;
  for (const auto& span : spans) {
    if (span.end() > features.size()) throw ValidationError("label_composed: span exceeds the sequence");
    if (span.gesture == GestureClass::Background) continue;
    try {
      const auto local = features.subspan(span.start, span.length);
      const std::size_t start = span.start + refined_label_start(local, cfg);
      const std::size_t stop = std::min(span.end(), start + cfg.label_len);
      std::fill(seq.labels.begin() + static_cast<std::ptrdiff_t>(start),
                seq.labels.begin() + static_cast<std::ptrdiff_t>(stop), span.gesture);
    } catch (const RejectedSample&) {
      ++skipped;
    }
  }
  if (rejected) *rejected = skipped;
  return seq;
}

std::vector<LabeledSequence> split_windows(const LabeledSequence& seq, std::size_t window) {
  seq.validate();
  if (window == 0) throw ValidationError("split_windows: window must be >= 1");
  std::vector<LabeledSequence> out;
  for (std::size_t start = 0; start + window <= seq.size(); start += window) {
    LabeledSequence w;
    w.features.assign(seq.features.begin() + static_cast<std::ptrdiff_t>(start),
                      seq.features.begin() + static_cast<std::ptrdiff_t>(start + window));
    w.labels.assign(seq.labels.begin() + static_cast<std::ptrdiff_t>(start),
                    seq.labels.begin() + static_cast<std::ptrdiff_t>(start + window));
    out.push_back(std::move(w));
  }
  return out;
}

SplitIndices split_train_val(std::span<const GestureClass> classes, SplitRatio ratio, std::uint64_t seed,
                             bool stratified) {
  if (classes.empty()) throw ValidationError("split_train_val: no sequences to split");
  if (ratio.train + ratio.val == 0 || ratio.val == 0) throw ValidationError("split_train_val: invalid ratio");
  const std::size_t n = classes.size();
  const std::size_t parts = ratio.train + ratio.val;
  const std::size_t total_val = std::max<std::size_t>(1, n * ratio.val / parts);

  Rng rng(seed);
  std::vector<char> is_val(n, 0);
  if (!stratified) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < total_val; ++i) is_val[perm[i]] = 1;
  } else {
    std::vector<std::vector<std::size_t>> members(kNumClasses);
    for (std::size_t i = 0; i < n; ++i) members[class_index(classes[i])].push_back(i);
    std::vector<std::size_t> quota(kNumClasses, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double exact = static_cast<double>(members[c].size() * total_val) / static_cast<double>(n);
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[c];
      remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [frac, c] : remainders) {
      if (assigned >= total_val) break;
      if (quota[c] < members[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      std::shuffle(members[c].begin(), members[c].end(), rng);
      for (std::size_t i = 0; i < quota[c]; ++i) is_val[members[c][i]] = 1;
    }
  }
  SplitIndices out;
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? out.val : out.train).push_back(i);
  return out;
}

}  // namespace gesture::dataset
