#include "gesture/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gesture::eval {

void EvalConfig::validate() const {
  if (!(prob_threshold > 0.0 && prob_threshold < 1.0)) throw ValidationError("eval config: prob_threshold outside (0, 1)");
  if (!(window_before >= 0.0) || !(window_after >= 0.0)) throw ValidationError("eval config: windows must be >= 0");
  if (!(frame_rate > 0.0)) throw ValidationError("eval config: frame_rate must be positive");
  if (debounce == 0) throw ValidationError("eval config: debounce must be >= 1");
}

std::pair<std::size_t, std::size_t> EvalConfig::window_frames() const {
  return {static_cast<std::size_t>(std::lround(window_before * frame_rate)),
          static_cast<std::size_t>(std::lround(window_after * frame_rate))};
}

std::vector<GestureEvent> extract_events(std::span<const ProbRow> probs, const EvalConfig& cfg) {
  cfg.validate();
  std::vector<GestureEvent> events;
  for (std::size_t c = 0; c < kNumGestures; ++c) {
    std::size_t run = 0;
    for (std::size_t t = 0; t < probs.size(); ++t) {
      if (probs[t][c] >= cfg.prob_threshold) {
        ++run;
        if (run == cfg.debounce) events.push_back({t + 1 - run, class_from_index(c)});
      } else {
        run = 0;
      }
    }
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.frame != b.frame ? a.frame < b.frame : class_index(a.gesture) < class_index(b.gesture);
  });
  return events;
}

std::vector<Reference> references_from_labels(std::span<const GestureClass> labels) {
  std::vector<Reference> refs;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == GestureClass::Background) continue;
    if (t == 0 || labels[t - 1] != labels[t]) refs.push_back({t, labels[t]});
  }
  return refs;
}

std::size_t EvalReport::true_positives() const {
  std::size_t tp = 0;
  for (std::size_t c = 0; c < kNumGestures; ++c) tp += confusion[c][c];
  return tp;
}

std::size_t EvalReport::false_positives() const {
  std::size_t fp = 0;
  for (std::size_t r = 0; r <= kNumGestures; ++r) {
    for (std::size_t c = 0; c < kNumGestures; ++c) {
      if (r != c) fp += confusion[r][c];
    }
  }
  return fp;
}

std::size_t EvalReport::false_negatives() const {
  std::size_t fn = 0;
  for (std::size_t r = 0; r < kNumGestures; ++r) {
    for (std::size_t c = 0; c <= kNumGestures; ++c) {
      if (r != c) fn += confusion[r][c];
    }
  }
  return fn;
}

double EvalReport::precision() const {
  const auto tp = true_positives(), fp = false_positives();
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double EvalReport::recall() const {
  const auto tp = true_positives(), fn = false_negatives();
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

EvalReport& EvalReport::operator+=(const EvalReport& other) {
  for (std::size_t r = 0; r <= kNumGestures; ++r) {
    for (std::size_t c = 0; c <= kNumGestures; ++c) confusion[r][c] += other.confusion[r][c];
  }
  num_predictions += other.num_predictions;
  num_references += other.num_references;
  return *this;
}

EvalReport match_events(std::span<const GestureEvent> predictions, std::span<const Reference> references,
                        const EvalConfig& cfg) {
  cfg.validate();
  const auto [before, after] = cfg.window_frames();

  std::vector<GestureEvent> preds(predictions.begin(), predictions.end());
  std::stable_sort(preds.begin(), preds.end(), [](const auto& a, const auto& b) {
    return a.frame != b.frame ? a.frame < b.frame : class_index(a.gesture) < class_index(b.gesture);
  });
  std::vector<Reference> refs(references.begin(), references.end());
  std::stable_sort(refs.begin(), refs.end(), [](const auto& a, const auto& b) { return a.frame < b.frame; });

  auto lo = [&](const Reference& r) { return r.frame >= before ? r.frame - before : 0; };
  auto hi = [&](const Reference& r) { return r.frame + after; };
  for (std::size_t i = 1; i < refs.size(); ++i) {
    if (lo(refs[i]) <= hi(refs[i - 1])) {
      throw ValidationError("match_events: reference windows at frames " + std::to_string(refs[i - 1].frame) +
                            " and " + std::to_string(refs[i].frame) + " overlap");
    }
  }

  EvalReport report;
  report.num_predictions = preds.size();
  report.num_references = refs.size();
  std::vector<char> used(preds.size(), 0);
  std::size_t cursor = 0;
  for (const auto& ref : refs) {
    if (ref.gesture == GestureClass::Background) throw ValidationError("match_events: Background reference");
    while (cursor < preds.size() && preds[cursor].frame < lo(ref)) ++cursor;
    std::size_t same = preds.size(), any = preds.size();
    for (std::size_t k = cursor; k < preds.size() && preds[k].frame <= hi(ref); ++k) {
      if (any == preds.size()) any = k;
      if (preds[k].gesture == ref.gesture) {
        same = k;
        break;
      }
    }
    const std::size_t row = class_index(ref.gesture);
    const std::size_t pick = same != preds.size() ? same : any;
    if (pick == preds.size()) {
      ++report.confusion[row][kMissColumn];
    } else {
      used[pick] = 1;
      ++report.confusion[row][class_index(preds[pick].gesture)];
    }
  }
  for (std::size_t k = 0; k < preds.size(); ++k) {
    if (!used[k]) ++report.confusion[kFalsePositiveRow][class_index(preds[k].gesture)];
  }
  return report;
}

double f1_score(const EvalReport& report) {
  const double p = report.precision(), r = report.recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::string confusion_csv(const EvalReport& report) {
  std::ostringstream os;
  os << "reference";
  for (std::size_t c = 0; c < kNumGestures; ++c) os << ',' << class_name(class_from_index(c));
  os << ",Missed\n";
  for (std::size_t r = 0; r <= kNumGestures; ++r) {
    os << class_name(class_from_index(r));
    for (std::size_t c = 0; c <= kNumGestures; ++c) os << ',' << report.confusion[r][c];
    os << '\n';
  }
  return os.str();
}

std::string summary_line(const EvalReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "precision=%.6f recall=%.6f f1=%.6f tp=%zu fp=%zu fn=%zu", report.precision(),
                report.recall(), f1_score(report), report.true_positives(), report.false_positives(),
                report.false_negatives());
  return buf;
}

}  // namespace gesture::eval
