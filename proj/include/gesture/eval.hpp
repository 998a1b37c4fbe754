#pragma once

// Event-level scoring: per-frame class probabilities become discrete gesture
// events, which are matched against reference labels inside a tolerance
// window around each label start.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gesture/core.hpp"

namespace gesture::eval {

struct EvalConfig {
  double prob_threshold = 0.7;
  std::size_t debounce = 3;     // consecutive frames at or above threshold
  double window_before = 0.150;  // s
  double window_after = 0.300;   // s
  double frame_rate = 33.3;

  void validate() const;
  /// (frames before, frames after) = (round(before·rate), round(after·rate)).
  std::pair<std::size_t, std::size_t> window_frames() const;
};

struct GestureEvent {
  std::size_t frame = 0;
  GestureClass gesture = GestureClass::Push;
  bool operator==(const GestureEvent&) const = default;
};

using ProbRow = std::array<double, kNumClasses>;

/// A class fires once per run of >= debounce frames at or above the
/// threshold; the event sits on the first frame of the run.
std::vector<GestureEvent> extract_events(std::span<const ProbRow> probs, const EvalConfig& cfg);

/// Reference gesture: label start frame and class.
struct Reference {
  std::size_t frame = 0;
  GestureClass gesture = GestureClass::Push;
};

/// Reference starts of every non-Background run in a label track.
std::vector<Reference> references_from_labels(std::span<const GestureClass> labels);

inline constexpr std::size_t kMissColumn = kNumGestures;      // column index for "missed"
inline constexpr std::size_t kFalsePositiveRow = kNumGestures;  // row index for background

struct EvalReport {
  // rows: reference gesture 0..4, row 5 = background (false positives)
  // cols: predicted gesture 0..4, col 5 = missed (false negatives)
  std::array<std::array<std::size_t, kNumGestures + 1>, kNumGestures + 1> confusion{};
  std::size_t num_predictions = 0;
  std::size_t num_references = 0;

  std::size_t true_positives() const;
  std::size_t false_positives() const;  // wrong-class and background predictions
  std::size_t false_negatives() const;  // wrong-class and missed references
  double precision() const;
  double recall() const;

  EvalReport& operator+=(const EvalReport& other);
  bool operator==(const EvalReport&) const = default;
};

/// Greedy one-to-one matching inside [start − before, start + after]. A
/// reference takes its earliest same-class prediction inside the window, or
/// else its earliest prediction of any class (a confusion). Remaining
/// predictions are false positives.
EvalReport match_events(std::span<const GestureEvent> predictions, std::span<const Reference> references,
                        const EvalConfig& cfg);

/// Micro-averaged F1 over the gesture classes; 0 when undefined.
double f1_score(const EvalReport& report);

std::string confusion_csv(const EvalReport& report);
/// "precision=... recall=... f1=... tp=... fp=... fn=..."
std::string summary_line(const EvalReport& report);

}  // namespace gesture::eval
