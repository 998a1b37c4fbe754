#include <algorithm>
#include <random>

#include "doctest.h"
#include "gesture/eval.hpp"

using namespace gesture;
using namespace gesture::eval;

namespace {

std::vector<ProbRow> background_probs(std::size_t T) {
  std::vector<ProbRow> p(T);
  for (auto& r : p) r[class_index(GestureClass::Background)] = 1.0;
  return p;
}

}  // namespace

TEST_CASE("event extraction") {
  const EvalConfig cfg;
  CHECK(extract_events(background_probs(50), cfg).empty());

  auto p = background_probs(40);
  for (std::size_t t = 10; t <= 20; ++t) {
    p[t] = {};
    p[t][2] = 0.9;
    p[t][5] = 0.1;
  }
  const auto events = extract_events(p, cfg);
  REQUIRE(events.size() == 1);
  CHECK(events[0] == GestureEvent{10, GestureClass::SwipeUp});

  auto short_run = background_probs(40);
  short_run[5][0] = short_run[6][0] = 0.75;
  CHECK(extract_events(short_run, cfg).empty());

  // A dip splits the run into two events.
  auto split = background_probs(40);
  for (std::size_t t : {1u, 2u, 3u, 5u, 6u, 7u}) split[t][4] = 0.8;
  const auto two = extract_events(split, cfg);
  REQUIRE(two.size() == 2);
  CHECK(two[0].frame == 1);
  CHECK(two[1].frame == 5);

  auto exact = background_probs(10);
  for (std::size_t t = 0; t < 3; ++t) exact[t][1] = 0.7;
  CHECK(extract_events(exact, cfg).size() == 1);

  EvalConfig bad;
  bad.prob_threshold = 1.0;
  CHECK_THROWS_AS(extract_events(exact, bad), ValidationError);
}

TEST_CASE("references from a label track") {
  std::vector<GestureClass> labels(40, GestureClass::Background);
  for (std::size_t t = 5; t < 15; ++t) labels[t] = GestureClass::Push;
  for (std::size_t t = 15; t < 20; ++t) labels[t] = GestureClass::SwipeLeft;
  for (std::size_t t = 30; t < 40; ++t) labels[t] = GestureClass::Push;
  const auto refs = references_from_labels(labels);
  REQUIRE(refs.size() == 3);
  CHECK(refs[0].frame == 5);
  CHECK(refs[1].frame == 15);
  CHECK(refs[1].gesture == GestureClass::SwipeLeft);
  CHECK(refs[2].frame == 30);
}

TEST_CASE("matching inside the tolerance window") {
  const EvalConfig cfg;
  CHECK(cfg.window_frames() == std::pair<std::size_t, std::size_t>{5, 10});
  const std::vector<Reference> refs{{50, GestureClass::Push}};

  auto r = match_events(std::vector<GestureEvent>{{46, GestureClass::Push}}, refs, cfg);
  CHECK(r.true_positives() == 1);
  CHECK(r.false_positives() == 0);
  CHECK(r.false_negatives() == 0);

  r = match_events(std::vector<GestureEvent>{{45, GestureClass::Push}, {60, GestureClass::Push}}, refs, cfg);
  CHECK(r.true_positives() == 1);
  CHECK(r.false_positives() == 1);

  r = match_events(std::vector<GestureEvent>{{61, GestureClass::Push}}, refs, cfg);
  CHECK(r.true_positives() == 0);
  CHECK(r.false_positives() == 1);
  CHECK(r.false_negatives() == 1);
  CHECK(r.confusion[4][kMissColumn] == 1);
  CHECK(r.confusion[kFalsePositiveRow][4] == 1);

  // Wrong class inside the window is a confusion; same class is preferred.
  r = match_events(std::vector<GestureEvent>{{48, GestureClass::SwipeUp}}, refs, cfg);
  CHECK(r.confusion[4][2] == 1);
  CHECK(r.false_positives() == 1);
  CHECK(r.false_negatives() == 1);
  r = match_events(std::vector<GestureEvent>{{48, GestureClass::SwipeUp}, {52, GestureClass::Push}}, refs, cfg);
  CHECK(r.confusion[4][4] == 1);
  CHECK(r.confusion[kFalsePositiveRow][2] == 1);

  const std::vector<Reference> close{{50, GestureClass::Push}, {62, GestureClass::Push}};
  CHECK_THROWS_AS(match_events({}, close, cfg), ValidationError);
  const std::vector<Reference> bg{{50, GestureClass::Background}};
  CHECK_THROWS_AS(match_events({}, bg, cfg), ValidationError);
}

TEST_CASE("matching properties on random scenarios") {
  std::mt19937_64 rng(5);
  const EvalConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Reference> refs;
    for (std::size_t f = 10 + rng() % 10; f < 500; f += 20 + rng() % 20) refs.push_back({f, class_from_index(rng() % 5)});
    std::vector<GestureEvent> preds;
    const std::size_t n = rng() % 40;
    for (std::size_t i = 0; i < n; ++i) preds.push_back({rng() % 520, class_from_index(rng() % 5)});

    const auto r = match_events(preds, refs, cfg);
    std::size_t matched = 0, fp_row = 0, missed = 0;
    for (std::size_t a = 0; a < kNumGestures; ++a) {
      for (std::size_t b = 0; b < kNumGestures; ++b) matched += r.confusion[a][b];
      missed += r.confusion[a][kMissColumn];
    }
    for (std::size_t b = 0; b < kNumGestures; ++b) fp_row += r.confusion[kFalsePositiveRow][b];
    CHECK(matched + fp_row == preds.size());
    CHECK(matched + missed == refs.size());

    auto shuffled = preds;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(match_events(shuffled, refs, cfg) == r);

    EvalConfig narrow = cfg;
    narrow.window_before = 0.05;
    narrow.window_after = 0.1;
    CHECK(match_events(preds, refs, narrow).true_positives() <= r.true_positives());
  }
}

TEST_CASE("micro F1") {
  EvalReport r;
  r.confusion[0][0] = 98;
  r.confusion[kFalsePositiveRow][1] = 2;
  r.confusion[3][kMissColumn] = 1;
  CHECK(r.precision() == doctest::Approx(0.98));
  CHECK(r.recall() == doctest::Approx(98.0 / 99.0));
  CHECK(f1_score(r) == doctest::Approx(196.0 / 199.0));
  CHECK(f1_score(r) == doctest::Approx(0.9850).epsilon(1e-4));
  CHECK(f1_score(EvalReport{}) == 0.0);

  EvalReport perfect;
  perfect.confusion[2][2] = 7;
  CHECK(f1_score(perfect) == 1.0);

  EvalReport sum = r;
  sum += perfect;
  CHECK(sum.true_positives() == 105);
  CHECK(summary_line(perfect) == "precision=1.000000 recall=1.000000 f1=1.000000 tp=7 fp=0 fn=0");
  const auto csv = confusion_csv(r);
  CHECK(csv.rfind("reference,SwipeLeft,SwipeRight,SwipeUp,SwipeDown,Push,Missed\n", 0) == 0);
  CHECK(csv.find("SwipeLeft,98,0,0,0,0,0\n") != std::string::npos);
  CHECK(csv.find("Background,0,2,0,0,0,0\n") != std::string::npos);
}
