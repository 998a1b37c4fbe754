#include <atomic>
#include <stdexcept>

#include "doctest.h"
#include "gesture/recipe.hpp"

using namespace gesture;
using namespace gesture::recipe;

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("parallel_for covers every index once") {
  for (std::size_t threads : {0u, 1u, 4u}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(50, 4,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, 3, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("clips render only the frames they need") {
  const RadarConfig config;
  CorpusOptions opt;
  const auto full = corpus_sample(GestureClass::SwipeDown, 5, opt, config);
  REQUIRE(full.frames.size() == 100);
  for (std::size_t start : {40u, 10u, 90u}) {
    const auto clip = corpus_clip(GestureClass::SwipeDown, 5, start, opt, config);
    CHECK(clip == gesture_clip(full.frames, start, opt.clip_before, opt.clip_after));
  }
  CHECK(gesture_clip(full.frames, 40, 22, 22).size() == 44);
  CHECK(gesture_clip(full.frames, 10, 22, 22).size() == 32);
  CHECK(gesture_clip(full.frames, 90, 22, 22).size() == 32);
}

TEST_CASE("a small corpus is deterministic and independent of the worker count") {
  const RadarConfig config;
  const auto det = pipeline::DetectionConfig::calibrated(config, 0.1);
  CorpusOptions opt;
  opt.gestures_per_class = 2;
  opt.background_sequences = 2;
  opt.augmented_sequences = 3;
  opt.threads = 1;
  const auto a = build_corpus(opt, config, det);
  opt.threads = 4;
  const auto b = build_corpus(opt, config, det);
  REQUIRE(a.sequences.size() == b.sequences.size());
  CHECK(a.rejected == b.rejected);
  CHECK(a.sequences.size() >= 5);
  CHECK(a.sequences.size() <= 15);
  for (std::size_t i = 0; i < a.sequences.size(); ++i) {
    CHECK(a.sequences[i] == b.sequences[i]);
    CHECK(a.sequences[i].size() == 100);
  }
}
