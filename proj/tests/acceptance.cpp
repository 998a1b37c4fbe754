// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gesture/dataset.hpp"
#include "gesture/eval.hpp"
#include "gesture/io.hpp"
#include "gesture/model.hpp"
#include "gesture/pipeline.hpp"
#include "gesture/recipe.hpp"
#include "gesture/sim.hpp"

namespace fs = std::filesystem;
using namespace gesture;
using Clock = std::chrono::steady_clock;

namespace {

const RadarConfig kRadar;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double deg(double rad) { return rad * 180.0 / kPi; }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. Parameter budget of the constructed network.
Outcome parameter_count() {
  const auto params = model::initialize(1);
  std::size_t recurrent = 0, dense = 0;
  for (const auto& t : model::kTensors) {
    (std::string(t.name).starts_with("gru.") ? recurrent : dense) += t.size();
  }
  const bool ok = recurrent == 1104 && dense == 102 && params.values.size() == 1206 &&
                  recurrent + dense == params.values.size() &&
                  model::serialize_params(params).size() > 1206 * sizeof(float);
  return {ok, fmt("recurrent=%zu dense=%zu total=%zu", recurrent, dense, params.values.size())};
}

// 2. Noiseless single targets are recovered by the feature pipeline.
Outcome physics_round_trip() {
  const auto d = derive_constants(kRadar);
  const auto det = pipeline::DetectionConfig::calibrated(kRadar, 0.1);
  sim::Rng rng(2024);
  std::uniform_real_distribution<double> range(2 * d.range_resolution, d.max_range - 2 * d.range_resolution);
  // Two bins clear of the Doppler edges and of the zero-Doppler bin, which
  // static-clutter removal cancels.
  std::uniform_real_distribution<double> speed(2 * d.velocity_resolution, d.max_velocity - 2 * d.velocity_resolution);
  std::uniform_real_distribution<double> angle(-40.0 * kPi / 180.0, 40.0 * kPi / 180.0);
  std::uniform_real_distribution<double> amplitude(0.6, 1.2);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  std::size_t ok = 0;
  double worst_r = 0, worst_v = 0, worst_a = 0;
  constexpr std::size_t kTrials = 200;
  for (std::size_t i = 0; i < kTrials; ++i) {
    const sim::PointTarget t{.range = range(rng),
                             .velocity = (rng() % 2 ? 1.0 : -1.0) * speed(rng),
                             .azimuth = angle(rng),
                             .elevation = angle(rng),
                             .amplitude = amplitude(rng),
                             .initial_phase = phase(rng)};
    const auto f = pipeline::extract_features(sim::synthesize_frame(std::span(&t, 1), kRadar, 0.0, rng), det, kRadar);
    const double er = std::abs(f.range - t.range);
    const double ev = std::abs(f.velocity - t.velocity);
    const double ea = std::max(std::abs(deg(f.azimuth - t.azimuth)), std::abs(deg(f.elevation - t.elevation)));
    worst_r = std::max(worst_r, er);
    worst_v = std::max(worst_v, ev);
    worst_a = std::max(worst_a, ea);
    if (er <= d.range_resolution / 2 && ev <= d.velocity_resolution / 2 && ea <= 2.0) ++ok;
  }
  return {ok == kTrials, fmt("%zu/%zu recovered; worst |dR|=%.2f mm (tol %.2f), |dv|=%.3f m/s (tol %.3f), "
                             "angle %.3f deg (tol 2)",
                             ok, kTrials, worst_r * 1e3, d.range_resolution / 2 * 1e3, worst_v,
                             d.velocity_resolution / 2, worst_a)};
}

// 3. Derived constants of the default front end.
Outcome derived_constants() {
  const auto d = derive_constants(kRadar);
  const double er = std::abs(d.range_resolution - 0.0375) / 0.0375;
  const double em = std::abs(d.max_range - 1.2) / 1.2;
  return {er <= 1e-3 && em <= 1e-3, fmt("range_resolution=%.4f mm (%.3f%%), max_range=%.5f m (%.3f%%)",
                                         d.range_resolution * 1e3, er * 100, d.max_range, em * 100)};
}

// 4. BPTT gradients against central finite differences.
Outcome gradient_check() {
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(100 + seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::normal_distribution<double> g;
    model::GruParams p;
    for (auto& v : p.values) v = u(rng);
    std::vector<model::InputRow> x(25);
    for (auto& row : x)
      for (auto& v : row) v = g(rng);
    std::vector<GestureClass> y(x.size());
    for (auto& l : y) l = class_from_index(rng() % kNumClasses);

    const auto analytic = model::backward(x, y, p).grad;
    for (int i = 0; i < 50; ++i) {
      const std::size_t k = rng() % model::kTotalParams;
      auto plus = p, minus = p;
      plus.values[k] += 1e-5;
      minus.values[k] -= 1e-5;
      const double numeric = (model::sequence_loss(model::forward<double>(x, plus).probs, y) -
                              model::sequence_loss(model::forward<double>(x, minus).probs, y)) /
                             2e-5;
      const double a = analytic.values[k];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
      ++checked;
    }
  }
  return {worst <= 1e-4, fmt("max relative error %.2e over %zu parameters x 5 seeds (tol 1e-4)", worst, checked / 5)};
}

// 5. Detection picks the closer of two peaks regardless of their amplitudes.
Outcome closest_target() {
  pipeline::DetectionConfig det;
  det.detection_threshold = 10.0;
  const std::size_t bins = kRadar.range_bins();
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> floor(0.0, 1.0);
  std::uniform_real_distribution<double> log_amp(std::log(30.0), std::log(30000.0));
  std::size_t ok = 0, two_peaks = 0;
  constexpr std::size_t kTrials = 1000;
  for (std::size_t i = 0; i < kTrials; ++i) {
    // Peaks at least 7 bins apart: the ±3σ smoothing kernels never overlap.
    const std::size_t a = std::uniform_int_distribution<std::size_t>(0, bins - 8)(rng);
    const std::size_t b = std::uniform_int_distribution<std::size_t>(a + 7, bins - 1)(rng);
    pipeline::RangeProfile profile(bins);
    for (auto& v : profile) v = floor(rng);
    profile[a] += std::exp(log_amp(rng));
    profile[b] += std::exp(log_amp(rng));

    const auto smoothed = pipeline::gaussian_smooth(profile, det.gaussian_sigma);
    std::size_t above = 0;
    for (auto m : pipeline::local_maxima(smoothed)) above += smoothed[m] >= det.detection_threshold;
    two_peaks += above == 2;
    const auto hit = pipeline::detect_target(profile, det, kRadar);
    ok += hit.above_threshold && hit.range_bin == a;
  }
  return {ok == kTrials && two_peaks == kTrials,
          fmt("%zu/%zu closest peak selected (%zu with exactly two peaks above threshold)", ok, kTrials, two_peaks)};
}

// 7. Composition invariants on random backgrounds and clips.
Outcome augmentation_invariants() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<float> sample(-1.0f, 1.0f);
  auto random_frames = [&](std::size_t n) {
    std::vector<RawFrame> frames(n, RawFrame(2, 2, 4));
    for (auto& f : frames)
      for (auto& v : f.data()) v = sample(rng);
    return frames;
  };
  std::size_t overlaps = 0, gap_violations = 0, changed_outside = 0, endpoint_jumps = 0, spans_total = 0;
  constexpr std::size_t kTrials = 500;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    dataset::AugmentConfig cfg;
    cfg.min_gap = std::uniform_int_distribution<std::size_t>(0, 12)(rng);
    cfg.tukey_alpha = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    cfg.mode = rng() % 2 ? dataset::MixMode::Crossfade : dataset::MixMode::Additive;
    const std::size_t count = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    std::vector<std::vector<RawFrame>> storage;
    std::vector<dataset::GestureClip> clips;
    std::size_t occupied = 0;
    for (std::size_t k = 0; k < count; ++k) {
      storage.push_back(random_frames(std::uniform_int_distribution<std::size_t>(3, 40)(rng)));
      occupied += storage.back().size();
    }
    for (std::size_t k = 0; k < count; ++k) clips.push_back({storage[k], class_from_index(k % kNumGestures)});
    occupied += (count - 1) * cfg.min_gap;
    const auto background = random_frames(occupied + std::uniform_int_distribution<std::size_t>(0, 60)(rng));

    dataset::Rng mix_rng(trial);
    const auto out = dataset::compose_sequence(background, clips, cfg, mix_rng);
    std::vector<bool> inside(background.size(), false);
    for (std::size_t i = 0; i < out.spans.size(); ++i) {
      const auto& s = out.spans[i];
      ++spans_total;
      if (i > 0) {
        if (s.start < out.spans[i - 1].end()) ++overlaps;
        else if (s.start - out.spans[i - 1].end() < cfg.min_gap) ++gap_violations;
      }
      for (std::size_t t = s.start; t < s.end() && t < inside.size(); ++t) inside[t] = true;
      // Zero blend weight at both ends: the boundary frames are the background.
      if (out.frames[s.start] != background[s.start] || out.frames[s.end() - 1] != background[s.end() - 1]) {
        ++endpoint_jumps;
      }
    }
    for (std::size_t t = 0; t < background.size(); ++t) {
      if (!inside[t] && out.frames[t] != background[t]) ++changed_outside;
    }
  }
  const auto w = dataset::tukey_window(25, 0.5);
  const bool window_ok = w.front() == 0.0 && w.back() == 0.0;
  return {overlaps == 0 && gap_violations == 0 && changed_outside == 0 && endpoint_jumps == 0 && window_ok,
          fmt("%zu compositions, %zu spans: overlaps=%zu gap_violations=%zu frames_changed_outside=%zu "
              "endpoint_discontinuities=%zu",
              kTrials, spans_total, overlaps, gap_violations, changed_outside, endpoint_jumps)};
}

// 8. Refined label start against the simulator's ground truth.
Outcome label_refinement() {
  const auto d = derive_constants(kRadar);
  const auto det = pipeline::DetectionConfig::calibrated(kRadar, 0.1);
  const dataset::LabelConfig label;
  std::size_t exact = 0, near = 0, total = 0, rejected = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto gesture = class_from_index(i % kNumGestures);
    sim::Rng rng(recipe::derive_seed(8, 1, i));
    const auto rec = sim::simulate_sample(gesture, {}, kRadar, rng);
    const auto features = pipeline::extract_sequence(rec.frames, det, kRadar);
    std::size_t truth = features.size();
    long best = 0;
    for (std::size_t t = 0; t < features.size(); ++t) {
      const auto& a = rec.annotations[t];
      if (!a.hand_present) continue;
      // The gate applies to the hand's own echo: render it alone, noiseless.
      const auto hand = sim::synthesize_frame(std::span(&a.state, 1), kRadar, 0.0, rng);
      if (pipeline::extract_features(hand, det, kRadar).magnitude < label.amplitude_threshold) continue;
      const long bin = std::lround(a.state.range / d.range_resolution);
      if (truth == features.size() || bin < best) {
        best = bin;
        truth = t;
      }
    }
    std::size_t refined = 0;
    try {
      refined = dataset::refined_label_start(features, label);
    } catch (const dataset::RejectedSample&) {
      ++rejected;
      continue;
    }
    if (truth == features.size()) {
      ++rejected;
      continue;
    }
    ++total;
    const std::size_t diff = refined > truth ? refined - truth : truth - refined;
    exact += diff == 0;
    near += diff <= 1;
  }
  const double rate = total ? static_cast<double>(exact) / static_cast<double>(total) : 0.0;
  return {total == 100 && rate >= 0.95 && near == total,
          fmt("exact %zu/%zu (%.1f%%, need 95%%), within one frame %zu/%zu, unusable %zu", exact, total, rate * 100,
              near, total, rejected)};
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" GESTURE_CLI "' -q " + args + " >>cli.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 9. Repeated CLI runs are bit-identical.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("gesture_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string detail;
  bool ok = true;
  auto step = [&](const std::string& args) {
    const int code = run_cli(dir, args);
    if (code != 0) {
      ok = false;
      detail += "'" + args + "' exited " + std::to_string(code) + "; ";
    }
    return code == 0;
  };
  auto same = [&](const std::string& a, const std::string& b, const char* what) {
    const auto ha = fnv1a(io::read_file(dir / a));
    const auto hb = fnv1a(io::read_file(dir / b));
    if (ha != hb) ok = false;
    detail += fmt("%s %016llx %s; ", what, static_cast<unsigned long long>(ha), ha == hb ? "==" : "!=");
  };
  try {
    std::string sims, feats, labels;
    for (const char* cls : {"push", "swipe_left", "swipe_up"}) {
      step(std::string("--seed 5 --out s1 simulate --count 3 --class ") + cls);
      step(std::string("--seed 5 --out s2 simulate --count 3 --class ") + cls);
    }
    step("--seed 5 --out s1 simulate --background --count 2");
    step("--seed 5 --out s2 simulate --background --count 2");
    if (ok) {
      same("s1/push_0.rfr", "s2/push_0.rfr", "simulate push_0");
      same("s1/swipe_up_2.rfr", "s2/swipe_up_2.rfr", "simulate swipe_up_2");
      same("s1/background_1.rfr", "s2/background_1.rfr", "simulate background_1");
      for (const auto& e : fs::directory_iterator(dir / "s1")) {
        if (e.path().extension() == ".rfr") feats += " s1/" + e.path().filename().string();
      }
      step("--out f extract" + feats);
      for (const char* cls : {"push", "swipe_left", "swipe_up", "background"}) {
        std::string files;
        for (int i = 0; i < 3; ++i) {
          const auto p = dir / "f" / (std::string(cls) + "_" + std::to_string(i) + ".features.csv");
          if (fs::exists(p)) files += " f/" + p.filename().string();
        }
        step("--out l refine --class " + std::string(cls) + files);
      }
      for (const auto& e : fs::directory_iterator(dir / "l")) {
        if (e.path().extension() == ".lfs") labels += " l/" + e.path().filename().string();
      }
      step("--seed 11 --out t1 train --epochs 3 --batch 4" + labels);
      step("--seed 11 --out t2 train --epochs 3 --batch 4" + labels);
      if (ok) same("t1/model.grw", "t2/model.grw", "train model.grw");
    }
  } catch (const std::exception& e) {
    ok = false;
    detail += e.what();
  }
  fs::remove_all(dir);
  return {ok, detail};
}

// 10. Per-frame extraction time and transform structure.
Outcome performance() {
  const auto det = pipeline::DetectionConfig::calibrated(kRadar, 0.1);
  sim::Rng rng(10);
  std::vector<RawFrame> frames;
  for (int i = 0; i < 500; ++i) {
    const sim::PointTarget t{.range = 0.3 + 0.001 * i, .velocity = 1.0, .azimuth = 0.2, .elevation = -0.1};
    frames.push_back(sim::synthesize_frame(std::span(&t, 1), kRadar, 0.1, rng));
  }
  for (int i = 0; i < 20; ++i) pipeline::extract_features(frames[i], det, kRadar);
  std::vector<double> micros;
  double sink = 0;
  for (const auto& f : frames) {
    const auto t0 = Clock::now();
    sink += pipeline::extract_features(f, det, kRadar).range;
    micros.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
  }
  std::sort(micros.begin(), micros.end());
  const double median = micros[micros.size() / 2];
  const auto stats = pipeline::analyze_frame(frames[0], det, kRadar).stats;
  // A range-Doppler map would need a slow-time transform for every range bin.
  const std::size_t rdm_transforms = kRadar.num_rx * kRadar.range_bins();
  const bool structural = stats.slow_time_ffts == kRadar.num_rx && stats.slow_time_ffts < rdm_transforms &&
                          stats.fast_time_ffts == kRadar.num_rx * kRadar.num_chirps;
  return {median < 1000.0 && structural && std::isfinite(sink),
          fmt("median %.1f us (limit 1000); slow-time FFTs %zu (one range bin per channel; a range-Doppler map "
              "needs %zu)",
              median, stats.slow_time_ffts, rdm_transforms)};
}

// 6. Train on the synthetic corpus and score on held-out composed sequences.
Outcome end_to_end() {
  recipe::CorpusOptions corpus;  // 300 per class, 60 background, seed 1
  const auto det = pipeline::DetectionConfig::calibrated(kRadar, corpus.sample.sigma_noise);
  const auto t0 = Clock::now();
  const auto data = recipe::build_corpus(corpus, kRadar, det);
  std::vector<GestureClass> classes;
  for (const auto& s : data.sequences) classes.push_back(s.sequence_class());
  const auto split = dataset::split_train_val(classes, {3, 1}, corpus.seed);
  std::vector<model::EncodedSequence> train_set, val_set;
  for (auto i : split.train) train_set.push_back(model::encode_sequence(data.sequences[i], kRadar));
  for (auto i : split.val) val_set.push_back(model::encode_sequence(data.sequences[i], kRadar));

  model::TrainConfig cfg;
  cfg.epochs = 40;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 32;
  cfg.seed = corpus.seed;
  const auto result = model::train(train_set, val_set, cfg);

  const auto test = recipe::build_test_set({}, corpus, kRadar, det);
  std::size_t gestures = 0;
  for (const auto& s : test) gestures += eval::references_from_labels(s.labeled.labels).size();
  const auto report = recipe::evaluate_sequences(test, result.params, eval::EvalConfig{}, kRadar);
  const double f1 = eval::f1_score(report);
  const double elapsed = seconds_since(t0);
  return {f1 >= 0.90 && elapsed < 600.0,
          fmt("F1=%.4f (need >= 0.90) precision=%.4f recall=%.4f on %zu sequences / %zu gestures; "
              "%zu train + %zu val windows, best val accuracy %.4f at epoch %zu; %.0f s (limit 600)",
              f1, report.precision(), report.recall(), test.size(), gestures, train_set.size(), val_set.size(),
              result.best_val_accuracy, result.best_epoch, elapsed)};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number, e.g. "acceptance 2 8".
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::pair<const char*, std::function<Outcome()>>>> criteria = {
      {1, {"parameter count 1104 + 102 = 1206", parameter_count}},
      {2, {"physics round trip on 200 noiseless targets", physics_round_trip}},
      {3, {"derived constants", derived_constants}},
      {4, {"BPTT gradient vs finite differences", gradient_check}},
      {5, {"closest-target detection", closest_target}},
      {6, {"end-to-end event F1 on synthetic data", end_to_end}},
      {7, {"augmentation invariants", augmentation_invariants}},
      {8, {"label refinement vs ground truth", label_refinement}},
      {9, {"determinism of simulate and train", determinism}},
      {10, {"per-frame extraction cost", performance}},
  };
  int failures = 0;
  for (const auto& [id, c] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %2d  %-45s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, c.first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
