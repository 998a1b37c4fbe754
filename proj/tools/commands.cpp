#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <random>

#include "gesture/io.hpp"
#include "gesture/pipeline.hpp"
#include "gesture/recipe.hpp"
#include "gesture/sim.hpp"
#include "json.hpp"

#ifndef GESTURE_VERSION
#define GESTURE_VERSION "dev"
#endif

namespace gesture::cli {

namespace {

using nlohmann::ordered_json;

// Seed streams; the corpus recipe uses the same layout.
constexpr std::uint64_t kSampleStream = 16;
constexpr std::uint64_t kAugmentStream = 3;
constexpr std::uint64_t kBenchStream = 5;

ordered_json radar_json(const RadarConfig& c) {
  return {{"f_low", c.f_low},
          {"f_high", c.f_high},
          {"num_samples", c.num_samples},
          {"num_chirps", c.num_chirps},
          {"num_rx", c.num_rx},
          {"adc_rate", c.adc_rate},
          {"t_prt", c.t_prt},
          {"frame_rate", c.frame_rate},
          {"antenna_spacing_wavelengths", c.antenna_spacing_wavelengths}};
}

std::vector<std::string> path_strings(const std::vector<fs::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

/// Run record written next to the outputs of every subcommand.
class RunManifest {
 public:
  RunManifest(const Context& ctx, std::string subcommand) : ctx_(ctx), name_(std::move(subcommand)) {}

  ordered_json& parameters() { return parameters_; }
  void input(const fs::path& p) { inputs_.push_back(p); }
  void output(const fs::path& p) { outputs_.push_back(p); }

  void write(const std::string& file_stem) {
    ordered_json m;
    m["tool"] = "gesture";
    m["version"] = GESTURE_VERSION;
    m["subcommand"] = name_;
    m["arguments"] = ctx_.arguments;
    m["seed"] = ctx_.seed;
    m["config_path"] = ctx_.config_path;
    m["config"] = radar_json(ctx_.radar);
    m["parameters"] = parameters_;
    m["inputs"] = path_strings(inputs_);
    m["outputs"] = path_strings(outputs_);
    io::write_text_atomic(ctx_.out / (file_stem + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  const Context& ctx_;
  std::string name_;
  ordered_json parameters_ = ordered_json::object();
  std::vector<fs::path> inputs_;
  std::vector<fs::path> outputs_;
};

std::ostream& log(const Context& ctx) {
  static std::ostream null(nullptr);
  return ctx.quiet ? null : std::cout;
}

/// File name without any extension ("push_0.features.csv" -> "push_0").
std::string base_name(const fs::path& p) {
  const auto name = p.filename().string();
  return name.substr(0, name.find('.'));
}

std::string snake_name(GestureClass c) {
  std::string out;
  for (char ch : class_name(c)) {
    if (std::isupper(static_cast<unsigned char>(ch)) && !out.empty()) out.push_back('_');
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

GestureClass require_class(const std::string& name) {
  const auto c = parse_class(name);
  if (!c) throw ValidationError("unknown gesture class '" + name + "'");
  return *c;
}

bool has_extension(const fs::path& p, std::string_view ext) { return p.extension() == ext; }

/// Online threshold-and-debounce event detector; same rule as eval::extract_events.
class EventDetector {
 public:
  explicit EventDetector(const eval::EvalConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  std::vector<GestureClass> push(const eval::ProbRow& row) {
    std::vector<GestureClass> fired;
    for (std::size_t c = 0; c < kNumGestures; ++c) {
      runs_[c] = row[c] >= cfg_.prob_threshold ? runs_[c] + 1 : 0;
      if (runs_[c] == cfg_.debounce) fired.push_back(class_from_index(c));
    }
    return fired;
  }
  void reset() { runs_.fill(0); }

 private:
  eval::EvalConfig cfg_;
  std::array<std::size_t, kNumGestures> runs_{};
};

std::string events_csv(const std::vector<eval::GestureEvent>& events) {
  std::string out = "frame,class\n";
  for (const auto& e : events) out += std::to_string(e.frame) + ',' + std::string(class_name(e.gesture)) + '\n';
  return out;
}

std::string spans_csv(const std::vector<dataset::InjectedSpan>& spans, const std::vector<std::string>& sources) {
  std::string out = "start,length,class,source\n";
  for (const auto& s : spans) {
    out += std::to_string(s.start) + ',' + std::to_string(s.length) + ',' + std::string(class_name(s.gesture)) + ',' +
           sources.at(s.clip_index) + '\n';
  }
  return out;
}

std::vector<FeatureVector> load_features(const fs::path& p, const pipeline::DetectionConfig& det,
                                         const RadarConfig& radar) {
  if (has_extension(p, ".rfr")) return pipeline::extract_sequence(io::load_raw_sequence(p, radar), det, radar);
  return io::parse_features_csv(io::read_text(p));
}

}  // namespace

int cmd_simulate(const Context& ctx, const SimulateOptions& opt) {
  const GestureClass gesture = opt.background ? GestureClass::Background : require_class(opt.gesture);
  if (opt.count == 0) throw ValidationError("simulate: --count must be >= 1");
  if (opt.frames == 0) throw ValidationError("simulate: --frames must be >= 1");
  const std::string prefix = snake_name(gesture);

  RunManifest manifest(ctx, "simulate");
  manifest.parameters() = {{"class", std::string(class_name(gesture))}, {"count", opt.count},   {"frames", opt.frames},
                           {"noise", opt.noise},            {"body", opt.body}};
  std::vector<io::ManifestEntry> entries;
  for (std::size_t i = 0; i < opt.count; ++i) {
    sim::Rng rng(recipe::derive_seed(ctx.seed, kSampleStream + class_index(gesture), i));
    sim::RenderedSequence seq;
    if (gesture == GestureClass::Background) {
      std::optional<sim::BodyDrift> body;
      if (opt.body) body = sim::random_body(rng);
      const auto scene = sim::background_sequence(opt.frames, body, opt.noise, ctx.radar, rng);
      seq = sim::render_sequence({}, scene, ctx.radar, rng);
    } else {
      sim::SampleOptions so;
      so.window_frames = opt.frames;
      so.sigma_noise = opt.noise;
      if (!opt.body) so.body_probability = 0.0;
      seq = sim::simulate_sample(gesture, so, ctx.radar, rng);
    }
    const std::string stem = prefix + "_" + std::to_string(i);
    const auto raw = ctx.out / (stem + ".rfr");
    const auto ann = ctx.out / (stem + ".annotations.csv");
    io::save_raw_sequence(raw, seq.frames, ctx.radar);
    io::write_text_atomic(ann, io::annotations_csv(seq.annotations));
    manifest.output(raw);
    manifest.output(ann);
    entries.push_back({raw.filename().string(), gesture, ""});
    log(ctx) << "wrote " << raw.string() << " (" << seq.frames.size() << " frames)\n";
  }
  const auto list = ctx.out / (prefix + ".csv");
  io::write_text_atomic(list, io::manifest_csv(entries));
  manifest.output(list);
  manifest.write("simulate_" + prefix);
  return 0;
}

int cmd_extract(const Context& ctx, const ExtractOptions& opt) {
  if (opt.inputs.empty()) throw ValidationError("extract: no input files");
  const auto det = pipeline::DetectionConfig::calibrated(ctx.radar, opt.noise);
  RunManifest manifest(ctx, "extract");
  manifest.parameters() = {{"noise", opt.noise},
                           {"detection_threshold", det.detection_threshold},
                           {"gaussian_sigma", det.gaussian_sigma},
                           {"profiles", opt.profiles}};

  std::vector<std::size_t> counts(opt.inputs.size(), 0);
  recipe::parallel_for(opt.inputs.size(), opt.threads, [&](std::size_t i) {
    const auto frames = io::load_raw_sequence(opt.inputs[i], ctx.radar);
    std::vector<FeatureVector> features;
    std::vector<std::vector<double>> profiles;
    features.reserve(frames.size());
    for (const auto& f : frames) {
      auto a = pipeline::analyze_frame(f, det, ctx.radar);
      features.push_back(a.features);
      if (opt.profiles) profiles.push_back(std::move(a.profile));
    }
    const auto stem = base_name(opt.inputs[i]);
    io::write_text_atomic(ctx.out / (stem + ".features.csv"), io::features_csv(features));
    if (opt.profiles) io::write_text_atomic(ctx.out / (stem + ".profiles.csv"), io::profiles_csv(profiles));
    counts[i] = features.size();
  });
  for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
    const auto stem = base_name(opt.inputs[i]);
    manifest.input(opt.inputs[i]);
    manifest.output(ctx.out / (stem + ".features.csv"));
    if (opt.profiles) manifest.output(ctx.out / (stem + ".profiles.csv"));
    log(ctx) << opt.inputs[i].string() << ": " << counts[i] << " frames\n";
  }
  manifest.write("extract");
  return 0;
}

int cmd_refine(const Context& ctx, const RefineOptions& opt) {
  if (opt.inputs.empty()) throw ValidationError("refine: no input files");
  const GestureClass gesture = require_class(opt.gesture);
  opt.label.validate();
  RunManifest manifest(ctx, "refine");
  manifest.parameters() = {{"class", std::string(class_name(gesture))},
                           {"amplitude_threshold", opt.label.amplitude_threshold},
                           {"label_len", opt.label.label_len}};
  std::vector<io::ManifestEntry> entries;
  std::size_t rejected = 0;
  for (const auto& in : opt.inputs) {
    manifest.input(in);
    dataset::LabeledSequence seq;
    seq.features = io::parse_features_csv(io::read_text(in));
    if (gesture == GestureClass::Background) {
      seq.labels.assign(seq.features.size(), GestureClass::Background);
    } else {
      try {
        seq.labels = dataset::refine_label(seq.features, gesture, opt.label);
      } catch (const dataset::RejectedSample& e) {
        std::cerr << "warning: " << in.string() << " rejected: " << e.what() << '\n';
        ++rejected;
        continue;
      }
    }
    const auto stem = base_name(in);
    const auto lfs = ctx.out / (stem + ".lfs");
    const auto labels = ctx.out / (stem + ".labels.csv");
    io::save_labeled(lfs, seq);
    io::write_text_atomic(labels, io::labels_csv(seq.labels));
    manifest.output(lfs);
    manifest.output(labels);
    entries.push_back({lfs.filename().string(), gesture, ""});
    const auto refs = eval::references_from_labels(seq.labels);
    log(ctx) << in.string() << ": " << (refs.empty() ? std::string("background") : "label start " + std::to_string(refs[0].frame))
             << '\n';
  }
  if (entries.empty()) throw dataset::RejectedSample("refine: every input was rejected");
  const auto list = ctx.out / ("refine_" + snake_name(gesture) + ".csv");
  io::write_text_atomic(list, io::manifest_csv(entries));
  manifest.output(list);
  manifest.parameters()["rejected"] = rejected;
  manifest.write("refine_" + snake_name(gesture));
  return 0;
}

int cmd_augment(const Context& ctx, const AugmentOptions& opt) {
  dataset::AugmentConfig cfg = opt.augment;
  if (opt.mode == "crossfade") cfg.mode = dataset::MixMode::Crossfade;
  else if (opt.mode == "additive") cfg.mode = dataset::MixMode::Additive;
  else throw ValidationError("augment: unknown --mode '" + opt.mode + "'");
  cfg.validate();
  if (cfg.gestures_min == 0) throw ValidationError("augment: --gestures-min must be >= 1");

  const auto det = pipeline::DetectionConfig::calibrated(ctx.radar, opt.noise);
  const auto background = io::load_raw_sequence(opt.background, ctx.radar);
  RunManifest manifest(ctx, "augment");
  manifest.input(opt.background);
  manifest.input(opt.manifest);

  std::vector<std::vector<RawFrame>> clips;
  std::vector<GestureClass> classes;
  std::vector<std::string> sources;
  for (const auto& entry : io::load_manifest(opt.manifest)) {
    if (entry.gesture == GestureClass::Background) continue;
    const auto path = io::resolve_entry(opt.manifest, entry);
    const auto frames = io::load_raw_sequence(path, ctx.radar);
    const auto features = pipeline::extract_sequence(frames, det, ctx.radar);
    try {
      const auto start = dataset::refined_label_start(features, opt.label);
      clips.push_back(recipe::gesture_clip(frames, start, opt.clip_before, opt.clip_after));
      classes.push_back(entry.gesture);
      sources.push_back(entry.path);
    } catch (const dataset::RejectedSample&) {
      std::cerr << "warning: " << path.string() << " has no confident frame, skipped\n";
    }
  }
  if (clips.empty()) throw dataset::RejectedSample("augment: no usable gesture recordings in the manifest");

  manifest.parameters() = {{"sequences", opt.sequences},        {"gestures_min", cfg.gestures_min},
                           {"gestures_max", cfg.gestures_max},  {"min_gap", cfg.min_gap},
                           {"tukey_alpha", cfg.tukey_alpha},    {"mode", opt.mode},
                           {"clip_before", opt.clip_before},    {"clip_after", opt.clip_after},
                           {"clips_available", clips.size()},   {"detection_threshold", det.detection_threshold}};
  std::vector<io::ManifestEntry> entries;
  for (std::size_t i = 0; i < opt.sequences; ++i) {
    dataset::Rng rng(recipe::derive_seed(ctx.seed, kAugmentStream, i));
    const auto count = std::uniform_int_distribution<std::size_t>(cfg.gestures_min, cfg.gestures_max)(rng);
    std::vector<dataset::GestureClip> chosen;
    std::vector<std::string> chosen_sources;
    for (std::size_t k = 0; k < count; ++k) {
      const auto pick = std::uniform_int_distribution<std::size_t>(0, clips.size() - 1)(rng);
      chosen.push_back({clips[pick], classes[pick]});
      chosen_sources.push_back(sources[pick]);
    }
    const auto composed = dataset::compose_sequence(background, chosen, cfg, rng);
    const auto features = pipeline::extract_sequence(composed.frames, det, ctx.radar);
    std::size_t rejected = 0;
    const auto seq = dataset::label_composed(features, composed.spans, opt.label, &rejected);

    const std::string stem = "augmented_" + std::to_string(i);
    const auto raw = ctx.out / (stem + ".rfr");
    const auto lfs = ctx.out / (stem + ".lfs");
    const auto spans = ctx.out / (stem + ".spans.csv");
    io::save_raw_sequence(raw, composed.frames, ctx.radar);
    io::save_labeled(lfs, seq);
    io::write_text_atomic(spans, spans_csv(composed.spans, chosen_sources));
    for (const auto& p : {raw, lfs, spans}) manifest.output(p);
    entries.push_back({lfs.filename().string(), seq.sequence_class(), ""});
    log(ctx) << "wrote " << raw.string() << " (" << composed.spans.size() << " gestures";
    if (rejected) log(ctx) << ", " << rejected << " unlabelled";
    log(ctx) << ")\n";
  }
  const auto list = ctx.out / "augment.csv";
  io::write_text_atomic(list, io::manifest_csv(entries));
  manifest.output(list);
  manifest.write("augment");
  return 0;
}

int cmd_train(const Context& ctx, const TrainOptions& opt) {
  model::TrainConfig cfg = opt.train;
  cfg.seed = ctx.seed;
  if (opt.loss == "mean") cfg.loss_reduction = model::LossReduction::MeanOverTime;
  else if (opt.loss == "sum") cfg.loss_reduction = model::LossReduction::SumOverTime;
  else throw ValidationError("train: unknown --loss '" + opt.loss + "'");
  cfg.validate();

  RunManifest manifest(ctx, "train");
  struct Item {
    dataset::LabeledSequence seq;
    std::string split;
  };
  std::vector<Item> windows;
  auto add = [&](const fs::path& path, const std::string& split) {
    manifest.input(path);
    const auto seq = io::load_labeled(path);
    const auto parts = dataset::split_windows(seq, cfg.sequence_length);
    if (parts.empty()) {
      throw ValidationError("train: " + path.string() + " is shorter than " + std::to_string(cfg.sequence_length) +
                            " frames");
    }
    for (const auto& w : parts) windows.push_back({w, split});
  };
  std::vector<fs::path> inputs = opt.inputs;
  if (!opt.manifest.empty()) inputs.push_back(opt.manifest);
  for (const auto& in : inputs) {
    if (has_extension(in, ".csv")) {
      manifest.input(in);
      for (const auto& e : io::load_manifest(in)) add(io::resolve_entry(in, e), e.split);
    } else {
      add(in, "");
    }
  }
  if (windows.empty()) throw ValidationError("train: no training sequences");

  // Windows without an explicit split are divided 3:1, stratified by class.
  std::vector<std::size_t> unassigned;
  std::vector<GestureClass> unassigned_classes;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& s = windows[i].split;
    if (s.empty()) {
      unassigned.push_back(i);
      unassigned_classes.push_back(windows[i].seq.sequence_class());
    } else if (s != "train" && s != "val") {
      throw ValidationError("train: unknown split '" + s + "'");
    }
  }
  if (!unassigned.empty()) {
    const auto split = dataset::split_train_val(unassigned_classes, {3, 1}, ctx.seed);
    for (auto k : split.train) windows[unassigned[k]].split = "train";
    for (auto k : split.val) windows[unassigned[k]].split = "val";
  }
  std::vector<model::EncodedSequence> train_set, val_set;
  for (const auto& w : windows) {
    (w.split == "train" ? train_set : val_set).push_back(model::encode_sequence(w.seq, ctx.radar));
  }
  log(ctx) << "training on " << train_set.size() << " windows, validating on " << val_set.size() << '\n';

  std::string history = "epoch,train_loss,val_accuracy\n";
  const auto result = model::train(train_set, val_set, cfg, [&](const model::EpochRecord& r) {
    history += std::to_string(r.epoch) + ',' + io::format_number(r.train_loss) + ',' +
               io::format_number(r.val_accuracy) + '\n';
    log(ctx) << "epoch " << r.epoch << '/' << cfg.epochs << "  loss " << io::format_number(r.train_loss)
             << "  val_accuracy " << io::format_number(r.val_accuracy) << '\n';
  });
  const auto weights = ctx.out / "model.grw";
  const auto hist = ctx.out / "history.csv";
  model::save_params(result.params, weights);
  io::write_text_atomic(hist, history);
  log(ctx) << "best epoch " << result.best_epoch << " (val_accuracy " << io::format_number(result.best_val_accuracy)
           << "), weights in " << weights.string() << '\n';

  manifest.parameters() = {{"epochs", cfg.epochs},
                           {"learning_rate", cfg.learning_rate},
                           {"batch_size", cfg.batch_size},
                           {"sequence_length", cfg.sequence_length},
                           {"loss", opt.loss},
                           {"train_windows", train_set.size()},
                           {"val_windows", val_set.size()},
                           {"initial_loss", result.initial_loss},
                           {"best_epoch", result.best_epoch},
                           {"best_val_accuracy", result.best_val_accuracy}};
  manifest.output(weights);
  manifest.output(hist);
  manifest.write("train");
  return 0;
}

int cmd_eval(const Context& ctx, const EvalOptions& opt) {
  if (opt.inputs.empty()) throw ValidationError("eval: no labelled sequences");
  auto cfg = opt.eval;
  cfg.frame_rate = ctx.radar.frame_rate;
  cfg.validate();
  const bool from_model = opt.probabilities.empty();
  if (from_model && opt.model.empty()) throw ValidationError("eval: pass --model or --probabilities");
  if (!from_model && opt.probabilities.size() != opt.inputs.size()) {
    throw ValidationError("eval: " + std::to_string(opt.probabilities.size()) + " probability files for " +
                          std::to_string(opt.inputs.size()) + " sequences");
  }
  std::optional<model::GruParams> params;
  if (from_model) params = model::load_params(opt.model);

  RunManifest manifest(ctx, "eval");
  if (from_model) manifest.input(opt.model);
  eval::EvalReport report;
  for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
    manifest.input(opt.inputs[i]);
    const auto seq = io::load_labeled(opt.inputs[i]);
    std::vector<eval::ProbRow> probs;
    if (from_model) {
      probs = recipe::stream_probabilities(seq.features, *params, ctx.radar);
    } else {
      manifest.input(opt.probabilities[i]);
      probs = io::parse_probabilities_csv(io::read_text(opt.probabilities[i]));
    }
    if (probs.size() != seq.size()) {
      throw ValidationError("eval: " + std::to_string(probs.size()) + " probability rows for a " +
                            std::to_string(seq.size()) + "-frame sequence");
    }
    report += eval::match_events(eval::extract_events(probs, cfg), eval::references_from_labels(seq.labels), cfg);
  }
  const auto confusion = ctx.out / "confusion.csv";
  const auto summary = ctx.out / "summary.txt";
  io::write_text_atomic(confusion, eval::confusion_csv(report));
  io::write_text_atomic(summary, eval::summary_line(report) + '\n');
  log(ctx) << eval::confusion_csv(report) << eval::summary_line(report) << '\n';

  const auto [before, after] = cfg.window_frames();
  manifest.parameters() = {{"prob_threshold", cfg.prob_threshold}, {"debounce", cfg.debounce},
                           {"window_before_frames", before},       {"window_after_frames", after},
                           {"f1", eval::f1_score(report)}};
  manifest.output(confusion);
  manifest.output(summary);
  manifest.write("eval");
  return 0;
}

int cmd_infer(const Context& ctx, const InferOptions& opt) {
  if (opt.inputs.empty()) throw ValidationError("infer: no inputs");
  auto cfg = opt.eval;
  cfg.frame_rate = ctx.radar.frame_rate;
  const auto params = model::load_params(opt.model);
  const auto det = pipeline::DetectionConfig::calibrated(ctx.radar, opt.noise);

  RunManifest manifest(ctx, "infer");
  manifest.input(opt.model);
  model::GruStream stream(params.cast<float>());
  EventDetector detector(cfg);
  for (const auto& in : opt.inputs) {
    manifest.input(in);
    const auto features = load_features(in, det, ctx.radar);
    std::vector<eval::ProbRow> probs;
    probs.reserve(features.size());
    if (opt.stream) {
      for (const auto& f : features) {
        const auto p = stream.step(model::encode_features(f, ctx.radar));
        eval::ProbRow row;
        std::copy(p.begin(), p.end(), row.begin());
        probs.push_back(row);
      }
    } else {
      const auto inputs = model::encode_features(features, ctx.radar);
      for (const auto& p : model::forward<double>(inputs, params).probs) probs.push_back(p);
      detector.reset();
    }
    std::vector<eval::GestureEvent> events;
    for (std::size_t t = 0; t < probs.size(); ++t) {
      for (auto c : detector.push(probs[t])) {
        // The event is dated to the first frame of its run; in stream mode a
        // run may have begun in the previous input.
        const std::size_t start = t + 1 >= cfg.debounce ? t + 1 - cfg.debounce : 0;
        events.push_back({start, c});
        log(ctx) << in.string() << ": frame " << start << ' ' << class_name(c) << '\n';
      }
    }
    const auto stem = base_name(in);
    const auto prob_path = ctx.out / (stem + ".probs.csv");
    const auto event_path = ctx.out / (stem + ".events.csv");
    io::write_text_atomic(prob_path, io::probabilities_csv(probs));
    io::write_text_atomic(event_path, events_csv(events));
    manifest.output(prob_path);
    manifest.output(event_path);
  }
  manifest.parameters() = {{"stream", opt.stream},
                           {"prob_threshold", cfg.prob_threshold},
                           {"debounce", cfg.debounce},
                           {"detection_threshold", det.detection_threshold}};
  manifest.write("infer");
  return 0;
}

int cmd_bench(const Context& ctx, const BenchOptions& opt) {
  if (opt.frames == 0) throw ValidationError("bench: --frames must be >= 1");
  const auto det = pipeline::DetectionConfig::calibrated(ctx.radar, opt.noise);
  const auto d = derive_constants(ctx.radar);
  sim::Rng rng(recipe::derive_seed(ctx.seed, kBenchStream, 0));
  std::uniform_real_distribution<double> range(2 * d.range_resolution, d.max_range - 2 * d.range_resolution);
  std::uniform_real_distribution<double> speed(-0.8 * d.max_velocity, 0.8 * d.max_velocity);
  std::uniform_real_distribution<double> angle(-0.5, 0.5);
  std::vector<RawFrame> frames;
  frames.reserve(opt.frames);
  for (std::size_t i = 0; i < opt.frames; ++i) {
    const sim::PointTarget t{.range = range(rng), .velocity = speed(rng), .azimuth = angle(rng), .elevation = angle(rng)};
    frames.push_back(sim::synthesize_frame(std::span(&t, 1), ctx.radar, opt.noise, rng));
  }

  for (std::size_t i = 0; i < std::min<std::size_t>(20, frames.size()); ++i) {
    pipeline::extract_features(frames[i], det, ctx.radar);
  }
  std::vector<double> micros;
  micros.reserve(frames.size());
  double sink = 0.0;
  for (const auto& f : frames) {
    const auto t0 = std::chrono::steady_clock::now();
    sink += pipeline::extract_features(f, det, ctx.radar).magnitude;
    const auto t1 = std::chrono::steady_clock::now();
    micros.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  std::sort(micros.begin(), micros.end());
  const double median = micros[micros.size() / 2];
  const double p95 = micros[std::min(micros.size() - 1, micros.size() * 95 / 100)];
  double mean = 0.0;
  for (double v : micros) mean += v;
  mean /= static_cast<double>(micros.size());
  const auto stats = pipeline::analyze_frame(frames.front(), det, ctx.radar).stats;
  const std::size_t rdm = ctx.radar.num_rx * ctx.radar.num_chirps * ctx.radar.range_bins();

  log(ctx) << "frames            " << opt.frames << '\n'
           << "median            " << io::format_number(median) << " us\n"
           << "p95               " << io::format_number(p95) << " us\n"
           << "mean              " << io::format_number(mean) << " us\n"
           << "fast-time FFTs    " << stats.fast_time_ffts << " x " << stats.fast_time_length << '\n'
           << "slow-time FFTs    " << stats.slow_time_ffts << " x " << stats.slow_time_length << '\n'
           << "largest buffer    " << stats.largest_buffer << " complex values\n"
           << "slow-time FFTs for a full range-Doppler map would be " << ctx.radar.num_rx * ctx.radar.range_bins()
           << '\n';

  ordered_json report = {{"frames", opt.frames},
                         {"median_us", median},
                         {"p95_us", p95},
                         {"mean_us", mean},
                         {"fast_time_ffts", stats.fast_time_ffts},
                         {"slow_time_ffts", stats.slow_time_ffts},
                         {"largest_buffer_complex", stats.largest_buffer},
                         {"range_doppler_map_complex", rdm},
                         {"checksum", sink}};
  const auto path = ctx.out / "bench.json";
  io::write_text_atomic(path, report.dump(2) + "\n");
  RunManifest manifest(ctx, "bench");
  manifest.parameters() = {{"frames", opt.frames}, {"noise", opt.noise}};
  manifest.output(path);
  manifest.write("bench");
  return 0;
}

}  // namespace gesture::cli
