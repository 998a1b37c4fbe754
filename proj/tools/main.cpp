#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "gesture/io.hpp"

#ifndef GESTURE_VERSION
#define GESTURE_VERSION "dev"
#endif

namespace {

using namespace gesture;
using namespace gesture::cli;

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

void add_label_options(CLI::App* cmd, dataset::LabelConfig& label) {
  cmd->add_option("--label-threshold", label.amplitude_threshold, "Magnitude gate for label refinement")
      ->capture_default_str();
  cmd->add_option("--label-length", label.label_len, "Frames labelled from the refined start")->capture_default_str();
}

void add_eval_options(CLI::App* cmd, eval::EvalConfig& cfg) {
  cmd->add_option("--threshold", cfg.prob_threshold, "Class probability threshold")->capture_default_str();
  cmd->add_option("--debounce", cfg.debounce, "Consecutive frames above threshold")->capture_default_str();
  cmd->add_option("--window-before", cfg.window_before, "Tolerance before the label start [s]")
      ->capture_default_str();
  cmd->add_option("--window-after", cfg.window_after, "Tolerance after the label start [s]")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar hand-gesture toolkit: simulation, feature extraction, training and evaluation", "gesture"};
  app.set_version_flag("--version", GESTURE_VERSION);
  app.require_subcommand(1);

  Context ctx;
  for (int i = 0; i < argc; ++i) ctx.arguments.emplace_back(argv[i]);
  std::string out_dir = ".";
  app.add_option("--config", ctx.config_path, "Radar configuration file (key = value)")->check(CLI::ExistingFile);
  app.add_option("--seed", ctx.seed, "Base random seed")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("-q,--quiet", ctx.quiet, "Suppress progress output");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Synthesize labelled raw recordings");
  simulate->add_option("--class", sim.gesture, "Gesture class")->capture_default_str();
  simulate->add_option("--count", sim.count, "Number of recordings")->capture_default_str();
  simulate->add_flag("--background", sim.background, "Record background activity instead of a gesture");
  simulate->add_flag("--body,!--no-body", sim.body, "Allow a drifting body reflector");
  simulate->add_option("--frames", sim.frames, "Frames per recording")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "Noise standard deviation")->capture_default_str();

  ExtractOptions ext;
  auto* extract = app.add_subcommand("extract", "Per-frame features from raw recordings");
  extract->add_option("inputs", ext.inputs, "RFR1 files")->required()->check(CLI::ExistingFile);
  extract->add_flag("--profiles", ext.profiles, "Also write the integrated range profiles");
  extract->add_option("--noise", ext.noise, "Noise level used to calibrate the detection threshold")
      ->capture_default_str();
  extract->add_option("--threads", ext.threads, "Worker threads (0 = all cores)")->capture_default_str();

  RefineOptions ref;
  auto* refine = app.add_subcommand("refine", "Refine gesture labels on feature files");
  refine->add_option("inputs", ref.inputs, "Feature CSV files")->required()->check(CLI::ExistingFile);
  refine->add_option("--class", ref.gesture, "Gesture class of every input")->required();
  add_label_options(refine, ref.label);

  AugmentOptions aug;
  auto* augment = app.add_subcommand("augment", "Inject recorded gestures into background");
  augment->add_option("--background", aug.background, "Background RFR1 file")->required()->check(CLI::ExistingFile);
  augment->add_option("--manifest", aug.manifest, "Manifest of gesture recordings")
      ->required()
      ->check(CLI::ExistingFile);
  augment->add_option("--sequences", aug.sequences, "Composed sequences to write")->capture_default_str();
  augment->add_option("--gestures-min", aug.augment.gestures_min, "Fewest gestures per sequence")
      ->capture_default_str();
  augment->add_option("--gestures-max", aug.augment.gestures_max, "Most gestures per sequence")->capture_default_str();
  augment->add_option("--min-gap", aug.augment.min_gap, "Frames between injected gestures")->capture_default_str();
  augment->add_option("--alpha", aug.augment.tukey_alpha, "Tukey window taper")->capture_default_str();
  augment->add_option("--mode", aug.mode, "crossfade or additive")->capture_default_str();
  augment->add_option("--clip-before", aug.clip_before, "Frames kept before the label start")->capture_default_str();
  augment->add_option("--clip-after", aug.clip_after, "Frames kept from the label start on")->capture_default_str();
  augment->add_option("--noise", aug.noise, "Noise level used to calibrate the detection threshold")
      ->capture_default_str();
  add_label_options(augment, aug.label);

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train the GRU classifier");
  train->add_option("inputs", tr.inputs, "LFS1 files or dataset manifests")->check(CLI::ExistingFile);
  train->add_option("--manifest", tr.manifest, "Dataset manifest with optional train/val split")
      ->check(CLI::ExistingFile);
  train->add_option("--epochs", tr.train.epochs)->capture_default_str();
  train->add_option("--lr", tr.train.learning_rate)->capture_default_str();
  train->add_option("--batch", tr.train.batch_size)->capture_default_str();
  train->add_option("--sequence-length", tr.train.sequence_length, "Training window in frames")
      ->capture_default_str();
  train->add_option("--loss", tr.loss, "mean or sum over time")->capture_default_str();

  EvalOptions ev;
  auto* evaluate = app.add_subcommand("eval", "Event-level precision, recall and F1");
  evaluate->add_option("inputs", ev.inputs, "Labelled LFS1 sequences")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", ev.model, "GRW1 weights")->check(CLI::ExistingFile);
  evaluate->add_option("--probs", ev.probabilities, "Probability CSVs, one per sequence")->check(CLI::ExistingFile);
  add_eval_options(evaluate, ev.eval);

  InferOptions inf;
  auto* infer = app.add_subcommand("infer", "Classify recordings or feature files");
  infer->add_option("inputs", inf.inputs, "RFR1 or feature CSV files")->required()->check(CLI::ExistingFile);
  infer->add_option("--model", inf.model, "GRW1 weights")->required()->check(CLI::ExistingFile);
  infer->add_flag("--stream", inf.stream, "Keep the recurrent state across inputs");
  infer->add_option("--noise", inf.noise, "Noise level used to calibrate the detection threshold")
      ->capture_default_str();
  add_eval_options(infer, inf.eval);

  BenchOptions bn;
  auto* bench = app.add_subcommand("bench", "Time per-frame feature extraction");
  bench->add_option("--frames", bn.frames)->capture_default_str();
  bench->add_option("--noise", bn.noise)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (!ctx.config_path.empty()) ctx.radar = io::load_radar_config(ctx.config_path);
    ctx.radar.validate();
    ctx.out = out_dir;
    std::filesystem::create_directories(ctx.out);

    if (*simulate) return cmd_simulate(ctx, sim);
    if (*extract) return cmd_extract(ctx, ext);
    if (*refine) return cmd_refine(ctx, ref);
    if (*augment) return cmd_augment(ctx, aug);
    if (*train) return cmd_train(ctx, tr);
    if (*evaluate) return cmd_eval(ctx, ev);
    if (*infer) return cmd_infer(ctx, inf);
    if (*bench) return cmd_bench(ctx, bn);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const dataset::RejectedSample& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
