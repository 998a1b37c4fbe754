#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gesture/core.hpp"
#include "gesture/dataset.hpp"
#include "gesture/eval.hpp"
#include "gesture/model.hpp"

namespace gesture::cli {

namespace fs = std::filesystem;

/// Settings shared by every subcommand.
struct Context {
  RadarConfig radar;
  std::string config_path;  // empty when the defaults are used
  std::uint64_t seed = 1;
  fs::path out = ".";
  bool quiet = false;
  std::vector<std::string> arguments;  // argv, recorded in the run manifest
};

struct SimulateOptions {
  std::string gesture = "push";
  std::size_t count = 1;
  bool background = false;
  bool body = true;
  std::size_t frames = 100;
  double noise = 0.1;
};

struct ExtractOptions {
  std::vector<fs::path> inputs;
  bool profiles = false;
  double noise = 0.1;
  std::size_t threads = 0;
};

struct RefineOptions {
  std::vector<fs::path> inputs;
  std::string gesture;
  dataset::LabelConfig label;
};

struct AugmentOptions {
  fs::path background;
  fs::path manifest;
  std::size_t sequences = 1;
  std::size_t clip_before = 22;
  std::size_t clip_after = 22;
  dataset::AugmentConfig augment;
  std::string mode = "crossfade";
  dataset::LabelConfig label;
  double noise = 0.1;
};

struct TrainOptions {
  std::vector<fs::path> inputs;
  fs::path manifest;
  model::TrainConfig train;
  std::string loss = "mean";
};

struct EvalOptions {
  std::vector<fs::path> inputs;
  fs::path model;
  std::vector<fs::path> probabilities;
  eval::EvalConfig eval;
};

struct InferOptions {
  std::vector<fs::path> inputs;
  fs::path model;
  bool stream = false;
  double noise = 0.1;
  eval::EvalConfig eval;
};

struct BenchOptions {
  std::size_t frames = 1000;
  double noise = 0.1;
};

int cmd_simulate(const Context& ctx, const SimulateOptions& opt);
int cmd_extract(const Context& ctx, const ExtractOptions& opt);
int cmd_refine(const Context& ctx, const RefineOptions& opt);
int cmd_augment(const Context& ctx, const AugmentOptions& opt);
int cmd_train(const Context& ctx, const TrainOptions& opt);
int cmd_eval(const Context& ctx, const EvalOptions& opt);
int cmd_infer(const Context& ctx, const InferOptions& opt);
int cmd_bench(const Context& ctx, const BenchOptions& opt);

}  // namespace gesture::cli
