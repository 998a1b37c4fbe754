#pragma once

// Joint detection/classification network: one 16-unit GRU layer followed by
// a 6-way softmax dense layer, 1206 parameters in total.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gesture/core.hpp"
#include "gesture/dataset.hpp"

namespace gesture::model {

inline constexpr std::size_t kInputs = FeatureVector::kSize;  // 5
inline constexpr std::size_t kHidden = 16;
inline constexpr std::size_t kGates = 3;  // update z, reset r, candidate n
inline constexpr std::size_t kOutputs = kNumClasses;  // 6

inline constexpr std::size_t kRecurrentParams = kGates * (kHidden * kInputs + kHidden * kHidden + kHidden + kHidden);
inline constexpr std::size_t kDenseParams = kOutputs * kHidden + kOutputs;
inline constexpr std::size_t kTotalParams = kRecurrentParams + kDenseParams;
static_assert(kRecurrentParams == 1104);
static_assert(kDenseParams == 102);
static_assert(kTotalParams == 1206);

/// Canonical tensor table. Gate rows are stacked z, r, n inside each
/// recurrent tensor; matrices are row-major [out × in].
struct TensorInfo {
  const char* name;
  std::size_t rows;
  std::size_t cols;
  std::size_t offset;
  std::size_t size() const { return rows * cols; }
};

inline constexpr std::array<TensorInfo, 6> kTensors = {{
    {"gru.input_weight", kGates * kHidden, kInputs, 0},
    {"gru.recurrent_weight", kGates * kHidden, kHidden, 240},
    {"gru.input_bias", kGates * kHidden, 1, 1008},
    {"gru.recurrent_bias", kGates * kHidden, 1, 1056},
    {"dense.weight", kOutputs, kHidden, 1104},
    {"dense.bias", kOutputs, 1, 1200},
}};

template <typename T>
struct GruParamsT {
  std::array<T, kTotalParams> values{};

  static constexpr std::size_t size() { return kTotalParams; }

  // gate: 0 = z, 1 = r, 2 = n
  T& w_ih(std::size_t gate, std::size_t row, std::size_t col) { return values[(gate * kHidden + row) * kInputs + col]; }
  T w_ih(std::size_t gate, std::size_t row, std::size_t col) const { return values[(gate * kHidden + row) * kInputs + col]; }
  T& w_hh(std::size_t gate, std::size_t row, std::size_t col) {
    return values[240 + (gate * kHidden + row) * kHidden + col];
  }
  T w_hh(std::size_t gate, std::size_t row, std::size_t col) const {
    return values[240 + (gate * kHidden + row) * kHidden + col];
  }
  T& b_ih(std::size_t gate, std::size_t row) { return values[1008 + gate * kHidden + row]; }
  T b_ih(std::size_t gate, std::size_t row) const { return values[1008 + gate * kHidden + row]; }
  T& b_hh(std::size_t gate, std::size_t row) { return values[1056 + gate * kHidden + row]; }
  T b_hh(std::size_t gate, std::size_t row) const { return values[1056 + gate * kHidden + row]; }
  T& w_d(std::size_t row, std::size_t col) { return values[1104 + row * kHidden + col]; }
  T w_d(std::size_t row, std::size_t col) const { return values[1104 + row * kHidden + col]; }
  T& b_d(std::size_t row) { return values[1200 + row]; }
  T b_d(std::size_t row) const { return values[1200 + row]; }

  template <typename U>
  GruParamsT<U> cast() const {
    GruParamsT<U> out;
    for (std::size_t i = 0; i < kTotalParams; ++i) out.values[i] = static_cast<U>(values[i]);
    return out;
  }

  bool operator==(const GruParamsT&) const = default;
};

using GruParams = GruParamsT<double>;
using GruParamsF = GruParamsT<float>;

using InputRow = std::array<double, kInputs>;
using Hidden = std::array<double, kHidden>;

/// Frames below this magnitude carry no confident target; their geometric
/// inputs are zeroed.
inline constexpr double kConfidentMagnitude = 200.0;

/// Fixed input scaling: 2·range / max_range − 1, velocity / (2·Δv),
/// angles / (π/6), log10(1 + magnitude) − 2.5.
InputRow encode_features(const FeatureVector& f, const RadarConfig& config);
std::vector<InputRow> encode_features(std::span<const FeatureVector> features, const RadarConfig& config);

template <typename T>
T sigmoid(T v) {
  return T(1) / (T(1) + std::exp(-v));
}

/// h' = (1 − z)⊙n + z⊙h with
///   z = σ(W_z x + b_iz + U_z h + b_hz)
///   r = σ(W_r x + b_ir + U_r h + b_hr)
///   n = tanh(W_n x + b_in + r⊙(U_n h + b_hn))
template <typename T>
std::array<T, kHidden> gru_cell(const std::array<T, kInputs>& x, const std::array<T, kHidden>& h,
                                const GruParamsT<T>& p) {
  std::array<T, kHidden> out{};
  for (std::size_t i = 0; i < kHidden; ++i) {
    T a[kGates];
    T g[kGates];
    for (std::size_t gate = 0; gate < kGates; ++gate) {
      T ax = p.b_ih(gate, i);
      for (std::size_t j = 0; j < kInputs; ++j) ax += p.w_ih(gate, i, j) * x[j];
      T ah = p.b_hh(gate, i);
      for (std::size_t j = 0; j < kHidden; ++j) ah += p.w_hh(gate, i, j) * h[j];
      a[gate] = ax;
      g[gate] = ah;
    }
    const T z = sigmoid(a[0] + g[0]);
    const T r = sigmoid(a[1] + g[1]);
    const T n = std::tanh(a[2] + r * g[2]);
    out[i] = (T(1) - z) * n + z * h[i];
  }
  return out;
}

template <typename T>
std::array<T, kOutputs> dense_softmax(const std::array<T, kHidden>& h, const GruParamsT<T>& p) {
  std::array<T, kOutputs> logits{};
  for (std::size_t k = 0; k < kOutputs; ++k) {
    T acc = p.b_d(k);
    for (std::size_t j = 0; j < kHidden; ++j) acc += p.w_d(k, j) * h[j];
    logits[k] = acc;
  }
  T peak = logits[0];
  for (auto v : logits) peak = std::max(peak, v);
  T sum = 0;
  for (auto& v : logits) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (auto& v : logits) v /= sum;
  return logits;
}

template <typename T>
struct ForwardResultT {
  std::vector<std::array<T, kOutputs>> probs;
  std::vector<std::array<T, kHidden>> hidden;
};

/// Runs the network over a sequence from h0 = 0.
template <typename T>
ForwardResultT<T> forward(std::span<const InputRow> inputs, const GruParamsT<T>& p) {
  ForwardResultT<T> out;
  out.probs.reserve(inputs.size());
  out.hidden.reserve(inputs.size());
  std::array<T, kHidden> h{};
  for (const auto& row : inputs) {
    std::array<T, kInputs> x;
    for (std::size_t j = 0; j < kInputs; ++j) x[j] = static_cast<T>(row[j]);
    h = gru_cell(x, h, p);
    out.hidden.push_back(h);
    out.probs.push_back(dense_softmax(h, p));
  }
  return out;
}

using ForwardResult = ForwardResultT<double>;

/// Hidden state carried across calls for continuous inference.
class GruStream {
 public:
  explicit GruStream(const GruParamsF& params) : params_(params) {}

  std::array<float, kOutputs> step(const InputRow& input);
  void reset() { h_ = {}; }
  const std::array<float, kHidden>& hidden() const { return h_; }

 private:
  GruParamsF params_;
  std::array<float, kHidden> h_{};
};

enum class LossReduction { MeanOverTime, SumOverTime };

inline constexpr double kLogFloor = 1e-12;

/// Per-step cross-entropy −log(max(p[label], 1e-12)), reduced over time.
double sequence_loss(std::span<const std::array<double, kOutputs>> probs, std::span<const GestureClass> labels,
                     LossReduction reduction = LossReduction::MeanOverTime);

struct LossAndGradient {
  double loss = 0.0;
  GruParams grad;  // same layout as the parameters
};

/// Exact reverse-mode gradient of sequence_loss through all time steps.
LossAndGradient backward(std::span<const InputRow> inputs, std::span<const GestureClass> labels, const GruParams& p,
                         LossReduction reduction = LossReduction::MeanOverTime);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  LossReduction loss_reduction = LossReduction::MeanOverTime;
  std::size_t sequence_length = 100;

  void validate() const;
};

struct TrainState {
  GruParams params;
  GruParams first_moment;
  GruParams second_moment;
  std::uint64_t step = 0;
  GruParams best_params;
  double best_metric = -1.0;
};

/// One bias-corrected Adam update.
TrainState adam_step(TrainState state, const GruParams& grads, const TrainConfig& cfg);

/// Glorot-uniform input and dense weights, orthogonal recurrent blocks, zero biases.
GruParams initialize(std::uint64_t seed);
GruParams initialize(std::mt19937_64& rng);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  GruParams params;  // snapshot with the best validation accuracy
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  double initial_loss = 0.0;  // first mini-batch, before any update
};

struct EncodedSequence {
  std::vector<InputRow> inputs;
  std::vector<GestureClass> labels;
};

EncodedSequence encode_sequence(const dataset::LabeledSequence& seq, const RadarConfig& config);

/// Fraction of frames whose argmax class equals the label.
double frame_accuracy(std::span<const EncodedSequence> sequences, const GruParams& params);

/// Mini-batch Adam over shuffled sequences; keeps the best-validation snapshot.
/// `on_epoch` is invoked after every epoch when set.
TrainResult train(std::span<const EncodedSequence> train_set, std::span<const EncodedSequence> val_set,
                  const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch = {});

void save_params(const GruParams& params, const std::filesystem::path& path);
GruParams load_params(const std::filesystem::path& path);

/// Serialized form, exposed for in-memory round trips and tamper tests.
std::vector<std::uint8_t> serialize_params(const GruParams& params);
GruParams deserialize_params(std::span<const std::uint8_t> bytes);

}  // namespace gesture::model
