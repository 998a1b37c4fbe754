#include "gesture/model.hpp"

#include <algorithm>
#include <numeric>

#include "binary.hpp"
#include "gesture/io.hpp"

namespace gesture::model {

InputRow encode_features(const FeatureVector& f, const RadarConfig& config) {
  const auto d = derive_constants(config);
  const double magnitude = std::max(f.magnitude, 0.0);
  const double g = magnitude >= kConfidentMagnitude ? 1.0 : 0.0;
  return {g * (2.0 * f.range / d.max_range - 1.0), g * f.velocity / (2.0 * d.velocity_resolution),
          g * f.azimuth / (kPi / 6), g * f.elevation / (kPi / 6), std::log10(1.0 + magnitude) - 2.5};
}

std::vector<InputRow> encode_features(std::span<const FeatureVector> features, const RadarConfig& config) {
  std::vector<InputRow> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(encode_features(f, config));
  return out;
}

std::array<float, kOutputs> GruStream::step(const InputRow& input) {
  std::array<float, kInputs> x;
  for (std::size_t j = 0; j < kInputs; ++j) x[j] = static_cast<float>(input[j]);
  h_ = gru_cell(x, h_, params_);
  return dense_softmax(h_, params_);
}

double sequence_loss(std::span<const std::array<double, kOutputs>> probs, std::span<const GestureClass> labels,
                     LossReduction reduction) {
  if (probs.size() != labels.size()) throw ValidationError("loss: probability and label lengths differ");
  if (probs.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    total -= std::log(std::max(probs[t][class_index(labels[t])], kLogFloor));
  }
  return reduction == LossReduction::MeanOverTime ? total / static_cast<double>(probs.size()) : total;
}

LossAndGradient backward(std::span<const InputRow> inputs, std::span<const GestureClass> labels, const GruParams& p,
                         LossReduction reduction) {
  if (inputs.size() != labels.size()) throw ValidationError("backward: input and label lengths differ");
  const std::size_t T = inputs.size();
  LossAndGradient out;
  if (T == 0) return out;
  const double scale = reduction == LossReduction::MeanOverTime ? 1.0 / static_cast<double>(T) : 1.0;

  // Forward pass keeping the gate activations.
  struct Step {
    Hidden h_prev, z, r, n, g;  // g = U_n h_prev + b_hn
    Hidden h;
    std::array<double, kOutputs> probs;
  };
  std::vector<Step> steps(T);
  Hidden h{};
  double loss = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    auto& s = steps[t];
    s.h_prev = h;
    const auto& x = inputs[t];
    for (std::size_t i = 0; i < kHidden; ++i) {
      double ax[kGates], ah[kGates];
      for (std::size_t gate = 0; gate < kGates; ++gate) {
        double a = p.b_ih(gate, i);
        for (std::size_t j = 0; j < kInputs; ++j) a += p.w_ih(gate, i, j) * x[j];
        double b = p.b_hh(gate, i);
        for (std::size_t j = 0; j < kHidden; ++j) b += p.w_hh(gate, i, j) * h[j];
        ax[gate] = a;
        ah[gate] = b;
      }
      s.z[i] = sigmoid(ax[0] + ah[0]);
      s.r[i] = sigmoid(ax[1] + ah[1]);
      s.g[i] = ah[2];
      s.n[i] = std::tanh(ax[2] + s.r[i] * s.g[i]);
    }
    for (std::size_t i = 0; i < kHidden; ++i) s.h[i] = (1.0 - s.z[i]) * s.n[i] + s.z[i] * s.h_prev[i];
    h = s.h;
    s.probs = dense_softmax(s.h, p);
    loss -= std::log(std::max(s.probs[class_index(labels[t])], kLogFloor));
  }
  out.loss = loss * scale;

  auto& gr = out.grad;
  Hidden dh_next{};
  for (std::size_t t = T; t-- > 0;) {
    const auto& s = steps[t];
    const auto& x = inputs[t];
    std::array<double, kOutputs> dlogits;
    for (std::size_t k = 0; k < kOutputs; ++k) dlogits[k] = scale * s.probs[k];
    dlogits[class_index(labels[t])] -= scale;

    Hidden dh = dh_next;
    for (std::size_t k = 0; k < kOutputs; ++k) {
      gr.b_d(k) += dlogits[k];
      for (std::size_t j = 0; j < kHidden; ++j) {
        gr.w_d(k, j) += dlogits[k] * s.h[j];
        dh[j] += p.w_d(k, j) * dlogits[k];
      }
    }

    Hidden dh_prev{};
    std::array<double, kGates * kHidden> da_x{};  // gradient w.r.t. the input affine terms
    std::array<double, kGates * kHidden> da_h{};  // gradient w.r.t. the recurrent affine terms
    for (std::size_t i = 0; i < kHidden; ++i) {
      const double dn = dh[i] * (1.0 - s.z[i]);
      const double dz = dh[i] * (s.h_prev[i] - s.n[i]);
      dh_prev[i] += dh[i] * s.z[i];
      const double dan = dn * (1.0 - s.n[i] * s.n[i]);
      const double dr = dan * s.g[i];
      const double dar = dr * s.r[i] * (1.0 - s.r[i]);
      const double daz = dz * s.z[i] * (1.0 - s.z[i]);
      da_x[0 * kHidden + i] = daz;
      da_x[1 * kHidden + i] = dar;
      da_x[2 * kHidden + i] = dan;
      da_h[0 * kHidden + i] = daz;
      da_h[1 * kHidden + i] = dar;
      da_h[2 * kHidden + i] = dan * s.r[i];
    }
    for (std::size_t gate = 0; gate < kGates; ++gate) {
      for (std::size_t i = 0; i < kHidden; ++i) {
        const double ax = da_x[gate * kHidden + i];
        const double ah = da_h[gate * kHidden + i];
        gr.b_ih(gate, i) += ax;
        gr.b_hh(gate, i) += ah;
        for (std::size_t j = 0; j < kInputs; ++j) gr.w_ih(gate, i, j) += ax * x[j];
        for (std::size_t j = 0; j < kHidden; ++j) {
          gr.w_hh(gate, i, j) += ah * s.h_prev[j];
          dh_prev[j] += p.w_hh(gate, i, j) * ah;
        }
      }
    }
    dh_next = dh_prev;
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || batch_size == 0 || epochs == 0 || !(beta1 > 0.0 && beta1 < 1.0) ||
      !(beta2 > 0.0 && beta2 < 1.0) || !(epsilon > 0.0) || sequence_length == 0) {
    throw ValidationError("train config: hyperparameters must be positive (betas in (0, 1))");
  }
}

TrainState adam_step(TrainState state, const GruParams& grads, const TrainConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < kTotalParams; ++i) {
    const double g = grads.values[i];
    auto& m = state.first_moment.values[i];
    auto& v = state.second_moment.values[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    state.params.values[i] -= cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + cfg.epsilon);
  }
  return state;
}

namespace {

void orthogonal_block(std::mt19937_64& rng, GruParams& p, std::size_t gate) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::array<std::array<double, kHidden>, kHidden> q{};
  for (auto& row : q) {
    for (auto& v : row) v = normal(rng);
  }
  // Modified Gram-Schmidt over rows.
  for (std::size_t i = 0; i < kHidden; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      double dot = 0.0;
      for (std::size_t j = 0; j < kHidden; ++j) dot += q[i][j] * q[k][j];
      for (std::size_t j = 0; j < kHidden; ++j) q[i][j] -= dot * q[k][j];
    }
    double norm = 0.0;
    for (double v : q[i]) norm += v * v;
    norm = std::sqrt(norm);
    for (auto& v : q[i]) v /= norm;
  }
  for (std::size_t i = 0; i < kHidden; ++i) {
    for (std::size_t j = 0; j < kHidden; ++j) p.w_hh(gate, i, j) = q[i][j];
  }
}

}  // namespace

GruParams initialize(std::mt19937_64& rng) {
  GruParams p;
  const double input_limit = std::sqrt(6.0 / static_cast<double>(kInputs + kGates * kHidden));
  const double dense_limit = std::sqrt(6.0 / static_cast<double>(kHidden + kOutputs));
  std::uniform_real_distribution<double> input_w(-input_limit, input_limit);
  std::uniform_real_distribution<double> dense_w(-dense_limit, dense_limit);
  for (std::size_t gate = 0; gate < kGates; ++gate) {
    for (std::size_t i = 0; i < kHidden; ++i) {
      for (std::size_t j = 0; j < kInputs; ++j) p.w_ih(gate, i, j) = input_w(rng);
    }
  }
  for (std::size_t gate = 0; gate < kGates; ++gate) orthogonal_block(rng, p, gate);
  for (std::size_t k = 0; k < kOutputs; ++k) {
    for (std::size_t j = 0; j < kHidden; ++j) p.w_d(k, j) = dense_w(rng);
  }
  return p;
}

GruParams initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return initialize(rng);
}

EncodedSequence encode_sequence(const dataset::LabeledSequence& seq, const RadarConfig& config) {
  seq.validate();
  return EncodedSequence{encode_features(seq.features, config), seq.labels};
}

double frame_accuracy(std::span<const EncodedSequence> sequences, const GruParams& params) {
  std::size_t correct = 0, total = 0;
  for (const auto& seq : sequences) {
    const auto fwd = forward<double>(seq.inputs, params);
    for (std::size_t t = 0; t < fwd.probs.size(); ++t) {
      const auto& row = fwd.probs[t];
      const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      correct += best == class_index(seq.labels[t]);
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainResult train(std::span<const EncodedSequence> train_set, std::span<const EncodedSequence> val_set,
                  const TrainConfig& cfg, const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (train_set.empty() || val_set.empty()) throw ValidationError("train: training and validation sets must be nonempty");
  for (const auto* set : {&train_set, &val_set}) {
    for (const auto& seq : *set) {
      if (seq.inputs.size() != cfg.sequence_length || seq.labels.size() != cfg.sequence_length) {
        throw ValidationError("train: every sequence must have " + std::to_string(cfg.sequence_length) + " frames");
      }
    }
  }

  std::mt19937_64 rng(cfg.seed);
  TrainState state;
  state.params = initialize(rng);
  TrainResult result;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  bool first_batch = true;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      GruParams grad;
      double batch_loss = 0.0;
      // Fixed summation order keeps the result independent of scheduling.
      for (std::size_t b = start; b < stop; ++b) {
        const auto& seq = train_set[order[b]];
        const auto lg = backward(seq.inputs, seq.labels, state.params, cfg.loss_reduction);
        batch_loss += lg.loss;
        for (std::size_t i = 0; i < kTotalParams; ++i) grad.values[i] += lg.grad.values[i];
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (auto& g : grad.values) g *= inv;
      batch_loss *= inv;
      if (first_batch) {
        result.initial_loss = batch_loss;
        first_batch = false;
      }
      state = adam_step(std::move(state), grad, cfg);
      loss_sum += batch_loss;
      ++batches;
    }
    EpochRecord rec{epoch, loss_sum / static_cast<double>(batches), frame_accuracy(val_set, state.params)};
    if (rec.val_accuracy > state.best_metric) {
      state.best_metric = rec.val_accuracy;
      state.best_params = state.params;
      result.best_epoch = epoch;
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  result.params = state.best_params;
  result.best_val_accuracy = state.best_metric;
  return result;
}

namespace {

constexpr std::string_view kWeightMagic = "GRW1";
constexpr std::uint32_t kWeightVersion = 1;

}  // namespace

std::vector<std::uint8_t> serialize_params(const GruParams& params) {
  binary::Writer w;
  w.bytes(kWeightMagic);
  w.u32(kWeightVersion);
  w.u32(static_cast<std::uint32_t>(kTotalParams));
  w.u32(static_cast<std::uint32_t>(kTensors.size()));
  for (const auto& t : kTensors) {
    w.str(t.name);
    w.u32(static_cast<std::uint32_t>(t.rows));
    w.u32(static_cast<std::uint32_t>(t.cols));
  }
  w.u32(static_cast<std::uint32_t>(kNumClasses));
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    w.u32(static_cast<std::uint32_t>(c));
    w.str(class_name(class_from_index(c)));
  }
  for (double v : params.values) w.f32(static_cast<float>(v));
  return std::move(w.buffer());
}

GruParams deserialize_params(std::span<const std::uint8_t> bytes) {
  binary::Reader r(bytes, "GRW1 weight file");
  if (r.bytes(4) != kWeightMagic) throw FormatError("GRW1 weight file: bad magic");
  const auto version = r.u32();
  if (version != kWeightVersion) throw FormatError("GRW1 weight file: unsupported version " + std::to_string(version));
  const auto count = r.u32();
  const auto tensors = r.u32();
  if (tensors != kTensors.size()) {
    throw FormatError("GRW1 weight file: expected " + std::to_string(kTensors.size()) + " tensors, found " +
                      std::to_string(tensors));
  }
  struct Entry {
    std::string name;
    std::uint32_t rows, cols;
  };
  std::vector<Entry> entries;
  std::size_t recurrent = 0, dense = 0;
  for (const auto& expected : kTensors) {
    Entry e{r.str(), r.u32(), r.u32()};
    if (e.name != expected.name) throw FormatError("GRW1 weight file: unexpected tensor '" + e.name + "'");
    (e.name.rfind("gru.", 0) == 0 ? recurrent : dense) += std::size_t{e.rows} * e.cols;
    entries.push_back(std::move(e));
  }
  if (recurrent != kRecurrentParams) {
    throw FormatError("GRW1 weight file: recurrent layer has " + std::to_string(recurrent) + " parameters, expected " +
                      std::to_string(kRecurrentParams));
  }
  if (dense != kDenseParams) {
    throw FormatError("GRW1 weight file: dense layer has " + std::to_string(dense) + " parameters, expected " +
                      std::to_string(kDenseParams));
  }
  for (std::size_t i = 0; i < kTensors.size(); ++i) {
    const auto& e = entries[i];
    const auto& expected = kTensors[i];
    if (e.rows != expected.rows || e.cols != expected.cols) {
      throw FormatError("GRW1 weight file: tensor " + e.name + " has shape [" + std::to_string(e.rows) + "x" +
                        std::to_string(e.cols) + "], expected [" + std::to_string(expected.rows) + "x" +
                        std::to_string(expected.cols) + "]");
    }
  }
  if (count != kTotalParams) {
    throw FormatError("GRW1 weight file: parameter count " + std::to_string(count) + ", expected " +
                      std::to_string(kTotalParams));
  }
  const auto classes = r.u32();
  if (classes != kNumClasses) throw FormatError("GRW1 weight file: expected 6 classes");
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto index = r.u32();
    const auto name = r.str();
    if (index != c || name != class_name(class_from_index(c))) {
      throw FormatError("GRW1 weight file: class table entry " + std::to_string(c) + " is '" + name + "'");
    }
  }
  GruParams p;
  for (auto& v : p.values) v = r.f32();
  r.expect_end();
  return p;
}

void save_params(const GruParams& params, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_params(params));
}

GruParams load_params(const std::filesystem::path& path) { return deserialize_params(io::read_file(path)); }

}  // namespace gesture::model
