#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuelcalc/errors.hpp"
#include "fuelcalc/rng.hpp"
#include "fuelcalc/spectral.hpp"
#include "fuelcalc/trajectory.hpp"

namespace fuelcalc {

struct ModelConfig {
  int N_h = 50;
  int N_v = 50;
  std::vector<int> hidden_sizes{256, 128, 64};
  std::string activation = "relu";
  double learning_rate = 0.05;
  int batch_size = 64;
  int epochs = 20;
  std::uint64_t seed = 1;
  double T_M = 7200.0;  // seconds
  std::vector<std::string> type_vocabulary;
  // Fixed input scaling for the deep part. Raw cosine coefficients carry the
  // physical magnitude of the signals (alpha_0 is twice the mean altitude),
  // which would saturate the sigmoid head immediately.
  double alpha_scale = 4.0e-5;
  double beta_scale = 2.0e-3;
  double momentum = 0.9;
  double lr_decay = 1.0;  // per-epoch multiplicative step-size factor
  bool shuffle = true;

  int deep_input_size() const { return N_h + N_v + 2; }
  int wide_input_size() const { return 3 + static_cast<int>(type_vocabulary.size()); }

  void validate() const {
    if (hidden_sizes.empty()) throw InvalidArgument("hidden_sizes must be non-empty");
    for (int h : hidden_sizes) {
      if (h <= 0) throw InvalidArgument("hidden layer sizes must be positive");
    }
    if (!(learning_rate > 0.0) || !(learning_rate < 1.0)) {
      throw InvalidArgument("learning_rate must lie in (0, 1)");
    }
    if (!(lr_decay > 0.0) || lr_decay > 1.0) {
      throw InvalidArgument("lr_decay must lie in (0, 1]");
    }
    if (batch_size <= 0 || epochs <= 0 || N_h < 0 || N_v < 0 || !(T_M > 0.0)) {
      throw InvalidArgument("invalid model configuration");
    }
    if (activation != "relu") throw InvalidArgument("unsupported activation: " + activation);
  }
};

// Maps fuel mass to the sigmoid's (0, 1) range and back.
struct TargetScaler {
  double q_min = 0.0;
  double q_max = 1.0;
};

struct DenseLayer {
  int out = 0;
  int in = 0;
  std::vector<double> W;  // row-major [out][in]
  std::vector<double> b;  // [out]
};

struct WideDeepModel {
  ModelConfig config;
  TargetScaler scaler;
  std::vector<double> wide_w;
  double wide_b = 0.0;
  std::vector<DenseLayer> deep;
  std::vector<double> out_w;
  double global_bias = 0.0;
};

// [t0 / T_M, one-hot(aircraft_type), age / 50, wingspan / 80]
inline std::vector<double> encode_wide(double t0, const AircraftMeta& meta,
                                       const std::vector<std::string>& vocabulary,
                                       double T_M) {
  std::vector<double> x(3 + vocabulary.size(), 0.0);
  x[0] = t0 / T_M;
  auto it = std::find(vocabulary.begin(), vocabulary.end(), meta.aircraft_type);
  if (it == vocabulary.end()) {
    throw UnknownAircraftType("'" + meta.aircraft_type + "' is not in the model vocabulary");
  }
  x[1 + static_cast<std::size_t>(it - vocabulary.begin())] = 1.0;
  x[1 + vocabulary.size()] = meta.age / 50.0;
  x[2 + vocabulary.size()] = meta.wingspan / 80.0;
  return x;
}

namespace detail {

inline double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Keeps the squashed output strictly inside (0, 1) so the unscaled
// prediction stays strictly inside [q_min, q_max].
inline constexpr double kSigmoidFloor = 1e-12;

inline double clamp_sigmoid(double s) {
  return std::clamp(s, kSigmoidFloor, 1.0 - kSigmoidFloor);
}

struct ForwardState {
  std::vector<std::vector<double>> pre;   // z per layer
  std::vector<std::vector<double>> post;  // relu(z) per layer
  std::vector<double> deep_in;
  std::vector<double> wide_in;
  double z = 0.0;        // sigmoid argument
  double s = 0.0;        // clamped sigmoid output
  double s_raw = 0.0;    // unclamped
};

inline void deep_input(const WideDeepModel& model, const SpectralFeature& feature,
                       std::vector<double>& out) {
  const ModelConfig& cfg = model.config;
  if (static_cast<int>(feature.alpha.size()) != cfg.N_h + 1 ||
      static_cast<int>(feature.beta.size()) != cfg.N_v + 1) {
    throw ShapeMismatch("feature truncation radii do not match the model configuration");
  }
  out.resize(feature.alpha.size() + feature.beta.size());
  std::size_t k = 0;
  for (double a : feature.alpha) out[k++] = a * cfg.alpha_scale;
  for (double b : feature.beta) out[k++] = b * cfg.beta_scale;
}

inline void run_forward(const WideDeepModel& model, double t0, const AircraftMeta& meta,
                        const SpectralFeature& feature, ForwardState& st) {
  const ModelConfig& cfg = model.config;
  st.wide_in = encode_wide(t0, meta, cfg.type_vocabulary, cfg.T_M);
  if (st.wide_in.size() != model.wide_w.size()) {
    throw ShapeMismatch("wide input size does not match wide weights");
  }
  double f_wide = model.wide_b;
  for (std::size_t i = 0; i < st.wide_in.size(); ++i) f_wide += model.wide_w[i] * st.wide_in[i];

  deep_input(model, feature, st.deep_in);
  st.pre.resize(model.deep.size());
  st.post.resize(model.deep.size());
  const std::vector<double>* u = &st.deep_in;
  for (std::size_t l = 0; l < model.deep.size(); ++l) {
    const DenseLayer& layer = model.deep[l];
    if (static_cast<int>(u->size()) != layer.in) {
      throw ShapeMismatch("deep layer " + std::to_string(l) + " input size mismatch");
    }
    st.pre[l].assign(static_cast<std::size_t>(layer.out), 0.0);
    st.post[l].assign(static_cast<std::size_t>(layer.out), 0.0);
    const double* W = layer.W.data();
    for (int o = 0; o < layer.out; ++o) {
      double acc = layer.b[static_cast<std::size_t>(o)];
      const double* row = W + static_cast<std::size_t>(o) * static_cast<std::size_t>(layer.in);
      for (int i = 0; i < layer.in; ++i) acc += row[i] * (*u)[static_cast<std::size_t>(i)];
      st.pre[l][static_cast<std::size_t>(o)] = acc;
      st.post[l][static_cast<std::size_t>(o)] = acc > 0.0 ? acc : 0.0;
    }
    u = &st.post[l];
  }
  if (u->size() != model.out_w.size()) {
    throw ShapeMismatch("output weight size does not match last hidden layer");
  }
  double f_deep = 0.0;
  for (std::size_t i = 0; i < u->size(); ++i) f_deep += model.out_w[i] * (*u)[i];

  st.z = f_wide + f_deep + model.global_bias;
  st.s_raw = sigmoid(st.z);
  st.s = clamp_sigmoid(st.s_raw);
}

}  // namespace detail

// q_hat = q_min + sigmoid(F_wide + F_deep + global_bias) * (q_max - q_min)
inline double forward(const WideDeepModel& model, double t0, const AircraftMeta& meta,
                      const SpectralFeature& feature) {
  detail::ForwardState st;
  detail::run_forward(model, t0, meta, feature, st);
  return model.scaler.q_min + st.s * (model.scaler.q_max - model.scaler.q_min);
}

// The squashed output before unscaling, for callers that want to flag
// saturated predictions.
inline double forward_squashed(const WideDeepModel& model, double t0, const AircraftMeta& meta,
                               const SpectralFeature& feature) {
  detail::ForwardState st;
  detail::run_forward(model, t0, meta, feature, st);
  return st.s;
}

struct TrainingSample {
  SpectralFeature feature;
  AircraftMeta meta;
  double q_true = 0.0;  // kg burned over the segment
  std::string flight_id;
  double seg_start = 0.0;  // seconds from flight start
};

namespace detail {

inline double scaled_target(const TargetScaler& scaler, double q_true) {
  const double y = (q_true - scaler.q_min) / (scaler.q_max - scaler.q_min);
  if (!(y >= 0.0) || !(y <= 1.0)) {
    throw TargetOutOfRange("q_true = " + std::to_string(q_true) + " outside scaler range [" +
                           std::to_string(scaler.q_min) + ", " + std::to_string(scaler.q_max) + "]");
  }
  return y;
}

}  // namespace detail

// Mean squared error between the squashed output and the scaled target.
inline double loss(const WideDeepModel& model, const std::vector<TrainingSample>& batch) {
  if (batch.empty()) throw InvalidArgument("loss requires a non-empty batch");
  double acc = 0.0;
  detail::ForwardState st;
  for (const TrainingSample& sample : batch) {
    const double y = detail::scaled_target(model.scaler, sample.q_true);
    detail::run_forward(model, sample.feature.t0, sample.meta, sample.feature, st);
    const double d = st.s - y;
    acc += d * d;
  }
  return acc / static_cast<double>(batch.size());
}

struct Gradients {
  std::vector<double> wide_w;
  double wide_b = 0.0;
  std::vector<DenseLayer> deep;  // same shapes as the model, W/b hold gradients
  std::vector<double> out_w;
  double global_bias = 0.0;
};

namespace detail {

inline Gradients zero_gradients(const WideDeepModel& model) {
  Gradients g;
  g.wide_w.assign(model.wide_w.size(), 0.0);
  g.out_w.assign(model.out_w.size(), 0.0);
  g.deep.resize(model.deep.size());
  for (std::size_t l = 0; l < model.deep.size(); ++l) {
    g.deep[l].out = model.deep[l].out;
    g.deep[l].in = model.deep[l].in;
    g.deep[l].W.assign(model.deep[l].W.size(), 0.0);
    g.deep[l].b.assign(model.deep[l].b.size(), 0.0);
  }
  return g;
}

// Accumulates mean-loss gradients over the batch; returns the batch loss.
inline double backward(const WideDeepModel& model, const std::vector<TrainingSample>& samples,
                       const std::vector<std::size_t>& batch, Gradients& g) {
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss_acc = 0.0;
  ForwardState st;
  std::vector<double> delta, delta_prev;
  for (std::size_t idx : batch) {
    const TrainingSample& sample = samples[idx];
    const double y = scaled_target(model.scaler, sample.q_true);
    run_forward(model, sample.feature.t0, sample.meta, sample.feature, st);
    const double diff = st.s - y;
    loss_acc += diff * diff;

    // d(loss_i)/dz through the clamped sigmoid
    double dz = 2.0 * diff * inv_b;
    if (st.s == st.s_raw) {
      dz *= st.s_raw * (1.0 - st.s_raw);
    } else {
      dz = 0.0;
    }

    for (std::size_t i = 0; i < st.wide_in.size(); ++i) g.wide_w[i] += dz * st.wide_in[i];
    g.wide_b += dz;
    g.global_bias += dz;

    const std::vector<double>& last = st.post.back();
    delta.assign(last.size(), 0.0);
    for (std::size_t i = 0; i < last.size(); ++i) {
      g.out_w[i] += dz * last[i];
      delta[i] = dz * model.out_w[i];
    }
    for (std::size_t l = model.deep.size(); l-- > 0;) {
      const DenseLayer& layer = model.deep[l];
      DenseLayer& gl = g.deep[l];
      const std::vector<double>& input = (l == 0) ? st.deep_in : st.post[l - 1];
      for (int o = 0; o < layer.out; ++o) {
        double d = delta[static_cast<std::size_t>(o)];
        if (st.pre[l][static_cast<std::size_t>(o)] <= 0.0) d = 0.0;
        delta[static_cast<std::size_t>(o)] = d;
        if (d == 0.0) continue;
        gl.b[static_cast<std::size_t>(o)] += d;
        double* grow = gl.W.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(layer.in);
        for (int i = 0; i < layer.in; ++i) grow[i] += d * input[static_cast<std::size_t>(i)];
      }
      if (l > 0) {
        delta_prev.assign(static_cast<std::size_t>(layer.in), 0.0);
        for (int o = 0; o < layer.out; ++o) {
          const double d = delta[static_cast<std::size_t>(o)];
          if (d == 0.0) continue;
          const double* row = layer.W.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(layer.in);
          for (int i = 0; i < layer.in; ++i) delta_prev[static_cast<std::size_t>(i)] += d * row[i];
        }
        delta.swap(delta_prev);
      }
    }
  }
  return loss_acc * inv_b;
}

}  // namespace detail

// Fresh model with Glorot-uniform weights and zero biases, drawn from the
// seeded init stream.
inline WideDeepModel init_model(const ModelConfig& config) {
  config.validate();
  if (config.type_vocabulary.empty()) {
    throw InvalidArgument("cannot initialize a model with an empty type vocabulary");
  }
  WideDeepModel model;
  model.config = config;

  auto glorot = [](Rng& rng, std::vector<double>& w, int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w) v = rng.uniform(-limit, limit);
  };

  Rng wide_rng(derive_seed(config.seed, "init", 0));
  model.wide_w.assign(static_cast<std::size_t>(config.wide_input_size()), 0.0);
  glorot(wide_rng, model.wide_w, config.wide_input_size(), 1);
  model.wide_b = 0.0;

  int in = config.deep_input_size();
  for (std::size_t l = 0; l < config.hidden_sizes.size(); ++l) {
    DenseLayer layer;
    layer.in = in;
    layer.out = config.hidden_sizes[l];
    layer.W.assign(static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out), 0.0);
    layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
    Rng rng(derive_seed(config.seed, "init", 1 + l));
    glorot(rng, layer.W, layer.in, layer.out);
    model.deep.push_back(std::move(layer));
    in = config.hidden_sizes[l];
  }
  Rng out_rng(derive_seed(config.seed, "init", 1 + config.hidden_sizes.size()));
  model.out_w.assign(static_cast<std::size_t>(in), 0.0);
  glorot(out_rng, model.out_w, in, 1);
  model.global_bias = 0.0;
  return model;
}

struct TrainResult {
  WideDeepModel model;
  std::vector<double> history;  // mean training loss per epoch
};

// Mini-batch SGD with momentum. Deterministic for a fixed seed: samples are
// first brought into a canonical order (flight_id, segment start) so the
// seeded shuffle does not depend on dataset file order.
inline TrainResult train(const std::vector<TrainingSample>& dataset, ModelConfig config) {
  if (config.type_vocabulary.empty()) {
    std::vector<std::string> vocab;
    for (const TrainingSample& s : dataset) vocab.push_back(s.meta.aircraft_type);
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    config.type_vocabulary = std::move(vocab);
  }
  config.validate();
  if (dataset.size() < static_cast<std::size_t>(config.batch_size)) {
    throw InvalidArgument("dataset smaller than one batch");
  }
  for (const TrainingSample& s : dataset) {
    if (std::find(config.type_vocabulary.begin(), config.type_vocabulary.end(),
                  s.meta.aircraft_type) == config.type_vocabulary.end()) {
      throw UnknownAircraftType("'" + s.meta.aircraft_type + "' missing from vocabulary");
    }
    if (!(s.q_true > 0.0)) throw TargetOutOfRange("q_true must be positive");
  }

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const TrainingSample& sa = dataset[a];
    const TrainingSample& sb = dataset[b];
    if (sa.flight_id != sb.flight_id) return sa.flight_id < sb.flight_id;
    if (sa.seg_start != sb.seg_start) return sa.seg_start < sb.seg_start;
    if (sa.feature.t0 != sb.feature.t0) return sa.feature.t0 < sb.feature.t0;
    return sa.q_true < sb.q_true;
  });

  TrainResult result;
  WideDeepModel& model = result.model;
  model = init_model(config);
  double q_max = 0.0;
  for (const TrainingSample& s : dataset) q_max = std::max(q_max, s.q_true);
  model.scaler.q_min = 0.0;
  model.scaler.q_max = 1.1 * q_max;

  Gradients vel = detail::zero_gradients(model);
  Gradients grad = detail::zero_gradients(model);

  double lr = config.learning_rate;
  auto step = [&](std::vector<double>& param, std::vector<double>& v,
                  const std::vector<double>& g) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      v[i] = config.momentum * v[i] - lr * g[i];
      param[i] += v[i];
      if (!std::isfinite(param[i])) throw Diverged("non-finite parameter during training");
    }
  };
  auto step1 = [&](double& param, double& v, double g) {
    v = config.momentum * v - lr * g;
    param += v;
    if (!std::isfinite(param)) throw Diverged("non-finite parameter during training");
  };

  std::vector<std::size_t> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> perm = order;
    if (config.shuffle) {
      Rng rng(derive_seed(config.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
      rng.shuffle(perm);
    }
    double epoch_sse = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(perm.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                   perm.begin() + static_cast<std::ptrdiff_t>(stop));
      grad = detail::zero_gradients(model);
      const double batch_loss = detail::backward(model, dataset, batch, grad);
      if (!std::isfinite(batch_loss)) {
        throw Diverged("non-finite loss at epoch " + std::to_string(epoch) + ", batch offset " +
                       std::to_string(start));
      }
      epoch_sse += batch_loss * static_cast<double>(batch.size());
      seen += batch.size();

      step(model.wide_w, vel.wide_w, grad.wide_w);
      step1(model.wide_b, vel.wide_b, grad.wide_b);
      for (std::size_t l = 0; l < model.deep.size(); ++l) {
        step(model.deep[l].W, vel.deep[l].W, grad.deep[l].W);
        step(model.deep[l].b, vel.deep[l].b, grad.deep[l].b);
      }
      step(model.out_w, vel.out_w, grad.out_w);
      step1(model.global_bias, vel.global_bias, grad.global_bias);
    }
    result.history.push_back(epoch_sse / static_cast<double>(seen));
    lr *= config.lr_decay;
  }
  return result;
}

inline constexpr int kModelFormatVersion = 1;

inline void save_model(const WideDeepModel& model, std::ostream& out) {
  nlohmann::json j;
  j["version"] = kModelFormatVersion;
  j["config"] = {{"N_h", model.config.N_h},
                 {"N_v", model.config.N_v},
                 {"hidden_sizes", model.config.hidden_sizes},
                 {"activation", model.config.activation},
                 {"learning_rate", model.config.learning_rate},
                 {"batch_size", model.config.batch_size},
                 {"epochs", model.config.epochs},
                 {"seed", model.config.seed},
                 {"T_M", model.config.T_M},
                 {"alpha_scale", model.config.alpha_scale},
                 {"beta_scale", model.config.beta_scale},
                 {"momentum", model.config.momentum},
                 {"lr_decay", model.config.lr_decay},
                 {"shuffle", model.config.shuffle}};
  j["scaler"] = {{"q_min", model.scaler.q_min}, {"q_max", model.scaler.q_max}};
  j["vocabulary"] = model.config.type_vocabulary;
  j["wide"] = {{"w", model.wide_w}, {"b", model.wide_b}};
  nlohmann::json deep = nlohmann::json::array();
  for (const DenseLayer& layer : model.deep) {
    nlohmann::json rows = nlohmann::json::array();
    for (int o = 0; o < layer.out; ++o) {
      rows.push_back(std::vector<double>(
          layer.W.begin() + static_cast<std::ptrdiff_t>(o) * layer.in,
          layer.W.begin() + static_cast<std::ptrdiff_t>(o + 1) * layer.in));
    }
    deep.push_back({{"W", rows}, {"b", layer.b}});
  }
  j["deep"] = std::move(deep);
  j["out"] = {{"w", model.out_w}};
  j["global_bias"] = model.global_bias;
  out << j.dump(2) << "\n";
}

inline WideDeepModel load_model(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptModel(std::string("cannot parse model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version") || !j.at("version").is_number_integer()) {
    throw CorruptModel("missing version tag");
  }
  const int version = j.at("version").get<int>();
  if (version != kModelFormatVersion) {
    throw VersionMismatch("model file version " + std::to_string(version) +
                          "; this build reads version " + std::to_string(kModelFormatVersion));
  }
  WideDeepModel model;
  try {
    const nlohmann::json& c = j.at("config");
    model.config.N_h = c.at("N_h").get<int>();
    model.config.N_v = c.at("N_v").get<int>();
    model.config.hidden_sizes = c.at("hidden_sizes").get<std::vector<int>>();
    model.config.activation = c.at("activation").get<std::string>();
    model.config.learning_rate = c.at("learning_rate").get<double>();
    model.config.batch_size = c.at("batch_size").get<int>();
    model.config.epochs = c.at("epochs").get<int>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.config.T_M = c.at("T_M").get<double>();
    model.config.alpha_scale = c.at("alpha_scale").get<double>();
    model.config.beta_scale = c.at("beta_scale").get<double>();
    model.config.momentum = c.at("momentum").get<double>();
    model.config.lr_decay = c.at("lr_decay").get<double>();
    model.config.shuffle = c.at("shuffle").get<bool>();
    model.config.type_vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    model.scaler.q_min = j.at("scaler").at("q_min").get<double>();
    model.scaler.q_max = j.at("scaler").at("q_max").get<double>();
    model.wide_w = j.at("wide").at("w").get<std::vector<double>>();
    model.wide_b = j.at("wide").at("b").get<double>();
    for (const nlohmann::json& layer_json : j.at("deep")) {
      DenseLayer layer;
      const auto rows = layer_json.at("W").get<std::vector<std::vector<double>>>();
      layer.b = layer_json.at("b").get<std::vector<double>>();
      layer.out = static_cast<int>(rows.size());
      layer.in = rows.empty() ? 0 : static_cast<int>(rows.front().size());
      for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != layer.in) throw CorruptModel("ragged weight matrix");
        layer.W.insert(layer.W.end(), row.begin(), row.end());
      }
      if (static_cast<int>(layer.b.size()) != layer.out) throw CorruptModel("bias size mismatch");
      model.deep.push_back(std::move(layer));
    }
    model.out_w = j.at("out").at("w").get<std::vector<double>>();
    model.global_bias = j.at("global_bias").get<double>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptModel(std::string("malformed model file: ") + e.what());
  }

  // structural checks
  int width = model.config.deep_input_size();
  for (const DenseLayer& layer : model.deep) {
    if (layer.in != width) throw CorruptModel("deep layer input size does not chain");
    width = layer.out;
  }
  if (static_cast<int>(model.out_w.size()) != width ||
      model.wide_w.size() != static_cast<std::size_t>(model.config.wide_input_size())) {
    throw CorruptModel("layer shapes do not chain to the output");
  }
  return model;
}

// slice -> featurize with the model's radii and T_M -> forward
inline double predict_interval(const WideDeepModel& model, const FlightTrack& track,
                               double t_a, double t_b, double min_seconds = 60.0) {
  if (!(t_b - t_a >= min_seconds)) {
    throw InvalidArgument("prediction interval must be at least " +
                          std::to_string(min_seconds) + " s long");
  }
  const FlightTrack piece = slice_track(track, t_a, t_b);
  const SpectralFeature feature =
      featurize(piece, model.config.N_h, model.config.N_v, model.config.T_M);
  return forward(model, feature.t0, track.meta, feature);
}

// --- dataset serialization (featurize JSONL plus q_true) ---

inline void write_dataset_record(std::ostream& out, const TrainingSample& s,
                                 bool with_target = true) {
  nlohmann::json j;
  j["flight_id"] = s.flight_id;
  j["seg_start"] = s.seg_start;
  j["t0"] = s.feature.t0;
  j["T_M"] = s.feature.T_M;
  j["alpha"] = s.feature.alpha;
  j["beta"] = s.feature.beta;
  j["meta"] = {{"aircraft_type", s.meta.aircraft_type},
               {"age", s.meta.age},
               {"wingspan", s.meta.wingspan}};
  if (with_target) j["q_true"] = s.q_true;
  out << j.dump() << "\n";
}

inline void write_dataset(std::ostream& out, const std::vector<TrainingSample>& samples,
                          bool with_target = true) {
  for (const TrainingSample& s : samples) write_dataset_record(out, s, with_target);
}

inline std::vector<TrainingSample> read_dataset(std::istream& in, bool require_target = true) {
  std::vector<TrainingSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    TrainingSample s;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      s.flight_id = j.value("flight_id", std::string());
      s.seg_start = j.value("seg_start", 0.0);
      s.feature.t0 = j.at("t0").get<double>();
      s.feature.T_M = j.at("T_M").get<double>();
      s.feature.alpha = j.at("alpha").get<std::vector<double>>();
      s.feature.beta = j.at("beta").get<std::vector<double>>();
      s.meta.aircraft_type = j.at("meta").at("aircraft_type").get<std::string>();
      s.meta.age = j.at("meta").at("age").get<double>();
      s.meta.wingspan = j.at("meta").at("wingspan").get<double>();
      if (require_target || j.contains("q_true")) s.q_true = j.at("q_true").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord("line " + std::to_string(line_no) + ": " + e.what());
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace fuelcalc
