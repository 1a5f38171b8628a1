#include "hgtop/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "hgtop/error.hpp"

namespace hgtop {

namespace {

constexpr const char* kModelMagic = "hgtop-autoencoder 1";

void check_sizes(const std::vector<std::size_t>& sizes, bool allow_wide) {
  if (sizes.size() != 5) throw Error("autoencoder needs layer sizes [d, h, b, h, d]");
  for (auto s : sizes)
    if (s == 0) throw Error("layer sizes must be positive");
  if (sizes[0] != sizes[4] || sizes[1] != sizes[3]) {
    throw Error("autoencoder layer sizes must be symmetric");
  }
  if (!allow_wide && sizes[2] >= sizes[0]) {
    throw Error("bottleneck must be strictly smaller than the input");
  }
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Mlp::Mlp(std::vector<std::size_t> sizes, Activation hidden, bool allow_wide_bottleneck)
    : sizes_(std::move(sizes)), hidden_(hidden) {
  check_sizes(sizes_, allow_wide_bottleneck);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    layers_.push_back(
        DenseLayer{Matrix(sizes_[l + 1], sizes_[l]), std::vector<double>(sizes_[l + 1], 0.0)});
  }
}

Mlp Mlp::glorot(std::vector<std::size_t> sizes, std::uint64_t seed, Activation hidden) {
  Mlp m(std::move(sizes), hidden);
  std::mt19937_64 rng(seed);
  for (auto& layer : m.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : layer.weights.values()) w = dist(rng);
  }
  return m;
}

Mlp::Trace Mlp::run(std::span<const double> x) const {
  if (x.size() != input_size()) throw Error("input length differs from network input size");
  Trace t;
  t.act.emplace_back(x.begin(), x.end());
  t.pre.emplace_back();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const auto& in = t.act.back();
    std::vector<double> z(layer.bias);
    for (std::size_t r = 0; r < z.size(); ++r) {
      const auto row = layer.weights.row(r);
      z[r] += std::inner_product(row.begin(), row.end(), in.begin(), 0.0);
    }
    std::vector<double> a = z;
    const bool output = l + 1 == layers_.size();
    if (!output && hidden_ == Activation::leaky_relu) {
      for (auto& v : a) v = v > 0.0 ? v : kLeakySlope * v;
    }
    t.pre.push_back(std::move(z));
    t.act.push_back(std::move(a));
  }
  return t;
}

std::vector<double> Mlp::forward(std::span<const double> x) const { return run(x).act.back(); }

std::vector<double> Mlp::latent(std::span<const double> x) const { return run(x).act[2]; }

double Mlp::loss(std::span<const std::vector<double>> batch, MlpGradient* grad) const {
  if (batch.empty()) throw Error("loss over an empty batch");
  if (grad) {
    grad->weights.clear();
    grad->bias.clear();
    for (const auto& layer : layers_) {
      grad->weights.emplace_back(layer.weights.rows(), layer.weights.cols());
      grad->bias.emplace_back(layer.bias.size(), 0.0);
    }
  }
  const double n = static_cast<double>(batch.size());
  const double d = static_cast<double>(input_size());
  double total = 0.0;
  for (const auto& x : batch) {
    const auto t = run(x);
    const auto& y = t.act.back();
    std::vector<double> delta(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = y[i] - x[i];
      total += e * e / d;
      delta[i] = 2.0 * e / (d * n);
    }
    if (!grad) continue;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const auto& in = t.act[l];
      auto& gw = grad->weights[l];
      auto& gb = grad->bias[l];
      for (std::size_t r = 0; r < delta.size(); ++r) {
        gb[r] += delta[r];
        auto row = gw.row(r);
        for (std::size_t c = 0; c < in.size(); ++c) row[c] += delta[r] * in[c];
      }
      if (l == 0) break;
      std::vector<double> back(in.size(), 0.0);
      const auto& w = layers_[l].weights;
      for (std::size_t r = 0; r < delta.size(); ++r) {
        const auto row = w.row(r);
        for (std::size_t c = 0; c < in.size(); ++c) back[c] += row[c] * delta[r];
      }
      if (hidden_ == Activation::leaky_relu) {
        const auto& z = t.pre[l];
        for (std::size_t c = 0; c < back.size(); ++c) back[c] *= z[c] > 0.0 ? 1.0 : kLeakySlope;
      }
      delta = std::move(back);
    }
  }
  return total / n;
}

TrainResult train(Mlp model, std::span<const std::vector<double>> data, const TrainConfig& cfg) {
  if (data.empty()) throw Error("training data is empty");
  if (!(cfg.learning_rate >= 0.0)) throw Error("learning rate must be nonnegative");
  if (cfg.epochs < 1) throw Error("epochs must be at least 1");
  if (cfg.batch_size < 1) throw Error("batch size must be at least 1");
  for (const auto& x : data) {
    if (x.size() != model.input_size()) throw Error("training vector has the wrong length");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  MlpGradient velocity;
  for (const auto& layer : model.layers()) {
    velocity.weights.emplace_back(layer.weights.rows(), layer.weights.cols());
    velocity.bias.emplace_back(layer.bias.size(), 0.0);
  }

  TrainResult result{model, {}};
  auto& m = result.model;
  MlpGradient grad;
  std::vector<std::vector<double>> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (auto i = start; i < stop; ++i) batch.push_back(data[order[i]]);
      m.loss(batch, &grad);
      for (std::size_t l = 0; l < m.layers().size(); ++l) {
        auto& layer = m.layers()[l];
        auto vw = velocity.weights[l].values();
        auto gw = grad.weights[l].values();
        auto w = layer.weights.values();
        for (std::size_t i = 0; i < w.size(); ++i) {
          vw[i] = cfg.momentum * vw[i] - cfg.learning_rate * gw[i];
          w[i] += vw[i];
        }
        auto& vb = velocity.bias[l];
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
          vb[i] = cfg.momentum * vb[i] - cfg.learning_rate * grad.bias[l][i];
          layer.bias[i] += vb[i];
        }
      }
    }
    result.loss_history.push_back(m.loss(data));
  }
  return result;
}

double reconstruction_error(const Mlp& m, std::span<const double> x) {
  const auto y = m.forward(x);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - x[i]) * (y[i] - x[i]);
  return s / static_cast<double>(y.size());
}

double calibrate_detection_threshold(const Mlp& m, std::span<const std::vector<double>> normal) {
  if (normal.empty()) throw Error("calibration needs held-out normal data");
  std::vector<double> errs;
  for (const auto& x : normal) errs.push_back(reconstruction_error(m, x));
  const double n = static_cast<double>(errs.size());
  const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / n;
  double var = 0.0;
  for (double e : errs) var += (e - mean) * (e - mean) / n;
  return mean + 3.0 * std::sqrt(var);
}

bool detect(const Mlp& m, std::span<const double> x, double threshold) {
  return reconstruction_error(m, x) > threshold;
}

std::vector<double> denoise(const Mlp& m, std::span<const double> x) { return m.forward(x); }

// --- scaler and model file ----------------------------------------------------------

FeatureScaler FeatureScaler::fit(std::span<const std::vector<double>> data) {
  if (data.empty()) throw Error("cannot fit a scaler to no data");
  const auto d = data.front().size();
  FeatureScaler s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  const double n = static_cast<double>(data.size());
  for (const auto& x : data) {
    if (x.size() != d) throw Error("rows differ in length");
    for (std::size_t i = 0; i < d; ++i) s.mean[i] += x[i];
  }
  for (auto& m : s.mean) m /= n;
  for (const auto& x : data)
    for (std::size_t i = 0; i < d; ++i) s.scale[i] += (x[i] - s.mean[i]) * (x[i] - s.mean[i]) / n;
  for (std::size_t i = 0; i < d; ++i) {
    const double sd = std::sqrt(s.scale[i]);
    s.scale[i] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[i])) ? sd : 1.0;
  }
  return s;
}

std::vector<double> FeatureScaler::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) throw Error("scaler input has the wrong length");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (x[i] - mean[i]) / scale[i];
  return z;
}

std::vector<double> FeatureScaler::invert(std::span<const double> z) const {
  if (z.size() != mean.size()) throw Error("scaler input has the wrong length");
  std::vector<double> x(z.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] * scale[i] + mean[i];
  return x;
}

std::vector<double> AutoencoderModel::denoise(std::span<const double> x) const {
  return scaler.invert(net.forward(scaler.apply(x)));
}

void save_model(std::ostream& out, const AutoencoderModel& m) {
  auto line = [&](std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? " " : "") << format17(values[i]);
    out << '\n';
  };
  out << kModelMagic << '\n';
  out << "layers";
  for (auto s : m.net.sizes()) out << ' ' << s;
  out << '\n';
  out << "activation " << (m.net.hidden_activation() == Activation::leaky_relu ? "leaky_relu"
                                                                                : "identity")
      << '\n';
  for (const auto& layer : m.net.layers()) {
    line(layer.weights.values());
    line(layer.bias);
  }
  out << "mean ";
  line(m.scaler.mean);
  out << "scale ";
  line(m.scaler.scale);
}

AutoencoderModel load_model(std::istream& in) {
  std::string text;
  std::size_t line_no = 0;
  auto next = [&](const char* what) -> std::istringstream {
    if (!std::getline(in, text)) throw ParseError(line_no + 1, what, "unexpected end of model");
    ++line_no;
    return std::istringstream(text);
  };
  auto read_values = [&](std::istringstream& ss, std::size_t count, const char* what) {
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      char* end = nullptr;
      const double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0' || !std::isfinite(x)) {
        throw ParseError(line_no, what, "invalid number '" + tok + "'");
      }
      v.push_back(x);
    }
    if (v.size() != count) throw ParseError(line_no, what, "wrong number of values");
    return v;
  };

  {
    std::getline(in, text);
    ++line_no;
    if (text != kModelMagic) throw ParseError(1, "version", "unknown model format");
  }
  auto ls = next("layers");
  std::string key;
  ls >> key;
  if (key != "layers") throw ParseError(line_no, "layers", "expected layer sizes");
  std::vector<std::size_t> sizes;
  for (std::size_t s; ls >> s;) sizes.push_back(s);
  auto as = next("activation");
  std::string act;
  as >> key >> act;
  if (key != "activation" || (act != "leaky_relu" && act != "identity")) {
    throw ParseError(line_no, "activation", "expected leaky_relu or identity");
  }
  const auto hidden = act == "leaky_relu" ? Activation::leaky_relu : Activation::identity;
  bool wide = sizes.size() == 5 && sizes[2] >= sizes[0];
  AutoencoderModel m{Mlp(sizes, hidden, wide), {}};
  for (auto& layer : m.net.layers()) {
    auto ws = next("weights");
    auto w = read_values(ws, layer.weights.values().size(), "weights");
    std::copy(w.begin(), w.end(), layer.weights.values().begin());
    auto bs = next("bias");
    layer.bias = read_values(bs, layer.bias.size(), "bias");
  }
  auto ms = next("mean");
  ms >> key;
  if (key != "mean") throw ParseError(line_no, "mean", "expected scaler mean");
  m.scaler.mean = read_values(ms, sizes.front(), "mean");
  auto ss = next("scale");
  ss >> key;
  if (key != "scale") throw ParseError(line_no, "scale", "expected scaler scale");
  m.scaler.scale = read_values(ss, sizes.front(), "scale");
  return m;
}

}  // namespace hgtop
