#pragma once

// Feedforward autoencoder [d, h, b, h, d] trained by mini-batch gradient
// descent with momentum on mean squared reconstruction error.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hgtop/linalg.hpp"

namespace hgtop {

enum class Activation { leaky_relu, identity };

struct DenseLayer {
  Matrix weights;  // out x in
  std::vector<double> bias;
  bool operator==(const DenseLayer&) const = default;
};

struct MlpGradient {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> bias;
};

class Mlp {
 public:
  static constexpr double kLeakySlope = 0.01;

  /// Zero-initialized network. `sizes` must read [d, h, b, h, d] with b < d
  /// unless `allow_wide_bottleneck` is set.
  explicit Mlp(std::vector<std::size_t> sizes, Activation hidden = Activation::leaky_relu,
               bool allow_wide_bottleneck = false);

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Mlp glorot(std::vector<std::size_t> sizes, std::uint64_t seed,
                    Activation hidden = Activation::leaky_relu);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t bottleneck_size() const { return sizes_[2]; }
  Activation hidden_activation() const { return hidden_; }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::vector<double> forward(std::span<const double> x) const;
  /// Bottleneck activation.
  std::vector<double> latent(std::span<const double> x) const;

  /// Mean over `batch` of the per-sample mean squared reconstruction error.
  /// When `grad` is non-null it receives the exact gradient of that loss.
  double loss(std::span<const std::vector<double>> batch, MlpGradient* grad = nullptr) const;

  bool operator==(const Mlp&) const = default;

 private:
  // Pre-activations and activations of every layer (activations[0] = input).
  struct Trace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
  };
  Trace run(std::span<const double> x) const;

  std::vector<std::size_t> sizes_;
  Activation hidden_ = Activation::leaky_relu;
  std::vector<DenseLayer> layers_;
};

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  std::size_t epochs = 500;
  std::uint64_t seed = 0;  // drives mini-batch shuffling
};

struct TrainResult {
  Mlp model;
  /// Full-data loss after each epoch.
  std::vector<double> loss_history;
};

TrainResult train(Mlp model, std::span<const std::vector<double>> data, const TrainConfig& cfg);

double reconstruction_error(const Mlp& m, std::span<const double> x);

/// mean + 3 * standard deviation of reconstruction errors on held-out normal data.
double calibrate_detection_threshold(const Mlp& m, std::span<const std::vector<double>> normal);

bool detect(const Mlp& m, std::span<const double> x, double threshold);

std::vector<double> denoise(const Mlp& m, std::span<const double> x);

/// Per-coordinate affine map applied before the network and inverted after.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static FeatureScaler fit(std::span<const std::vector<double>> data);
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> invert(std::span<const double> z) const;
  bool operator==(const FeatureScaler&) const = default;
};

/// A network plus the scaler used to train it; the unit the CLI stores.
struct AutoencoderModel {
  Mlp net;
  FeatureScaler scaler;

  std::vector<double> denoise(std::span<const double> x) const;
  bool operator==(const AutoencoderModel&) const = default;
};

/// Text format: a version line, a `layers` line, one line per weight matrix
/// (row-major) and per bias vector, then `mean` and `scale` lines. Values are
/// written with 17 significant digits.
void save_model(std::ostream& out, const AutoencoderModel& m);
AutoencoderModel load_model(std::istream& in);

}  // namespace hgtop
