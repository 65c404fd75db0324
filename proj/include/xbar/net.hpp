/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_NET_HPP
#define XBAR_NET_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "xbar/core.hpp"
#include "xbar/device_model.hpp"

namespace xbar {

enum class Activation { kSigmoid, kSoftmax };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// S(x) = 1 / (1 + e^-x), saturating but finite for |x| up to ~700.
double sigmoid(double x);
std::vector<double> sigmoid(std::span<const double> x);

/// Max-shifted softmax; outputs are strictly positive and sum to 1.
std::vector<double> softmax(std::span<const double> z);

/// (1 / 2n) * sum_x ||y(x) - a(x)||^2 over paired output/target lists.
double quadratic_cost(const std::vector<std::vector<double>> &outputs,
                      const std::vector<std::vector<double>> &targets);

struct LayerSpec {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  Activation activation = Activation::kSigmoid;
};

/// Everything backprop needs from one forward pass.
struct ForwardTrace {
  std::vector<std::vector<double>> inputs; // activation fed into each layer
  std::vector<std::vector<double>> pre;    // pre-activations z per layer
  std::vector<std::vector<double>> act;    // activations per layer
  const std::vector<double> &output() const { return act.back(); }
};

/// Per-layer backprop factors: the weight gradient of layer l is
/// delta[l] * input[l]^T and the bias gradient is delta[l] itself.
struct Gradients {
  std::vector<std::vector<double>> delta;
  std::vector<std::vector<double>> input;
};

enum class OptimizerKind { kSgd, kAdam };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kSgd;
  double eta = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long long t = 0; // Adam step counter

  // Adam moment accumulators, sized lazily on the first step.
  std::vector<Matrix> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;

  static OptimizerState sgd(double eta = 0.1);
  static OptimizerState adam(double eta = 0.01, double beta1 = 0.9, double beta2 = 0.999,
                             double epsilon = 1e-8);
  void validate() const;
};

/// Feed-forward classifier whose weight matrices live on BalancedCores
/// (biases stay digital). The experiment instantiates the 30-15-2
/// sigmoid/softmax stack; tests build smaller ones.
class Mlp {
public:
  Mlp(std::vector<LayerSpec> layers, double w_max, const DeviceModel &device, std::uint64_t seed);

  std::size_t layer_count() const { return layers_.size(); }
  const LayerSpec &layer(std::size_t l) const { return layers_[l]; }
  BalancedCore &core(std::size_t l) { return cores_[l]; }
  const BalancedCore &core(std::size_t l) const { return cores_[l]; }
  std::vector<double> &bias(std::size_t l) { return biases_[l]; }
  const std::vector<double> &bias(std::size_t l) const { return biases_[l]; }
  double w_max() const { return w_max_; }

  ForwardTrace forward(std::span<const double> x) const;
  std::vector<double> predict(std::span<const double> x) const;

  /// Error vectors per layer for the quadratic cost. The output layer uses
  /// the full softmax Jacobian — no cross-entropy shortcut exists for this
  /// cost. Hidden errors ride the transpose read of the next core.
  Gradients backward(const ForwardTrace &trace, std::span<const double> y) const;

  /// One stochastic step on a single example. SGD lands on the cores as a
  /// rank-one write; Adam's per-parameter scaling does not factor, so its
  /// step is applied as per-element target updates.
  void train_step(OptimizerState &opt, std::span<const double> x, std::span<const double> y,
                  int epoch);

  void set_recorder(UpdateErrorLog *log);

  /// Text checkpoint: layer dims, w_max, conductance pairs and biases at 17
  /// significant digits. Reloading reproduces forward outputs bitwise.
  void save_checkpoint(const std::filesystem::path &path) const;
  static Mlp load_checkpoint(const std::filesystem::path &path, const DeviceModel &device,
                             std::uint64_t seed);

private:
  std::vector<LayerSpec> layers_;
  std::vector<BalancedCore> cores_;
  std::vector<std::vector<double>> biases_;
  double w_max_ = 2.0;
};

} // namespace xbar

#endif // XBAR_NET_HPP
