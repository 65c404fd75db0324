/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbar/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xbar/errors.hpp"

namespace xbar {

std::string_view activation_name(Activation a) {
  return a == Activation::kSigmoid ? "sigmoid" : "softmax";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") {
    return Activation::kSigmoid;
  }
  if (name == "softmax") {
    return Activation::kSoftmax;
  }
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> sigmoid(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = sigmoid(x[i]);
  }
  return out;
}

std::vector<double> softmax(std::span<const double> z) {
  if (z.empty()) {
    throw DomainError("softmax of empty vector");
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> out(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - zmax);
    sum += out[i];
  }
  for (auto &v : out) {
    v /= sum;
  }
  return out;
}

double quadratic_cost(const std::vector<std::vector<double>> &outputs,
                      const std::vector<std::vector<double>> &targets) {
  if (outputs.empty() || outputs.size() != targets.size()) {
    throw DomainError("quadratic_cost needs equal, nonempty output/target lists");
  }
  double acc = 0.0;
  for (std::size_t n = 0; n < outputs.size(); ++n) {
    if (outputs[n].size() != targets[n].size()) {
      throw DomainError("output/target length mismatch");
    }
    for (std::size_t k = 0; k < outputs[n].size(); ++k) {
      const double e = targets[n][k] - outputs[n][k];
      acc += e * e;
    }
  }
  return acc / (2.0 * static_cast<double>(outputs.size()));
}

OptimizerState OptimizerState::sgd(double eta) {
  OptimizerState s;
  s.kind = OptimizerKind::kSgd;
  s.eta = eta;
  return s;
}

OptimizerState OptimizerState::adam(double eta, double beta1, double beta2, double epsilon) {
  OptimizerState s;
  s.kind = OptimizerKind::kAdam;
  s.eta = eta;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  return s;
}

void OptimizerState::validate() const {
  if (!(eta >= 0.0)) {
    throw ConfigError("learning rate must be >= 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0,1)");
  }
  if (!(epsilon > 0.0)) {
    throw ConfigError("Adam epsilon must be > 0");
  }
}

namespace {

std::uint64_t layer_seed(std::uint64_t seed, std::size_t layer) {
  return splitmix64(seed ^ (0x1a7e5eedULL + layer));
}

} // namespace

Mlp::Mlp(std::vector<LayerSpec> layers, double w_max, const DeviceModel &device,
         std::uint64_t seed)
    : layers_(std::move(layers)), w_max_(w_max) {
  if (layers_.empty()) {
    throw ConfigError("network needs at least one layer");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].fan_in < 1 || layers_[l].fan_out < 1) {
      throw ConfigError("layer fan_in/fan_out must be >= 1");
    }
    if (l > 0 && layers_[l].fan_in != layers_[l - 1].fan_out) {
      std::ostringstream os;
      os << "layer " << l << " fan_in " << layers_[l].fan_in << " does not match previous fan_out "
         << layers_[l - 1].fan_out;
      throw ConfigError(os.str());
    }
  }

  RandomStream init(seed, 0x1417);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto &spec = layers_[l];
    cores_.emplace_back(spec.fan_out, spec.fan_in, w_max_, device, layer_seed(seed, l));
    const double range = 0.5 / std::sqrt(static_cast<double>(spec.fan_in));
    for (std::size_t i = 0; i < spec.fan_out; ++i) {
      for (std::size_t j = 0; j < spec.fan_in; ++j) {
        cores_[l].set_weight(i, j, init.uniform(-range, range));
      }
    }
    biases_.emplace_back(spec.fan_out, 0.0);
  }
}

ForwardTrace Mlp::forward(std::span<const double> x) const {
  if (x.size() != layers_.front().fan_in) {
    throw DomainError("input length does not match first layer fan_in");
  }
  ForwardTrace trace;
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    trace.inputs.push_back(a);
    std::vector<double> z = cores_[l].vmm(a);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] += biases_[l][i];
    }
    trace.pre.push_back(z);
    a = layers_[l].activation == Activation::kSigmoid ? sigmoid(z) : softmax(z);
    trace.act.push_back(a);
  }
  return trace;
}

std::vector<double> Mlp::predict(std::span<const double> x) const { return forward(x).output(); }

Gradients Mlp::backward(const ForwardTrace &trace, std::span<const double> y) const {
  const std::size_t L = layers_.size();
  if (trace.act.size() != L) {
    throw DomainError("forward trace does not match network depth");
  }
  if (y.size() != layers_.back().fan_out) {
    throw DomainError("target length does not match output layer");
  }

  Gradients grads;
  grads.delta.resize(L);
  grads.input = trace.inputs;

  // Output layer: dC/da = a - y, pushed through the activation Jacobian.
  const auto &a_out = trace.act.back();
  std::vector<double> delta(a_out.size());
  if (layers_.back().activation == Activation::kSoftmax) {
    // d a_i / d z_k = a_i (delta_ik - a_k)
    double s = 0.0;
    for (std::size_t i = 0; i < a_out.size(); ++i) {
      s += (a_out[i] - y[i]) * a_out[i];
    }
    for (std::size_t k = 0; k < a_out.size(); ++k) {
      delta[k] = a_out[k] * ((a_out[k] - y[k]) - s);
    }
  } else {
    for (std::size_t k = 0; k < a_out.size(); ++k) {
      delta[k] = (a_out[k] - y[k]) * a_out[k] * (1.0 - a_out[k]);
    }
  }
  grads.delta[L - 1] = delta;

  for (std::size_t l = L - 1; l-- > 0;) {
    const std::vector<double> back = cores_[l + 1].vmm_transpose(grads.delta[l + 1]);
    const auto &a = trace.act[l];
    std::vector<double> d(a.size());
    if (layers_[l].activation == Activation::kSoftmax) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        s += back[i] * a[i];
      }
      for (std::size_t k = 0; k < a.size(); ++k) {
        d[k] = a[k] * (back[k] - s);
      }
    } else {
      for (std::size_t k = 0; k < a.size(); ++k) {
        d[k] = back[k] * a[k] * (1.0 - a[k]);
      }
    }
    grads.delta[l] = std::move(d);
  }
  return grads;
}

void Mlp::train_step(OptimizerState &opt, std::span<const double> x, std::span<const double> y,
                     int epoch) {
  opt.validate();
  if (opt.eta == 0.0) {
    return; // zero step
  }
  const ForwardTrace trace = forward(x);
  const Gradients grads = backward(trace, y);
  const std::size_t L = layers_.size();

  if (opt.kind == OptimizerKind::kSgd) {
    for (std::size_t l = 0; l < L; ++l) {
      cores_[l].outer_update(opt.eta, grads.delta[l], grads.input[l], epoch);
      for (std::size_t i = 0; i < biases_[l].size(); ++i) {
        biases_[l][i] -= opt.eta * grads.delta[l][i];
      }
    }
    return;
  }

  // Adam. Moment buffers are allocated on first use.
  if (opt.m_w.size() != L) {
    opt.m_w.assign(L, Matrix());
    opt.v_w.assign(L, Matrix());
    opt.m_b.resize(L);
    opt.v_b.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      opt.m_w[l] = Matrix(layers_[l].fan_out, layers_[l].fan_in);
      opt.v_w[l] = Matrix(layers_[l].fan_out, layers_[l].fan_in);
      opt.m_b[l].assign(layers_[l].fan_out, 0.0);
      opt.v_b[l].assign(layers_[l].fan_out, 0.0);
    }
  }
  opt.t += 1;
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.t));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.t));
  // The bias-corrected ratio m/(sqrt(v)+eps) can exceed 1 on bursty
  // gradient streams; the step is capped so one update never moves a
  // parameter by more than eta (times 1 + 10 eps).
  const double cap = opt.eta * (1.0 + 10.0 * opt.epsilon);

  auto adam_step = [&](double g, double &m, double &v) {
    m = opt.beta1 * m + (1.0 - opt.beta1) * g;
    v = opt.beta2 * v + (1.0 - opt.beta2) * g * g;
    const double mhat = m / bc1;
    const double vhat = v / bc2;
    double step = opt.eta * mhat / (std::sqrt(vhat) + opt.epsilon);
    if (step > cap) {
      step = cap;
    } else if (step < -cap) {
      step = -cap;
    }
    return step;
  };

  for (std::size_t l = 0; l < L; ++l) {
    Matrix delta_w(layers_[l].fan_out, layers_[l].fan_in);
    for (std::size_t i = 0; i < layers_[l].fan_out; ++i) {
      for (std::size_t j = 0; j < layers_[l].fan_in; ++j) {
        const double g = grads.delta[l][i] * grads.input[l][j];
        delta_w(i, j) = -adam_step(g, opt.m_w[l](i, j), opt.v_w[l](i, j));
      }
    }
    cores_[l].apply_weight_update(delta_w, epoch);
    for (std::size_t i = 0; i < biases_[l].size(); ++i) {
      biases_[l][i] -= adam_step(grads.delta[l][i], opt.m_b[l][i], opt.v_b[l][i]);
    }
  }
}

void Mlp::set_recorder(UpdateErrorLog *log) {
  for (auto &core : cores_) {
    core.set_recorder(log);
  }
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_rows(std::ofstream &out, const Matrix &m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << (j ? " " : "") << fmt17(m(i, j));
    }
    out << '\n';
  }
}

} // namespace

void Mlp::save_checkpoint(const std::filesystem::path &path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << "MLP v1 " << layers_.size() << ' ' << fmt17(w_max_) << '\n';
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out << "layer " << layers_[l].fan_in << ' ' << layers_[l].fan_out << ' '
        << activation_name(layers_[l].activation) << '\n';
    Matrix pos(layers_[l].fan_out, layers_[l].fan_in);
    Matrix neg(layers_[l].fan_out, layers_[l].fan_in);
    for (std::size_t i = 0; i < pos.rows(); ++i) {
      for (std::size_t j = 0; j < pos.cols(); ++j) {
        pos(i, j) = cores_[l].g_pos(i, j);
        neg(i, j) = cores_[l].g_neg(i, j);
      }
    }
    write_matrix_rows(out, pos);
    write_matrix_rows(out, neg);
    for (std::size_t i = 0; i < biases_[l].size(); ++i) {
      out << (i ? " " : "") << fmt17(biases_[l][i]);
    }
    out << '\n';
  }
  if (!out.good()) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

Mlp Mlp::load_checkpoint(const std::filesystem::path &path, const DeviceModel &device,
                         std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::string magic, version;
  std::size_t n_layers = 0;
  double w_max = 0.0;
  in >> magic >> version >> n_layers >> w_max;
  if (magic != "MLP" || version != "v1" || in.fail() || n_layers == 0) {
    throw ParseError("bad checkpoint header in '" + path.string() + "'");
  }

  std::vector<LayerSpec> specs;
  std::vector<Matrix> pos_all, neg_all;
  std::vector<std::vector<double>> biases;
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::string tag, act;
    std::size_t fan_in = 0, fan_out = 0;
    in >> tag >> fan_in >> fan_out >> act;
    if (tag != "layer" || in.fail()) {
      throw ParseError("bad layer header in '" + path.string() + "'");
    }
    specs.push_back({fan_in, fan_out, parse_activation(act)});
    Matrix pos(fan_out, fan_in), neg(fan_out, fan_in);
    for (auto *m : {&pos, &neg}) {
      for (std::size_t i = 0; i < fan_out; ++i) {
        for (std::size_t j = 0; j < fan_in; ++j) {
          in >> (*m)(i, j);
        }
      }
    }
    std::vector<double> b(fan_out);
    for (auto &v : b) {
      in >> v;
    }
    if (in.fail()) {
      throw ParseError("truncated checkpoint '" + path.string() + "'");
    }
    pos_all.push_back(std::move(pos));
    neg_all.push_back(std::move(neg));
    biases.push_back(std::move(b));
  }

  Mlp net(specs, w_max, device, seed);
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (std::size_t i = 0; i < specs[l].fan_out; ++i) {
      for (std::size_t j = 0; j < specs[l].fan_in; ++j) {
        net.cores_[l].set_conductances(i, j, pos_all[l](i, j), neg_all[l](i, j));
      }
    }
    net.biases_[l] = biases[l];
  }
  return net;
}

} // namespace xbar
