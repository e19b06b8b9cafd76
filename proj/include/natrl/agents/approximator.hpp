#pragma once

// Linear and one-hidden-layer tanh function approximators with hand-written
// backpropagation. Parameters live in one flat vector:
//   linear: W (out x in, row-major), b (out; omitted when built without bias)
//   mlp:    W1 (hidden x in), b1 (hidden), W2 (out x hidden), b2 (out)

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "natrl/core/errors.hpp"
#include "natrl/core/random.hpp"

namespace natrl {

using ParamVector = std::vector<double>;

enum class ApproxKind : std::uint32_t { kLinear = 1, kMlp = 2 };

class Approximator {
 public:
  Approximator() = default;

  static Approximator linear(int input_dim, int output_dim, bool bias = true) {
    return Approximator(ApproxKind::kLinear, input_dim, 0, output_dim, bias);
  }
  static Approximator mlp(int input_dim, int hidden_dim, int output_dim) {
    if (hidden_dim < 1) throw ConfigError("mlp: hidden width must be >= 1");
    return Approximator(ApproxKind::kMlp, input_dim, hidden_dim, output_dim, true);
  }

  ApproxKind kind() const { return kind_; }
  int input_dim() const { return in_; }
  int hidden_dim() const { return hidden_; }
  int output_dim() const { return out_; }
  bool has_bias() const { return bias_; }

  ParamVector& params() { return params_; }
  const ParamVector& params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  void set_params(ParamVector p) {
    if (p.size() != params_.size()) throw ContractViolation("Approximator: parameter count mismatch");
    params_ = std::move(p);
  }

  // Weights uniform in [-scale/sqrt(fan_in), scale/sqrt(fan_in)], biases 0.
  void init_uniform(Rng& rng, double scale = 1.0) {
    auto fill = [&](std::size_t begin, std::size_t count, int fan_in) {
      const double bound = scale / std::sqrt(static_cast<double>(std::max(1, fan_in)));
      for (std::size_t i = begin; i < begin + count; ++i) params_[i] = (2.0 * rng.uniform() - 1.0) * bound;
    };
    std::fill(params_.begin(), params_.end(), 0.0);
    if (kind_ == ApproxKind::kLinear) {
      fill(0, static_cast<std::size_t>(out_) * in_, in_);
    } else {
      fill(0, static_cast<std::size_t>(hidden_) * in_, in_);
      fill(w2_offset(), static_cast<std::size_t>(out_) * hidden_, hidden_);
    }
  }

  std::vector<double> forward(std::span<const double> x) const {
    check_input(x);
    if (kind_ == ApproxKind::kLinear) return affine(params_.data(), linear_bias(params_.data()), x, out_);
    const auto h = hidden(x);
    return affine(params_.data() + w2_offset(), params_.data() + w2_offset() + static_cast<std::size_t>(out_) * hidden_, h, out_);
  }

  // Accumulates d(sum_k grad_out[k] * out[k]) / d(params) into `grad`.
  void backward(std::span<const double> x, std::span<const double> grad_out, std::span<double> grad) const {
    check_input(x);
    if (grad_out.size() != static_cast<std::size_t>(out_)) throw ContractViolation("backward: grad_out size mismatch");
    if (grad.size() != params_.size()) throw ContractViolation("backward: gradient buffer size mismatch");
    if (kind_ == ApproxKind::kLinear) {
      affine_backward(x, grad_out, grad.data(), linear_bias(grad.data()));
      return;
    }
    const auto h = hidden(x);
    double* gw2 = grad.data() + w2_offset();
    affine_backward(h, grad_out, gw2, gw2 + static_cast<std::size_t>(out_) * hidden_);
    const double* w2 = params_.data() + w2_offset();
    std::vector<double> gz(static_cast<std::size_t>(hidden_), 0.0);
    for (int k = 0; k < out_; ++k) {
      if (grad_out[k] == 0.0) continue;
      for (int j = 0; j < hidden_; ++j) gz[j] += w2[static_cast<std::size_t>(k) * hidden_ + j] * grad_out[k];
    }
    for (int j = 0; j < hidden_; ++j) gz[j] *= 1.0 - h[j] * h[j];
    affine_backward(x, gz, grad.data(), grad.data() + static_cast<std::size_t>(hidden_) * in_);
  }

  // Gradient of output `index` with respect to every parameter.
  ParamVector gradient(std::span<const double> x, int index) const {
    std::vector<double> g(static_cast<std::size_t>(out_), 0.0);
    g.at(static_cast<std::size_t>(index)) = 1.0;
    ParamVector grad(params_.size(), 0.0);
    backward(x, g, grad);
    return grad;
  }

  void add_scaled(std::span<const double> delta, double scale) {
    if (delta.size() != params_.size()) throw ContractViolation("add_scaled: size mismatch");
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] += scale * delta[i];
  }

 private:
  Approximator(ApproxKind kind, int in, int hidden, int out, bool bias)
      : kind_(kind), in_(in), hidden_(hidden), out_(out), bias_(bias) {
    if (in < 1 || out < 1) throw ConfigError("Approximator: input and output dims must be >= 1");
    const std::size_t n = kind == ApproxKind::kLinear
                              ? static_cast<std::size_t>(out) * in + (bias ? out : 0)
                              : static_cast<std::size_t>(hidden) * in + hidden + static_cast<std::size_t>(out) * hidden + out;
    params_.assign(n, 0.0);
  }

  template <typename T>
  T* linear_bias(T* base) const {
    return bias_ ? base + static_cast<std::size_t>(out_) * in_ : nullptr;
  }

  std::size_t w2_offset() const { return static_cast<std::size_t>(hidden_) * in_ + hidden_; }

  void check_input(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(in_)) {
      throw ContractViolation("Approximator: input has " + std::to_string(x.size()) + " features, expected " +
                              std::to_string(in_));
    }
  }

  std::vector<double> hidden(std::span<const double> x) const {
    auto h = affine(params_.data(), params_.data() + static_cast<std::size_t>(hidden_) * in_, x, hidden_);
    for (auto& v : h) v = std::tanh(v);
    return h;
  }

  static std::vector<double> affine(const double* w, const double* b, std::span<const double> x, int rows) {
    std::vector<double> y = b ? std::vector<double>(b, b + rows) : std::vector<double>(static_cast<std::size_t>(rows), 0.0);
    const std::size_t cols = x.size();
    for (int r = 0; r < rows; ++r) {
      const double* wr = w + static_cast<std::size_t>(r) * cols;
      double acc = 0.0;
      for (std::size_t i = 0; i < cols; ++i) acc += wr[i] * x[i];
      y[static_cast<std::size_t>(r)] += acc;
    }
    return y;
  }

  static void affine_backward(std::span<const double> x, std::span<const double> g, double* gw, double* gb) {
    const std::size_t cols = x.size();
    for (std::size_t r = 0; r < g.size(); ++r) {
      if (g[r] == 0.0) continue;
      double* gwr = gw + r * cols;
      for (std::size_t i = 0; i < cols; ++i) gwr[i] += g[r] * x[i];
      if (gb) gb[r] += g[r];
    }
  }

  ApproxKind kind_ = ApproxKind::kLinear;
  int in_ = 0;
  int hidden_ = 0;
  int out_ = 0;
  bool bias_ = true;
  ParamVector params_;
};

// Transition expressed in feature space, the unit the learners consume.
struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

}  // namespace natrl
