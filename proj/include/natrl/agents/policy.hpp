#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "natrl/agents/approximator.hpp"
#include "natrl/agents/tabular.hpp"

namespace natrl {

inline std::vector<double> softmax(std::span<const double> logits) {
  const double m = max_value(logits);
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    z += p[i];
  }
  for (auto& v : p) v /= z;
  return p;
}

inline int sample_categorical(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  // Rounding left u above the final cumulative sum; take the last action with mass.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

// pi(a | s) = softmax(logits(s))_a, logits from an Approximator.
class SoftmaxPolicy {
 public:
  SoftmaxPolicy() = default;
  explicit SoftmaxPolicy(Approximator logits) : logits_(std::move(logits)) {}

  Approximator& net() { return logits_; }
  const Approximator& net() const { return logits_; }
  int num_actions() const { return logits_.output_dim(); }

  std::vector<double> probs(std::span<const double> x) const { return softmax(logits_.forward(x)); }

  double log_prob(std::span<const double> x, int a) const {
    const auto z = logits_.forward(x);
    const double m = max_value(z);
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - m);
    return z[static_cast<std::size_t>(a)] - m - std::log(sum);
  }

  // grad_theta log pi(a|x): backprop of (onehot(a) - pi) through the logits.
  ParamVector grad_log_prob(std::span<const double> x, int a) const {
    auto g = probs(x);
    for (auto& v : g) v = -v;
    g[static_cast<std::size_t>(a)] += 1.0;
    ParamVector grad(logits_.num_params(), 0.0);
    logits_.backward(x, g, grad);
    return grad;
  }

  int sample(std::span<const double> x, Rng& rng) const { return sample_categorical(probs(x), rng); }
  int greedy(std::span<const double> x) const { return greedy_action(logits_.forward(x)); }

 private:
  Approximator logits_;
};

}  // namespace natrl
