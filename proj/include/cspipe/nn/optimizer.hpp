#pragma once

#include <optional>
#include <unordered_map>

#include "cspipe/nn/parameter.hpp"

namespace cspipe::nn {

enum class OptimizerKind { momentum_sgd, vanilla_sgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::momentum_sgd;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::optional<double> clip_norm;
};

// velocity = mu * velocity - lr * grad; param += velocity (momentum mode);
// param -= lr * grad (vanilla). When clip_norm is set and the global gradient
// norm exceeds it, gradients are rescaled to that norm first. Gradients are
// zeroed after every update.
class Sgd {
 public:
  explicit Sgd(OptimizerConfig config);

  const OptimizerConfig& config() const { return config_; }
  void set_learning_rate(double lr);

  // `grad_scale` multiplies the accumulated gradients (1/batch for averaging).
  // Throws Error if any parameter becomes non-finite.
  void update(ParameterSet& params, double grad_scale = 1.0);

 private:
  OptimizerConfig config_;
  std::unordered_map<const Parameter*, Mat> velocity_;
};

}  // namespace cspipe::nn
