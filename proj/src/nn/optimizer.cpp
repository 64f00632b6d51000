#include "cspipe/nn/optimizer.hpp"

#include "cspipe/error.hpp"

namespace cspipe::nn {

Sgd::Sgd(OptimizerConfig config) : config_(config) {
  if (config_.learning_rate <= 0.0) throw ArgumentError("learning rate must be positive");
}

void Sgd::set_learning_rate(double lr) {
  if (lr <= 0.0) throw ArgumentError("learning rate must be positive");
  config_.learning_rate = lr;
}

void Sgd::update(ParameterSet& params, double grad_scale) {
  double scale = grad_scale;
  if (config_.clip_norm) {
    double norm = params.grad_norm() * grad_scale;
    if (norm > *config_.clip_norm) scale *= *config_.clip_norm / norm;
  }
  const double lr = config_.learning_rate;
  for (auto& p : params) {
    if (!p->trainable) {
      p->grad.setZero();
      continue;
    }
    if (config_.kind == OptimizerKind::momentum_sgd) {
      auto [it, inserted] = velocity_.try_emplace(p.get(), Mat::Zero(p->value.rows(), p->value.cols()));
      Mat& vel = it->second;
      if (vel.rows() != p->value.rows() || vel.cols() != p->value.cols()) {
        throw ArgumentError("velocity shape mismatch for '" + p->name + "'");
      }
      vel = config_.momentum * vel - (lr * scale) * p->grad;
      p->value += vel;
    } else {
      p->value -= (lr * scale) * p->grad;
    }
    p->grad.setZero();
    if (!p->value.allFinite()) throw Error("parameter '" + p->name + "' became non-finite");
  }
}

}  // namespace cspipe::nn
