#include "cspipe/nn/parameter.hpp"

#include <cmath>

#include "cspipe/error.hpp"

namespace cspipe::nn {

Parameter& ParameterSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (find(name)) throw ArgumentError("duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->value = Mat::Zero(rows, cols);
  p->grad = Mat::Zero(rows, cols);
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter* ParameterSet::find(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

const Parameter* ParameterSet::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p->name == name) return p.get();
  }
  return nullptr;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

double ParameterSet::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) {
    if (p->trainable) sq += p->grad.squaredNorm();
  }
  return std::sqrt(sq);
}

bool ParameterSet::all_finite() const {
  for (const auto& p : params_) {
    if (!p->value.allFinite()) return false;
  }
  return true;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParameterSet::set_trainable(bool trainable) {
  for (auto& p : params_) p->trainable = trainable;
}

std::vector<Mat> ParameterSet::snapshot() const {
  std::vector<Mat> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterSet::restore(const std::vector<Mat>& values) {
  if (values.size() != params_.size()) throw ArgumentError("snapshot size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) params_[i]->value = values[i];
}

std::size_t ParameterSet::copy_matching(const ParameterSet& other) {
  std::size_t n = 0;
  for (auto& p : params_) {
    const Parameter* q = other.find(p->name);
    if (q && q->value.rows() == p->value.rows() && q->value.cols() == p->value.cols()) {
      p->value = q->value;
      ++n;
    }
  }
  return n;
}

}  // namespace cspipe::nn
