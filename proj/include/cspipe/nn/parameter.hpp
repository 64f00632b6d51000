#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cspipe::nn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A trainable tensor. Vectors are stored as single-column matrices.
struct Parameter {
  std::string name;
  Mat value;
  Mat grad;
  bool trainable = true;
};

// Owns parameters with stable addresses; layers keep raw pointers into it.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  // Throws ArgumentError on a duplicate name.
  Parameter& add(std::string name, Eigen::Index rows, Eigen::Index cols);

  Parameter* find(std::string_view name);
  const Parameter* find(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  double grad_norm() const;  // over trainable parameters
  bool all_finite() const;
  std::size_t scalar_count() const;

  void set_trainable(bool trainable);

  std::vector<Mat> snapshot() const;
  void restore(const std::vector<Mat>& values);

  // Copies values for every parameter whose name exists in `other` with the
  // same shape; returns how many were copied.
  std::size_t copy_matching(const ParameterSet& other);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace cspipe::nn
