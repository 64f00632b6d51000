#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cspipe/nn/parameter.hpp"

namespace cspipe::nn {

// Handle to a node of a Graph. A default-constructed Expr is "absent"; ops
// that take optional inputs (affine terms) skip absent ones.
struct Expr {
  int id = -1;
  bool valid() const { return id >= 0; }
};

struct AffineTerm {
  const Parameter* weight;
  Expr input;
};

// Define-by-run tape for reverse-mode differentiation over column vectors.
// Parameter gradients accumulate into Parameter::grad on backward(); a graph
// that is only evaluated never touches parameters, so frozen models can be
// shared between threads that each build their own graph.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr input(Vec v);
  Expr zeros(Eigen::Index dim);
  Expr scalar(double v);

  // A (n x 1) parameter used as a vector expression.
  Expr param(const Parameter& p);

  // Column `col` of an embedding table stored as (dim x vocab).
  Expr lookup(const Parameter& table, Eigen::Index col);

  // bias + sum_k W_k x_k, accumulated in term order. Absent inputs are skipped.
  Expr affine(const Parameter* bias, std::span<const AffineTerm> terms);
  Expr affine(const Parameter* bias, std::initializer_list<AffineTerm> terms) {
    return affine(bias, std::span<const AffineTerm>(terms.begin(), terms.size()));
  }

  Expr add(Expr a, Expr b);
  Expr sub(Expr a, Expr b);
  Expr cmul(Expr a, Expr b);
  Expr scale(Expr a, double s);
  Expr tanh(Expr a);
  Expr sigmoid(Expr a);
  Expr concat(std::span<const Expr> parts);
  Expr concat(std::initializer_list<Expr> parts) {
    return concat(std::span<const Expr>(parts.begin(), parts.size()));
  }
  Expr slice(Expr a, Eigen::Index start, Eigen::Index len);
  Expr dot(Expr a, Expr b);
  Expr sum(std::span<const Expr> scalars_or_vectors);
  Expr softmax(Expr a);
  Expr log_softmax(Expr a);
  // sum_j weights[j] * xs[j]; weights is a vector with one entry per x.
  Expr weighted_sum(Expr weights, std::span<const Expr> xs);
  // Element-wise product with a fixed mask (inverted dropout).
  Expr mask(Expr a, const Vec& m);
  // -log softmax(logits)[gold], as a 1-vector.
  Expr pick_nll(Expr logits, Eigen::Index gold);

  const Vec& value(Expr e) const { return nodes_[e.id].value; }
  double scalar_value(Expr e) const { return nodes_[e.id].value(0); }
  const Vec& grad(Expr e) const { return nodes_[e.id].grad; }
  Eigen::Index dim(Expr e) const { return nodes_[e.id].value.size(); }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and back-propagates through the whole tape.
  void backward(Expr loss);

 private:
  struct Node {
    Vec value;
    Vec grad;
    std::function<void(Graph&, int)> back;
  };

  Expr push(Vec value, std::function<void(Graph&, int)> back = {});
  Vec& g(int id) { return nodes_[id].grad; }
  const Vec& v(int id) const { return nodes_[id].value; }
  void check(Expr e) const;

  std::vector<Node> nodes_;
};

// Mutable-gradient view used by ops: parameters are owned elsewhere and only
// their grad fields are written during backward.
inline Mat& grad_of(const Parameter& p) { return const_cast<Parameter&>(p).grad; }

// Pure loss helper: (-log softmax(logits)[gold], softmax - onehot).
std::pair<double, Vec> softmax_xent(const Vec& logits, Eigen::Index gold);

}  // namespace cspipe::nn
