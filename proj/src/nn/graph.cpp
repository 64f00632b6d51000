#include "cspipe/nn/graph.hpp"

#include <cmath>

#include "cspipe/error.hpp"

namespace cspipe::nn {

namespace {

Vec stable_softmax(const Vec& x) {
  Vec e = (x.array() - x.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

void Graph::check(Expr e) const {
  if (e.id < 0 || e.id >= static_cast<int>(nodes_.size())) throw ArgumentError("invalid expression handle");
}

Expr Graph::push(Vec value, std::function<void(Graph&, int)> back) {
  nodes_.push_back(Node{std::move(value), Vec(), std::move(back)});
  return Expr{static_cast<int>(nodes_.size()) - 1};
}

Expr Graph::input(Vec v) { return push(std::move(v)); }

Expr Graph::zeros(Eigen::Index dim) { return push(Vec::Zero(dim)); }

Expr Graph::scalar(double v) { return push(Vec::Constant(1, v)); }

Expr Graph::param(const Parameter& p) {
  if (p.value.cols() != 1) throw ArgumentError("parameter '" + p.name + "' is not a column vector");
  const Parameter* pp = &p;
  return push(p.value.col(0), [pp](Graph& gr, int self) {
    if (pp->trainable) grad_of(*pp).col(0) += gr.g(self);
  });
}

Expr Graph::lookup(const Parameter& table, Eigen::Index col) {
  if (col < 0 || col >= table.value.cols()) {
    throw ArgumentError("lookup index " + std::to_string(col) + " out of range for '" + table.name + "'");
  }
  const Parameter* pp = &table;
  return push(table.value.col(col), [pp, col](Graph& gr, int self) {
    if (pp->trainable) grad_of(*pp).col(col) += gr.g(self);
  });
}

Expr Graph::affine(const Parameter* bias, std::span<const AffineTerm> terms) {
  Eigen::Index rows = -1;
  if (bias) rows = bias->value.rows();
  for (const auto& t : terms) {
    if (!t.input.valid()) continue;
    check(t.input);
    if (rows < 0) rows = t.weight->value.rows();
    if (t.weight->value.rows() != rows || t.weight->value.cols() != v(t.input.id).size()) {
      throw ArgumentError("affine: weight '" + t.weight->name + "' is " + std::to_string(t.weight->value.rows()) +
                          "x" + std::to_string(t.weight->value.cols()) + " but input has dim " +
                          std::to_string(v(t.input.id).size()));
    }
  }
  if (rows < 0) throw ArgumentError("affine with no terms");
  Vec out = bias ? Vec(bias->value.col(0)) : Vec::Zero(rows);
  std::vector<AffineTerm> live;
  for (const auto& t : terms) {
    if (!t.input.valid()) continue;
    out.noalias() += t.weight->value * v(t.input.id);
    live.push_back(t);
  }
  return push(std::move(out), [bias, live = std::move(live)](Graph& gr, int self) {
    const Vec& gy = gr.g(self);
    if (bias && bias->trainable) grad_of(*bias).col(0) += gy;
    for (const auto& t : live) {
      if (t.weight->trainable) grad_of(*t.weight).noalias() += gy * gr.v(t.input.id).transpose();
      gr.g(t.input.id).noalias() += t.weight->value.transpose() * gy;
    }
  });
}

Expr Graph::add(Expr a, Expr b) {
  check(a), check(b);
  if (dim(a) != dim(b)) throw ArgumentError("add: dimension mismatch");
  return push(v(a.id) + v(b.id), [a, b](Graph& gr, int self) {
    gr.g(a.id) += gr.g(self);
    gr.g(b.id) += gr.g(self);
  });
}

Expr Graph::sub(Expr a, Expr b) {
  check(a), check(b);
  if (dim(a) != dim(b)) throw ArgumentError("sub: dimension mismatch");
  return push(v(a.id) - v(b.id), [a, b](Graph& gr, int self) {
    gr.g(a.id) += gr.g(self);
    gr.g(b.id) -= gr.g(self);
  });
}

Expr Graph::cmul(Expr a, Expr b) {
  check(a), check(b);
  if (dim(a) != dim(b)) throw ArgumentError("cmul: dimension mismatch");
  return push(v(a.id).cwiseProduct(v(b.id)), [a, b](Graph& gr, int self) {
    gr.g(a.id) += gr.g(self).cwiseProduct(gr.v(b.id));
    gr.g(b.id) += gr.g(self).cwiseProduct(gr.v(a.id));
  });
}

Expr Graph::scale(Expr a, double s) {
  check(a);
  return push(v(a.id) * s, [a, s](Graph& gr, int self) { gr.g(a.id) += s * gr.g(self); });
}

Expr Graph::tanh(Expr a) {
  check(a);
  return push(v(a.id).array().tanh().matrix(), [a](Graph& gr, int self) {
    const Vec& y = gr.v(self);
    gr.g(a.id).array() += gr.g(self).array() * (1.0 - y.array().square());
  });
}

Expr Graph::sigmoid(Expr a) {
  check(a);
  Vec y = (1.0 / (1.0 + (-v(a.id).array()).exp())).matrix();
  return push(std::move(y), [a](Graph& gr, int self) {
    const Vec& y = gr.v(self);
    gr.g(a.id).array() += gr.g(self).array() * y.array() * (1.0 - y.array());
  });
}

Expr Graph::concat(std::span<const Expr> parts) {
  Eigen::Index total = 0;
  for (Expr p : parts) {
    check(p);
    total += dim(p);
  }
  Vec out(total);
  Eigen::Index off = 0;
  std::vector<Expr> ids(parts.begin(), parts.end());
  for (Expr p : parts) {
    out.segment(off, dim(p)) = v(p.id);
    off += dim(p);
  }
  return push(std::move(out), [ids = std::move(ids)](Graph& gr, int self) {
    Eigen::Index o = 0;
    for (Expr p : ids) {
      Eigen::Index n = gr.v(p.id).size();
      gr.g(p.id) += gr.g(self).segment(o, n);
      o += n;
    }
  });
}

Expr Graph::slice(Expr a, Eigen::Index start, Eigen::Index len) {
  check(a);
  if (start < 0 || len < 0 || start + len > dim(a)) throw ArgumentError("slice out of range");
  return push(v(a.id).segment(start, len),
              [a, start, len](Graph& gr, int self) { gr.g(a.id).segment(start, len) += gr.g(self); });
}

Expr Graph::dot(Expr a, Expr b) {
  check(a), check(b);
  if (dim(a) != dim(b)) throw ArgumentError("dot: dimension mismatch");
  return push(Vec::Constant(1, v(a.id).dot(v(b.id))), [a, b](Graph& gr, int self) {
    double gy = gr.g(self)(0);
    gr.g(a.id) += gy * gr.v(b.id);
    gr.g(b.id) += gy * gr.v(a.id);
  });
}

Expr Graph::sum(std::span<const Expr> xs) {
  if (xs.empty()) throw ArgumentError("sum of nothing");
  Eigen::Index d = -1;
  for (Expr x : xs) {
    check(x);
    if (d < 0) d = dim(x);
    if (dim(x) != d) throw ArgumentError("sum: dimension mismatch");
  }
  Vec out = Vec::Zero(d);
  for (Expr x : xs) out += v(x.id);
  std::vector<Expr> ids(xs.begin(), xs.end());
  return push(std::move(out), [ids = std::move(ids)](Graph& gr, int self) {
    for (Expr x : ids) gr.g(x.id) += gr.g(self);
  });
}

Expr Graph::softmax(Expr a) {
  check(a);
  return push(stable_softmax(v(a.id)), [a](Graph& gr, int self) {
    const Vec& y = gr.v(self);
    const Vec& gy = gr.g(self);
    double inner = y.dot(gy);
    gr.g(a.id).array() += y.array() * (gy.array() - inner);
  });
}

Expr Graph::log_softmax(Expr a) {
  check(a);
  const Vec& x = v(a.id);
  double m = x.maxCoeff();
  double lse = m + std::log((x.array() - m).exp().sum());
  return push((x.array() - lse).matrix(), [a](Graph& gr, int self) {
    const Vec& gy = gr.g(self);
    Vec p = gr.v(self).array().exp();
    gr.g(a.id) += gy - p * gy.sum();
  });
}

Expr Graph::weighted_sum(Expr weights, std::span<const Expr> xs) {
  check(weights);
  if (static_cast<Eigen::Index>(xs.size()) != dim(weights) || xs.empty()) {
    throw ArgumentError("weighted_sum: one weight per input required");
  }
  Eigen::Index d = dim(xs[0]);
  Vec out = Vec::Zero(d);
  const Vec& w = v(weights.id);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    check(xs[j]);
    if (dim(xs[j]) != d) throw ArgumentError("weighted_sum: dimension mismatch");
    out += w(static_cast<Eigen::Index>(j)) * v(xs[j].id);
  }
  std::vector<Expr> ids(xs.begin(), xs.end());
  return push(std::move(out), [weights, ids = std::move(ids)](Graph& gr, int self) {
    const Vec& gy = gr.g(self);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      auto jj = static_cast<Eigen::Index>(j);
      gr.g(weights.id)(jj) += gy.dot(gr.v(ids[j].id));
      gr.g(ids[j].id) += gr.v(weights.id)(jj) * gy;
    }
  });
}

Expr Graph::mask(Expr a, const Vec& m) {
  check(a);
  if (m.size() != dim(a)) throw ArgumentError("mask: dimension mismatch");
  return push(v(a.id).cwiseProduct(m), [a, m](Graph& gr, int self) { gr.g(a.id) += gr.g(self).cwiseProduct(m); });
}

Expr Graph::pick_nll(Expr logits, Eigen::Index gold) {
  check(logits);
  if (gold < 0 || gold >= dim(logits)) throw ArgumentError("pick_nll: gold index out of range");
  auto [loss, grad] = softmax_xent(v(logits.id), gold);
  return push(Vec::Constant(1, loss), [logits, grad = std::move(grad)](Graph& gr, int self) {
    gr.g(logits.id) += gr.g(self)(0) * grad;
  });
}

void Graph::backward(Expr loss) {
  check(loss);
  if (dim(loss) != 1) throw ArgumentError("backward needs a scalar loss");
  for (auto& n : nodes_) n.grad = Vec::Zero(n.value.size());
  nodes_[loss.id].grad(0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    if (nodes_[i].back) nodes_[i].back(*this, i);
  }
}

std::pair<double, Vec> softmax_xent(const Vec& logits, Eigen::Index gold) {
  if (gold < 0 || gold >= logits.size()) throw ArgumentError("softmax_xent: gold index out of range");
  Vec p = stable_softmax(logits);
  double m = logits.maxCoeff();
  double lse = m + std::log((logits.array() - m).exp().sum());
  Vec grad = p;
  grad(gold) -= 1.0;
  return {lse - logits(gold), std::move(grad)};
}

}  // namespace cspipe::nn
