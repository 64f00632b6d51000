#include "cspipe/nn/layers.hpp"

#include <cmath>

#include "cspipe/error.hpp"

namespace cspipe::nn {

Expr dropout(Graph& g, Expr x, const Mode& mode) {
  if (!mode.training || mode.dropout <= 0.0 || !mode.rng) return x;
  return g.mask(x, dropout_mask(g.dim(x), mode.dropout, *mode.rng));
}

Lstm::Lstm(ParameterSet& ps, const std::string& name, std::vector<int> input_dims, int hidden_dim, Rng& rng)
    : input_dims_(std::move(input_dims)), hidden_(hidden_dim) {
  if (hidden_ <= 0) throw ArgumentError("LSTM hidden_dim must be positive");
  const int h = hidden_;
  for (std::size_t k = 0; k < input_dims_.size(); ++k) {
    int in = input_dims_[k];
    if (in <= 0) throw ArgumentError("LSTM input dims must be positive");
    Parameter& w = ps.add(name + ".wx" + std::to_string(k), 4 * h, in);
    for (int gate = 0; gate < 4; ++gate) w.value.middleRows(gate * h, h) = orthonormal_init(h, in, rng());
    wx_.push_back(&w);
  }
  Parameter& wh = ps.add(name + ".wh", 4 * h, h);
  for (int gate = 0; gate < 4; ++gate) wh.value.middleRows(gate * h, h) = orthonormal_init(h, h, rng());
  wh_ = &wh;
  Parameter& b = ps.add(name + ".b", 4 * h, 1);
  b.value.middleRows(h, h).setConstant(1.0);  // forget gate
  b_ = &b;
}

Lstm::State Lstm::initial(Graph& g) const { return {g.zeros(hidden_), g.zeros(hidden_)}; }

Lstm::State Lstm::step(Graph& g, std::span<const Expr> inputs, const State& prev) const {
  if (inputs.size() != wx_.size()) {
    throw ArgumentError("LSTM expects " + std::to_string(wx_.size()) + " input blocks, got " +
                        std::to_string(inputs.size()));
  }
  std::vector<AffineTerm> terms;
  terms.reserve(inputs.size() + 1);
  for (std::size_t k = 0; k < inputs.size(); ++k) terms.push_back({wx_[k], inputs[k]});
  terms.push_back({wh_, prev.h});
  Expr z = g.affine(b_, terms);
  const int h = hidden_;
  Expr i = g.sigmoid(g.slice(z, 0, h));
  Expr f = g.sigmoid(g.slice(z, h, h));
  Expr o = g.sigmoid(g.slice(z, 2 * h, h));
  Expr cand = g.tanh(g.slice(z, 3 * h, h));
  Expr c = g.add(g.cmul(f, prev.c), g.cmul(i, cand));
  Expr hh = g.cmul(o, g.tanh(c));
  return {hh, c};
}

BiLstm::BiLstm(ParameterSet& ps, const std::string& name, std::vector<int> input_dims, int hidden_dim, Rng& rng)
    : fwd_(ps, name + ".fwd", input_dims, hidden_dim, rng), bwd_(ps, name + ".bwd", input_dims, hidden_dim, rng) {}

std::vector<Expr> BiLstm::encode(Graph& g, const std::vector<std::vector<Expr>>& inputs) const {
  if (inputs.empty()) throw ArgumentError("BiLSTM over an empty sequence");
  const std::size_t n = inputs.size();
  std::vector<Expr> fh(n), bh(n);
  auto s = fwd_.initial(g);
  for (std::size_t t = 0; t < n; ++t) {
    s = fwd_.step(g, inputs[t], s);
    fh[t] = s.h;
  }
  s = bwd_.initial(g);
  for (std::size_t t = n; t-- > 0;) {
    s = bwd_.step(g, inputs[t], s);
    bh[t] = s.h;
  }
  std::vector<Expr> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = g.concat({fh[t], bh[t]});
  return out;
}

Expr BiLstm::encode_final(Graph& g, const std::vector<std::vector<Expr>>& inputs) const {
  if (inputs.empty()) throw ArgumentError("BiLSTM over an empty sequence");
  auto s = fwd_.initial(g);
  for (const auto& x : inputs) s = fwd_.step(g, x, s);
  Expr last = s.h;
  s = bwd_.initial(g);
  for (std::size_t t = inputs.size(); t-- > 0;) s = bwd_.step(g, inputs[t], s);
  return g.concat({last, s.h});
}

Mlp::Mlp(ParameterSet& ps, const std::string& name, std::vector<int> input_dims, std::vector<int> hidden,
         int output_dim, Rng& rng)
    : input_dims_(std::move(input_dims)), hidden_(std::move(hidden)), output_dim_(output_dim) {
  const int first_out = hidden_.empty() ? output_dim_ : hidden_[0];
  int fan_in = 0;
  for (int d : input_dims_) fan_in += d;
  for (std::size_t k = 0; k < input_dims_.size(); ++k) {
    Parameter& w = ps.add(name + ".w0_" + std::to_string(k), first_out, input_dims_[k]);
    // Scale as one (first_out x fan_in) matrix split into column blocks.
    w.value = uniform_init(first_out, input_dims_[k], std::sqrt(6.0 / (first_out + fan_in)), rng);
    first_w_.push_back(&w);
  }
  first_b_ = &ps.add(name + ".b0", first_out, 1);
  int prev = first_out;
  std::vector<int> sizes(hidden_.begin() + (hidden_.empty() ? 0 : 1), hidden_.end());
  if (!hidden_.empty()) sizes.push_back(output_dim_);
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    Parameter& w = ps.add(name + ".w" + std::to_string(l + 1), sizes[l], prev);
    w.value = glorot_init(sizes[l], prev, rng);
    Parameter& b = ps.add(name + ".b" + std::to_string(l + 1), sizes[l], 1);
    layers_.emplace_back(&w, &b);
    prev = sizes[l];
  }
}

Expr Mlp::hidden(Graph& g, std::span<const Expr> inputs, const Mode& mode) const {
  if (hidden_.empty()) throw ArgumentError("MLP has no hidden layer");
  if (inputs.size() != first_w_.size()) throw ArgumentError("MLP input block count mismatch");
  std::vector<AffineTerm> terms;
  for (std::size_t k = 0; k < inputs.size(); ++k) terms.push_back({first_w_[k], inputs[k]});
  Expr h = dropout(g, g.tanh(g.affine(first_b_, terms)), mode);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    h = dropout(g, g.tanh(g.affine(layers_[l].second, {{layers_[l].first, h}})), mode);
  }
  return h;
}

Expr Mlp::output(Graph& g, Expr last_hidden) const {
  const auto& [w, b] = layers_.back();
  return g.affine(b, {{w, last_hidden}});
}

Expr Mlp::forward(Graph& g, std::span<const Expr> inputs, const Mode& mode) const {
  if (hidden_.empty()) {
    if (inputs.size() != first_w_.size()) throw ArgumentError("MLP input block count mismatch");
    std::vector<AffineTerm> terms;
    for (std::size_t k = 0; k < inputs.size(); ++k) terms.push_back({first_w_[k], inputs[k]});
    return g.affine(first_b_, terms);
  }
  return output(g, hidden(g, inputs, mode));
}

Embedding::Embedding(ParameterSet& ps, const std::string& name, int vocab, int dim, double range, Rng& rng)
    : vocab_(vocab), dim_(dim) {
  Parameter& t = ps.add(name, dim, vocab);
  t.value = uniform_init(dim, vocab, range, rng);
  table_ = &t;
}

}  // namespace cspipe::nn
