#pragma once

#include <string>
#include <vector>

#include "cspipe/nn/graph.hpp"
#include "cspipe/nn/init.hpp"

namespace cspipe::nn {

// Training-time switches threaded through forward passes. With training off
// (the default) forward passes are deterministic and dropout is identity.
struct Mode {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
};

Expr dropout(Graph& g, Expr x, const Mode& mode);

// Standard LSTM cell without peepholes. Gate blocks are stacked in the order
// input, forget, output, candidate. The cell accepts its input as several
// blocks, each with its own weight matrix, so that optional inputs can be
// omitted without changing how the remaining blocks are accumulated.
class Lstm {
 public:
  struct State {
    Expr h;
    Expr c;
  };

  Lstm() = default;
  Lstm(ParameterSet& ps, const std::string& name, std::vector<int> input_dims, int hidden_dim, Rng& rng);

  int hidden_dim() const { return hidden_; }
  const std::vector<int>& input_dims() const { return input_dims_; }

  State initial(Graph& g) const;
  // Throws ArgumentError when the number or size of input blocks is wrong
  // (absent blocks are allowed and skipped).
  State step(Graph& g, std::span<const Expr> inputs, const State& prev) const;

 private:
  std::vector<int> input_dims_;
  int hidden_ = 0;
  std::vector<const Parameter*> wx_;
  const Parameter* wh_ = nullptr;
  const Parameter* b_ = nullptr;
};

// Two LSTMs reading the sequence in opposite directions; output t is
// [forward h_t ; backward h_t].
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(ParameterSet& ps, const std::string& name, std::vector<int> input_dims, int hidden_dim, Rng& rng);

  int hidden_dim() const { return fwd_.hidden_dim(); }
  int output_dim() const { return 2 * fwd_.hidden_dim(); }

  // inputs[t] holds the input blocks for position t. Throws ArgumentError on
  // an empty sequence.
  std::vector<Expr> encode(Graph& g, const std::vector<std::vector<Expr>>& inputs) const;

  // [forward h_last ; backward h_first], the usual word-from-characters summary.
  Expr encode_final(Graph& g, const std::vector<std::vector<Expr>>& inputs) const;

  const Lstm& forward() const { return fwd_; }
  const Lstm& backward() const { return bwd_; }

 private:
  Lstm fwd_;
  Lstm bwd_;
};

// Feed-forward network: tanh hidden layers followed by a linear output layer
// (softmax is left to the loss). The first layer takes several input blocks.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterSet& ps, const std::string& name, std::vector<int> input_dims, std::vector<int> hidden,
      int output_dim, Rng& rng);

  int output_dim() const { return output_dim_; }
  int last_hidden_dim() const { return hidden_.empty() ? 0 : hidden_.back(); }

  // Last hidden layer activation (after dropout when training).
  Expr hidden(Graph& g, std::span<const Expr> inputs, const Mode& mode = {}) const;
  Expr output(Graph& g, Expr last_hidden) const;
  Expr forward(Graph& g, std::span<const Expr> inputs, const Mode& mode = {}) const;

 private:
  std::vector<int> input_dims_;
  std::vector<int> hidden_;
  int output_dim_ = 0;
  std::vector<const Parameter*> first_w_;
  std::vector<std::pair<const Parameter*, const Parameter*>> layers_;  // (W, b) after the first
  const Parameter* first_b_ = nullptr;
};

// Embedding table (dim x vocab) initialised uniformly in [-range, range].
class Embedding {
 public:
  Embedding() = default;
  Embedding(ParameterSet& ps, const std::string& name, int vocab, int dim, double range, Rng& rng);

  int dim() const { return dim_; }
  int vocab() const { return vocab_; }
  Expr operator()(Graph& g, int id) const { return g.lookup(*table_, id); }

 private:
  const Parameter* table_ = nullptr;
  int vocab_ = 0;
  int dim_ = 0;
};

}  // namespace cspipe::nn
