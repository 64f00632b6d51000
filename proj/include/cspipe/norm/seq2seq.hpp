#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/nn/chars.hpp"
#include "cspipe/nn/layers.hpp"
#include "cspipe/norm/noise.hpp"

namespace cspipe::norm {

struct Seq2SeqHyper {
  int char_dim = 32;
  int hidden = 512;
  double dropout = 0.3;
  double learning_rate = 1.0;
  int decay_after = 8;  // halve the rate after every epoch past this one
  int epochs = 25;
  int batch_size = 128;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;

  // Reduced sizes and small batches for the bundled toy pairs.
  static Seq2SeqHyper toy();
  nlohmann::json to_json() const;
  static Seq2SeqHyper from_json(const nlohmann::json& j);
};

struct Hypothesis {
  std::string text;
  double log_prob = 0.0;
};

// Character encoder-decoder: BiLSTM encoder, LSTM decoder initialised from
// the encoder's final states, global attention with the bilinear ("general")
// score, and input feeding of the attentional state. Symbols 0, 1 and 2 are
// reserved in both alphabets for unknown, begin and end.
class CharSeq2Seq {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  CharSeq2Seq(Seq2SeqHyper hyper, nn::CharVocab source, nn::CharVocab target);
  // Alphabets from the pairs.
  static CharSeq2Seq for_pairs(const Seq2SeqHyper& hyper, const std::vector<NoisyPair>& pairs);
  static nn::CharVocab make_vocab(const std::vector<std::string>& words);

  const Seq2SeqHyper& hyper() const { return hyper_; }
  const nn::CharVocab& source_vocab() const { return src_vocab_; }
  const nn::CharVocab& target_vocab() const { return tgt_vocab_; }
  nn::ParameterSet& params() { return ps_; }
  const nn::ParameterSet& params() const { return ps_; }

  // Teacher-forced negative log-likelihood of `target` followed by the end
  // symbol. Unknown source characters read as kUnk.
  nn::Expr loss(nn::Graph& g, const std::string& source, const std::string& target, const nn::Mode& mode) const;
  // Natural-log probability of emitting exactly `target` then the end symbol.
  double sequence_log_prob(const std::string& source, const std::string& target) const;
  // Next-symbol log-distribution after reading `source` and emitting `prefix`.
  nn::Vec next_log_probs(const std::string& source, const std::string& prefix) const;

  // 3 |source| + 5 output characters at most (end symbol excluded).
  static int max_output_length(const std::string& source);
  // Argmax at every step; reaching the length bound forces the end symbol.
  Hypothesis greedy(const std::string& source) const;
  // Beam search of width b over the same space as greedy(): each step keeps
  // the b best expansions of the live prefixes; an expansion by the end
  // symbol completes a hypothesis. Stops when b hypotheses are complete, no
  // live prefix can still beat the b-th best, or the length bound is hit.
  // Returns at most b completed hypotheses, best first. Throws ArgumentError
  // for b < 1 or an empty source.
  std::vector<Hypothesis> beam(const std::string& source, int b) const;

  // Characters of `source` missing from the source alphabet.
  int unknown_chars(const std::string& source) const;

  nlohmann::json meta() const;
  static std::unique_ptr<CharSeq2Seq> from_meta(const nlohmann::json& meta);
  void save(const std::string& path) const;
  static std::unique_ptr<CharSeq2Seq> load(const std::string& path);

 private:
  struct Encoded {
    std::vector<nn::Expr> states;
    std::vector<nn::Expr> keys;  // W_a applied to each state
    nn::Lstm::State init;
  };
  struct DecoderState {
    nn::Lstm::State lstm;
    nn::Expr feed;
  };
  Encoded encode(nn::Graph& g, const std::vector<int>& ids, const nn::Mode& mode) const;
  DecoderState start(nn::Graph& g, const Encoded& enc) const;
  // Returns logits over the target alphabet and the advanced state.
  nn::Expr step(nn::Graph& g, const Encoded& enc, DecoderState& st, int prev, const nn::Mode& mode) const;
  std::vector<int> source_ids(const std::string& source) const;
  std::vector<int> target_ids(const std::string& target) const;
  std::string target_text(const std::vector<int>& ids) const;

  Seq2SeqHyper hyper_;
  nn::CharVocab src_vocab_;
  nn::CharVocab tgt_vocab_;
  nn::ParameterSet ps_;
  nn::Embedding src_emb_;
  nn::Embedding tgt_emb_;
  nn::BiLstm encoder_;
  nn::Lstm decoder_;
  const nn::Parameter* bridge_w_ = nullptr;
  const nn::Parameter* bridge_b_ = nullptr;
  const nn::Parameter* attn_w_ = nullptr;
  const nn::Parameter* combine_ctx_ = nullptr;
  const nn::Parameter* combine_h_ = nullptr;
  const nn::Parameter* combine_b_ = nullptr;
  const nn::Parameter* out_w_ = nullptr;
  const nn::Parameter* out_b_ = nullptr;
};

struct Seq2SeqEpoch {
  int epoch = 0;
  double learning_rate = 0.0;
  double loss = 0.0;            // summed over training pairs
  double dev_accuracy = -1.0;   // exact match of greedy output; -1 without dev
};

struct Seq2SeqReport {
  std::vector<Seq2SeqEpoch> epochs;
  int unknown_dev_chars = 0;
};

// Plain SGD over shuffled minibatches (gradients averaged per batch and
// rescaled to clip_norm when larger), learning rate halved after every epoch
// past decay_after. Throws ArgumentError for empty training pairs.
Seq2SeqReport train_seq2seq(CharSeq2Seq& model, const std::vector<NoisyPair>& train,
                            const std::vector<NoisyPair>& dev = {},
                            const std::function<void(const Seq2SeqEpoch&)>& on_epoch = {});

// Fraction of pairs whose greedy output equals the clean side.
double exact_match(const CharSeq2Seq& model, const std::vector<NoisyPair>& pairs);

}  // namespace cspipe::norm
