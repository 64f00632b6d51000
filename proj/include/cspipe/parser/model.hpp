#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/embed/word_vectors.hpp"
#include "cspipe/nn/chars.hpp"
#include "cspipe/nn/layers.hpp"
#include "cspipe/parser/transition.hpp"
#include "cspipe/treebank/sentence.hpp"

namespace cspipe::parser {

struct ParserHyper {
  int char_dim = 32;
  int char_hidden = 32;
  int shared_hidden = 128;
  int tagger_hidden = 128;
  int tagger_mlp = 128;
  int parser_hidden = 256;
  int parser_mlp = 256;
  int pos_dim = 32;
  // Pipeline mode: the parser reads POS tag embeddings (gold in training,
  // predicted at inference) instead of the tagger's hidden layers.
  bool pipeline = false;

  double dropout = 0.3;
  double word_dropout = 0.0025;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int max_epochs = 100;
  int patience = 5;
  double explore_prob = 0.1;
  int explore_from_epoch = 2;  // 1-based
  std::uint64_t seed = 1;

  // Reduced sizes and schedule for the bundled toy data.
  static ParserHyper toy();
  nlohmann::json to_json() const;
  static ParserHyper from_json(const nlohmann::json& j);
};

struct ParserVocab {
  nn::CharVocab chars;
  std::vector<std::string> upos;  // sorted
  LabelSet labels;

  // From (projectivized) training sentences.
  static ParserVocab build(const std::vector<Sentence>& train);
  int upos_index(const std::string& tag) const;  // -1 when absent
  nlohmann::json to_json() const;
  static ParserVocab from_json(const nlohmann::json& j);
};

// Sizes of the extra input blocks fed from a stacking source; 0 = no block.
struct StackingDims {
  int tagger_hidden = 0;  // into the shared BiLSTM input
  int parser_state = 0;   // into the parser BiLSTM input
  int parser_mlp = 0;     // into the parser MLP input
  bool any() const { return tagger_hidden || parser_state || parser_mlp; }
};

// Per-sentence activations. Vectors are indexed by token position 0..n-1.
struct Forward {
  std::vector<nn::Expr> tag_logits;
  std::vector<nn::Expr> tag_hidden;
  std::vector<nn::Expr> states;  // parser BiLSTM outputs
  nn::Expr root;
  nn::Expr pad;
  std::unique_ptr<Forward> source;  // stacking source, when present
};

// Extra inputs from a stacking source; absent Exprs leave the block out.
struct SourceInputs {
  std::vector<nn::Expr> tagger_hidden;
  std::vector<nn::Expr> parser_states;
};

// Common surface of the joint tagger-parser and its stacked variant, used by
// training and decoding.
class ParserNet {
 public:
  virtual ~ParserNet() = default;
  virtual const ParserHyper& hyper() const = 0;
  virtual const ParserVocab& vocab() const = 0;
  virtual int word_dim() const = 0;
  // Every parameter set updated in training.
  virtual std::vector<nn::ParameterSet*> parameter_sets() = 0;
  // `pos` supplies UPOS indices for the pipeline-mode parser input.
  virtual Forward forward(nn::Graph& g, const Sentence& s, const embed::WordVectors& wv, const nn::Mode& mode,
                          const std::vector<int>* pos) const = 0;
  virtual nn::Expr transition_logits(nn::Graph& g, const Forward& f, const Config& c, const nn::Mode& mode) const = 0;
  virtual nlohmann::json meta() const = 0;
  virtual void save(const std::string& path) const = 0;
};

// Joint POS tagger and arc-eager parser. Tokens are read through a word
// vector (trainable UNK for misses) and a character BiLSTM; a shared BiLSTM
// feeds the tagger BiLSTM and MLP, and the parser BiLSTM reads the shared
// states, the tagger MLP hidden layer and the raw token inputs. Transitions
// are scored by an MLP over the stack top and buffer front states, with a
// learned ROOT vector and a learned empty-buffer pad.
class StackPropModel : public ParserNet {
 public:
  StackPropModel(ParserHyper hyper, ParserVocab vocab, int word_dim, StackingDims stacking = {});
  static std::unique_ptr<StackPropModel> from_meta(const nlohmann::json& meta);

  const ParserHyper& hyper() const override { return hyper_; }
  const ParserVocab& vocab() const override { return vocab_; }
  int word_dim() const override { return word_dim_; }
  const StackingDims& stacking() const { return stacking_; }
  nn::ParameterSet& params() { return ps_; }
  const nn::ParameterSet& params() const { return ps_; }
  std::vector<nn::ParameterSet*> parameter_sets() override { return {&ps_}; }

  Forward forward(nn::Graph& g, const Sentence& s, const embed::WordVectors& wv, const nn::Mode& mode,
                  const std::vector<int>* pos) const override {
    return forward(g, s, wv, mode, pos, nullptr);
  }
  Forward forward(nn::Graph& g, const Sentence& s, const embed::WordVectors& wv, const nn::Mode& mode,
                  const std::vector<int>* pos, const SourceInputs* src) const;
  // Parser MLP hidden layer for `c`; `src_hidden` may be absent.
  nn::Expr mlp_hidden(nn::Graph& g, const Forward& f, const Config& c, const nn::Mode& mode,
                      nn::Expr src_hidden = {}) const;
  nn::Expr mlp_output(nn::Graph& g, nn::Expr hidden) const;
  nn::Expr transition_logits(nn::Graph& g, const Forward& f, const Config& c, const nn::Mode& mode) const override;

  int tagger_hidden_dim() const { return hyper_.tagger_mlp; }
  int parser_state_dim() const { return 2 * hyper_.parser_hidden; }
  int parser_mlp_dim() const { return hyper_.parser_mlp; }

  nlohmann::json meta() const override;
  void save(const std::string& path) const override;

 private:
  ParserHyper hyper_;
  ParserVocab vocab_;
  int word_dim_;
  StackingDims stacking_;
  nn::ParameterSet ps_;
  nn::CharEncoder chars_;
  const nn::Parameter* unk_ = nullptr;
  nn::BiLstm shared_;
  nn::BiLstm tagger_;
  nn::Mlp tag_mlp_;
  // Pipeline mode only: the parser's own token reader and POS embeddings.
  nn::CharEncoder parser_chars_;
  const nn::Parameter* parser_unk_ = nullptr;
  nn::Embedding pos_emb_;
  nn::BiLstm parser_lstm_;
  nn::Mlp parser_mlp_;
  const nn::Parameter* root_ = nullptr;
  const nn::Parameter* pad_ = nullptr;
};

// A target model whose tagger and parser read a source model's tagger MLP
// hidden layer, parser BiLSTM states and parser MLP hidden layer (computed on
// the target's own configurations). With `masked` set the source
// contributions are left out entirely; with `freeze_source` the source
// parameters are excluded from training.
class StackedModel : public ParserNet {
 public:
  // The target is built with matching extra input blocks.
  StackedModel(std::unique_ptr<StackPropModel> source, ParserHyper hyper, ParserVocab vocab);
  StackedModel(std::unique_ptr<StackPropModel> source, std::unique_ptr<StackPropModel> target);
  static std::unique_ptr<StackedModel> from_meta(const nlohmann::json& meta);

  const ParserHyper& hyper() const override { return target_->hyper(); }
  const ParserVocab& vocab() const override { return target_->vocab(); }
  int word_dim() const override { return target_->word_dim(); }
  std::vector<nn::ParameterSet*> parameter_sets() override;

  StackPropModel& source() { return *source_; }
  StackPropModel& target() { return *target_; }
  const StackPropModel& source() const { return *source_; }
  const StackPropModel& target() const { return *target_; }
  bool masked() const { return masked_; }
  bool source_frozen() const { return frozen_; }
  void set_masked(bool m) { masked_ = m; }
  void set_source_frozen(bool f);

  Forward forward(nn::Graph& g, const Sentence& s, const embed::WordVectors& wv, const nn::Mode& mode,
                  const std::vector<int>* pos) const override;
  nn::Expr transition_logits(nn::Graph& g, const Forward& f, const Config& c, const nn::Mode& mode) const override;

  nlohmann::json meta() const override;
  void save(const std::string& path) const override;

 private:
  std::unique_ptr<StackPropModel> source_;
  std::unique_ptr<StackPropModel> target_;
  bool masked_ = false;
  bool frozen_ = false;
};

// Reads a file written by either model's save(); throws DataError naming the
// path on any problem.
std::unique_ptr<ParserNet> load_parser(const std::string& path);

// --- training and decoding ---

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double dev_uas = 0.0;
  double dev_las = 0.0;
  double dev_pos = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  double best_dev_las = 0.0;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Per sentence one update on the summed tagging and parsing losses, parsing
// configurations following training by exploration under the dynamic
// oracle. Training sentences must be projective (throws ArgumentError naming
// the sentence otherwise); `dev` holds plain gold trees and selects the
// epoch whose parameters are kept (best LAS, then best tagging accuracy). An empty dev set falls back to `train`.
TrainReport train_parser(ParserNet& net, const std::vector<Sentence>& train, const std::vector<Sentence>& dev,
                         const embed::WordVectors& wv, const EpochCallback& on_epoch = {});

struct LossTerms {
  nn::Expr tagging;
  nn::Expr parsing;
};

// Losses along the static-oracle derivation (no exploration, deterministic
// for a deterministic mode); used for gradient checks.
LossTerms static_losses(nn::Graph& g, const ParserNet& net, const Sentence& s, const embed::WordVectors& wv,
                        const nn::Mode& mode);

// Argmax UPOS per token.
std::vector<std::string> tag_only(const ParserNet& net, const Sentence& s, const embed::WordVectors& wv);

// Greedy legal decoding, then repair and deprojectivization. Copies the
// input and fills upos, head and deprel. Tokens left headless attach to the
// root token as "dep"; a sentence without a root gets its first headless
// token as "root".
Sentence parse(const ParserNet& net, const Sentence& s, const embed::WordVectors& wv);

}  // namespace cspipe::parser
