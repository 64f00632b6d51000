#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/embed/space.hpp"
#include "cspipe/nn/chars.hpp"
#include "cspipe/nn/layers.hpp"
#include "cspipe/treebank/sentence.hpp"

namespace cspipe::langid {

// Surface length in code points -> bin: 0-3 -> 0, 4-6 -> 1, 7-10 -> 2, >10 -> 3.
int length_bin(std::string_view word);
inline constexpr int kLengthBins = 4;

// Plain wordlist, one word per line; membership is ASCII case-insensitive.
class Dictionary {
 public:
  Dictionary() = default;
  explicit Dictionary(const std::vector<std::string>& words);
  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

  // Blank lines and "#" comments are skipped.
  static Dictionary parse(std::string_view text);
  static Dictionary load(const std::string& path);

 private:
  std::unordered_set<std::string> words_;
};

// Runtime inputs to featurization; none of them are stored in a model file.
struct Resources {
  const embed::EmbeddingSpace* en = nullptr;
  const embed::EmbeddingSpace* hi = nullptr;
  // English-space projection of Hindi vectors, used only when crosslingual.
  const embed::Mat* hi_to_en = nullptr;
  bool crosslingual = false;
  const Dictionary* dictionary = nullptr;
  // Romanized word -> first-best native-script form. Identity when unset.
  std::function<std::string(const std::string&)> transliterate;

  // Common width of the two spaces; throws ArgumentError when they differ or
  // neither is set.
  int word_dim() const;
};

struct LangIdFeatures {
  std::optional<embed::Vec> en_embedding;           // nullopt -> trainable UNK row
  std::optional<embed::Vec> hi_translit_embedding;  // nullopt -> trainable UNK row
  std::string transliteration;
  int dict_flag = 0;
  int length_bin = 0;
};

LangIdFeatures featurize(std::string_view form, const Resources& r);

// True for tokens that carry no letter; these are tagged univ without the model.
bool rule_univ(std::string_view form);

// First maximum in tag order hi, en, ne, acro, univ.
LangTag argmax_tag(const nn::Vec& scores);

struct LangIdHyper {
  int char_dim = 32;
  int char_hidden = 32;
  int flag_dim = 8;
  int sentence_hidden = 64;
  int mlp_hidden = 64;
  double dropout = 0.5;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int max_epochs = 100;
  int patience = 5;
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
  static LangIdHyper from_json(const nlohmann::json& j);
};

// Token vector = [en emb ; hi emb of transliteration ; char BiLSTM ;
// dictionary-flag emb ; length-bin emb], read by a sentence BiLSTM whose states
// feed a one-hidden-layer tanh MLP with five outputs.
class LangIdModel {
 public:
  LangIdModel(LangIdHyper hyper, nn::CharVocab chars, int word_dim);
  // Character inventory from the training forms.
  static LangIdModel for_corpus(const LangIdHyper& hyper, const std::vector<Sentence>& train, int word_dim);

  const LangIdHyper& hyper() const { return hyper_; }
  int word_dim() const { return word_dim_; }
  int feature_dim() const;
  nn::ParameterSet& params() { return ps_; }
  const nn::ParameterSet& params() const { return ps_; }

  // One logit vector per token, in tag order.
  std::vector<nn::Expr> logits(nn::Graph& g, const std::vector<std::string>& forms,
                               const std::vector<LangIdFeatures>& features, const nn::Mode& mode) const;

  // Model distributions (the univ rule is not applied here). Throws
  // ArgumentError on an empty sentence.
  std::vector<nn::Vec> probabilities(const Sentence& s, const Resources& r) const;
  std::vector<LangTag> predict(const Sentence& s, const Resources& r) const;
  // Same as predict() with precomputed features.
  std::vector<LangTag> predict(const std::vector<std::string>& forms, const std::vector<LangIdFeatures>& features) const;

  nlohmann::json meta() const;
  static std::unique_ptr<LangIdModel> from_meta(const nlohmann::json& meta);
  void save(const std::string& path) const;
  static std::unique_ptr<LangIdModel> load(const std::string& path);

 private:
  LangIdHyper hyper_;
  int word_dim_;
  nn::ParameterSet ps_;
  nn::CharEncoder chars_;
  const nn::Parameter* unk_en_ = nullptr;
  const nn::Parameter* unk_hi_ = nullptr;
  nn::Embedding dict_emb_;
  nn::Embedding len_emb_;
  nn::BiLstm sentence_;
  nn::Mlp mlp_;
};

struct LangIdEpoch {
  int epoch = 0;
  double loss = 0.0;
  double dev_accuracy = 0.0;
};

struct LangIdReport {
  std::vector<LangIdEpoch> epochs;
  int best_epoch = 0;
  double best_dev_accuracy = 0.0;
  bool early_stopped = false;
};

// Per-sentence momentum SGD on the summed token cross-entropy (rule-tagged
// tokens excluded). Dev accuracy after every epoch; the best epoch's
// parameters are restored on return. An empty dev set falls back to train.
// Throws ArgumentError on an empty corpus or an untagged token.
LangIdReport train_langid(LangIdModel& model, const std::vector<Sentence>& train, const std::vector<Sentence>& dev,
                          const Resources& r, const std::function<void(const LangIdEpoch&)>& on_epoch = {});

// Token accuracy of predict() against the gold lang tags.
double tag_accuracy(const LangIdModel& model, const std::vector<Sentence>& gold, const Resources& r);

// "form<TAB>tag" per line, blank line between sentences. Throws ParseError
// naming the line.
std::vector<Sentence> parse_tagged_corpus(std::string_view text);
std::vector<Sentence> read_tagged_corpus(const std::string& path);
std::string format_tagged_corpus(const std::vector<Sentence>& sentences);

}  // namespace cspipe::langid
