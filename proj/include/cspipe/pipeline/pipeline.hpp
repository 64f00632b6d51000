#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/decode/lm.hpp"
#include "cspipe/embed/lexicon.hpp"
#include "cspipe/embed/space.hpp"
#include "cspipe/embed/word_vectors.hpp"
#include "cspipe/error.hpp"
#include "cspipe/langid/langid.hpp"
#include "cspipe/norm/normalizer.hpp"
#include "cspipe/parser/model.hpp"
#include "cspipe/pipeline/config.hpp"
#include "cspipe/treebank/eval.hpp"

namespace cspipe::pipeline {

// A failure inside one pipeline stage; what() is "<stage>: <cause>".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Everything a run needs, loaded once and shared read-only across workers.
// Components whose path is empty stay unloaded; a stage that needs one
// throws StageError.
struct Models {
  PipelineConfig config;
  std::optional<embed::EmbeddingSpace> emb_en;
  std::optional<embed::EmbeddingSpace> emb_hi;
  std::optional<embed::Mat> projection;
  embed::BilingualLexicon lexicon;
  langid::Dictionary dictionary;
  std::optional<decode::TrigramLM> lm_en;
  std::optional<decode::TrigramLM> lm_hi;
  std::unique_ptr<langid::LangIdModel> langid;
  std::shared_ptr<const norm::CharSeq2Seq> norm_en;
  std::shared_ptr<const norm::CharSeq2Seq> norm_hi;
  std::unique_ptr<parser::ParserNet> parser;

  norm::Normalizer normalizer() const { return norm::Normalizer(norm_hi, norm_en); }
  langid::Resources langid_resources() const;
  embed::WordVectors word_vectors() const;
};

// Throws DataError naming the path of any configured file that is missing or
// malformed, and when the parser model disagrees with parse_mode or stacking.
// Without a projection file one is learned from the lexicon when
// crosslingual is on and both spaces are loaded.
std::unique_ptr<Models> load_models(const PipelineConfig& config);

// Substitutes gold annotations for predicted ones (evaluation ablations).
struct RunOptions {
  bool gold_lid = false;
  bool gold_norm = false;
};

struct PipelineOutput {
  Sentence sentence;  // lang, norm, upos, head and deprel filled in
  std::vector<LangTag> tags;
  std::vector<norm::CandidateSet> candidates;  // empty under gold normalization
  std::vector<std::string> decoded;
  nlohmann::json decode_trace;  // lattices and choices of the decode step
  nlohmann::json to_json() const;
};

// One stage per step: langid, normalize, decode, parse. Only the forms of
// `input` are read unless gold annotations are requested in `opts`.
PipelineOutput run_pipeline(const Models& m, const Sentence& input, const RunOptions& opts = {});

// Stages up to and including decode; `sentence` holds lang and norm only.
PipelineOutput run_until_decode(const Models& m, const Sentence& input, const RunOptions& opts = {});

struct ConditionReport {
  EvalReport parse;
  double lid_accuracy = 0.0;  // percent
  NormAccuracy norm_hi;
  NormAccuracy norm_en;
  // Combined hi+en normalization accuracy in percent.
  double norm_accuracy() const;
  nlohmann::json to_json() const;
};

inline constexpr const char* kConditionLabels[] = {"gold-lid+gold-trn", "gold-lid+auto-trn", "auto-lid+gold-trn",
                                                   "auto-lid+auto-trn"};

// Scores predictions against gold. Throws ArgumentError on a tokenization
// mismatch (sentence count, token count or forms).
ConditionReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted);

// Runs the four gold/auto LID x gold/auto normalization conditions.
std::map<std::string, ConditionReport> evaluate(const Models& m, const std::vector<Sentence>& gold);

// Calls fn(i) for i in [0, n) on `workers` threads; results keep index
// order. The exception of the lowest failing index is rethrown.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

}  // namespace cspipe::pipeline
