#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspipe/decode/lm.hpp"
#include "cspipe/langid/langid.hpp"
#include "cspipe/norm/seq2seq.hpp"
#include "cspipe/parser/model.hpp"
#include "cspipe/pipeline/config.hpp"
#include "cspipe/pipeline/pipeline.hpp"

namespace cspipe::pipeline {

// Hyperparameters for every trained component.
struct TrainProfile {
  parser::ParserHyper parser;
  norm::Seq2SeqHyper seq2seq;
  langid::LangIdHyper langid;
  bool freeze_stacking_source = false;

  static TrainProfile defaults();
  // Reduced sizes for the bundled toy data.
  static TrainProfile toy();
  // Derives distinct per-component seeds from one.
  void set_seed(std::uint64_t seed);
  static TrainProfile by_name(const std::string& name);  // "default" or "toy"
};

struct BundleSources {
  std::string treebank;         // CoNLL-U with lang= and norm=
  std::string source_treebank;  // stacking only
  std::string langid_corpus;    // form<TAB>tag
  std::string norm_en;          // noisy<TAB>clean
  std::string norm_hi;
  std::string lm_en;            // one sentence per line
  std::string lm_hi;
  std::string emb_en;
  std::string emb_hi;
  std::string lexicon;
  std::string dictionary;
};

struct BundleReport {
  std::map<std::string, double> seconds;  // per component
  double norm_en_train_accuracy = 0.0;    // exact match, fraction
  double norm_hi_train_accuracy = 0.0;
  double langid_train_accuracy = 0.0;     // fraction
  parser::TrainReport parser;
  nlohmann::json to_json() const;
};

using Log = std::function<void(const std::string&)>;

// One sentence per line, whitespace tokenized; blank lines skipped.
std::vector<std::vector<std::string>> read_lm_corpus(const std::string& path);

// Trains an (optionally stacked) parser on `train_path` with the word
// vectors of `models`.
std::unique_ptr<parser::ParserNet> train_parser_model(const Models& models, const std::string& train_path,
                                                      const std::string& source_path, const TrainProfile& profile,
                                                      const Log& log = {}, parser::TrainReport* report = nullptr);

// Trains every model in dependency order (normalizers, language models,
// projection, language identification, parser), writes them under `out_dir`
// together with config.json (paths relative to it) and returns that config.
// `modes` supplies the decode/parse/stacking switches.
PipelineConfig train_bundle(const BundleSources& src, const std::string& out_dir, const TrainProfile& profile,
                            const PipelineConfig& modes, BundleReport* report = nullptr, const Log& log = {});

// Source files of the bundled toy corpus under `data_dir`.
BundleSources toy_sources(const std::string& data_dir);

}  // namespace cspipe::pipeline
