#include "cspipe/pipeline/pipeline.hpp"

#include <filesystem>

#include "cspipe/decode/contextual.hpp"
#include "cspipe/embed/projection.hpp"
#include "cspipe/treebank/conllu.hpp"
#include "cspipe/treebank/tree.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::pipeline {

using nlohmann::json;

namespace {

// Runs a loader on `path`, making sure any failure names the file.
template <typename F>
auto load_file(const char* what, const std::string& path, F&& f) {
  if (!std::filesystem::exists(path)) throw DataError(std::string(what) + " file not found: " + path);
  try {
    return f(path);
  } catch (const Error& e) {
    std::string msg = e.what();
    if (msg.find(path) == std::string::npos) msg = path + ": " + msg;
    throw DataError(msg);
  }
}

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

langid::Resources Models::langid_resources() const {
  langid::Resources r;
  r.en = emb_en ? &*emb_en : nullptr;
  r.hi = emb_hi ? &*emb_hi : nullptr;
  r.hi_to_en = projection ? &*projection : nullptr;
  r.crosslingual = config.langid_crosslingual;
  r.dictionary = &dictionary;
  if (norm_hi) {
    r.transliterate = [n = normalizer()](const std::string& w) { return n.transliterate(w); };
  }
  return r;
}

embed::WordVectors Models::word_vectors() const {
  embed::WordVectors wv;
  wv.en = emb_en ? &*emb_en : nullptr;
  wv.hi = emb_hi ? &*emb_hi : nullptr;
  wv.hi_to_en = projection ? &*projection : nullptr;
  wv.crosslingual = config.crosslingual;
  return wv;
}

std::unique_ptr<Models> load_models(const PipelineConfig& config) {
  config.validate();
  auto m = std::make_unique<Models>();
  m->config = config;
  const Paths& p = config.paths;
  auto emb = [](const std::string& f) { return embed::load_embeddings(f).space; };
  if (!p.emb_en.empty()) m->emb_en = load_file("embedding", p.emb_en, emb);
  if (!p.emb_hi.empty()) m->emb_hi = load_file("embedding", p.emb_hi, emb);
  if (!p.lexicon.empty()) m->lexicon = load_file("lexicon", p.lexicon, embed::load_lexicon);
  if (!p.dictionary.empty()) m->dictionary = load_file("dictionary", p.dictionary, langid::Dictionary::load);
  if (!p.lm_en.empty()) m->lm_en = load_file("language model", p.lm_en, decode::TrigramLM::load_arpa);
  if (!p.lm_hi.empty()) m->lm_hi = load_file("language model", p.lm_hi, decode::TrigramLM::load_arpa);
  if (!p.langid.empty()) m->langid = load_file("model", p.langid, langid::LangIdModel::load);
  if (!p.norm_en.empty()) m->norm_en = load_file("model", p.norm_en, norm::CharSeq2Seq::load);
  if (!p.norm_hi.empty()) m->norm_hi = load_file("model", p.norm_hi, norm::CharSeq2Seq::load);
  if (!p.parser.empty()) m->parser = load_file("model", p.parser, parser::load_parser);

  if (!p.projection.empty()) {
    m->projection = load_file("projection", p.projection, embed::load_projection);
    if (m->emb_hi && m->projection->rows() != m->emb_hi->dim()) {
      throw DataError(p.projection + ": projection size does not match the Hindi embeddings");
    }
  } else if (config.crosslingual && m->emb_en && m->emb_hi && !m->lexicon.empty()) {
    try {
      m->projection = embed::learn_projection(*m->emb_hi, *m->emb_en, m->lexicon).w;
    } catch (const ArgumentError& e) {
      throw DataError(std::string("cannot learn a projection from ") + p.lexicon + ": " + e.what());
    }
  }

  if (m->parser) {
    bool pipeline_model = m->parser->hyper().pipeline;
    if (pipeline_model != (config.parse_mode == ParseMode::pipeline)) {
      throw DataError(p.parser + ": model parse mode is " + (pipeline_model ? "pipeline" : "stackprop") +
                      " but the config asks for " + std::string(to_string(config.parse_mode)));
    }
    bool stacked = dynamic_cast<parser::StackedModel*>(m->parser.get()) != nullptr;
    if (stacked != config.stacking) {
      throw DataError(p.parser + ": model is " + (stacked ? "" : "not ") + "stacked but stacking is " +
                      (config.stacking ? "on" : "off"));
    }
  }
  return m;
}

json PipelineOutput::to_json() const {
  json cands = json::array();
  for (const auto& c : candidates) {
    json one = json::array();
    for (const auto& h : c.candidates) one.push_back({{"text", h.text}, {"log_prob", h.log_prob}});
    cands.push_back(one);
  }
  json tag_names = json::array();
  for (LangTag t : tags) tag_names.push_back(std::string(cspipe::to_string(t)));
  json forms = json::array();
  for (const auto& t : sentence.tokens) forms.push_back(t.form);
  return {{"forms", forms},
          {"tags", tag_names},
          {"candidates", cands},
          {"decoded", decoded},
          {"decode", decode_trace},
          {"conllu", conllu::write({sentence})}};
}

namespace {

// `w` is a case-folded decoder choice; give it back the spelling it had
// among the position's options.
std::string restore_case(const std::string& w, const std::string& form, const std::vector<std::string>& options) {
  if (text::lower(form) == w) return form;
  for (const auto& o : options) {
    if (text::lower(o) == w) return o;
  }
  return w;
}

Sentence bare_copy(const Sentence& input) {
  Sentence s;
  s.meta = input.meta;
  for (const auto& t : input.tokens) {
    Token b;
    b.index = t.index;
    b.form = t.form;
    s.tokens.push_back(std::move(b));
  }
  return s;
}

}  // namespace

PipelineOutput run_until_decode(const Models& m, const Sentence& input, const RunOptions& opts) {
  if (input.empty()) throw StageError("input", "empty sentence");
  const std::size_t n = input.size();
  PipelineOutput out;
  out.sentence = bare_copy(input);

  out.tags = stage("langid", [&] {
    std::vector<LangTag> tags;
    if (opts.gold_lid) {
      for (const auto& t : input.tokens) {
        if (!t.lang) throw DataError("token " + std::to_string(t.index) + " has no gold language tag");
        tags.push_back(*t.lang);
      }
      return tags;
    }
    if (!m.langid) throw DataError("no language identification model configured");
    return m.langid->predict(out.sentence, m.langid_resources());
  });

  if (opts.gold_norm) {
    out.decoded = stage("normalize", [&] {
      std::vector<std::string> words;
      for (const auto& t : input.tokens) words.push_back(t.norm ? *t.norm : t.form);
      return words;
    });
    out.decode_trace = {{"mode", "gold"}};
  } else {
    out.candidates = stage("normalize", [&] {
      norm::Normalizer normalizer = m.normalizer();
      std::vector<norm::CandidateSet> sets;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string& form = input.tokens[i].form;
        if (out.tags[i] == LangTag::hi && !m.norm_hi) throw DataError("no Hindi transliteration model configured");
        if (out.tags[i] == LangTag::en && !m.norm_en) throw DataError("no English normalization model configured");
        sets.push_back(normalizer.candidates(form, out.tags[i], m.config.beam));
      }
      return sets;
    });

    stage("decode", [&] {
      // Latin text is case-folded for the language models.
      decode::CsSentence cs;
      std::vector<std::vector<std::string>> original(n);
      for (std::size_t i = 0; i < n; ++i) {
        cs.forms.push_back(text::lower(input.tokens[i].form));
        cs.tags.push_back(out.tags[i]);
        std::vector<std::string> c;
        for (const auto& h : out.candidates[i].candidates) {
          original[i].push_back(h.text);
          c.push_back(text::lower(h.text));
        }
        cs.candidates.push_back(std::move(c));
      }
      const decode::DecodeOptions dopts{static_cast<std::size_t>(m.config.beam), 3};
      std::vector<std::string> words;
      const DecodeMode mode = m.config.decode_mode;
      if (mode == DecodeMode::first_best) {
        words = decode::first_best(cs);
        out.decode_trace = {{"mode", "first-best"}};
      } else {
        if (!m.lm_en || !m.lm_hi) throw DataError("decode mode " + std::string(to_string(mode)) + " needs both language models");
        if (mode == DecodeMode::fragment) {
          words = decode::fragment_decode(cs, *m.lm_hi, *m.lm_en, dopts);
          out.decode_trace = {{"mode", "fragment"}};
        } else {
          auto r = decode::three_step_decode(cs, m.lexicon, *m.lm_en, *m.lm_hi, dopts);
          words = r.words;
          out.decode_trace = decode::to_json(r);
          out.decode_trace["mode"] = "3-step";
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        out.decoded.push_back(restore_case(words[i], input.tokens[i].form, original[i]));
      }
      return 0;
    });
  }

  for (std::size_t i = 0; i < n; ++i) {
    out.sentence.tokens[i].lang = out.tags[i];
    out.sentence.tokens[i].norm = out.decoded[i];
  }
  return out;
}

PipelineOutput run_pipeline(const Models& m, const Sentence& input, const RunOptions& opts) {
  PipelineOutput out = run_until_decode(m, input, opts);
  out.sentence = stage("parse", [&] {
    if (!m.parser) throw DataError("no parser model configured");
    if (!m.emb_en && !m.emb_hi) throw DataError("no embeddings configured");
    Sentence parsed = parser::parse(*m.parser, out.sentence, m.word_vectors());
    if (auto v = validate_tree(parsed); !v.empty()) throw Error("invalid tree: " + v.front().message);
    return parsed;
  });
  return out;
}

double ConditionReport::norm_accuracy() const {
  std::size_t tokens = norm_hi.tokens + norm_en.tokens;
  return tokens ? 100.0 * static_cast<double>(norm_hi.correct + norm_en.correct) / static_cast<double>(tokens) : 0.0;
}

json ConditionReport::to_json() const {
  return {{"parse", cspipe::to_json(parse)},
          {"lid_accuracy", lid_accuracy},
          {"norm_accuracy", norm_accuracy()},
          {"norm_hi", cspipe::to_json(norm_hi)},
          {"norm_en", cspipe::to_json(norm_en)}};
}

ConditionReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& predicted) {
  if (gold.size() != predicted.size()) {
    throw ArgumentError("gold has " + std::to_string(gold.size()) + " sentences, predictions " +
                        std::to_string(predicted.size()));
  }
  std::size_t lid_hit = 0, tokens = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto& g = gold[i].tokens;
    const auto& p = predicted[i].tokens;
    if (g.size() != p.size()) {
      throw ArgumentError("sentence " + std::to_string(i + 1) + ": gold has " + std::to_string(g.size()) +
                          " tokens, prediction " + std::to_string(p.size()));
    }
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g[j].form != p[j].form) {
        throw ArgumentError("sentence " + std::to_string(i + 1) + ", token " + std::to_string(j + 1) + ": gold '" +
                            g[j].form + "' vs predicted '" + p[j].form + "'");
      }
      lid_hit += g[j].lang && g[j].lang == p[j].lang;
      ++tokens;
    }
  }
  ConditionReport r;
  r.parse = attachment_scores(gold, predicted);
  r.lid_accuracy = tokens ? 100.0 * static_cast<double>(lid_hit) / static_cast<double>(tokens) : 0.0;
  r.norm_hi = normalization_accuracy(gold, predicted, LangTag::hi);
  r.norm_en = normalization_accuracy(gold, predicted, LangTag::en);
  return r;
}

std::map<std::string, ConditionReport> evaluate(const Models& m, const std::vector<Sentence>& gold) {
  std::map<std::string, ConditionReport> out;
  for (int k = 0; k < 4; ++k) {
    RunOptions opts{k < 2, k % 2 == 0};
    auto predicted = parallel_map<Sentence>(gold.size(), m.config.workers, [&](std::size_t i) {
      return run_pipeline(m, gold[i], opts).sentence;
    });
    out[kConditionLabels[k]] = score(gold, predicted);
  }
  return out;
}

}  // namespace cspipe::pipeline
