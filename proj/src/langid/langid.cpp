#include "cspipe/langid/langid.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "cspipe/error.hpp"
#include "cspipe/nn/container.hpp"
#include "cspipe/nn/optimizer.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::langid {

using nlohmann::json;
using nn::Expr;
using nn::Graph;

int length_bin(std::string_view word) {
  std::size_t n = text::utf8_length(word);
  if (n <= 3) return 0;
  if (n <= 6) return 1;
  if (n <= 10) return 2;
  return 3;
}

Dictionary::Dictionary(const std::vector<std::string>& words) {
  for (const auto& w : words) words_.insert(text::lower(w));
}

bool Dictionary::contains(std::string_view word) const { return words_.count(text::lower(word)) > 0; }

Dictionary Dictionary::parse(std::string_view contents) {
  std::vector<std::string> words;
  for (const auto& line : text::split(contents, '\n')) {
    auto w = text::trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.emplace_back(w);
  }
  return Dictionary(words);
}

Dictionary Dictionary::load(const std::string& path) { return parse(io::read_text(path)); }

int Resources::word_dim() const {
  if (!en && !hi) throw ArgumentError("no embedding space configured");
  if (en && hi && en->dim() != hi->dim()) {
    throw ArgumentError("embedding dims differ: en " + std::to_string(en->dim()) + ", hi " +
                        std::to_string(hi->dim()));
  }
  return en ? en->dim() : hi->dim();
}

LangIdFeatures featurize(std::string_view form, const Resources& r) {
  LangIdFeatures f;
  std::string w(form);
  if (r.en) {
    if (int i = r.en->index(w); i != embed::EmbeddingSpace::kUnk) f.en_embedding = r.en->row(i);
  }
  f.transliteration = r.transliterate ? r.transliterate(w) : w;
  if (r.hi) {
    if (int i = r.hi->index(f.transliteration); i != embed::EmbeddingSpace::kUnk) {
      f.hi_translit_embedding = r.hi->row(i);
      if (r.crosslingual && r.hi_to_en) f.hi_translit_embedding = embed::Vec(*r.hi_to_en * *f.hi_translit_embedding);
    }
  }
  f.dict_flag = r.dictionary && r.dictionary->contains(w) ? 1 : 0;
  f.length_bin = length_bin(w);
  return f;
}

bool rule_univ(std::string_view form) { return !text::has_alpha(form); }

LangTag argmax_tag(const nn::Vec& scores) {
  if (scores.size() != kNumLangTags) throw ArgumentError("expected one score per language tag");
  int best = 0;
  for (int k = 1; k < kNumLangTags; ++k) {
    if (scores(k) > scores(best)) best = k;
  }
  return kAllLangTags[best];
}

// --- hyperparameters ---

json LangIdHyper::to_json() const {
  return {{"char_dim", char_dim},
          {"char_hidden", char_hidden},
          {"flag_dim", flag_dim},
          {"sentence_hidden", sentence_hidden},
          {"mlp_hidden", mlp_hidden},
          {"dropout", dropout},
          {"learning_rate", learning_rate},
          {"momentum", momentum},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"seed", seed}};
}

LangIdHyper LangIdHyper::from_json(const json& j) {
  LangIdHyper h;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("char_dim", h.char_dim);
  get("char_hidden", h.char_hidden);
  get("flag_dim", h.flag_dim);
  get("sentence_hidden", h.sentence_hidden);
  get("mlp_hidden", h.mlp_hidden);
  get("dropout", h.dropout);
  get("learning_rate", h.learning_rate);
  get("momentum", h.momentum);
  get("max_epochs", h.max_epochs);
  get("patience", h.patience);
  get("seed", h.seed);
  return h;
}

// --- model ---

LangIdModel::LangIdModel(LangIdHyper hyper, nn::CharVocab chars, int word_dim)
    : hyper_(hyper), word_dim_(word_dim) {
  if (word_dim < 1) throw ArgumentError("word dim must be positive");
  nn::Rng rng(hyper_.seed);
  chars_ = nn::CharEncoder(ps_, "chars", std::move(chars), hyper_.char_dim, hyper_.char_hidden, rng);
  auto& ue = ps_.add("unk_en", word_dim, 1);
  ue.value = nn::uniform_init(word_dim, 1, 0.1, rng);
  unk_en_ = &ue;
  auto& uh = ps_.add("unk_hi", word_dim, 1);
  uh.value = nn::uniform_init(word_dim, 1, 0.1, rng);
  unk_hi_ = &uh;
  dict_emb_ = nn::Embedding(ps_, "dict_flag", 2, hyper_.flag_dim, 0.1, rng);
  len_emb_ = nn::Embedding(ps_, "length_bin", kLengthBins, hyper_.flag_dim, 0.1, rng);
  sentence_ = nn::BiLstm(ps_, "sentence", {feature_dim()}, hyper_.sentence_hidden, rng);
  mlp_ = nn::Mlp(ps_, "mlp", {sentence_.output_dim()}, {hyper_.mlp_hidden}, kNumLangTags, rng);
}

LangIdModel LangIdModel::for_corpus(const LangIdHyper& hyper, const std::vector<Sentence>& train, int word_dim) {
  std::vector<std::string> forms;
  for (const auto& s : train) {
    for (const auto& t : s.tokens) forms.push_back(t.form);
  }
  return LangIdModel(hyper, nn::CharVocab({"<unk>"}, forms), word_dim);
}

int LangIdModel::feature_dim() const { return 2 * word_dim_ + chars_.output_dim() + 2 * hyper_.flag_dim; }

std::vector<Expr> LangIdModel::logits(Graph& g, const std::vector<std::string>& forms,
                                      const std::vector<LangIdFeatures>& features, const nn::Mode& mode) const {
  if (forms.empty()) throw ArgumentError("empty sentence");
  if (forms.size() != features.size()) throw ArgumentError("one feature record per token required");
  auto word = [&](const std::optional<embed::Vec>& v, const nn::Parameter* unk) {
    if (!v) return g.param(*unk);
    if (v->size() != word_dim_) {
      throw ArgumentError("embedding dim " + std::to_string(v->size()) + " does not match model dim " +
                          std::to_string(word_dim_));
    }
    return g.input(*v);
  };
  std::vector<std::vector<Expr>> inputs;
  inputs.reserve(forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const auto& f = features[i];
    Expr x = g.concat({word(f.en_embedding, unk_en_), word(f.hi_translit_embedding, unk_hi_),
                       chars_.encode(g, forms[i]), dict_emb_(g, f.dict_flag), len_emb_(g, f.length_bin)});
    inputs.push_back({nn::dropout(g, x, mode)});
  }
  std::vector<Expr> out;
  for (Expr h : sentence_.encode(g, inputs)) {
    Expr in[] = {h};
    out.push_back(mlp_.forward(g, in, mode));
  }
  return out;
}

namespace {

std::vector<std::string> forms_of(const Sentence& s) {
  std::vector<std::string> forms;
  for (const auto& t : s.tokens) forms.push_back(t.form);
  return forms;
}

std::vector<LangIdFeatures> features_of(const Sentence& s, const Resources& r) {
  std::vector<LangIdFeatures> f;
  for (const auto& t : s.tokens) f.push_back(featurize(t.form, r));
  return f;
}

}  // namespace

std::vector<nn::Vec> LangIdModel::probabilities(const Sentence& s, const Resources& r) const {
  if (s.empty()) throw ArgumentError("empty sentence");
  Graph g;
  std::vector<nn::Vec> out;
  for (Expr e : logits(g, forms_of(s), features_of(s, r), nn::Mode{})) out.push_back(g.value(g.softmax(e)));
  return out;
}

std::vector<LangTag> LangIdModel::predict(const std::vector<std::string>& forms,
                                          const std::vector<LangIdFeatures>& features) const {
  Graph g;
  auto ls = logits(g, forms, features, nn::Mode{});
  std::vector<LangTag> out;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    out.push_back(rule_univ(forms[i]) ? LangTag::univ : argmax_tag(g.value(ls[i])));
  }
  return out;
}

std::vector<LangTag> LangIdModel::predict(const Sentence& s, const Resources& r) const {
  if (s.empty()) throw ArgumentError("empty sentence");
  return predict(forms_of(s), features_of(s, r));
}

json LangIdModel::meta() const {
  return {{"kind", "langid"}, {"hyper", hyper_.to_json()}, {"chars", chars_.vocab().to_json()}, {"word_dim", word_dim_}};
}

std::unique_ptr<LangIdModel> LangIdModel::from_meta(const json& meta) {
  if (meta.value("kind", "") != "langid") throw DataError("not a language identification model");
  return std::make_unique<LangIdModel>(LangIdHyper::from_json(meta.at("hyper")),
                                       nn::CharVocab::from_json(meta.at("chars")), meta.at("word_dim").get<int>());
}

void LangIdModel::save(const std::string& path) const { nn::write_container(path, meta(), ps_); }

std::unique_ptr<LangIdModel> LangIdModel::load(const std::string& path) {
  nn::Container c = nn::read_container(path);
  try {
    auto m = from_meta(c.meta);
    nn::assign(m->params(), c);
    return m;
  } catch (const json::exception& e) {
    throw DataError(path + ": bad langid header: " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// --- training ---

namespace {

struct Prepared {
  std::vector<std::string> forms;
  std::vector<LangIdFeatures> features;
  std::vector<int> gold;  // tag index, -1 for rule-tagged tokens
};

std::vector<Prepared> prepare(const std::vector<Sentence>& corpus, const Resources& r,
                              std::unordered_map<std::string, LangIdFeatures>& cache, const char* which) {
  std::vector<Prepared> out;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const Sentence& s = corpus[k];
    if (s.empty()) throw ArgumentError(std::string(which) + " sentence " + std::to_string(k + 1) + " is empty");
    Prepared p;
    for (const auto& t : s.tokens) {
      if (!t.lang) {
        throw ArgumentError(std::string(which) + " sentence " + std::to_string(k + 1) + ", token " +
                            std::to_string(t.index) + " has no language tag");
      }
      auto it = cache.find(t.form);
      if (it == cache.end()) it = cache.emplace(t.form, featurize(t.form, r)).first;
      p.forms.push_back(t.form);
      p.features.push_back(it->second);
      p.gold.push_back(rule_univ(t.form) ? -1 : static_cast<int>(*t.lang));
    }
    out.push_back(std::move(p));
  }
  return out;
}

double accuracy(const LangIdModel& m, const std::vector<Prepared>& data, const std::vector<Sentence>& gold) {
  std::size_t hit = 0, total = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    auto tags = m.predict(data[k].forms, data[k].features);
    for (std::size_t i = 0; i < tags.size(); ++i) hit += tags[i] == *gold[k].tokens[i].lang;
    total += tags.size();
  }
  return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

}  // namespace

LangIdReport train_langid(LangIdModel& model, const std::vector<Sentence>& train, const std::vector<Sentence>& dev,
                          const Resources& r, const std::function<void(const LangIdEpoch&)>& on_epoch) {
  if (train.empty()) throw ArgumentError("empty training corpus");
  const LangIdHyper& h = model.hyper();
  std::unordered_map<std::string, LangIdFeatures> cache;
  auto train_data = prepare(train, r, cache, "training");
  const std::vector<Sentence>& dev_set = dev.empty() ? train : dev;
  auto dev_data = dev.empty() ? train_data : prepare(dev, r, cache, "dev");

  nn::Rng rng(h.seed ^ 0x2545f4914f6cdd1dULL);
  nn::Sgd sgd({nn::OptimizerKind::momentum_sgd, h.learning_rate, h.momentum, std::nullopt});
  auto best = model.params().snapshot();
  LangIdReport report;
  report.best_dev_accuracy = -1.0;
  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);
  int since_best = 0;
  for (int epoch = 1; epoch <= h.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    nn::Mode mode{true, h.dropout, &rng};
    for (std::size_t k : order) {
      const Prepared& p = train_data[k];
      Graph g;
      auto ls = model.logits(g, p.forms, p.features, mode);
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ls.size(); ++i) {
        if (p.gold[i] >= 0) terms.push_back(g.pick_nll(ls[i], p.gold[i]));
      }
      if (terms.empty()) continue;
      Expr loss = g.sum(terms);
      total += g.scalar_value(loss);
      g.backward(loss);
      sgd.update(model.params());
    }
    LangIdEpoch stats{epoch, total, accuracy(model, dev_data, dev_set)};
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (stats.dev_accuracy > report.best_dev_accuracy) {
      report.best_dev_accuracy = stats.dev_accuracy;
      report.best_epoch = epoch;
      best = model.params().snapshot();
      since_best = 0;
      if (stats.dev_accuracy == 1.0) break;  // nothing left to improve
    } else if (++since_best >= h.patience) {
      report.early_stopped = true;
      break;
    }
  }
  model.params().restore(best);
  return report;
}

double tag_accuracy(const LangIdModel& model, const std::vector<Sentence>& gold, const Resources& r) {
  std::unordered_map<std::string, LangIdFeatures> cache;
  return accuracy(model, prepare(gold, r, cache, "evaluation"), gold);
}

// --- corpus format ---

std::vector<Sentence> parse_tagged_corpus(std::string_view contents) {
  std::vector<Sentence> out;
  Sentence cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur = Sentence{};
  };
  auto lines = text::split(contents, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) {
      flush();
      continue;
    }
    auto fields = text::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) throw ParseError(n + 1, "expected form<TAB>tag");
    auto tag = try_parse_lang_tag(fields[1]);
    if (!tag) throw ParseError(n + 1, "unknown language tag '" + fields[1] + "'");
    Token t;
    t.index = static_cast<int>(cur.size()) + 1;
    t.form = fields[0];
    t.lang = *tag;
    cur.tokens.push_back(std::move(t));
  }
  flush();
  return out;
}

std::vector<Sentence> read_tagged_corpus(const std::string& path) {
  try {
    return parse_tagged_corpus(io::read_text(path));
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_tagged_corpus(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      out += t.form;
      out += '\t';
      out += t.lang ? std::string(to_string(*t.lang)) : std::string("univ");
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

}  // namespace cspipe::langid
