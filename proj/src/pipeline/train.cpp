#include "cspipe/pipeline/train.hpp"

#include <chrono>
#include <filesystem>

#include "cspipe/embed/projection.hpp"
#include "cspipe/parser/projective.hpp"
#include "cspipe/treebank/conllu.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

TrainProfile TrainProfile::defaults() { return TrainProfile{}; }

TrainProfile TrainProfile::toy() {
  TrainProfile p;
  p.parser = parser::ParserHyper::toy();
  p.seq2seq = norm::Seq2SeqHyper::toy();
  return p;
}

void TrainProfile::set_seed(std::uint64_t seed) {
  parser.seed = seed;
  seq2seq.seed = seed + 1;
  langid.seed = seed + 2;
}

TrainProfile TrainProfile::by_name(const std::string& name) {
  if (name == "default") return defaults();
  if (name == "toy") return toy();
  throw ArgumentError("profile must be default or toy, got '" + name + "'");
}

json BundleReport::to_json() const {
  json p = json::object();
  p["epochs"] = parser.epochs.size();
  p["best_epoch"] = parser.best_epoch;
  p["best_las"] = parser.best_dev_las;
  if (!parser.epochs.empty()) {
    const auto& e = parser.epochs[parser.best_epoch > 0 ? parser.best_epoch - 1 : 0];
    p["best_uas"] = e.dev_uas;
    p["best_pos"] = e.dev_pos;
  }
  return {{"seconds", seconds},
          {"norm_en_train_accuracy", norm_en_train_accuracy},
          {"norm_hi_train_accuracy", norm_hi_train_accuracy},
          {"langid_train_accuracy", langid_train_accuracy},
          {"parser", p}};
}

std::vector<std::vector<std::string>> read_lm_corpus(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  for (const auto& line : text::split(io::read_text(path), '\n')) {
    auto words = text::split_ws(line);
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

namespace {

std::vector<Sentence> projectivized(const std::vector<Sentence>& raw) {
  std::vector<Sentence> out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.push_back(parser::projectivize(s).sentence);
  return out;
}

void say(const Log& log, const std::string& msg) {
  if (log) log(msg);
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string relative_to(const std::string& path, const std::string& dir) {
  if (path.empty()) return path;
  return fs::relative(fs::absolute(path), fs::absolute(dir)).string();
}

}  // namespace

std::unique_ptr<parser::ParserNet> train_parser_model(const Models& models, const std::string& train_path,
                                                      const std::string& source_path, const TrainProfile& profile,
                                                      const Log& log, parser::TrainReport* report) {
  const embed::WordVectors wv = models.word_vectors();
  parser::ParserHyper hyper = profile.parser;
  hyper.pipeline = models.config.parse_mode == ParseMode::pipeline;
  auto train = projectivized(conllu::read_file(train_path));
  auto progress = [&](const char* which) {
    return [&log, which](const parser::EpochStats& e) {
      say(log, std::string(which) + " epoch " + std::to_string(e.epoch) + " loss " + io::format_double(e.loss) +
                   " uas " + io::format_double(e.dev_uas) + " las " + io::format_double(e.dev_las));
    };
  };
  std::unique_ptr<parser::ParserNet> net;
  if (models.config.stacking) {
    if (source_path.empty()) throw ArgumentError("stacking needs a source treebank");
    auto source_train = projectivized(conllu::read_file(source_path));
    auto source = std::make_unique<parser::StackPropModel>(hyper, parser::ParserVocab::build(source_train), wv.dim());
    parser::train_parser(*source, source_train, {}, wv, progress("source"));
    auto stacked = std::make_unique<parser::StackedModel>(std::move(source), hyper, parser::ParserVocab::build(train));
    stacked->set_source_frozen(profile.freeze_stacking_source);
    net = std::move(stacked);
  } else {
    net = std::make_unique<parser::StackPropModel>(hyper, parser::ParserVocab::build(train), wv.dim());
  }
  auto r = parser::train_parser(*net, train, {}, wv, progress("parser"));
  if (report) *report = r;
  return net;
}

PipelineConfig train_bundle(const BundleSources& src, const std::string& out_dir, const TrainProfile& profile,
                            const PipelineConfig& modes, BundleReport* report, const Log& log) {
  fs::create_directories(out_dir);
  BundleReport local;
  BundleReport& rep = report ? *report : local;
  auto out = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  // Absolute-path config used while training; the saved one is relative.
  PipelineConfig cfg = modes;
  cfg.paths = Paths{};
  cfg.paths.emb_en = src.emb_en;
  cfg.paths.emb_hi = src.emb_hi;
  cfg.paths.lexicon = src.lexicon;
  cfg.paths.dictionary = src.dictionary;

  for (const bool hindi : {true, false}) {
    Timer t;
    const std::string& pairs_path = hindi ? src.norm_hi : src.norm_en;
    auto pairs = norm::read_pairs(pairs_path);
    auto m = norm::CharSeq2Seq::for_pairs(profile.seq2seq, pairs);
    norm::train_seq2seq(m, pairs, {}, [&](const norm::Seq2SeqEpoch& e) {
      say(log, std::string(hindi ? "norm_hi" : "norm_en") + " epoch " + std::to_string(e.epoch) + " loss " +
                   io::format_double(e.loss));
    });
    const std::string path = out(hindi ? "norm_hi.model" : "norm_en.model");
    m.save(path);
    (hindi ? cfg.paths.norm_hi : cfg.paths.norm_en) = path;
    (hindi ? rep.norm_hi_train_accuracy : rep.norm_en_train_accuracy) = norm::exact_match(m, pairs);
    rep.seconds[hindi ? "norm_hi" : "norm_en"] = t.seconds();
  }

  {
    Timer t;
    decode::TrigramLM::train(read_lm_corpus(src.lm_en)).save_arpa(out("lm_en.arpa"));
    decode::TrigramLM::train(read_lm_corpus(src.lm_hi)).save_arpa(out("lm_hi.arpa"));
    cfg.paths.lm_en = out("lm_en.arpa");
    cfg.paths.lm_hi = out("lm_hi.arpa");
    rep.seconds["lm"] = t.seconds();
  }

  if (modes.crosslingual || modes.langid_crosslingual) {
    Timer t;
    auto en = embed::load_embeddings(src.emb_en).space;
    auto hi = embed::load_embeddings(src.emb_hi).space;
    auto r = embed::learn_projection(hi, en, embed::load_lexicon(src.lexicon));
    embed::save_projection(out("projection.bin"), r);
    cfg.paths.projection = out("projection.bin");
    say(log, "projection anchors " + std::to_string(r.anchors) + " mean cosine " + io::format_double(r.mean_cosine));
    rep.seconds["projection"] = t.seconds();
  }

  {
    Timer t;
    auto models = load_models(cfg);
    auto corpus = langid::read_tagged_corpus(src.langid_corpus);
    auto resources = models->langid_resources();
    auto m = langid::LangIdModel::for_corpus(profile.langid, corpus, resources.word_dim());
    langid::train_langid(m, corpus, {}, resources, [&](const langid::LangIdEpoch& e) {
      say(log, "langid epoch " + std::to_string(e.epoch) + " loss " + io::format_double(e.loss) + " accuracy " +
                   io::format_double(e.dev_accuracy));
    });
    m.save(out("langid.model"));
    cfg.paths.langid = out("langid.model");
    rep.langid_train_accuracy = langid::tag_accuracy(m, corpus, resources);
    rep.seconds["langid"] = t.seconds();
  }

  {
    Timer t;
    auto models = load_models(cfg);
    auto net = train_parser_model(*models, src.treebank, src.source_treebank, profile, log, &rep.parser);
    net->save(out("parser.model"));
    cfg.paths.parser = out("parser.model");
    rep.seconds["parser"] = t.seconds();
  }

  PipelineConfig saved = cfg;
  for (std::string* p : {&saved.paths.emb_en, &saved.paths.emb_hi, &saved.paths.projection, &saved.paths.lexicon,
                         &saved.paths.dictionary, &saved.paths.lm_en, &saved.paths.lm_hi, &saved.paths.langid,
                         &saved.paths.norm_en, &saved.paths.norm_hi, &saved.paths.parser}) {
    *p = relative_to(*p, out_dir);
  }
  saved.save(out("config.json"));
  return cfg;
}

BundleSources toy_sources(const std::string& data_dir) {
  auto f = [&](const char* name) { return (fs::path(data_dir) / name).string(); };
  BundleSources s;
  s.treebank = f("treebank.conllu");
  s.langid_corpus = f("langid.tsv");
  s.norm_en = f("norm_en.tsv");
  s.norm_hi = f("norm_hi.tsv");
  s.lm_en = f("lm_en.txt");
  s.lm_hi = f("lm_hi.txt");
  s.emb_en = f("emb_en.vec");
  s.emb_hi = f("emb_hi.vec");
  s.lexicon = f("lexicon.tsv");
  s.dictionary = f("en_dict.txt");
  return s;
}

}  // namespace cspipe::pipeline
