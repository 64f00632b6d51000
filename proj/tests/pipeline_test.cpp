#include <chrono>
#include <filesystem>
#include <map>
#include <stdexcept>

#include <gtest/gtest.h>

#include "cspipe/pipeline/config.hpp"
#include "cspipe/pipeline/pipeline.hpp"
#include "cspipe/treebank/conllu.hpp"
#include "cspipe/treebank/tree.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Trained by the toy_bundle ctest fixture.
const std::string kBundle = CSPIPE_BUNDLE_DIR;
const std::string kToy = std::string(CSPIPE_SOURCE_DIR) + "/data/toy";

const Models& bundle() {
  static std::unique_ptr<Models> m = [] {
    if (!fs::exists(kBundle + "/config.json")) throw std::runtime_error("toy bundle missing: " + kBundle);
    return load_models(PipelineConfig::load(kBundle + "/config.json"));
  }();
  return *m;
}

std::unique_ptr<Models> bundle_with(const std::function<void(PipelineConfig&)>& edit) {
  auto c = PipelineConfig::load(kBundle + "/config.json");
  edit(c);
  return load_models(c);
}

std::vector<Sentence> raw_toy() {
  std::vector<Sentence> out;
  for (const auto& line : text::split(io::read_text(kToy + "/raw.txt"), '\n')) {
    auto forms = text::split_ws(line);
    if (!forms.empty()) out.push_back(make_sentence(forms));
  }
  return out;
}

// ---- config ----

TEST(Config, DefaultsAndRoundTrip) {
  PipelineConfig c;
  EXPECT_EQ(c.beam, 5);
  EXPECT_TRUE(c.crosslingual);
  EXPECT_EQ(c.decode_mode, DecodeMode::three_step);
  c.beam = 3;
  c.decode_mode = DecodeMode::fragment;
  c.parse_mode = ParseMode::pipeline;
  c.stacking = true;
  c.paths.parser = "/abs/p.model";
  auto back = PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(c.to_json()["schema_version"], PipelineConfig::kSchemaVersion);
}

TEST(Config, RelativePathsResolveAgainstBaseDir) {
  json j = {{"schema_version", 1}, {"paths", {{"parser", "m/p.model"}, {"lm_en", "/abs/en.arpa"}}}};
  auto c = PipelineConfig::from_json(j, "/models");
  EXPECT_EQ(c.paths.parser, "/models/m/p.model");
  EXPECT_EQ(c.paths.lm_en, "/abs/en.arpa");
  EXPECT_TRUE(c.paths.lm_hi.empty());
}

TEST(Config, SchemaAndUnknownKeysAreDataErrors) {
  EXPECT_THROW(PipelineConfig::from_json(json{{"beam", 3}}), DataError);
  EXPECT_THROW(PipelineConfig::from_json(json{{"schema_version", 2}}), DataError);
  EXPECT_THROW(PipelineConfig::from_json(json{{"schema_version", 1}, {"bean", 3}}), DataError);
  EXPECT_THROW(PipelineConfig::from_json(json{{"schema_version", 1}, {"paths", {{"parsr", "x"}}}}), DataError);
  EXPECT_THROW(PipelineConfig::load("/nonexistent/config.json"), DataError);
}

TEST(Config, EnvironmentOverrides) {
  std::map<std::string, std::string> env = {{"CSPIPE_BEAM", "2"},         {"CSPIPE_DECODE_MODE", "first-best"},
                                            {"CSPIPE_STACKING", "on"},     {"CSPIPE_CROSSLINGUAL", "0"},
                                            {"CSPIPE_PARSER", "/x/p.bin"}, {"CSPIPE_WORKERS", "4"}};
  PipelineConfig c;
  c.apply_env([&](const char* k) -> const char* {
    auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(c.beam, 2);
  EXPECT_EQ(c.decode_mode, DecodeMode::first_best);
  EXPECT_TRUE(c.stacking);
  EXPECT_FALSE(c.crosslingual);
  EXPECT_EQ(c.paths.parser, "/x/p.bin");
  EXPECT_EQ(c.workers, 4);

  env = {{"CSPIPE_BEAM", "many"}};
  EXPECT_THROW(c.apply_env([&](const char* k) -> const char* {
    auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  }),
               ArgumentError);
}

TEST(Config, ModeSpellingsAndValidation) {
  EXPECT_EQ(parse_decode_mode("3-step"), DecodeMode::three_step);
  EXPECT_EQ(parse_decode_mode("fragment"), DecodeMode::fragment);
  EXPECT_EQ(to_string(DecodeMode::first_best), "first-best");
  EXPECT_EQ(parse_parse_mode("pipeline"), ParseMode::pipeline);
  EXPECT_THROW(parse_decode_mode("viterbi"), ArgumentError);
  EXPECT_THROW(parse_parse_mode("graph"), ArgumentError);
  PipelineConfig c;
  c.beam = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
  c.beam = 1;
  c.workers = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(LoadModels, MissingFileNamesThePath) {
  PipelineConfig c;
  c.paths.parser = "/nonexistent/parser.model";
  try {
    load_models(c);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/parser.model"), std::string::npos) << e.what();
  }
}

// ---- parallelism ----

TEST(ParallelMap, KeepsInputOrder) {
  auto out = parallel_map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  ASSERT_EQ(out.size(), 100u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_TRUE(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST(ParallelMap, RethrowsLowestFailingIndex) {
  try {
    parallel_map<int>(50, 3, [](std::size_t i) -> int {
      if (i == 7 || i == 31) throw Error("bad " + std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "bad 7");
  }
}

// ---- end to end on the toy bundle ----

TEST(Pipeline, AllUnivSentencePassesThroughAndIsParsed) {
  auto s = make_sentence({"!", "...", "123", ":)", "?"});
  auto out = run_pipeline(bundle(), s);
  ASSERT_EQ(out.sentence.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(out.tags[i], LangTag::univ);
    EXPECT_EQ(out.decoded[i], s.tokens[i].form);
    EXPECT_EQ(out.sentence.tokens[i].form, s.tokens[i].form);
  }
  EXPECT_TRUE(validate_tree(out.sentence).empty());
}

TEST(Pipeline, IntermediatesHaveInputLength) {
  for (const auto& s : raw_toy()) {
    auto out = run_pipeline(bundle(), s);
    ASSERT_EQ(out.tags.size(), s.size());
    ASSERT_EQ(out.candidates.size(), s.size());
    ASSERT_EQ(out.decoded.size(), s.size());
    ASSERT_EQ(out.sentence.size(), s.size());
    EXPECT_TRUE(validate_tree(out.sentence).empty());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(out.sentence.tokens[i].form, s.tokens[i].form);
      EXPECT_FALSE(out.candidates[i].candidates.empty());
    }
    auto j = out.to_json();
    EXPECT_EQ(j["forms"].size(), s.size());
    EXPECT_EQ(j["decoded"].size(), s.size());
  }
}

TEST(Pipeline, FirstBestTakesTopCandidate) {
  auto m = bundle_with([](PipelineConfig& c) { c.decode_mode = DecodeMode::first_best; });
  for (const auto& s : raw_toy()) {
    auto out = run_until_decode(*m, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(text::lower(out.decoded[i]), text::lower(out.candidates[i].candidates.front().text));
    }
  }
}

TEST(Pipeline, OnlyFormsAreRead) {
  auto gold = conllu::read_file(kToy + "/treebank.conllu");
  for (std::size_t k = 0; k < 5; ++k) {
    auto bare = make_sentence([&] {
      std::vector<std::string> f;
      for (const auto& t : gold[k].tokens) f.push_back(t.form);
      return f;
    }());
    bare.meta = gold[k].meta;  // comments are carried over by design
    EXPECT_EQ(conllu::write({run_pipeline(bundle(), gold[k]).sentence}),
              conllu::write({run_pipeline(bundle(), bare).sentence}));
  }
}

TEST(Pipeline, SampleCodeSwitchedSentenceYieldsConllu) {
  auto s = make_sentence(text::split_ws("yaar kal movie dekhi , it was acha"));
  auto out = run_pipeline(bundle(), s);
  auto text = conllu::write({out.sentence});
  auto back = conllu::parse(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].size(), s.size());
  for (const auto& t : back[0].tokens) {
    EXPECT_TRUE(t.head.has_value());
    EXPECT_TRUE(t.lang.has_value());
    EXPECT_TRUE(t.norm.has_value());
    EXPECT_FALSE(t.upos.empty());
  }
  EXPECT_EQ(back[0].tokens[5].lang, LangTag::en);  // "it"
}

TEST(Pipeline, StageErrorsNameTheStage) {
  auto no_parser = bundle_with([](PipelineConfig& c) { c.paths.parser.clear(); });
  try {
    run_pipeline(*no_parser, make_sentence({"yaar", "hello"}));
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "parse");
  }
  auto no_langid = bundle_with([](PipelineConfig& c) { c.paths.langid.clear(); });
  try {
    run_pipeline(*no_langid, make_sentence({"yaar"}));
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "langid");
  }
  EXPECT_THROW(run_pipeline(bundle(), Sentence{}), StageError);
}

TEST(Pipeline, ParseModeAndStackingMustMatchTheModel) {
  EXPECT_THROW(bundle_with([](PipelineConfig& c) { c.parse_mode = ParseMode::pipeline; }), DataError);
  EXPECT_THROW(bundle_with([](PipelineConfig& c) { c.stacking = true; }), DataError);
}

TEST(Pipeline, WorkersDoNotChangeOutput) {
  auto in = raw_toy();
  auto run = [&](int workers) {
    auto outs = parallel_map<PipelineOutput>(in.size(), workers,
                                             [&](std::size_t i) { return run_pipeline(bundle(), in[i]); });
    std::vector<Sentence> s;
    for (const auto& o : outs) s.push_back(o.sentence);
    return conllu::write(s);
  };
  EXPECT_EQ(run(1), run(4));
}

TEST(Evaluate, FourConditionsAndGoldUpperBound) {
  auto gold = conllu::read_file(kToy + "/treebank.conllu");
  auto t0 = std::chrono::steady_clock::now();
  auto r = evaluate(bundle(), gold);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 60.0);
  ASSERT_EQ(r.size(), 4u);
  for (const char* label : kConditionLabels) EXPECT_TRUE(r.count(label)) << label;
  const auto& g = r.at("gold-lid+gold-trn");
  const auto& a = r.at("auto-lid+auto-trn");
  EXPECT_DOUBLE_EQ(g.lid_accuracy, 100.0);
  EXPECT_DOUBLE_EQ(g.norm_accuracy(), 100.0);
  EXPECT_GE(g.parse.las, a.parse.las);
  EXPECT_GE(g.parse.uas, a.parse.uas);
}

TEST(Score, TokenizationMismatchIsRejected) {
  auto gold = conllu::read_file(kToy + "/treebank.conllu");
  gold.resize(3);
  auto fewer = gold;
  fewer.pop_back();
  EXPECT_THROW(score(gold, fewer), ArgumentError);
  auto shorter = gold;
  shorter[1].tokens.pop_back();
  EXPECT_THROW(score(gold, shorter), ArgumentError);
  auto renamed = gold;
  renamed[2].tokens[0].form += "x";
  EXPECT_THROW(score(gold, renamed), ArgumentError);
  auto self = score(gold, gold);
  EXPECT_DOUBLE_EQ(self.parse.las, 100.0);
  EXPECT_DOUBLE_EQ(self.lid_accuracy, 100.0);
}

}  // namespace
}  // namespace cspipe::pipeline
