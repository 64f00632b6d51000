#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cspipe/treebank/conllu.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe {
namespace {

namespace fs = std::filesystem;

const std::string kCli = CSPIPE_CLI;
const std::string kBundle = CSPIPE_BUNDLE_DIR;
const std::string kToy = std::string(CSPIPE_SOURCE_DIR) + "/data/toy";

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string scratch(const std::string& name) { return (fs::temp_directory_path() / ("cspipe_cli_" + name)).string(); }

// `env` is a shell prefix such as "CSPIPE_BEAM=2".
Result cli(const std::string& args, const std::string& env = "") {
  const std::string out = scratch("stdout"), err = scratch("stderr");
  const std::string cmd = env + " " + kCli + " " + args + " >" + out + " 2>" + err;
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_text(out), io::read_text(err)};
}

std::string config() { return "--config " + kBundle + "/config.json"; }

int nonblank_lines(const std::string& s) {
  int n = 0;
  for (const auto& l : text::split(s, '\n')) n += !text::split_ws(l).empty();
  return n;
}

TEST(Cli, HelpExitsZeroWithUsage) {
  auto r = cli("parse --help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, UsageErrorsExitOne) {
  auto r = cli("frobnicate");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("run --no-such-flag").code, 1);
  EXPECT_EQ(cli("run --beam 0 " + config() + " -i " + kToy + "/raw.txt").code, 1);
  EXPECT_EQ(cli("run --decode-mode viterbi " + config()).code, 1);
  EXPECT_EQ(cli("train-norm --train x").code, 1);  // --out missing
}

TEST(Cli, MissingModelExitsTwoNamingThePath) {
  auto r = cli("run " + config() + " -i " + kToy + "/raw.txt", "CSPIPE_PARSER=/nonexistent/model.bin");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/nonexistent/model.bin"), std::string::npos) << r.err;
  auto c = cli("run --config /nonexistent/config.json");
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.err.find("/nonexistent/config.json"), std::string::npos) << c.err;
}

TEST(Cli, MalformedInputExitsTwo) {
  const std::string bad = scratch("bad.conllu");
  io::write_text(bad, "1\tonly\tthree\n\n");
  auto r = cli("parse " + config() + " -i " + bad);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST(Cli, FlagsOverrideEnvironment) {
  EXPECT_EQ(cli("decode " + config() + " -i " + kToy + "/raw.txt", "CSPIPE_BEAM=0").code, 1);
  EXPECT_EQ(cli("decode --beam 2 " + config() + " -i " + kToy + "/raw.txt", "CSPIPE_BEAM=0").code, 0);
}

TEST(Cli, RunEmitsConlluDeterministically) {
  const std::string trace = scratch("trace.jsonl");
  auto a = cli("run --seed 7 " + config() + " -i " + kToy + "/raw.txt --trace " + trace);
  ASSERT_EQ(a.code, 0) << a.err;
  auto b = cli("run --seed 7 -j 3 " + config() + " -i " + kToy + "/raw.txt");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  auto parsed = conllu::parse(a.out);
  const int n = nonblank_lines(io::read_text(kToy + "/raw.txt"));
  ASSERT_EQ(static_cast<int>(parsed.size()), n);
  EXPECT_EQ(parsed[0].meta.front().first, "sent_id");
  EXPECT_EQ(nonblank_lines(io::read_text(trace)), n);
  auto first = nlohmann::json::parse(text::split(io::read_text(trace), '\n').front());
  EXPECT_EQ(first["index"], 0);
  EXPECT_EQ(first["forms"].size(), parsed[0].size());
}

TEST(Cli, SampleSentenceFromStdin) {
  const std::string in = scratch("sample.txt");
  io::write_text(in, "yaar kal movie dekhi , it was acha\n");
  auto r = cli("run " + config() + " < " + in);
  ASSERT_EQ(r.code, 0) << r.err;
  auto s = conllu::parse(r.out);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].size(), 8u);
}

TEST(Cli, StageSubcommands) {
  const std::string in = scratch("words.txt");
  io::write_text(in, "yaar movie bahut acchi thi !\n");
  auto lid = cli("langid " + config() + " -i " + in);
  ASSERT_EQ(lid.code, 0) << lid.err;
  EXPECT_EQ(nonblank_lines(lid.out), 6);
  EXPECT_NE(lid.out.find("!\tuniv"), std::string::npos);

  auto norm = cli("normalize --lang en -b 3 " + config() + " pls twiter");
  ASSERT_EQ(norm.code, 0) << norm.err;
  EXPECT_LE(nonblank_lines(norm.out), 6);
  EXPECT_EQ(norm.out.rfind("pls\t", 0), 0u);

  auto dec = cli("decode " + config() + " -i " + in);
  ASSERT_EQ(dec.code, 0) << dec.err;
  EXPECT_EQ(text::split_ws(dec.out).size(), 6u);

  const std::string gold = kToy + "/treebank.conllu";
  auto tag = cli("tag " + config() + " -i " + gold);
  ASSERT_EQ(tag.code, 0) << tag.err;
  EXPECT_EQ(conllu::parse(tag.out).size(), conllu::read_file(gold).size());
}

TEST(Cli, EvalReportsFourConditions) {
  auto r = cli("eval " + config() + " --gold " + kToy + "/treebank.conllu");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  for (const char* k : {"gold-lid+gold-trn", "gold-lid+auto-trn", "auto-lid+gold-trn", "auto-lid+auto-trn"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  auto self = cli("eval --gold " + kToy + "/treebank.conllu --pred " + kToy + "/treebank.conllu");
  ASSERT_EQ(self.code, 0) << self.err;
  EXPECT_EQ(nlohmann::json::parse(self.out)["prediction"]["parse"]["las"], 100.0);
}

TEST(Cli, GenNoiseIsSeeded) {
  const std::string vocab = scratch("vocab.txt");
  io::write_text(vocab, "please\nphone\ntwitter\ncousin\n");
  auto a = cli("gen-noise --seed 3 --per-word 3 -i " + vocab);
  auto b = cli("gen-noise --seed 3 --per-word 3 -i " + vocab);
  auto c = cli("gen-noise --seed 4 --per-word 3 -i " + vocab);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_NE(a.out.find("\tplease"), std::string::npos);
}

TEST(Cli, TrainersWriteLoadableModels) {
  const std::string lm = scratch("lm.arpa");
  ASSERT_EQ(cli("train-lm --train " + kToy + "/lm_en.txt -o " + lm).code, 0);
  EXPECT_NE(io::read_text(lm).find("\\data\\\nngram 1="), std::string::npos);

  const std::string proj = scratch("proj.bin");
  auto p = cli("learn-projection --hi " + kToy + "/emb_hi.vec --en " + kToy + "/emb_en.vec --lexicon " + kToy +
               "/lexicon.tsv -o " + proj);
  ASSERT_EQ(p.code, 0) << p.err;
  auto r = cli("decode " + config() + " -i " + kToy + "/raw.txt", "CSPIPE_PROJECTION=" + proj);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(cli("train-lm --train /nonexistent/lm.txt -o " + lm).code, 2);
}

}  // namespace
}  // namespace cspipe
