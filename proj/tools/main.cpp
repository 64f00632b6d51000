// Command-line front end: one subcommand per pipeline stage, trainer and
// evaluation. Exit status: 0 success, 1 usage error, 2 data error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cspipe/embed/projection.hpp"
#include "cspipe/error.hpp"
#include "cspipe/norm/noise.hpp"
#include "cspipe/pipeline/pipeline.hpp"
#include "cspipe/pipeline/train.hpp"
#include "cspipe/treebank/conllu.hpp"
#include "cspipe/util/io.hpp"
#include "cspipe/util/text.hpp"

namespace {

using namespace cspipe;
using pipeline::PipelineConfig;

// Flags shared by every subcommand; unset ones leave the config untouched.
struct Common {
  std::string config;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::optional<int> beam;
  std::optional<int> workers;
  std::string decode_mode;
  std::string parse_mode;
  std::string stacking;
  std::string crosslingual;
  std::string input;
  std::string output;

  void attach(CLI::App* app, bool io = true) {
    app->add_option("--config", config, "Pipeline config (JSON)");
    app->add_option_function<std::uint64_t>(
        "--seed", [this](std::uint64_t s) { seed = s, seed_set = true; }, "Random seed");
    app->add_option("--beam,-b", beam, "Beam width for normalization candidates");
    app->add_option("--workers,-j", workers, "Worker threads");
    app->add_option("--decode-mode", decode_mode, "first-best, fragment or 3-step");
    app->add_option("--parse-mode", parse_mode, "stackprop or pipeline");
    app->add_option("--stacking", stacking, "on or off");
    app->add_option("--crosslingual", crosslingual, "on or off");
    if (io) {
      app->add_option("--input,-i", input, "Input file (default: stdin)");
      app->add_option("--output,-o", output, "Output file (default: stdout)");
    }
  }

  // File, then CSPIPE_* environment, then flags.
  PipelineConfig resolve() const {
    PipelineConfig c = config.empty() ? PipelineConfig{} : PipelineConfig::load(config);
    c.apply_env([](const char* k) { return std::getenv(k); });
    auto on_off = [](const std::string& flag, const std::string& v) {
      if (v == "on") return true;
      if (v == "off") return false;
      throw ArgumentError(flag + " must be on or off, got '" + v + "'");
    };
    if (seed_set) c.seed = seed;
    if (beam) c.beam = *beam;
    if (workers) c.workers = *workers;
    if (!decode_mode.empty()) c.decode_mode = pipeline::parse_decode_mode(decode_mode);
    if (!parse_mode.empty()) c.parse_mode = pipeline::parse_parse_mode(parse_mode);
    if (!stacking.empty()) c.stacking = on_off("--stacking", stacking);
    if (!crosslingual.empty()) c.crosslingual = on_off("--crosslingual", crosslingual);
    c.validate();
    return c;
  }

  std::string read_input() const {
    if (input.empty() || input == "-") {
      std::ostringstream ss;
      ss << std::cin.rdbuf();
      return ss.str();
    }
    return io::read_text(input);
  }

  void write_output(const std::string& text) const {
    if (output.empty() || output == "-") {
      std::cout << text;
      std::cout.flush();
    } else {
      io::write_text(output, text);
    }
  }
};

// One sentence per nonblank line, tokens separated by whitespace.
std::vector<Sentence> raw_sentences(const std::string& text) {
  std::vector<Sentence> out;
  for (const auto& line : text::split(text, '\n')) {
    auto forms = text::split_ws(line);
    if (forms.empty()) continue;
    Sentence s = make_sentence(forms);
    s.meta = {{"sent_id", std::to_string(out.size() + 1)}, {"text", text::join(forms, " ")}};
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> read_conllu(const std::string& path) {
  try {
    return conllu::read_file(path);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<pipeline::PipelineOutput> run_all(const pipeline::Models& m, const std::vector<Sentence>& in,
                                              bool parse) {
  return pipeline::parallel_map<pipeline::PipelineOutput>(in.size(), m.config.workers, [&](std::size_t i) {
    return parse ? pipeline::run_pipeline(m, in[i]) : pipeline::run_until_decode(m, in[i]);
  });
}

void write_trace(const std::string& path, const std::vector<pipeline::PipelineOutput>& outs) {
  std::string s;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    auto j = outs[i].to_json();
    j["index"] = i;
    s += j.dump() + "\n";
  }
  io::write_text(path, s);
}

pipeline::Log stderr_log(bool quiet) {
  if (quiet) return {};
  return [](const std::string& m) { std::cerr << m << "\n"; };
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Code-switched Hindi-English parsing pipeline"};
  app.require_subcommand(1);
  std::function<void()> action;
  Common common;

  auto* langid_cmd = app.add_subcommand("langid", "Tag raw sentences with token languages");
  common.attach(langid_cmd);
  langid_cmd->callback([&] {
    action = [&] {
      auto m = pipeline::load_models(common.resolve());
      if (!m->langid) throw DataError("no langid model configured");
      auto in = raw_sentences(common.read_input());
      auto res = m->langid_resources();
      auto tags = pipeline::parallel_map<std::vector<LangTag>>(
          in.size(), m->config.workers, [&](std::size_t i) { return m->langid->predict(in[i], res); });
      for (std::size_t i = 0; i < in.size(); ++i) {
        for (std::size_t j = 0; j < tags[i].size(); ++j) in[i].tokens[j].lang = tags[i][j];
      }
      common.write_output(langid::format_tagged_corpus(in));
    };
  });

  auto* norm_cmd = app.add_subcommand("normalize", "N-best normalizations of single words");
  common.attach(norm_cmd);
  std::string norm_lang = "en";
  std::vector<std::string> norm_words;
  norm_cmd->add_option("--lang", norm_lang, "hi (back-transliteration) or en")->check(CLI::IsMember({"hi", "en"}));
  norm_cmd->add_option("words", norm_words, "Words (default: one per input line)");
  norm_cmd->callback([&] {
    action = [&] {
      auto m = pipeline::load_models(common.resolve());
      LangTag tag = norm_lang == "hi" ? LangTag::hi : LangTag::en;
      if (!(tag == LangTag::hi ? m->norm_hi : m->norm_en)) throw DataError("no " + norm_lang + " normalization model configured");
      std::vector<std::string> words = norm_words;
      if (words.empty()) words = text::split_ws(common.read_input());
      std::string out;
      auto n = m->normalizer();
      for (const auto& w : words) {
        for (const auto& h : n.candidates(w, tag, m->config.beam).candidates) {
          out += w + "\t" + h.text + "\t" + io::format_double(h.log_prob) + "\n";
        }
        out += "\n";
      }
      common.write_output(out);
    };
  });

  std::string trace;
  auto* decode_cmd = app.add_subcommand("decode", "Language tags, candidates and sentence-level decoding");
  common.attach(decode_cmd);
  decode_cmd->add_option("--trace", trace, "Write per-sentence intermediates as JSON lines");
  decode_cmd->callback([&] {
    action = [&] {
      auto m = pipeline::load_models(common.resolve());
      auto outs = run_all(*m, raw_sentences(common.read_input()), false);
      std::string text;
      for (const auto& o : outs) text += text::join(o.decoded, " ") + "\n";
      if (!trace.empty()) write_trace(trace, outs);
      common.write_output(text);
    };
  });

  auto* tag_cmd = app.add_subcommand("tag", "POS-tag CoNLL-U input (lang= and norm= in MISC)");
  common.attach(tag_cmd);
  tag_cmd->callback([&] {
    action = [&] {
      auto m = pipeline::load_models(common.resolve());
      if (!m->parser) throw DataError("no parser model configured");
      auto in = conllu::parse(common.read_input());
      auto wv = m->word_vectors();
      for (auto& s : in) {
        auto tags = parser::tag_only(*m->parser, s, wv);
        for (std::size_t j = 0; j < tags.size(); ++j) s.tokens[j].upos = tags[j];
      }
      common.write_output(conllu::write(in));
    };
  });

  auto* parse_cmd = app.add_subcommand("parse", "Parse CoNLL-U input (lang= and norm= in MISC)");
  common.attach(parse_cmd);
  parse_cmd->callback([&] {
    action = [&] {
      auto m = pipeline::load_models(common.resolve());
      if (!m->parser) throw DataError("no parser model configured");
      auto in = conllu::parse(common.read_input());
      auto wv = m->word_vectors();
      auto out = pipeline::parallel_map<Sentence>(in.size(), m->config.workers,
                                                  [&](std::size_t i) { return parser::parse(*m->parser, in[i], wv); });
      common.write_output(conllu::write(out));
    };
  });

  auto* run_cmd = app.add_subcommand("run", "Full pipeline on raw sentences, CoNLL-U out");
  common.attach(run_cmd);
  run_cmd->add_option("--trace", trace, "Write per-sentence intermediates as JSON lines");
  run_cmd->callback([&] {
    action = [&] {
      auto m = pipeline::load_models(common.resolve());
      auto outs = run_all(*m, raw_sentences(common.read_input()), true);
      std::vector<Sentence> sents;
      for (const auto& o : outs) sents.push_back(o.sentence);
      if (!trace.empty()) write_trace(trace, outs);
      common.write_output(conllu::write(sents));
    };
  });

  std::string train_path, dev_path, out_path, source_path, profile = "default";
  bool quiet = false;
  auto add_train = [&](CLI::App* cmd, bool dev) {
    common.attach(cmd, false);
    cmd->add_option("--train", train_path, "Training data")->required();
    if (dev) cmd->add_option("--dev", dev_path, "Development data (default: training data)");
    cmd->add_option("--out,-o", out_path, "Output model file")->required();
    cmd->add_option("--profile", profile, "default or toy")->check(CLI::IsMember({"default", "toy"}));
    cmd->add_flag("--quiet,-q", quiet, "No progress on stderr");
  };
  auto profile_for = [&](const PipelineConfig& c) {
    auto p = pipeline::TrainProfile::by_name(profile);
    p.set_seed(c.seed);
    return p;
  };

  auto* tl_cmd = app.add_subcommand("train-langid", "Train the language identifier");
  add_train(tl_cmd, true);
  tl_cmd->callback([&] {
    action = [&] {
      auto c = common.resolve();
      auto m = pipeline::load_models(c);
      auto train = langid::read_tagged_corpus(train_path);
      auto dev = dev_path.empty() ? std::vector<Sentence>{} : langid::read_tagged_corpus(dev_path);
      auto res = m->langid_resources();
      auto model = langid::LangIdModel::for_corpus(profile_for(c).langid, train, res.word_dim());
      auto log = stderr_log(quiet);
      auto r = langid::train_langid(model, train, dev, res, [&](const langid::LangIdEpoch& e) {
        if (log) log("epoch " + std::to_string(e.epoch) + " dev accuracy " + io::format_double(e.dev_accuracy));
      });
      model.save(out_path);
      if (log) log("best epoch " + std::to_string(r.best_epoch));
    };
  });

  auto* tn_cmd = app.add_subcommand("train-norm", "Train a character seq2seq normalizer on noisy<TAB>clean pairs");
  add_train(tn_cmd, true);
  tn_cmd->callback([&] {
    action = [&] {
      auto c = common.resolve();
      auto train = norm::read_pairs(train_path);
      auto dev = dev_path.empty() ? std::vector<norm::NoisyPair>{} : norm::read_pairs(dev_path);
      auto model = norm::CharSeq2Seq::for_pairs(profile_for(c).seq2seq, train);
      auto log = stderr_log(quiet);
      auto r = norm::train_seq2seq(model, train, dev, [&](const norm::Seq2SeqEpoch& e) {
        if (log) log("epoch " + std::to_string(e.epoch) + " loss " + io::format_double(e.loss));
      });
      if (r.unknown_dev_chars > 0) std::cerr << "warning: " << r.unknown_dev_chars << " unknown dev characters\n";
      model.save(out_path);
    };
  });

  auto* lm_cmd = app.add_subcommand("train-lm", "Train a Kneser-Ney trigram LM (ARPA out)");
  add_train(lm_cmd, false);
  lm_cmd->callback([&] {
    action = [&] {
      common.resolve();
      decode::TrigramLM::train(pipeline::read_lm_corpus(train_path)).save_arpa(out_path);
    };
  });

  auto* tp_cmd = app.add_subcommand("train-parser", "Train the tagger-parser on CoNLL-U");
  add_train(tp_cmd, false);
  tp_cmd->add_option("--source", source_path, "Source-domain treebank (stacking on)");
  tp_cmd->callback([&] {
    action = [&] {
      auto c = common.resolve();
      c.paths.parser.clear();
      auto m = pipeline::load_models(c);
      auto net = pipeline::train_parser_model(*m, train_path, source_path, profile_for(c), stderr_log(quiet));
      net->save(out_path);
    };
  });

  std::string proj_hi, proj_en, proj_lex, direction = "hi_to_en";
  auto* lp_cmd = app.add_subcommand("learn-projection", "Orthogonal map between the two embedding spaces");
  common.attach(lp_cmd, false);
  lp_cmd->add_option("--hi", proj_hi, "Hindi vectors")->required();
  lp_cmd->add_option("--en", proj_en, "English vectors")->required();
  lp_cmd->add_option("--lexicon", proj_lex, "hindi<TAB>english lexicon")->required();
  lp_cmd->add_option("--direction", direction, "hi_to_en or en_to_hi")->check(CLI::IsMember({"hi_to_en", "en_to_hi"}));
  lp_cmd->add_option("--out,-o", out_path, "Output projection file")->required();
  lp_cmd->callback([&] {
    action = [&] {
      common.resolve();
      auto hi = embed::load_embeddings(proj_hi).space;
      auto en = embed::load_embeddings(proj_en).space;
      auto lex = embed::load_lexicon(proj_lex);
      bool h2e = direction == "hi_to_en";
      auto dir = h2e ? embed::Direction::hi_to_en : embed::Direction::en_to_hi;
      auto r = h2e ? embed::learn_projection(hi, en, lex, dir) : embed::learn_projection(en, hi, lex, dir);
      embed::save_projection(out_path, r, dir);
      std::cerr << "anchors " << r.anchors << ", mean cosine " << io::format_double(r.mean_cosine) << "\n";
    };
  });

  std::string gold_path, pred_path;
  auto* eval_cmd = app.add_subcommand("eval", "Score against gold CoNLL-U under the gold/auto conditions");
  common.attach(eval_cmd, false);
  eval_cmd->add_option("--gold", gold_path, "Gold CoNLL-U")->required();
  eval_cmd->add_option("--pred", pred_path, "Score this prediction file instead of running the pipeline");
  eval_cmd->add_option("--output,-o", common.output, "Report file (default: stdout)");
  eval_cmd->callback([&] {
    action = [&] {
      auto gold = read_conllu(gold_path);
      nlohmann::json report;
      if (!pred_path.empty()) {
        report["prediction"] = pipeline::score(gold, read_conllu(pred_path)).to_json();
      } else {
        auto m = pipeline::load_models(common.resolve());
        for (const auto& [label, r] : pipeline::evaluate(*m, gold)) report[label] = r.to_json();
      }
      common.write_output(report.dump(2) + "\n");
    };
  });

  std::string rules_path;
  int per_word = 2;
  auto* noise_cmd = app.add_subcommand("gen-noise", "Synthetic noisy<TAB>clean pairs from a wordlist");
  common.attach(noise_cmd);
  noise_cmd->add_option("--rules", rules_path, "Noise rule JSON (default: built-in rules)");
  noise_cmd->add_option("--per-word", per_word, "Variants sampled per word")->check(CLI::PositiveNumber);
  noise_cmd->callback([&] {
    action = [&] {
      auto c = common.resolve();
      auto rules = rules_path.empty() ? norm::NoiseRuleSet::defaults() : norm::load_noise_rules(rules_path);
      auto vocab = text::split_ws(common.read_input());
      common.write_output(norm::format_pairs(norm::gen_synthetic_pairs(vocab, rules, c.seed, per_word)));
    };
  });

  std::string data_dir, bundle_dir;
  auto* all_cmd = app.add_subcommand("train-all", "Train every model from a data directory laid out like data/toy");
  common.attach(all_cmd, false);
  all_cmd->add_option("--data", data_dir, "Data directory")->required();
  all_cmd->add_option("--out,-o", bundle_dir, "Output directory (gets config.json)")->required();
  all_cmd->add_option("--source", source_path, "Source-domain treebank (stacking on)");
  all_cmd->add_option("--profile", profile, "default or toy")->check(CLI::IsMember({"default", "toy"}));
  all_cmd->add_flag("--quiet,-q", quiet, "No progress on stderr");
  all_cmd->callback([&] {
    action = [&] {
      auto c = common.resolve();
      auto src = pipeline::toy_sources(data_dir);
      src.source_treebank = source_path;
      pipeline::BundleReport report;
      pipeline::train_bundle(src, bundle_dir, profile_for(c), c, &report, stderr_log(quiet));
      std::cout << report.to_json().dump(2) << "\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    action();
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
