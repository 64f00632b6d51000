#include <filesystem>

#include <gtest/gtest.h>

#include "cspipe/error.hpp"
#include "cspipe/parser/model.hpp"
#include "cspipe/parser/projective.hpp"
#include "cspipe/treebank/eval.hpp"
#include "cspipe/treebank/tree.hpp"
#include "support/gradcheck.hpp"
#include "support/toy_parser.hpp"

namespace cspipe::parser {
namespace {

using cspipe::testing::random_sentences;
using cspipe::testing::toy_vectors;

ParserHyper tiny_hyper(std::uint64_t seed = 3) {
  ParserHyper h;
  h.char_dim = 3;
  h.char_hidden = 3;
  h.shared_hidden = 4;
  h.tagger_hidden = 3;
  h.tagger_mlp = 4;
  h.parser_hidden = 4;
  h.parser_mlp = 5;
  h.pos_dim = 3;
  h.seed = seed;
  return h;
}

nn::Expr joint_loss(nn::Graph& g, const ParserNet& net, const Sentence& s, const embed::WordVectors& wv) {
  LossTerms t = static_losses(g, net, s, wv, nn::Mode{});
  return g.add(t.tagging, t.parsing);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cspipe_" + name)).string();
}

TEST(ParserModel, GradientCheckJoint) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(3, 4, 9);
  StackPropModel m(tiny_hyper(), ParserVocab::build(data), 4);
  auto res = testing::check_gradients(m.params(), [&](nn::Graph& g) { return joint_loss(g, m, data[1], wv); },
                                      1e-3, 8);
  EXPECT_GT(res.checked, 100u);
  EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
}

TEST(ParserModel, GradientCheckPipelineMode) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(3, 4, 10);
  ParserHyper h = tiny_hyper();
  h.pipeline = true;
  StackPropModel m(h, ParserVocab::build(data), 4);
  auto res = testing::check_gradients(m.params(), [&](nn::Graph& g) { return joint_loss(g, m, data[0], wv); },
                                      1e-3, 8);
  EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
}

TEST(ParserModel, GradientCheckStackedWiring) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(3, 4, 11);
  auto vocab = ParserVocab::build(data);
  auto source = std::make_unique<StackPropModel>(tiny_hyper(7), vocab, 4);
  StackedModel m(std::move(source), tiny_hyper(8), vocab);
  for (auto* ps : {&m.target().params(), &m.source().params()}) {
    auto res = testing::check_gradients(*ps, [&](nn::Graph& g) { return joint_loss(g, m, data[2], wv); }, 1e-3, 6);
    EXPECT_GT(res.checked, 50u);
    EXPECT_LT(res.max_rel_error, 1e-4) << res.worst;
  }
}

// Gradients of the joint loss equal the sum of the per-task gradients, and
// parser-only parameters receive nothing from the tagging loss.
TEST(ParserModel, JointGradientIsSumOfTaskGradients) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(4, 5, 12);
  StackPropModel m(tiny_hyper(), ParserVocab::build(data), 4);
  auto grads = [&](int which) {
    m.params().zero_grad();
    nn::Graph g;
    LossTerms t = static_losses(g, m, data[3], wv, nn::Mode{});
    nn::Expr l = which == 0 ? t.tagging : which == 1 ? t.parsing : g.add(t.tagging, t.parsing);
    g.backward(l);
    std::vector<nn::Mat> out;
    for (const auto& p : m.params()) out.push_back(p->grad);
    m.params().zero_grad();
    return out;
  };
  auto tag = grads(0), par = grads(1), joint = grads(2);
  bool shared_gets_both = false;
  for (std::size_t i = 0; i < m.params().size(); ++i) {
    const std::string& name = m.params()[i].name;
    EXPECT_LT((joint[i] - tag[i] - par[i]).cwiseAbs().maxCoeff(), 1e-12) << name;
    if (name.rfind("parser", 0) == 0 || name == "root" || name == "pad") {
      EXPECT_EQ(tag[i].cwiseAbs().maxCoeff(), 0.0) << name;
    }
    if (name.rfind("shared", 0) == 0 && tag[i].cwiseAbs().maxCoeff() > 0 && par[i].cwiseAbs().maxCoeff() > 0) {
      shared_gets_both = true;
    }
  }
  EXPECT_TRUE(shared_gets_both);
}

TEST(ParserModel, MaskedStackedEqualsPlainBitExact) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(100, 8, 13);
  auto vocab = ParserVocab::build(data);
  StackedModel stacked(std::make_unique<StackPropModel>(tiny_hyper(21), vocab, 4), tiny_hyper(22), vocab);
  stacked.set_masked(true);
  StackPropModel plain(tiny_hyper(23), vocab, 4);
  EXPECT_EQ(plain.params().copy_matching(stacked.target().params()), plain.params().size());
  for (const auto& s : data) {
    nn::Graph ga, gb;
    Forward fa = plain.forward(ga, s, wv, nn::Mode{}, nullptr);
    Forward fb = stacked.forward(gb, s, wv, nn::Mode{}, nullptr);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ASSERT_TRUE((ga.value(fa.tag_logits[i]).array() == gb.value(fb.tag_logits[i]).array()).all());
    }
    GoldTree gt = gold_tree(s, vocab.labels);
    Config c = Config::initial(static_cast<int>(s.size()));
    for (const auto& t : static_derivation(gt)) {
      const auto& a = ga.value(plain.transition_logits(ga, fa, c, nn::Mode{}));
      const auto& b = gb.value(stacked.transition_logits(gb, fb, c, nn::Mode{}));
      ASSERT_TRUE((a.array() == b.array()).all());
      apply(c, t);
    }
    EXPECT_EQ(parse(plain, s, wv), parse(stacked, s, wv));
  }
}

TEST(ParserModel, UnmaskedStackedDiffersFromPlain) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(5, 6, 14);
  auto vocab = ParserVocab::build(data);
  StackedModel stacked(std::make_unique<StackPropModel>(tiny_hyper(21), vocab, 4), tiny_hyper(22), vocab);
  StackPropModel plain(tiny_hyper(23), vocab, 4);
  plain.params().copy_matching(stacked.target().params());
  nn::Graph ga, gb;
  Forward fa = plain.forward(ga, data[0], wv, nn::Mode{}, nullptr);
  Forward fb = stacked.forward(gb, data[0], wv, nn::Mode{}, nullptr);
  EXPECT_NE(ga.value(fa.tag_logits[0]), gb.value(fb.tag_logits[0]));
}

TEST(ParserModel, ParseIsValidAndDeterministic) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(40, 12, 15);
  StackPropModel m(tiny_hyper(), ParserVocab::build(data), 4);
  for (const auto& s : data) {
    Sentence a = parse(m, s, wv);
    EXPECT_TRUE(validate_tree(a).empty());
    ASSERT_EQ(a.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(a.tokens[i].form, s.tokens[i].form);
    EXPECT_EQ(a, parse(m, s, wv));
    EXPECT_EQ(tag_only(m, s, wv).size(), s.size());
  }
}

TEST(ParserModel, SingleTokenAttachesToRoot) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(10, 5, 16);
  StackPropModel m(tiny_hyper(), ParserVocab::build(data), 4);
  Sentence s = make_sentence({"yaar"});
  Sentence out = parse(m, s, wv);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.tokens[0].head, 0);
  EXPECT_TRUE(validate_tree(out).empty());
}

TEST(ParserModel, TrainingRejectsNonProjectiveInput) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  testing::Rng rng(1);
  Sentence s = testing::sentence_from_heads({-1, 3, 4, 0, 3}, rng);  // 1->3 crosses 2->4
  StackPropModel m(tiny_hyper(), ParserVocab::build({s}), 4);
  try {
    train_parser(m, {s}, {}, wv);
    FAIL() << "expected ArgumentError";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("non-projective"), std::string::npos);
  }
  Sentence p = projectivize(s).sentence;
  StackPropModel m2(tiny_hyper(), ParserVocab::build({p}), 4);
  EXPECT_NO_THROW(train_parser(m2, {p}, {s}, wv));
}

TEST(ParserModel, SaveLoadRoundTrip) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(6, 6, 17);
  auto vocab = ParserVocab::build(data);
  StackPropModel m(tiny_hyper(), vocab, 4);
  StackedModel st(std::make_unique<StackPropModel>(tiny_hyper(31), vocab, 4), tiny_hyper(32), vocab);
  st.set_source_frozen(true);
  const std::string a = temp_path("plain.model"), b = temp_path("stacked.model");
  m.save(a);
  st.save(b);
  auto ma = load_parser(a);
  auto mb = load_parser(b);
  ASSERT_NE(dynamic_cast<StackedModel*>(mb.get()), nullptr);
  EXPECT_TRUE(dynamic_cast<StackedModel*>(mb.get())->source_frozen());
  EXPECT_EQ(mb->meta(), st.meta());
  for (const auto& s : data) {
    EXPECT_EQ(parse(*ma, s, wv), parse(m, s, wv));
    EXPECT_EQ(parse(*mb, s, wv), parse(st, s, wv));
  }
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  EXPECT_THROW(load_parser(a), DataError);
}

TEST(ParserModel, FrozenSourceIsNotUpdated) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(5, 5, 18);
  auto vocab = ParserVocab::build(data);
  ParserHyper h = tiny_hyper(41);
  h.max_epochs = 2;
  StackedModel st(std::make_unique<StackPropModel>(tiny_hyper(40), vocab, 4), h, vocab);
  st.set_source_frozen(true);
  auto before_src = st.source().params().snapshot();
  auto before_tgt = st.target().params().snapshot();
  train_parser(st, data, data, wv);
  auto after_src = st.source().params().snapshot();
  auto after_tgt = st.target().params().snapshot();
  for (std::size_t i = 0; i < before_src.size(); ++i) EXPECT_EQ(before_src[i], after_src[i]);
  bool changed = false;
  for (std::size_t i = 0; i < before_tgt.size(); ++i) changed |= before_tgt[i] != after_tgt[i];
  EXPECT_TRUE(changed);
}

TEST(ParserModel, MemorizesTinyTreebank) {
  auto vecs = toy_vectors(8, 5);
  auto wv = vecs.view();
  auto data = random_sentences(10, 6, 19);
  ParserHyper h = ParserHyper::toy();
  h.max_epochs = 60;
  h.patience = 60;
  StackPropModel m(h, ParserVocab::build(data), 8);
  TrainReport r = train_parser(m, data, data, wv);
  std::vector<Sentence> pred;
  for (const auto& s : data) pred.push_back(parse(m, s, wv));
  EvalReport e = attachment_scores(data, pred);
  EXPECT_GE(e.uas, 90.0);
  EXPECT_DOUBLE_EQ(e.las, r.best_dev_las);
  EXPECT_GE(e.pos_acc, 99.0);
}

TEST(ParserModel, PipelineModeTrainsAndParses) {
  auto vecs = toy_vectors(8, 5);
  auto wv = vecs.view();
  auto data = random_sentences(8, 5, 20);
  ParserHyper h = ParserHyper::toy();
  h.pipeline = true;
  h.max_epochs = 15;
  StackPropModel m(h, ParserVocab::build(data), 8);
  train_parser(m, data, data, wv);
  std::vector<Sentence> pred;
  for (const auto& s : data) {
    pred.push_back(parse(m, s, wv));
    EXPECT_TRUE(validate_tree(pred.back()).empty());
  }
  EXPECT_GE(attachment_scores(data, pred).uas, 70.0);
}

TEST(ParserModel, EarlyStoppingKeepsBestEpoch) {
  auto vecs = toy_vectors(4, 5);
  auto wv = vecs.view();
  auto data = random_sentences(6, 5, 21);
  ParserHyper h = tiny_hyper();
  h.max_epochs = 12;
  h.patience = 2;
  StackPropModel m(h, ParserVocab::build(data), 4);
  TrainReport r = train_parser(m, data, random_sentences(4, 5, 22), wv);
  ASSERT_FALSE(r.epochs.empty());
  double best = -1;
  for (const auto& e : r.epochs) best = std::max(best, e.dev_las);
  EXPECT_DOUBLE_EQ(best, r.best_dev_las);
  if (r.early_stopped) EXPECT_EQ(static_cast<int>(r.epochs.size()), r.best_epoch + h.patience);
}

}  // namespace
}  // namespace cspipe::parser
