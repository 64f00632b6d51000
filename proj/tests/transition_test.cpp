#include <gtest/gtest.h>

#include <map>
#include <set>

#include "cspipe/error.hpp"
#include "cspipe/parser/projective.hpp"
#include "cspipe/parser/transition.hpp"
#include "cspipe/treebank/tree.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace cspipe::parser {
namespace {

using testing::labeled;

std::vector<int> rebuild(const GoldTree& g) {
  Config c = Config::initial(static_cast<int>(g.heads.size()) - 1);
  for (const auto& t : static_derivation(g)) apply(c, t);
  EXPECT_TRUE(c.terminal());
  for (std::size_t d = 1; d < g.heads.size(); ++d) EXPECT_EQ(c.labels[d], g.labels[d]);
  return c.heads;
}

TEST(Transitions, InitialOneTokenConfig) {
  Config c = Config::initial(1);
  auto legal = legal_transitions(c, 2);
  ASSERT_EQ(legal.size(), 3u);
  EXPECT_EQ(legal[0].move, Move::shift);
  EXPECT_EQ(legal[1].move, Move::right_arc);
  EXPECT_EQ(legal[2].move, Move::right_arc);
  apply(c, {Move::right_arc, 1});
  EXPECT_EQ(c.heads[1], 0);
  EXPECT_EQ(c.labels[1], 1);
  EXPECT_TRUE(c.root_has_dependent);
  // Only Reduce remains once the buffer is empty.
  auto rest = legal_transitions(c, 2);
  ASSERT_EQ(rest.size(), 1u);
  EXPECT_EQ(rest[0].move, Move::reduce);
  apply(c, rest[0]);
  EXPECT_TRUE(c.terminal());
  EXPECT_TRUE(legal_transitions(c, 2).empty());
}

TEST(Transitions, ShiftAndReduceEffects) {
  Config c = Config::initial(3);
  apply(c, {Move::shift, -1});
  EXPECT_EQ(c.stack, (std::vector<int>{0, 1}));
  EXPECT_EQ(c.front(), 2);
  EXPECT_FALSE(is_legal(c, {Move::reduce, -1}));  // headless top, buffer nonempty
  apply(c, {Move::right_arc, 0});
  EXPECT_TRUE(is_legal(c, {Move::reduce, -1}));
  EXPECT_FALSE(is_legal(c, {Move::left_arc, 0}));
  try {
    apply(c, {Move::left_arc, 0});
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("LeftArc"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("stack=[0 1 2]"), std::string::npos);
  }
}

TEST(Transitions, RootTakesOneDependent) {
  Config c = Config::initial(2);
  apply(c, {Move::right_arc, 0});
  apply(c, {Move::reduce, -1});
  EXPECT_FALSE(is_legal(c, {Move::right_arc, 0}));
  EXPECT_TRUE(is_legal(c, {Move::shift, -1}));
}

TEST(Transitions, LabelLayoutRoundTrips) {
  LabelSet labels({"amod", "nsubj", "root"});
  EXPECT_EQ(labels.num_outputs(), 8);
  for (int o = 0; o < labels.num_outputs(); ++o) EXPECT_EQ(labels.encode(labels.decode(o)), o);
  EXPECT_EQ(to_string(labels.decode(3), &labels), "LeftArc(nsubj)");
}

TEST(StaticOracle, ExhaustiveRoundTripUpToSixTokens) {
  testing::Rng rng(1);
  for (int n = 1; n <= 6; ++n) {
    int trees = 0;
    testing::for_each_projective_tree(n, [&](const std::vector<int>& heads) {
      GoldTree g = labeled(heads, rng, 3);
      ASSERT_EQ(rebuild(g), heads);
      EXPECT_LE(static_derivation(g).size(), static_cast<std::size_t>(2 * n));
      ++trees;
    });
    EXPECT_GT(trees, 0);
  }
}

TEST(StaticOracle, RandomRoundTripUpToFortyTokens) {
  testing::Rng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    auto heads = testing::random_projective_tree(testing::uniform_int(rng, 1, 40), rng);
    ASSERT_EQ(rebuild(labeled(heads, rng, 5)), heads);
  }
}

TEST(StaticOracle, NonProjectiveTreeIsRejected) {
  testing::Rng rng(3);
  EXPECT_THROW(static_derivation(labeled({-1, 2, 0, 2, 1}, rng, 2)), ArgumentError);
}

// Every head set produced by a complete derivation, over all derivations.
void collect_outcomes(Config c, std::set<std::vector<int>>& out) {
  if (c.terminal()) {
    if (std::find(c.heads.begin() + 1, c.heads.end(), -1) == c.heads.end()) out.insert(c.heads);
    return;
  }
  for (const auto& t : legal_transitions(c, 1)) {
    Config next = c;
    apply(next, t);
    collect_outcomes(next, out);
  }
}

TEST(ValidateTreeCrossCheck, CompleteDerivationsYieldExactlyTheValidProjectiveTrees) {
  for (int n = 1; n <= 5; ++n) {
    std::set<std::vector<int>> outcomes, expected;
    collect_outcomes(Config::initial(n), outcomes);
    testing::for_each_projective_tree(n, [&](const std::vector<int>& h) { expected.insert(h); });
    EXPECT_EQ(outcomes, expected) << "n=" << n;
  }
}

TEST(ValidateTreeCrossCheck, RandomHeadVectorsUpToEightTokens) {
  testing::Rng rng(4);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = testing::uniform_int(rng, 1, 8);
    std::vector<int> heads(n + 1, -1);
    for (int d = 1; d <= n; ++d) {
      do heads[d] = testing::uniform_int(rng, 0, n);
      while (heads[d] == d);
    }
    Sentence s = testing::sentence_from_heads(heads, rng);
    bool valid = validate_tree(s).empty();
    bool derivable = false;
    try {
      Sentence p = valid ? projectivize(s).sentence : s;
      LabelSet labels = LabelSet::from_sentences({p});
      GoldTree g = gold_tree(p, labels);
      derivable = rebuild(g) == g.heads;
    } catch (const ArgumentError&) {
      derivable = false;
    }
    EXPECT_EQ(valid, derivable) << "trial " << trial;
  }
}

// ---- Dynamic oracle vs exhaustive search -----------------------------------

TEST(DynamicOracle, AgreesWithExhaustiveSearchOnAllFiveTokenTrees) {
  testing::Rng rng(5);
  long configs = 0, trees = 0;
  for (int n = 1; n <= 5; ++n) {
    testing::for_each_projective_tree(n, [&](const std::vector<int>& heads) {
      GoldTree g = labeled(heads, rng, 2);
      testing::ArcReachability bf{g, {}};
      std::set<testing::ConfigKey> seen;
      ++trees;
      testing::visit_configs(Config::initial(n), seen, [&](const Config& c) {
        ++configs;
        if (c.terminal()) return;
        EXPECT_EQ(correct_arcs(Config::initial(n), g) + bf.future(Config::initial(n)), n);
        bool zero_cost = false;
        for (const auto& t : legal_transitions(c, 2)) {
          const int cost = transition_cost(c, t, g);
          ASSERT_EQ(cost, testing::brute_force_cost(bf, c, t)) << c.summary() << " " << to_string(t);
          zero_cost = zero_cost || cost == 0;
        }
        ASSERT_TRUE(zero_cost) << c.summary();
        ASSERT_EQ(reachable_gold_arcs(c, g), bf.future(c));
      });
    });
  }
  EXPECT_GT(trees, 100);
  RecordProperty("configs", std::to_string(configs));
}

TEST(DynamicOracle, GoldPathHasZeroCostAndWrongLeftArcCosts) {
  testing::Rng rng(6);
  auto heads = testing::random_projective_tree(10, rng);
  GoldTree g = labeled(heads, rng, 3);
  Config c = Config::initial(10);
  for (const auto& t : static_derivation(g)) {
    EXPECT_EQ(transition_cost(c, t, g), 0) << c.summary() << " " << to_string(t);
    apply(c, t);
  }
  // Tokens 1 and 2 both depend on 3: popping 1 under 2 loses its gold head.
  GoldTree fan{{-1, 3, 3, 0}, {-1, 0, 0, 1}};
  Config d = Config::initial(3);
  apply(d, {Move::shift, -1});
  EXPECT_GE(transition_cost(d, {Move::left_arc, 0}, fan), 1);
  EXPECT_EQ(transition_cost(d, {Move::shift, -1}, fan), 0);
}

// ---- Pseudo-projective transforms ------------------------------------------

Sentence tree(const std::vector<int>& heads, const std::vector<std::string>& labels) {
  std::vector<std::string> forms;
  for (std::size_t i = 1; i < heads.size(); ++i) forms.push_back("w" + std::to_string(i));
  Sentence s = make_sentence(forms);
  for (std::size_t i = 1; i < heads.size(); ++i) {
    s.tokens[i - 1].head = heads[i];
    s.tokens[i - 1].deprel = labels[i - 1];
  }
  return s;
}

TEST(Projectivize, ProjectiveTreeIsUnchanged) {
  Sentence s = tree({-1, 2, 0, 2}, {"nsubj", "root", "obj"});
  auto r = projectivize(s);
  EXPECT_EQ(r.sentence, s);
  EXPECT_EQ(r.lifts, 0);
}

TEST(Projectivize, CanonicalCrossingArc) {
  // 1 -> 4 spans the root 2.
  Sentence s = tree({-1, 2, 0, 2, 1}, {"nsubj", "root", "obj", "amod"});
  auto r = projectivize(s);
  EXPECT_TRUE(is_projective(head_vector(r.sentence)));
  EXPECT_EQ(r.lifted_tokens, 1);
  EXPECT_EQ(r.sentence.tokens[3].head, 2);
  EXPECT_EQ(r.sentence.tokens[3].deprel, "amod\xE2\x86\x91nsubj");
  EXPECT_EQ(r.sentence.tokens[0].deprel, "nsubj\xE2\x86\x93");
  auto back = deprojectivize(r.sentence);
  EXPECT_EQ(back.sentence, s);
  EXPECT_EQ(back.warnings, 0);
}

TEST(Projectivize, OutputIsAlwaysProjective) {
  testing::Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    Sentence s = testing::sentence_from_heads(testing::random_tree(testing::uniform_int(rng, 2, 15), rng), rng);
    auto r = projectivize(s);
    ASSERT_TRUE(validate_tree(r.sentence).empty());
    ASSERT_TRUE(is_projective(head_vector(r.sentence)));
  }
}

TEST(Deprojectivize, RoundTripWithAtMostOneNonProjectiveArc) {
  testing::Rng rng(8);
  int checked = 0, nonprojective = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    auto heads = testing::random_tree(testing::uniform_int(rng, 2, 12), rng);
    const auto bad = non_projective_arcs(heads).size();
    if (bad > 1) continue;
    Sentence s = testing::sentence_from_heads(heads, rng);
    auto back = deprojectivize(projectivize(s).sentence);
    ASSERT_EQ(back.sentence, s) << "heads " << ::testing::PrintToString(heads);
    ++checked;
    nonprojective += bad == 1;
  }
  EXPECT_GT(nonprojective, 100);
  EXPECT_GT(checked, 300);
}

TEST(Deprojectivize, PlainLabelsAreIdentity) {
  testing::Rng rng(9);
  Sentence s = testing::sentence_from_heads(testing::random_projective_tree(8, rng), rng);
  auto r = deprojectivize(s);
  EXPECT_EQ(r.sentence, s);
  EXPECT_EQ(r.warnings, 0);
}

TEST(Deprojectivize, OrphanEncodingWarnsAndStrips) {
  Sentence s = tree({-1, 2, 0, 2}, {"nsubj", "root", "amod\xE2\x86\x91xcomp"});
  auto r = deprojectivize(s);
  EXPECT_EQ(r.warnings, 1);
  EXPECT_EQ(r.sentence.tokens[2].deprel, "amod");
  EXPECT_EQ(r.sentence.tokens[2].head, 2);
}

TEST(LabelCodec, RoundTrips) {
  for (const std::string l : {"nsubj", "nsubj\xE2\x86\x93", "amod\xE2\x86\x91obj", "amod\xE2\x86\x91obj\xE2\x86\x93"}) {
    EXPECT_EQ(encode_label(decode_label(l)), l);
  }
  auto e = decode_label("amod\xE2\x86\x91obj\xE2\x86\x93");
  EXPECT_EQ(e.base, "amod");
  EXPECT_EQ(e.head_label, "obj");
  EXPECT_TRUE(e.lifted && e.on_path);
}

}  // namespace
}  // namespace cspipe::parser
