#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cspipe/embed/lexicon.hpp"
#include "cspipe/embed/projection.hpp"
#include "cspipe/embed/space.hpp"
#include "cspipe/error.hpp"
#include "cspipe/nn/init.hpp"

namespace cspipe::embed {
namespace {

Mat gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

TEST(LoadEmbeddings, ThreeWordsPlusUnk) {
  auto r = parse_embeddings("yaar 0.1 0.2\ntell 1 2\nme -1 0.5\n");
  EXPECT_EQ(r.space.size(), 3u);
  EXPECT_EQ(r.space.matrix().cols(), 4);
  EXPECT_EQ(r.space.dim(), 2);
  EXPECT_TRUE(r.space.row(EmbeddingSpace::kUnk).isZero(0.0));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(LoadEmbeddings, HeaderLineIsSkipped) {
  auto r = parse_embeddings("3 2\na 1 2\nb 3 4\nc 5 6\n");
  EXPECT_EQ(r.space.size(), 3u);
  EXPECT_EQ(r.space.lookup("b"), (Vec(2) << 3, 4).finished());
}

TEST(LoadEmbeddings, DuplicateKeepsFirstAndWarns) {
  auto r = parse_embeddings("a 1 2\na 9 9\n");
  EXPECT_EQ(r.space.size(), 1u);
  EXPECT_EQ(r.space.lookup("a")(0), 1.0);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("line 2"), std::string::npos);
}

TEST(LoadEmbeddings, RaggedRowCitesLine) {
  try {
    parse_embeddings("2 3\na 1 2 3\nb 1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_embeddings("a 1 x\n"), ParseError);
  EXPECT_THROW(parse_embeddings(""), DataError);
}

TEST(LoadEmbeddings, SaveLoadRoundTrip) {
  EmbeddingSpace s(5);
  Mat m = gaussian(5, 20, 3);
  for (int j = 0; j < 20; ++j) s.add("w" + std::to_string(j), m.col(j) * 1e-3);
  auto back = parse_embeddings(format_embeddings(s)).space;
  EXPECT_EQ(back.words(), s.words());
  EXPECT_EQ(back.matrix(), s.matrix());
}

TEST(Lookup, ExactThenLowercaseThenUnk) {
  EmbeddingSpace s(2);
  s.add("Delhi", (Vec(2) << 1, 0).finished());
  s.add("delhi", (Vec(2) << 0, 1).finished());
  s.add("Twitter", (Vec(2) << 2, 2).finished());
  EXPECT_EQ(s.lookup("Delhi")(0), 1.0);
  EXPECT_EQ(s.lookup("delhi")(1), 1.0);
  EXPECT_EQ(s.lookup("twitter")(0), 2.0);
  EXPECT_EQ(s.index("TWITTER"), s.index("Twitter"));
  EXPECT_EQ(s.index("unseen"), EmbeddingSpace::kUnk);
  EXPECT_TRUE(s.lookup("unseen").isZero(0.0));
  Mat w = nn::orthonormal_init(2, 2, 4);
  EXPECT_EQ(s.lookup("Twitter", &w), w * s.lookup("Twitter"));
}

TEST(Lexicon, CaseInsensitiveWithReverseIndex) {
  auto lex = parse_lexicon("# comment\nyaar\tfriend\nyaar\tbuddy\nDost\tfriend\n\n");
  EXPECT_EQ(lex.size(), 3u);
  EXPECT_EQ(lex.english("YAAR"), (std::vector<std::string>{"friend", "buddy"}));
  EXPECT_EQ(lex.hindi("Friend"), (std::vector<std::string>{"yaar", "Dost"}));
  EXPECT_TRUE(lex.english("nahi").empty());
  EXPECT_THROW(parse_lexicon("only-one-column\n"), ParseError);
}

TEST(Projection, IdentityWhenSpacesCoincide) {
  Mat x = gaussian(6, 30, 1);
  auto r = learn_projection(x, x);
  EXPECT_LT((r.w - Mat::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(r.mean_cosine, 1.0, 1e-9);
}

TEST(Projection, RecoversPlantedRotation) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Mat x = gaussian(8, 40, seed);
    Mat rot = nn::orthonormal_init(8, 8, seed + 100);
    auto r = learn_projection(x, rot * x);
    EXPECT_LT((r.w - rot).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((r.w.transpose() * r.w - Mat::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Projection, MatchesGridSearchInTwoDimensions) {
  Mat x(2, 3), z(2, 3);
  x << 1.0, 0.2, -0.7, 0.3, 1.1, 0.4;
  z << 0.1, -0.9, 0.8, 1.0, 0.5, -0.6;
  auto r = learn_projection(x, z);
  Mat xn = normalize_and_center(x), zn = normalize_and_center(z);
  auto objective = [&](const Mat& w) { return (zn.array() * (w * xn).array()).sum(); };
  // Search O(2): rotations and reflections.
  double best = -1e300;
  Mat best_w;
  const int steps = 2000000;
  for (int reflect = 0; reflect < 2; ++reflect) {
    for (int k = 0; k < steps; ++k) {
      double t = 2 * std::numbers::pi * k / steps;
      Mat w(2, 2);
      if (reflect) {
        w << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
      } else {
        w << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      }
      double v = objective(w);
      if (v > best) {
        best = v;
        best_w = w;
      }
    }
  }
  EXPECT_NEAR(objective(r.w), best, 1e-4);
  EXPECT_LT((r.w - best_w).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Projection, PreservesNormsAndIsDeterministic) {
  EmbeddingSpace hi(4), en(4);
  BilingualLexicon lex;
  Mat base = gaussian(4, 12, 9);
  Mat rot = nn::orthonormal_init(4, 4, 5);
  for (int j = 0; j < 12; ++j) {
    en.add("en" + std::to_string(j), base.col(j));
    hi.add("hi" + std::to_string(j), rot.transpose() * base.col(j));
    lex.add("hi" + std::to_string(j), "en" + std::to_string(j));
  }
  auto a = learn_projection(hi, en, lex);
  auto b = learn_projection(hi, en, lex);
  EXPECT_EQ(a.w, b.w);
  EXPECT_EQ(a.anchors, 12u);
  EXPECT_LT((a.w - rot).cwiseAbs().maxCoeff(), 1e-6);
  Vec v = gaussian(4, 1, 11).col(0);
  EXPECT_NEAR((a.w * v).norm(), v.norm(), 1e-6);
  auto reverse = learn_projection(en, hi, lex, Direction::en_to_hi);
  EXPECT_LT((reverse.w - rot.transpose()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Projection, TooFewAnchorsIsAnError) {
  EXPECT_THROW(learn_projection(gaussian(4, 3, 1), gaussian(4, 3, 2)), ArgumentError);
  EmbeddingSpace a(3), b(3);
  BilingualLexicon lex;
  lex.add("x", "y");
  EXPECT_THROW(learn_projection(a, b, lex), ArgumentError);
}

}  // namespace
}  // namespace cspipe::embed
