#include <gtest/gtest.h>

#include <cmath>

#include "cspipe/error.hpp"
#include "cspipe/nn/container.hpp"
#include "cspipe/nn/graph.hpp"
#include "cspipe/nn/init.hpp"
#include "cspipe/nn/layers.hpp"
#include "cspipe/nn/optimizer.hpp"
#include "support/gradcheck.hpp"

namespace cspipe::nn {
namespace {

constexpr double kGradTol = 1e-4;

using testing::generic_loss;
using testing::random_vec;
using testing::scramble;

TEST(Lstm, ZeroWeightsGiveZeroHidden) {
  ParameterSet ps;
  Rng rng(1);
  Lstm cell(ps, "l", {3}, 4, rng);
  for (auto& p : ps) p->value.setZero();
  Graph g;
  Vec x(3);
  x << 1, -2, 3;
  auto s = cell.step(g, std::vector<Expr>{g.input(x)}, cell.initial(g));
  EXPECT_TRUE(g.value(s.h).isZero(0.0));
}

TEST(Lstm, OneDimensionalCellByHand) {
  ParameterSet ps;
  Rng rng(1);
  Lstm cell(ps, "l", {1}, 1, rng);
  // Rows: i, f, o, g.
  ps.find("l.wx0")->value = (Mat(4, 1) << 0.5, -0.3, 0.8, 1.2).finished();
  ps.find("l.wh")->value = (Mat(4, 1) << 0.1, 0.2, -0.4, 0.7).finished();
  ps.find("l.b")->value = (Mat(4, 1) << 0.0, 1.0, 0.1, -0.2).finished();
  const double x = 0.6, h0 = -0.5, c0 = 0.25;
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  double i = sig(0.5 * x + 0.1 * h0 + 0.0);
  double f = sig(-0.3 * x + 0.2 * h0 + 1.0);
  double o = sig(0.8 * x - 0.4 * h0 + 0.1);
  double gg = std::tanh(1.2 * x + 0.7 * h0 - 0.2);
  double c1 = f * c0 + i * gg;
  double h1 = o * std::tanh(c1);

  Graph g;
  Lstm::State prev{g.input(Vec::Constant(1, h0)), g.input(Vec::Constant(1, c0))};
  auto s = cell.step(g, std::vector<Expr>{g.input(Vec::Constant(1, x))}, prev);
  EXPECT_NEAR(g.scalar_value(s.c), c1, 1e-15);
  EXPECT_NEAR(g.scalar_value(s.h), h1, 1e-15);
}

TEST(Lstm, InitializationIsOrthonormalWithForgetBiasOne) {
  ParameterSet ps;
  Rng rng(2);
  Lstm cell(ps, "l", {5}, 5, rng);
  const Mat& wh = ps.find("l.wh")->value;
  for (int gate = 0; gate < 4; ++gate) {
    Mat block = wh.middleRows(gate * 5, 5);
    EXPECT_LT((block.transpose() * block - Mat::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
  }
  const Mat& b = ps.find("l.b")->value;
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(b(k, 0), 0.0);
    EXPECT_EQ(b(5 + k, 0), 1.0);
  }
}

TEST(Lstm, HiddenStaysInUnitBoxAndRejectsBadInput) {
  ParameterSet ps;
  Rng rng(3);
  Lstm cell(ps, "l", {2}, 3, rng);
  scramble(ps, rng, 5.0);
  Graph g;
  auto s = cell.initial(g);
  for (int t = 0; t < 20; ++t) {
    s = cell.step(g, std::vector<Expr>{g.input(random_vec(2, rng) * 10)}, s);
    EXPECT_LE(g.value(s.h).cwiseAbs().maxCoeff(), 1.0);
  }
  EXPECT_THROW(cell.step(g, std::vector<Expr>{g.input(Vec::Zero(3))}, s), ArgumentError);
  EXPECT_THROW(cell.step(g, std::vector<Expr>{}, s), ArgumentError);
}

TEST(Lstm, GradientMatchesFiniteDifferences) {
  ParameterSet ps;
  Rng rng(4);
  Lstm cell(ps, "l", {3, 2}, 4, rng);
  scramble(ps, rng);
  std::vector<Vec> xs, ys;
  for (int t = 0; t < 3; ++t) {
    xs.push_back(random_vec(3, rng));
    ys.push_back(random_vec(2, rng));
  }
  auto r = testing::check_gradients(ps, [&](Graph& g) {
    auto s = cell.initial(g);
    for (int t = 0; t < 3; ++t) s = cell.step(g, std::vector<Expr>{g.input(xs[t]), g.input(ys[t])}, s);
    return g.add(generic_loss(g, s.h, 9), generic_loss(g, s.c, 10));
  });
  EXPECT_LT(r.max_rel_error, kGradTol) << r.worst;
  EXPECT_GT(r.checked, 50u);
}

TEST(BiLstm, LengthOneOutputHasTwiceHiddenDim) {
  ParameterSet ps;
  Rng rng(5);
  BiLstm bi(ps, "b", {3}, 4, rng);
  Graph g;
  auto out = bi.encode(g, {{g.input(random_vec(3, rng))}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(g.dim(out[0]), 8);
  EXPECT_THROW(bi.encode(g, {}), ArgumentError);
}

TEST(BiLstm, ReversalWithSwappedDirectionsMirrorsOutput) {
  Rng rng(6);
  ParameterSet a, b;
  BiLstm bi_a(a, "b", {3}, 4, rng);
  BiLstm bi_b(b, "b", {3}, 4, rng);
  scramble(a, rng);
  for (auto& p : b) {
    std::string name = p->name;
    std::string other = name.find(".fwd.") != std::string::npos ? name.replace(name.find(".fwd."), 5, ".bwd.")
                                                                 : name.replace(name.find(".bwd."), 5, ".fwd.");
    p->value = a.find(other)->value;
  }
  std::vector<Vec> xs;
  for (int t = 0; t < 5; ++t) xs.push_back(random_vec(3, rng));
  Graph g;
  std::vector<std::vector<Expr>> fwd_in, rev_in;
  for (const auto& x : xs) fwd_in.push_back({g.input(x)});
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev_in.push_back({g.input(*it)});
  auto oa = bi_a.encode(g, fwd_in);
  auto ob = bi_b.encode(g, rev_in);
  for (int t = 0; t < 5; ++t) {
    const Vec& va = g.value(oa[t]);
    const Vec& vb = g.value(ob[4 - t]);
    EXPECT_TRUE(va.head(4).isApprox(vb.tail(4), 1e-14));
    EXPECT_TRUE(va.tail(4).isApprox(vb.head(4), 1e-14));
  }
}

TEST(BiLstm, GradientMatchesFiniteDifferences) {
  ParameterSet ps;
  Rng rng(7);
  BiLstm bi(ps, "b", {2}, 3, rng);
  scramble(ps, rng);
  std::vector<Vec> xs;
  for (int t = 0; t < 4; ++t) xs.push_back(random_vec(2, rng));
  auto r = testing::check_gradients(ps, [&](Graph& g) {
    std::vector<std::vector<Expr>> in;
    for (const auto& x : xs) in.push_back({g.input(x)});
    auto out = bi.encode(g, in);
    std::vector<Expr> losses;
    for (std::size_t t = 0; t < out.size(); ++t) losses.push_back(generic_loss(g, out[t], 20 + t));
    losses.push_back(generic_loss(g, bi.encode_final(g, in), 30));
    return g.sum(losses);
  });
  EXPECT_LT(r.max_rel_error, kGradTol) << r.worst;
}

TEST(Mlp, ZeroWeightsPassBiasThrough) {
  ParameterSet ps;
  Rng rng(8);
  Mlp mlp(ps, "m", {3}, {}, 2, rng);
  ps.find("m.w0_0")->value.setZero();
  ps.find("m.b0")->value = (Mat(2, 1) << 0.3, -0.7).finished();
  Graph g;
  Expr y = mlp.forward(g, std::vector<Expr>{g.input(Vec::Zero(3))});
  EXPECT_DOUBLE_EQ(g.value(y)(0), 0.3);
  EXPECT_DOUBLE_EQ(g.value(y)(1), -0.7);
}

TEST(Mlp, TwoByTwoByHand) {
  ParameterSet ps;
  Rng rng(9);
  Mlp mlp(ps, "m", {2}, {2}, 2, rng);
  ps.find("m.w0_0")->value = (Mat(2, 2) << 1, 2, -1, 0.5).finished();
  ps.find("m.b0")->value = (Mat(2, 1) << 0.1, -0.2).finished();
  ps.find("m.w1")->value = (Mat(2, 2) << 0.3, -0.6, 1.5, 0.2).finished();
  ps.find("m.b1")->value = (Mat(2, 1) << 0.05, 0.0).finished();
  const double x0 = 0.4, x1 = -0.3;
  double h0 = std::tanh(1 * x0 + 2 * x1 + 0.1);
  double h1 = std::tanh(-1 * x0 + 0.5 * x1 - 0.2);
  Graph g;
  Expr y = mlp.forward(g, std::vector<Expr>{g.input((Vec(2) << x0, x1).finished())});
  EXPECT_NEAR(g.value(y)(0), 0.3 * h0 - 0.6 * h1 + 0.05, 1e-15);
  EXPECT_NEAR(g.value(y)(1), 1.5 * h0 + 0.2 * h1, 1e-15);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  ParameterSet ps;
  Rng rng(10);
  Mlp mlp(ps, "m", {3, 2}, {4, 3}, 5, rng);
  scramble(ps, rng);
  Vec a = random_vec(3, rng), b = random_vec(2, rng);
  auto r = testing::check_gradients(ps, [&](Graph& g) {
    return g.pick_nll(mlp.forward(g, std::vector<Expr>{g.input(a), g.input(b)}), 2);
  });
  EXPECT_LT(r.max_rel_error, kGradTol) << r.worst;
}

TEST(Mlp, RejectsWrongInputDim) {
  ParameterSet ps;
  Rng rng(11);
  Mlp mlp(ps, "m", {3}, {4}, 2, rng);
  Graph g;
  EXPECT_THROW(mlp.forward(g, std::vector<Expr>{g.input(Vec::Zero(2))}), ArgumentError);
}

TEST(Embedding, GradientReachesOnlyLookedUpColumns) {
  ParameterSet ps;
  Rng rng(12);
  Embedding emb(ps, "e", 6, 3, 0.5, rng);
  auto r = testing::check_gradients(ps, [&](Graph& g) {
    return g.add(generic_loss(g, emb(g, 1), 1), generic_loss(g, g.cmul(emb(g, 4), emb(g, 1)), 2));
  });
  EXPECT_LT(r.max_rel_error, kGradTol) << r.worst;
  ps.zero_grad();
  Graph g;
  g.backward(generic_loss(g, emb(g, 2), 3));
  const Mat& grad = ps.find("e")->grad;
  EXPECT_TRUE(grad.col(0).isZero(0.0));
  EXPECT_FALSE(grad.col(2).isZero(0.0));
  EXPECT_THROW(emb(g, 6), ArgumentError);
}

TEST(GraphOps, AttentionStyleOpsMatchFiniteDifferences) {
  ParameterSet ps;
  Rng rng(13);
  Parameter& wa = ps.add("wa", 3, 3);
  Parameter& q = ps.add("q", 3, 1);
  Parameter& keys = ps.add("keys", 3, 4);
  Parameter& bias = ps.add("bias", 3, 1);
  scramble(ps, rng);
  Vec m = dropout_mask(6, 0.3, 99);
  auto r = testing::check_gradients(ps, [&](Graph& g) {
    Expr h = g.param(q);
    std::vector<Expr> ks, scores;
    for (int j = 0; j < 4; ++j) {
      ks.push_back(g.lookup(keys, j));
      scores.push_back(g.dot(h, g.affine(nullptr, {{&wa, ks.back()}})));
    }
    Expr alpha = g.softmax(g.concat(scores));
    Expr ctx = g.weighted_sum(alpha, ks);
    Expr both = g.mask(g.concat({ctx, g.sub(h, g.param(bias))}), m);
    Expr mixed = g.add(g.scale(g.slice(both, 1, 3), 0.7), g.sigmoid(g.slice(both, 3, 3)));
    Expr lsm = g.log_softmax(mixed);
    return g.add(g.pick_nll(g.affine(&bias, {{&wa, mixed}}), 1), g.sum(std::vector<Expr>{g.slice(lsm, 0, 1)}));
  });
  EXPECT_LT(r.max_rel_error, kGradTol) << r.worst;
}

TEST(GraphOps, AbsentAffineTermsAreSkipped) {
  ParameterSet ps;
  Parameter& w1 = ps.add("w1", 2, 2);
  Parameter& w2 = ps.add("w2", 2, 3);
  Parameter& b = ps.add("b", 2, 1);
  Rng rng(14);
  scramble(ps, rng);
  Graph g;
  Expr x = g.input(random_vec(2, rng));
  Expr with_absent = g.affine(&b, {{&w1, x}, {&w2, Expr{}}});
  Expr plain = g.affine(&b, {{&w1, x}});
  EXPECT_EQ(g.value(with_absent), g.value(plain));
  EXPECT_THROW(g.affine(&b, {{&w2, x}}), ArgumentError);
}

TEST(SoftmaxXent, UniformLogitsOfLengthFour) {
  auto [loss, grad] = softmax_xent(Vec::Zero(4), 2);
  EXPECT_NEAR(loss, std::log(4.0), 1e-15);
  EXPECT_NEAR(grad.sum(), 0.0, 1e-15);
  EXPECT_NEAR(grad(2), 0.25 - 1.0, 1e-15);
  EXPECT_THROW(softmax_xent(Vec::Zero(4), 4), ArgumentError);
  EXPECT_THROW(softmax_xent(Vec::Zero(4), -1), ArgumentError);
}

TEST(SoftmaxXent, GradientMatchesFiniteDifferences) {
  Rng rng(15);
  Vec z = random_vec(6, rng) * 3;
  auto [loss, grad] = softmax_xent(z, 4);
  EXPECT_NEAR(grad.sum(), 0.0, 1e-14);
  const double eps = 1e-6;
  for (int k = 0; k < 6; ++k) {
    Vec up = z, down = z;
    up(k) += eps;
    down(k) -= eps;
    double numeric = (softmax_xent(up, 4).first - softmax_xent(down, 4).first) / (2 * eps);
    EXPECT_LT(testing::rel_error(grad(k), numeric), kGradTol);
  }
  Graph g;
  Expr nll = g.pick_nll(g.input(z), 4);
  EXPECT_NEAR(g.scalar_value(nll), loss, 1e-14);
  EXPECT_TRUE(std::isfinite(softmax_xent(Vec::Constant(3, 1e4), 0).first));
}

TEST(OrthonormalInit, SquareIsOrthogonal) {
  Mat m = orthonormal_init(4, 4, 42);
  EXPECT_LT((m.transpose() * m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(m, orthonormal_init(4, 4, 42));
  EXPECT_NE(m, orthonormal_init(4, 4, 43));
  Mat one = orthonormal_init(1, 1, 5);
  EXPECT_NEAR(std::abs(one(0, 0)), 1.0, 1e-15);
}

TEST(OrthonormalInit, RectangularHaveOrthonormalShortSide) {
  Mat tall = orthonormal_init(6, 3, 1);
  EXPECT_LT((tall.transpose() * tall - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  Mat wide = orthonormal_init(3, 6, 1);
  EXPECT_LT((wide * wide.transpose() - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Sgd, OneStepOnSquare) {
  ParameterSet ps;
  Parameter& w = ps.add("w", 1, 1);
  w.value(0, 0) = 1.0;
  w.grad(0, 0) = 2.0 * w.value(0, 0);
  Sgd opt({OptimizerKind::momentum_sgd, 0.1, 0.9, std::nullopt});
  opt.update(ps);
  EXPECT_NEAR(w.value(0, 0), 0.8, 1e-15);
  EXPECT_EQ(w.grad(0, 0), 0.0);
  // Second step carries velocity: v = 0.9 * -0.2 - 0.1 * 1.6.
  w.grad(0, 0) = 2.0 * w.value(0, 0);
  opt.update(ps);
  EXPECT_NEAR(w.value(0, 0), 0.8 + (0.9 * -0.2 - 0.1 * 1.6), 1e-15);
}

TEST(Sgd, ZeroMomentumEqualsVanilla) {
  Rng rng(16);
  ParameterSet a, b;
  a.add("w", 3, 2).value = uniform_init(3, 2, 1, rng);
  b.add("w", 3, 2).value = a[0].value;
  Sgd mom({OptimizerKind::momentum_sgd, 0.05, 0.0, std::nullopt});
  Sgd van({OptimizerKind::vanilla_sgd, 0.05, 0.9, std::nullopt});
  for (int step = 0; step < 5; ++step) {
    Mat grad = uniform_init(3, 2, 1, rng);
    a[0].grad = grad;
    b[0].grad = grad;
    mom.update(a);
    van.update(b);
    EXPECT_TRUE(a[0].value.isApprox(b[0].value, 1e-15));
  }
}

TEST(Sgd, ClipHalvesANormTenGradient) {
  ParameterSet ps;
  Parameter& w = ps.add("w", 2, 1);
  w.grad << 6.0, 8.0;
  Sgd opt({OptimizerKind::vanilla_sgd, 1.0, 0.0, 5.0});
  opt.update(ps);
  EXPECT_NEAR(w.value(0, 0), -3.0, 1e-14);
  EXPECT_NEAR(w.value(1, 0), -4.0, 1e-14);
  // Below the threshold nothing is rescaled.
  w.value.setZero();
  w.grad << 0.3, 0.4;
  opt.update(ps);
  EXPECT_NEAR(w.value(1, 0), -0.4, 1e-15);
}

TEST(Sgd, RejectsBadLearningRateAndNonFiniteResult) {
  EXPECT_THROW(Sgd({OptimizerKind::vanilla_sgd, 0.0, 0.0, std::nullopt}), ArgumentError);
  ParameterSet ps;
  Parameter& w = ps.add("w", 1, 1);
  w.grad(0, 0) = std::numeric_limits<double>::infinity();
  Sgd opt({OptimizerKind::vanilla_sgd, 0.1, 0.0, std::nullopt});
  EXPECT_THROW(opt.update(ps), Error);
}

TEST(Sgd, FrozenParametersDoNotMove) {
  ParameterSet ps;
  Parameter& w = ps.add("w", 1, 1);
  w.trainable = false;
  w.grad(0, 0) = 1.0;
  Sgd opt({});
  opt.update(ps);
  EXPECT_EQ(w.value(0, 0), 0.0);
}

TEST(Dropout, RateZeroIsAllOnes) { EXPECT_TRUE(dropout_mask(50, 0.0, 1).isOnes(0.0)); }

TEST(Dropout, MonteCarloZeroFractionAndMean) {
  for (double rate : {0.3, 0.5}) {
    Vec m = dropout_mask(100000, rate, 77);
    double zeros = (m.array() == 0.0).count() / 100000.0;
    EXPECT_NEAR(zeros, rate, 0.01);
    EXPECT_NEAR(m.mean(), 1.0, 0.02);
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      ASSERT_TRUE(m(k) == 0.0 || std::abs(m(k) - 1.0 / (1.0 - rate)) < 1e-15);
    }
  }
  EXPECT_THROW(dropout_mask(3, 1.0, 1), ArgumentError);
  EXPECT_THROW(dropout_mask(3, -0.1, 1), ArgumentError);
}

TEST(Dropout, IdentityOutsideTraining) {
  Graph g;
  Rng rng(1);
  Expr x = g.input(Vec::Ones(10));
  Mode eval{false, 0.5, &rng};
  EXPECT_EQ(dropout(g, x, eval).id, x.id);
  Mode train{true, 0.5, &rng};
  EXPECT_NE(dropout(g, x, train).id, x.id);
}

TEST(Container, RoundTripsParametersAndMeta) {
  ParameterSet ps;
  Rng rng(17);
  Lstm cell(ps, "l", {3}, 2, rng);
  nlohmann::json meta = {{"kind", "test"}, {"seed", 17}};
  std::string bytes = encode_container(meta, ps);
  EXPECT_EQ(bytes.substr(0, 8), "CSPIPEM1");
  Container c = decode_container(bytes);
  EXPECT_EQ(c.meta, meta);

  ParameterSet other;
  Rng rng2(99);
  Lstm cell2(other, "l", {3}, 2, rng2);
  assign(other, c);
  for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(ps[i].value, other[i].value);

  ParameterSet wrong;
  Lstm cell3(wrong, "l", {4}, 2, rng2);
  EXPECT_THROW(assign(wrong, c), DataError);
  EXPECT_THROW(decode_container(bytes.substr(0, bytes.size() - 8)), DataError);
  EXPECT_THROW(decode_container("NOTMAGIC" + bytes.substr(8)), DataError);
  EXPECT_THROW(read_container("/nonexistent/model.bin"), DataError);
}

TEST(Training, FixedSeedIsBitReproducible) {
  auto run = [] {
    ParameterSet ps;
    Rng rng(123);
    BiLstm bi(ps, "b", {2}, 3, rng);
    Mlp mlp(ps, "m", {6}, {4}, 3, rng);
    Sgd opt({});
    Rng data(5);
    for (int step = 0; step < 20; ++step) {
      Graph g;
      Mode mode{true, 0.3, &rng};
      std::vector<std::vector<Expr>> in;
      for (int t = 0; t < 3; ++t) in.push_back({g.input(random_vec(2, data))});
      auto out = bi.encode(g, in);
      Expr loss = g.pick_nll(mlp.forward(g, std::vector<Expr>{out[1]}, mode), step % 3);
      g.backward(loss);
      opt.update(ps);
    }
    return ps.snapshot();
  };
  auto a = run(), b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

}  // namespace
}  // namespace cspipe::nn
