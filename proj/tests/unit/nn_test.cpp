#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ratingnet/nn/grad_check.hpp"
#include "ratingnet/nn/layers.hpp"
#include "ratingnet/nn/lstm.hpp"
#include "ratingnet/nn/optim.hpp"
#include "ratingnet/nn/serialize.hpp"

using namespace ratingnet::nn;

namespace {

Tensor<double> random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(std::move(shape));
  std::uniform_real_distribution<double> d(lo, hi);
  for (auto& v : t.data) v = d(rng);
  return t;
}

double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

// Checks the gradient of sum(forward(x) * r) for a fixed random r.
template <typename Fwd, typename Bwd>
GradCheckReport check_layer(Tensor<double>& x, const ParamList<double>& params, Fwd fwd, Bwd bwd, std::mt19937_64& rng) {
  const auto y = fwd(x);
  const auto r = random_tensor(y.shape, rng);
  zero_grads(params);
  const auto dx = bwd(r);
  std::vector<GradTarget> targets{{"input", &x.data, dx.data}};
  for (const auto& p : params) targets.push_back({p.name, &p.tensor->data, p.tensor->grad});
  return grad_check([&] { return dot(fwd(x), r); }, targets);
}

// Direct nested-loop cross-correlation with zero padding 1.
Tensor<double> conv_oracle(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>& b) {
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3), o = w.dim(0);
  Tensor<double> y({n, o, h, wd});
  for (int s = 0; s < n; ++s)
    for (int oc = 0; oc < o; ++oc)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < wd; ++j) {
          double acc = b.data[oc];
          for (int ch = 0; ch < c; ++ch)
            for (int ki = 0; ki < 3; ++ki)
              for (int kj = 0; kj < 3; ++kj) {
                const int yi = i + ki - 1, xj = j + kj - 1;
                if (yi < 0 || yi >= h || xj < 0 || xj >= wd) continue;
                acc += w.data[((oc * c + ch) * 3 + ki) * 3 + kj] * x.data[((s * c + ch) * h + yi) * wd + xj];
              }
          y.data[((s * o + oc) * h + i) * wd + j] = acc;
        }
  return y;
}

}  // namespace

TEST(Conv2d, IdentityKernelAndConstantBias) {
  std::mt19937_64 rng(1);
  Conv2d<double> conv(1, 1);
  conv.weight.data[4] = 1.0;
  const auto x = random_tensor({2, 1, 5, 6}, rng);
  EXPECT_EQ(conv.forward(x).data, x.data);

  Conv2d<double> zero(3, 2);
  zero.bias.data = {0.25, -1.5};
  const auto y = zero.forward(random_tensor({1, 3, 4, 4}, rng));
  for (int i = 0; i < 16; ++i) {
    EXPECT_EQ(y.data[i], 0.25);
    EXPECT_EQ(y.data[16 + i], -1.5);
  }
}

TEST(Conv2d, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2);
  const auto x = random_tensor({1, 2, 4, 4}, rng);
  Conv2d<float> conv(2, 3);
  conv.init(rng);
  const auto expected = conv_oracle(x, conv.weight.cast<double>(), conv.bias.cast<double>());
  const auto got = conv.forward(x.cast<float>());
  ASSERT_EQ(got.shape, expected.shape);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got.data[i], expected.data[i], 1e-6);
  EXPECT_THROW(conv.forward(Tensor<float>({1, 3, 4, 4})), ShapeError);
}

TEST(Conv2d, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  Conv2d<double> conv(3, 4);
  conv.init(rng);
  auto x = random_tensor({2, 3, 5, 4}, rng);
  ParamList<double> params;
  conv.collect(params, "conv");
  const auto r = check_layer(x, params, [&](const Tensor<double>& in) { return conv.forward(in); },
                             [&](const Tensor<double>& dy) { return conv.backward(dy); }, rng);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(Conv2d, ZeroInputBiasGradientCountsPositions) {
  Conv2d<double> conv(2, 3);
  std::mt19937_64 rng(4);
  conv.init(rng);
  conv.forward(Tensor<double>({5, 2, 4, 3}));
  conv.bias.zero_grad();
  conv.weight.zero_grad();
  conv.backward(Tensor<double>({5, 3, 4, 3}, 1.0));
  for (double g : conv.bias.grad) EXPECT_DOUBLE_EQ(g, 5.0 * 4 * 3);
  for (double g : conv.weight.grad) EXPECT_EQ(g, 0.0);
}

TEST(BatchNorm2d, TrainingOutputIsNormalized) {
  std::mt19937_64 rng(5);
  BatchNorm2d<double> bn(3);
  const auto x = random_tensor({4, 3, 4, 4}, rng, -3.0, 5.0);
  const auto y = bn.forward(x, Mode::Train);
  for (int c = 0; c < 3; ++c) {
    double sum = 0, sq = 0;
    for (int n = 0; n < 4; ++n)
      for (int p = 0; p < 16; ++p) {
        const double v = y.data[(n * 3 + c) * 16 + p];
        sum += v;
        sq += v * v;
      }
    EXPECT_NEAR(sum / 64, 0.0, 1e-5);
    EXPECT_NEAR(sq / 64, 1.0, 1e-3);  // eps in the denominator
  }
  EXPECT_THROW(bn.forward(random_tensor({1, 3, 2, 2}, rng), Mode::Train), ShapeError);
  EXPECT_NO_THROW(bn.forward(random_tensor({1, 3, 2, 2}, rng), Mode::Eval));
}

TEST(BatchNorm2d, EvalWithBatchStatisticsMatchesTraining) {
  std::mt19937_64 rng(6);
  BatchNorm2d<double> bn(2);
  const auto x = random_tensor({3, 2, 2, 2}, rng);
  const auto train = bn.forward(x, Mode::Train);
  for (int c = 0; c < 2; ++c) {
    double sum = 0, sq = 0;
    for (int n = 0; n < 3; ++n)
      for (int p = 0; p < 4; ++p) sum += x.data[(n * 2 + c) * 4 + p];
    const double mean = sum / 12;
    for (int n = 0; n < 3; ++n)
      for (int p = 0; p < 4; ++p) sq += std::pow(x.data[(n * 2 + c) * 4 + p] - mean, 2);
    bn.running_mean.data[c] = mean;
    bn.running_var.data[c] = sq / 12;
  }
  const auto eval = bn.forward(x, Mode::Eval);
  for (std::size_t i = 0; i < eval.size(); ++i) EXPECT_NEAR(eval.data[i], train.data[i], 1e-12);
}

TEST(BatchNorm2d, RunningStatisticsUseMomentum) {
  BatchNorm2d<double> bn(1);
  Tensor<double> x({2, 1, 1, 2}, std::vector<double>{1, 2, 3, 4});
  bn.forward(x, Mode::Train);
  EXPECT_NEAR(bn.running_mean.data[0], 0.1 * 2.5, 1e-12);
  EXPECT_NEAR(bn.running_var.data[0], 0.9 + 0.1 * (5.0 / 3.0), 1e-12);
}

TEST(BatchNorm2d, EvalOutputIndependentOfBatchComposition) {
  std::mt19937_64 rng(7);
  BatchNorm2d<double> bn(2);
  bn.running_mean.data = {0.3, -0.2};
  bn.running_var.data = {1.7, 0.4};
  bn.gamma.data = {1.2, 0.8};
  const auto a = random_tensor({1, 2, 2, 2}, rng);
  auto pair = random_tensor({2, 2, 2, 2}, rng);
  std::copy(a.data.begin(), a.data.end(), pair.data.begin());
  const auto alone = bn.forward(a, Mode::Eval);
  const auto together = bn.forward(pair, Mode::Eval);
  for (std::size_t i = 0; i < alone.size(); ++i) EXPECT_EQ(alone.data[i], together.data[i]);
}

TEST(BatchNorm2d, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  for (auto mode : {Mode::Train, Mode::Eval}) {
    BatchNorm2d<double> bn(3);
    bn.gamma.data = {0.7, 1.3, -0.4};
    bn.beta.data = {0.1, -0.2, 0.3};
    bn.running_mean.data = {0.1, 0.2, -0.1};
    bn.running_var.data = {0.8, 1.1, 0.5};
    auto x = random_tensor({2, 3, 4, 4}, rng);
    ParamList<double> params;
    bn.collect(params, "bn");
    const auto mean_before = bn.running_mean.data;
    const auto r = check_layer(x, params, [&](const Tensor<double>& in) { return bn.forward(in, mode); },
                               [&](const Tensor<double>& dy) { return bn.backward(dy); }, rng);
    EXPECT_LT(r.max_rel_error, 1e-3) << r.worst;
    if (mode == Mode::Eval) {
      EXPECT_EQ(bn.running_mean.data, mean_before);
    }
  }
}

TEST(MeanPool2d, ShapesValuesAndGradient) {
  std::mt19937_64 rng(9);
  MeanPool2d<double> pool;
  const auto y = pool.forward(Tensor<double>({2, 3, 8, 8}, 1.75));
  EXPECT_EQ(y.shape, (Shape{2, 3, 4, 4}));
  for (double v : y.data) EXPECT_EQ(v, 1.75);
  EXPECT_THROW(pool.forward(Tensor<double>({1, 1, 3, 4})), ShapeError);

  pool.forward(Tensor<double>({1, 1, 2, 2}));
  const auto dx = pool.backward(Tensor<double>({1, 1, 1, 1}, 1.0));
  for (double v : dx.data) EXPECT_EQ(v, 0.25);

  auto x = random_tensor({2, 2, 4, 4}, rng);
  const auto r = check_layer(x, {}, [&](const Tensor<double>& in) { return pool.forward(in); },
                             [&](const Tensor<double>& dy) { return pool.backward(dy); }, rng);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(GlobalMeanPool, ConstantSumAndGradient) {
  std::mt19937_64 rng(10);
  GlobalMeanPool<double> pool;
  const auto c = pool.forward(Tensor<double>({2, 3, 2, 2}, -0.5));
  EXPECT_EQ(c.shape, (Shape{2, 3}));
  for (double v : c.data) EXPECT_EQ(v, -0.5);

  auto x = random_tensor({2, 3, 3, 2}, rng);
  const auto y = pool.forward(x);
  for (int plane = 0; plane < 6; ++plane) {
    double sum = 0;
    for (int p = 0; p < 6; ++p) sum += x.data[plane * 6 + p];
    EXPECT_NEAR(y.data[plane] * 6, sum, 1e-12);
  }
  const auto r = check_layer(x, {}, [&](const Tensor<double>& in) { return pool.forward(in); },
                             [&](const Tensor<double>& dy) { return pool.backward(dy); }, rng);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(LeakyRelu, ValuesAndGradient) {
  LeakyRelu<double> act(0.01);
  const auto y = act.forward(Tensor<double>({3}, std::vector<double>{0.0, -1.0, 2.0}));
  EXPECT_EQ(y.data[0], 0.0);
  EXPECT_DOUBLE_EQ(y.data[1], -0.01);
  EXPECT_EQ(y.data[2], 2.0);
  EXPECT_THROW(LeakyRelu<double>(1.5), std::invalid_argument);

  std::mt19937_64 rng(11);
  auto x = random_tensor({4, 6}, rng);
  for (auto& v : x.data)
    if (std::abs(v) < 0.05) v += 0.1;  // keep away from the kink
  const auto r = check_layer(x, {}, [&](const Tensor<double>& in) { return act.forward(in); },
                             [&](const Tensor<double>& dy) { return act.backward(dy); }, rng);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
  act.forward(Tensor<double>({1}, std::vector<double>{-3.0}));
  EXPECT_DOUBLE_EQ(act.backward(Tensor<double>({1}, 1.0)).data[0], 0.01);
}

TEST(Dropout, IdentityCasesAndSurvivorStatistics) {
  std::mt19937_64 rng(12);
  const auto x = random_tensor({10, 10}, rng);
  Dropout<double> none(0.0);
  EXPECT_EQ(none.forward(x, Mode::Train, rng).data, x.data);
  Dropout<double> half(0.5);
  EXPECT_EQ(half.forward(x, Mode::Eval, rng).data, x.data);
  EXPECT_THROW(Dropout<double>(1.0), std::invalid_argument);

  const Tensor<double> ones({100000}, 1.0);
  const auto y = half.forward(ones, Mode::Train, rng);
  double sum = 0;
  std::size_t zeros = 0;
  for (double v : y.data) {
    sum += v;
    zeros += v == 0.0;
    EXPECT_TRUE(v == 0.0 || v == 2.0);
  }
  EXPECT_NEAR(sum / 1e5, 1.0, 0.01);
  EXPECT_NEAR(static_cast<double>(zeros) / 1e5, 0.5, 0.01);

  // Backward reuses the same mask.
  const auto dx = half.backward(Tensor<double>({100000}, 1.0));
  EXPECT_EQ(dx.data, y.data);
}

TEST(Linear, ValuesAndGradient) {
  Linear<double> lin(2, 1);
  lin.weight.data = {2.0, -1.0};
  lin.bias.data = {0.5};
  EXPECT_DOUBLE_EQ(lin.forward(Tensor<double>({1, 2}, std::vector<double>{3.0, 4.0})).data[0], 2.5);

  std::mt19937_64 rng(13);
  Linear<double> big(5, 3);
  big.init(rng);
  auto x = random_tensor({4, 5}, rng);
  ParamList<double> params;
  big.collect(params, "fc");
  const auto r = check_layer(x, params, [&](const Tensor<double>& in) { return big.forward(in); },
                             [&](const Tensor<double>& dy) { return big.backward(dy); }, rng);
  EXPECT_LT(r.max_rel_error, 1e-6) << r.worst;
}

TEST(Lstm, SingleStepAndZeroParameters) {
  std::mt19937_64 rng(14);
  BiLstm<double> lstm(4, 5);
  lstm.init(rng);
  const auto y = lstm.forward(random_tensor({1, 2, 4}, rng), {1, 1});
  EXPECT_EQ(y.shape, (Shape{1, 2, 10}));
  for (double v : y.data) EXPECT_TRUE(std::isfinite(v));

  BiLstm<double> zero(4, 5);
  const auto z = zero.forward(random_tensor({3, 2, 4}, rng), {3, 2});
  for (double v : z.data) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, PaddedStepsEmitZerosAndDoNotLeak) {
  std::mt19937_64 rng(15);
  BiLstm<double> lstm(3, 4);
  lstm.init(rng);
  auto x = random_tensor({5, 2, 3}, rng);
  const auto padded = lstm.forward(x, {5, 2});
  for (int t = 2; t < 5; ++t)
    for (int j = 0; j < 8; ++j) EXPECT_EQ(padded.data[(t * 2 + 1) * 8 + j], 0.0);

  // Row 1 alone, unpadded, must match exactly.
  Tensor<double> single({2, 1, 3});
  for (int t = 0; t < 2; ++t)
    for (int d = 0; d < 3; ++d) single.data[t * 3 + d] = x.data[(t * 2 + 1) * 3 + d];
  const auto alone = lstm.forward(single, {2});
  for (int t = 0; t < 2; ++t)
    for (int j = 0; j < 8; ++j) EXPECT_DOUBLE_EQ(alone.data[t * 8 + j], padded.data[(t * 2 + 1) * 8 + j]);
}

TEST(Lstm, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(16);
  BiLstm<double> lstm(4, 5);
  lstm.init(rng);
  auto x = random_tensor({3, 2, 4}, rng);
  ParamList<double> params;
  lstm.collect(params, "lstm");
  const std::vector<int> lengths{3, 2};
  const auto r = check_layer(x, params, [&](const Tensor<double>& in) { return lstm.forward(in, lengths); },
                             [&](const Tensor<double>& dy) { return lstm.backward(dy); }, rng);
  EXPECT_LT(r.max_rel_error, 1e-3) << r.worst;
  EXPECT_GT(r.checked, 300u);
}

TEST(Lstm, TimeReversalSymmetry) {
  std::mt19937_64 rng(17);
  BiLstm<double> a(3, 4);
  a.init(rng);
  BiLstm<double> b(3, 4);
  b.forward_dir.w_input = a.backward_dir.w_input;
  b.forward_dir.w_hidden = a.backward_dir.w_hidden;
  b.forward_dir.bias = a.backward_dir.bias;
  b.backward_dir.w_input = a.forward_dir.w_input;
  b.backward_dir.w_hidden = a.forward_dir.w_hidden;
  b.backward_dir.bias = a.forward_dir.bias;

  const int t_len = 6;
  const auto x = random_tensor({t_len, 1, 3}, rng);
  Tensor<double> rev({t_len, 1, 3});
  for (int t = 0; t < t_len; ++t)
    for (int d = 0; d < 3; ++d) rev.data[t * 3 + d] = x.data[(t_len - 1 - t) * 3 + d];
  const auto ya = a.forward(x, {t_len});
  const auto yb = b.forward(rev, {t_len});
  for (int t = 0; t < t_len; ++t)
    for (int j = 0; j < 4; ++j) {
      const int s = t_len - 1 - t;
      EXPECT_EQ(yb.data[t * 8 + j], ya.data[s * 8 + 4 + j]);
      EXPECT_EQ(yb.data[t * 8 + 4 + j], ya.data[s * 8 + j]);
    }
}

TEST(Adam, DescendsOnQuadratic) {
  Tensor<double> w({1}, std::vector<double>{1.0});
  w.enable_grad();
  ParamList<double> params{{"w", &w}};
  Adam<double> adam(params, 0.0);
  double prev = 1.0;
  for (int i = 0; i < 200; ++i) {
    w.grad[0] = 2.0 * w.data[0];
    adam.step(params, 1e-3);
    EXPECT_LT(std::abs(w.data[0]), prev);
    prev = std::abs(w.data[0]);
  }
  EXPECT_EQ(adam.steps(), 200u);
}

TEST(Adam, DecoupledWeightDecayShrinksWithZeroGradient) {
  Tensor<double> w({1}, std::vector<double>{2.0});
  w.enable_grad();
  ParamList<double> params{{"w", &w}};
  Adam<double> adam(params, 0.1);
  adam.step(params, 0.5);
  EXPECT_DOUBLE_EQ(w.data[0], 2.0 * (1.0 - 0.05));
}

TEST(PlateauScheduler, HalvesAfterPatienceNonImprovingEpochs) {
  PlateauScheduler s(1e-4, 10, 0.5);
  s.step(1.0);
  for (int i = 0; i < 9; ++i) EXPECT_FALSE(s.step(1.0));
  EXPECT_DOUBLE_EQ(s.lr(), 1e-4);
  EXPECT_TRUE(s.step(1.5));
  EXPECT_DOUBLE_EQ(s.lr(), 5e-5);
  EXPECT_FALSE(s.step(0.5));
  EXPECT_EQ(s.bad_epochs(), 0);
}

TEST(TrainSchedule, DefaultsAndValidation) {
  TrainSchedule s;
  EXPECT_EQ(s.batch_size, 32);
  EXPECT_DOUBLE_EQ(s.learning_rate, 1e-4);
  EXPECT_DOUBLE_EQ(s.weight_decay, 1e-5);
  EXPECT_EQ(s.epoch_cap, 50);
  EXPECT_EQ(s.plateau_patience, 10);
  EXPECT_DOUBLE_EQ(s.plateau_factor, 0.5);
  EXPECT_DOUBLE_EQ(s.dropout_p, 0.5);
  EXPECT_NO_THROW(s.validate());
  s.plateau_factor = 1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(MseLoss, ValuesAndGradient) {
  EXPECT_EQ(mse_loss<double>({1, 2}, {1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(mse_loss<double>({0, 0}, {1, 1}), 1.0);
  std::vector<double> pred{0.3, -1.2, 2.0}, grad;
  const std::vector<double> target{0.1, 0.4, 1.0};
  mse_loss(pred, target, &grad);
  std::vector<GradTarget> t{{"pred", &pred, grad}};
  EXPECT_LT(grad_check([&] { return mse_loss(pred, target); }, t).max_rel_error, 1e-6);
}

TEST(Serialize, TensorRoundTrip) {
  std::mt19937_64 rng(18);
  const auto t = random_tensor({2, 3, 4}, rng);
  std::stringstream buf;
  ratingnet::util::BinaryWriter w(buf);
  write_tensor(w, "a", t, DType::F64);
  write_tensor(w, "b", t.cast<float>(), DType::F32);
  ratingnet::util::BinaryReader r(buf);
  const auto a = read_tensor(r);
  const auto b = read_tensor(r);
  EXPECT_EQ(a.name, "a");
  EXPECT_EQ(a.tensor.shape, t.shape);
  EXPECT_EQ(a.tensor.data, t.data);
  EXPECT_EQ(b.tensor.cast<float>().data, t.cast<float>().data);
}
