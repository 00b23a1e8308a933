#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ratingnet/features/encoder.hpp"
#include "ratingnet/model/config.hpp"
#include "ratingnet/nn/grad_check.hpp"
#include "ratingnet/nn/layers.hpp"
#include "ratingnet/nn/lstm.hpp"

namespace ratingnet::model {

/// A padded batch of encoded sequences. Real steps are stored sequence-major:
/// step t of sequence b is row offsets[b] + t of `planes`.
template <typename S>
struct Batch {
  std::vector<int> lengths;
  std::vector<int> offsets;
  int max_len = 0;
  nn::Tensor<S> planes;  // [steps, 12, 8, 8]
  std::vector<S> clock;
  std::vector<S> side;
  std::vector<S> targets;  // [batch, outputs], standardized
  bool has_targets = false;

  int size() const { return static_cast<int>(lengths.size()); }
  int steps() const { return static_cast<int>(clock.size()); }
  int last_row(int b) const { return offsets[b] + lengths[b] - 1; }
};

template <typename S>
Batch<S> make_batch(std::span<const features::EncodedSequence* const> seqs, int outputs) {
  if (seqs.empty()) throw std::invalid_argument("empty batch");
  Batch<S> batch;
  int total = 0;
  batch.has_targets = true;
  for (const auto* s : seqs) {
    if (s->steps.empty()) throw std::invalid_argument("sequence " + s->id + " has no steps");
    batch.offsets.push_back(total);
    batch.lengths.push_back(static_cast<int>(s->steps.size()));
    batch.max_len = std::max(batch.max_len, batch.lengths.back());
    total += batch.lengths.back();
    if (static_cast<int>(s->targets.size()) != outputs) batch.has_targets = false;
  }
  constexpr int kPlane = features::kBoardSize * features::kBoardSize;
  batch.planes = nn::Tensor<S>({total, features::kNumPlanes, features::kBoardSize, features::kBoardSize});
  batch.clock.reserve(total);
  batch.side.reserve(total);
  int row = 0;
  for (const auto* s : seqs)
    for (const auto& step : s->steps) {
      S* dst = batch.planes.data.data() + static_cast<std::size_t>(row) * features::kNumPlanes * kPlane;
      for (int p = 0; p < features::kNumPlanes; ++p) {
        auto mask = step.planes.planes[p];
        while (mask) {
          const int bit = std::countr_zero(mask);
          dst[p * kPlane + bit] = S(1);
          mask &= mask - 1;
        }
      }
      batch.clock.push_back(static_cast<S>(step.clock_z));
      batch.side.push_back(static_cast<S>(step.side_to_move));
      ++row;
    }
  batch.targets.assign(seqs.size() * outputs, S(0));
  if (batch.has_targets)
    for (std::size_t b = 0; b < seqs.size(); ++b)
      for (int o = 0; o < outputs; ++o) batch.targets[b * outputs + o] = static_cast<S>(seqs[b]->targets[o]);
  return batch;
}

/// Standardized MSE between per-step predictions [steps, outputs] and each
/// sequence's constant targets. Per-move mode averages over every real step;
/// final-step mode over the last step of each sequence only.
template <typename S>
S loss_game(const nn::Tensor<S>& pred, const Batch<S>& batch, LossMode mode, nn::Tensor<S>* grad = nullptr) {
  const int outputs = pred.dim(1);
  if (!batch.has_targets) throw std::invalid_argument("batch has no targets");
  const int terms = (mode == LossMode::PerMove ? batch.steps() : batch.size()) * outputs;
  if (grad) *grad = nn::Tensor<S>(pred.shape);
  S sum = 0;
  for (int b = 0; b < batch.size(); ++b) {
    const int first = mode == LossMode::PerMove ? batch.offsets[b] : batch.last_row(b);
    for (int row = first; row <= batch.last_row(b); ++row)
      for (int o = 0; o < outputs; ++o) {
        const S r = pred.data[static_cast<std::size_t>(row) * outputs + o] - batch.targets[b * outputs + o];
        sum += r * r;
        if (grad) grad->data[static_cast<std::size_t>(row) * outputs + o] = S(2) * r / static_cast<S>(terms);
      }
  }
  return sum / static_cast<S>(terms);
}

/// Number of squared residuals averaged by loss_game.
template <typename S>
int loss_terms(const Batch<S>& batch, LossMode mode, int outputs) {
  return (mode == LossMode::PerMove ? batch.steps() : batch.size()) * outputs;
}

/// CNN position embedding per step, concatenated with [clock, side], through a
/// BiLSTM and a two-layer head that emits standardized ratings at every step.
template <typename S>
class RatingNet {
 public:
  explicit RatingNet(RatingNetConfig cfg) : cfg_(std::move(cfg)), act_(cfg_.leaky_slope), dropout_(cfg_.schedule.dropout_p) {
    cfg_.validate();
    int in = features::kNumPlanes;
    for (std::size_t i = 0; i < cfg_.channels.size(); ++i) {
      blocks_.push_back(std::make_unique<Block>(in, cfg_.channels[i], cfg_.leaky_slope));
      in = cfg_.channels[i];
    }
    lstm_ = nn::BiLstm<S>(in + 2, cfg_.lstm_hidden);
    fc1_ = nn::Linear<S>(2 * cfg_.lstm_hidden, cfg_.fc_hidden);
    fc2_ = nn::Linear<S>(cfg_.fc_hidden, cfg_.outputs);

    std::mt19937_64 rng(cfg_.schedule.seed);
    for (auto& b : blocks_) b->conv.init(rng);
    lstm_.init(rng);
    fc1_.init(rng);
    fc2_.init(rng);
    if (cfg_.zero_head) fc2_.zero();
    dropout_rng_.seed(cfg_.schedule.seed ^ 0x9e3779b97f4a7c15ULL);
  }

  const RatingNetConfig& config() const { return cfg_; }
  int embedding_size() const { return cfg_.channels.back(); }
  std::mt19937_64& dropout_rng() { return dropout_rng_; }
  /// Gradient with respect to each step's clock input, from the last backward pass.
  const std::vector<S>& clock_grad() const { return clock_grad_; }

  nn::ParamList<S> parameters() {
    nn::ParamList<S> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const std::string p = "cnn." + std::to_string(i);
      blocks_[i]->conv.collect(out, p + ".conv");
      blocks_[i]->bn.collect(out, p + ".bn");
    }
    lstm_.collect(out, "lstm");
    fc1_.collect(out, "head.fc1");
    fc2_.collect(out, "head.fc2");
    return out;
  }

  /// Non-trainable state persisted with the weights.
  nn::ParamList<S> buffers() {
    nn::ParamList<S> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i]->bn.collect_buffers(out, "cnn." + std::to_string(i) + ".bn");
    return out;
  }

  /// Per-step standardized predictions, [batch.steps(), outputs].
  nn::Tensor<S> forward(const Batch<S>& batch, nn::Mode mode) {
    const int n = batch.steps(), t_len = batch.max_len, bsz = batch.size();
    // A single step cannot provide batch statistics; fall back to the running ones.
    const nn::Mode bn_mode = mode == nn::Mode::Train && n < 2 ? nn::Mode::Eval : mode;
    nn::Tensor<S> x = batch.planes;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      auto& blk = *blocks_[i];
      x = blk.act.forward(blk.bn.forward(blk.conv.forward(x), bn_mode));
      x = i + 1 == blocks_.size() ? blk.global.forward(x) : blk.pool.forward(x);
    }
    const int e = embedding_size(), d = e + 2;
    nn::Tensor<S> seq({t_len, bsz, d});
    for (int b = 0; b < bsz; ++b)
      for (int t = 0; t < batch.lengths[b]; ++t) {
        const int row = batch.offsets[b] + t;
        S* dst = seq.data.data() + (static_cast<std::size_t>(t) * bsz + b) * d;
        std::copy_n(x.data.data() + static_cast<std::size_t>(row) * e, e, dst);
        dst[e] = cfg_.clock_feature_enabled ? batch.clock[row] : S(0);
        dst[e + 1] = batch.side[row];
      }
    const auto h = lstm_.forward(seq, batch.lengths);
    const int h2 = 2 * cfg_.lstm_hidden;
    nn::Tensor<S> hs({n, h2});
    for (int b = 0; b < bsz; ++b)
      for (int t = 0; t < batch.lengths[b]; ++t)
        std::copy_n(h.data.data() + (static_cast<std::size_t>(t) * bsz + b) * h2, h2,
                    hs.data.data() + static_cast<std::size_t>(batch.offsets[b] + t) * h2);
    lengths_ = batch.lengths;
    offsets_ = batch.offsets;
    max_len_ = t_len;
    return fc2_.forward(dropout_.forward(act_.forward(fc1_.forward(hs)), mode, dropout_rng_));
  }

  /// Accumulates parameter gradients for the last forward pass.
  void backward(const nn::Tensor<S>& dout) {
    const auto dhs = fc1_.backward(act_.backward(dropout_.backward(fc2_.backward(dout))));
    const int bsz = static_cast<int>(lengths_.size()), h2 = 2 * cfg_.lstm_hidden;
    const int n = dhs.dim(0);
    nn::Tensor<S> dh({max_len_, bsz, h2});
    for (int b = 0; b < bsz; ++b)
      for (int t = 0; t < lengths_[b]; ++t)
        std::copy_n(dhs.data.data() + static_cast<std::size_t>(offsets_[b] + t) * h2, h2,
                    dh.data.data() + (static_cast<std::size_t>(t) * bsz + b) * h2);
    const auto dseq = lstm_.backward(dh);
    const int e = embedding_size(), d = e + 2;
    nn::Tensor<S> dx({n, e});
    clock_grad_.assign(n, S(0));
    for (int b = 0; b < bsz; ++b)
      for (int t = 0; t < lengths_[b]; ++t) {
        const S* src = dseq.data.data() + (static_cast<std::size_t>(t) * bsz + b) * d;
        std::copy_n(src, e, dx.data.data() + static_cast<std::size_t>(offsets_[b] + t) * e);
        if (cfg_.clock_feature_enabled) clock_grad_[offsets_[b] + t] = src[e];
      }
    for (std::size_t i = blocks_.size(); i-- > 0;) {
      auto& blk = *blocks_[i];
      dx = i + 1 == blocks_.size() ? blk.global.backward(dx) : blk.pool.backward(dx);
      dx = blk.conv.backward(blk.bn.backward(blk.act.backward(dx)), i > 0);
    }
  }

 private:
  struct Block {
    nn::Conv2d<S> conv;
    nn::BatchNorm2d<S> bn;
    nn::LeakyRelu<S> act;
    nn::MeanPool2d<S> pool;
    nn::GlobalMeanPool<S> global;
    Block(int in, int out, double slope) : conv(in, out), bn(out), act(slope) {}
  };

  RatingNetConfig cfg_;
  std::vector<std::unique_ptr<Block>> blocks_;
  nn::BiLstm<S> lstm_;
  nn::Linear<S> fc1_;
  nn::LeakyRelu<S> act_;
  nn::Dropout<S> dropout_;
  nn::Linear<S> fc2_;
  std::mt19937_64 dropout_rng_;
  std::vector<int> lengths_, offsets_;
  int max_len_ = 0;
  std::vector<S> clock_grad_;
};

/// Finite-difference check of a freshly initialized 64-bit network on the given
/// sequences, in training mode with a fixed dropout mask. Covers every parameter
/// and the clock inputs.
inline nn::GradCheckReport check_model_gradients(const RatingNetConfig& cfg,
                                                 const std::vector<features::EncodedSequence>& seqs,
                                                 const nn::GradCheckOptions& opt = {}) {
  RatingNet<double> net(cfg);
  std::vector<const features::EncodedSequence*> ptrs;
  for (const auto& s : seqs) ptrs.push_back(&s);
  auto batch = make_batch<double>(ptrs, cfg.outputs);
  const auto run = [&](nn::Tensor<double>* grad) {
    net.dropout_rng().seed(cfg.schedule.seed);
    return loss_game(net.forward(batch, nn::Mode::Train), batch, cfg.loss_mode, grad);
  };
  const auto params = net.parameters();
  nn::zero_grads(params);
  nn::Tensor<double> grad;
  run(&grad);
  net.backward(grad);
  std::vector<nn::GradTarget> targets;
  for (const auto& p : params) targets.push_back({p.name, &p.tensor->data, p.tensor->grad});
  targets.push_back({"input.clock", &batch.clock, net.clock_grad()});
  return nn::grad_check([&] { return run(nullptr); }, targets, opt);
}

}  // namespace ratingnet::model
