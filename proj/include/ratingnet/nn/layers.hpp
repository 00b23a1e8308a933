#pragma once

#include <cmath>
#include <random>
#include <string>

#include "ratingnet/nn/tensor.hpp"

namespace ratingnet::nn {

template <typename S>
void uniform_fill(Tensor<S>& t, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.data) v = static_cast<S>(dist(rng));
}

/// Square-kernel 2-D cross-correlation, stride 1, "same" zero padding. NCHW layout.
template <typename S>
class Conv2d {
 public:
  Tensor<S> weight;  // O x C x k x k
  Tensor<S> bias;    // O

  Conv2d() = default;
  Conv2d(int in_channels, int out_channels, int kernel = 3)
      : weight({out_channels, in_channels, kernel, kernel}), bias({out_channels}) {
    if (in_channels < 1 || out_channels < 1 || kernel < 1 || kernel % 2 == 0)
      throw ShapeError("conv2d needs positive widths and an odd kernel");
    weight.enable_grad();
    bias.enable_grad();
  }

  int in_channels() const { return weight.dim(1); }
  int out_channels() const { return weight.dim(0); }
  int kernel() const { return weight.dim(2); }

  void init(std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels() * kernel() * kernel()));
    uniform_fill(weight, bound, rng);
    uniform_fill(bias, bound, rng);
  }

  void collect(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight});
    out.push_back({prefix + ".bias", &bias});
  }

  Tensor<S> forward(const Tensor<S>& x) {
    expect_rank(x.shape, 4, "conv2d input");
    if (x.dim(1) != in_channels())
      throw ShapeError("conv2d: input has " + std::to_string(x.dim(1)) + " channels, layer expects " +
                       std::to_string(in_channels()));
    in_shape_ = x.shape;
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3), k = kernel(), pad = k / 2;
    const int o = out_channels(), patch = c * k * k;
    cols_.setZero(static_cast<Eigen::Index>(n) * h * w, patch);
    for (int b = 0; b < n; ++b)
      for (int ch = 0; ch < c; ++ch) {
        const S* plane = x.data.data() + (static_cast<std::size_t>(b) * c + ch) * h * w;
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const int col = (ch * k + ky) * k + kx;
            for (int y = 0; y < h; ++y) {
              const int iy = y + ky - pad;
              if (iy < 0 || iy >= h) continue;
              for (int xx = 0; xx < w; ++xx) {
                const int ix = xx + kx - pad;
                if (ix < 0 || ix >= w) continue;
                cols_((static_cast<Eigen::Index>(b) * h + y) * w + xx, col) = plane[iy * w + ix];
              }
            }
          }
      }
    const auto wm = as_matrix(weight.data, o, patch);
    RowMatrix<S> rows = cols_ * wm.transpose();
    Tensor<S> y({n, o, h, w});
    const int hw = h * w;
    for (int b = 0; b < n; ++b)
      for (int p = 0; p < hw; ++p)
        for (int oc = 0; oc < o; ++oc)
          y.data[(static_cast<std::size_t>(b) * o + oc) * hw + p] = rows(static_cast<Eigen::Index>(b) * hw + p, oc) + bias.data[oc];
    return y;
  }

  /// With `input_grad` false only parameter gradients are accumulated and an empty tensor is returned.
  Tensor<S> backward(const Tensor<S>& dy, bool input_grad = true) {
    const int n = in_shape_[0], c = in_shape_[1], h = in_shape_[2], w = in_shape_[3], k = kernel(), pad = k / 2;
    const int o = out_channels(), patch = c * k * k, hw = h * w;
    if (dy.shape != Shape{n, o, h, w}) throw ShapeError("conv2d backward: gradient shape mismatch");
    RowMatrix<S> drows(static_cast<Eigen::Index>(n) * hw, o);
    for (int b = 0; b < n; ++b)
      for (int oc = 0; oc < o; ++oc)
        for (int p = 0; p < hw; ++p) drows(static_cast<Eigen::Index>(b) * hw + p, oc) = dy.data[(static_cast<std::size_t>(b) * o + oc) * hw + p];

    as_matrix(weight.grad, o, patch).noalias() += drows.transpose() * cols_;
    add_column_sums(bias.grad, drows);
    if (!input_grad) return {};

    const RowMatrix<S> dcols = drows * as_matrix(weight.data, o, patch);
    Tensor<S> dx(in_shape_);
    for (int b = 0; b < n; ++b)
      for (int ch = 0; ch < c; ++ch) {
        S* plane = dx.data.data() + (static_cast<std::size_t>(b) * c + ch) * hw;
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const int col = (ch * k + ky) * k + kx;
            for (int y = 0; y < h; ++y) {
              const int iy = y + ky - pad;
              if (iy < 0 || iy >= h) continue;
              for (int xx = 0; xx < w; ++xx) {
                const int ix = xx + kx - pad;
                if (ix < 0 || ix >= w) continue;
                plane[iy * w + ix] += dcols((static_cast<Eigen::Index>(b) * h + y) * w + xx, col);
              }
            }
          }
      }
    return dx;
  }

 private:
  Shape in_shape_;
  RowMatrix<S> cols_;  // im2col patches, (N*H*W) x (C*k*k)
};

/// Per-channel normalization over (N, H, W).
template <typename S>
class BatchNorm2d {
 public:
  Tensor<S> gamma;
  Tensor<S> beta;
  Tensor<S> running_mean;
  Tensor<S> running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  BatchNorm2d() = default;
  explicit BatchNorm2d(int channels)
      : gamma({channels}, S(1)), beta({channels}), running_mean({channels}), running_var({channels}, S(1)) {
    gamma.enable_grad();
    beta.enable_grad();
  }

  int channels() const { return gamma.dim(0); }

  void collect(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".gamma", &gamma});
    out.push_back({prefix + ".beta", &beta});
  }
  /// Running statistics: persisted with the model, never optimized.
  void collect_buffers(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".running_mean", &running_mean});
    out.push_back({prefix + ".running_var", &running_var});
  }

  Tensor<S> forward(const Tensor<S>& x, Mode mode) {
    expect_rank(x.shape, 4, "batchnorm input");
    const int n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
    if (c != channels()) throw ShapeError("batchnorm: channel mismatch");
    if (mode == Mode::Train && n < 2) throw ShapeError("batchnorm needs a batch of at least 2 in training mode");
    mode_ = mode;
    in_shape_ = x.shape;
    xhat_ = Tensor<S>(x.shape);
    inv_std_.assign(c, S(0));
    Tensor<S> y(x.shape);
    const double count = static_cast<double>(n) * hw;
    for (int ch = 0; ch < c; ++ch) {
      double mean, var;
      if (mode == Mode::Train) {
        double sum = 0.0;
        for (int b = 0; b < n; ++b)
          for (int p = 0; p < hw; ++p) sum += x.data[(static_cast<std::size_t>(b) * c + ch) * hw + p];
        mean = sum / count;
        double sq = 0.0;
        for (int b = 0; b < n; ++b)
          for (int p = 0; p < hw; ++p) {
            const double d = x.data[(static_cast<std::size_t>(b) * c + ch) * hw + p] - mean;
            sq += d * d;
          }
        var = sq / count;
        running_mean.data[ch] = static_cast<S>((1.0 - momentum) * running_mean.data[ch] + momentum * mean);
        const double unbiased = count > 1 ? var * count / (count - 1.0) : var;
        running_var.data[ch] = static_cast<S>((1.0 - momentum) * running_var.data[ch] + momentum * unbiased);
      } else {
        mean = running_mean.data[ch];
        var = running_var.data[ch];
      }
      const S inv = static_cast<S>(1.0 / std::sqrt(var + eps));
      inv_std_[ch] = inv;
      const S m = static_cast<S>(mean);
      for (int b = 0; b < n; ++b)
        for (int p = 0; p < hw; ++p) {
          const std::size_t i = (static_cast<std::size_t>(b) * c + ch) * hw + p;
          xhat_.data[i] = (x.data[i] - m) * inv;
          y.data[i] = gamma.data[ch] * xhat_.data[i] + beta.data[ch];
        }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    if (dy.shape != in_shape_) throw ShapeError("batchnorm backward: gradient shape mismatch");
    const int n = in_shape_[0], c = in_shape_[1], hw = in_shape_[2] * in_shape_[3];
    const S count = static_cast<S>(n * hw);
    Tensor<S> dx(in_shape_);
    for (int ch = 0; ch < c; ++ch) {
      S sum_dy = 0, sum_dy_xhat = 0;
      for (int b = 0; b < n; ++b)
        for (int p = 0; p < hw; ++p) {
          const std::size_t i = (static_cast<std::size_t>(b) * c + ch) * hw + p;
          sum_dy += dy.data[i];
          sum_dy_xhat += dy.data[i] * xhat_.data[i];
        }
      gamma.grad[ch] += sum_dy_xhat;
      beta.grad[ch] += sum_dy;
      const S g = gamma.data[ch] * inv_std_[ch];
      for (int b = 0; b < n; ++b)
        for (int p = 0; p < hw; ++p) {
          const std::size_t i = (static_cast<std::size_t>(b) * c + ch) * hw + p;
          if (mode_ == Mode::Train)
            dx.data[i] = g * (dy.data[i] - sum_dy / count - xhat_.data[i] * sum_dy_xhat / count);
          else
            dx.data[i] = g * dy.data[i];
        }
    }
    return dx;
  }

 private:
  Mode mode_ = Mode::Train;
  Shape in_shape_;
  Tensor<S> xhat_;
  std::vector<S> inv_std_;
};

/// 2x2 mean pooling with stride 2.
template <typename S>
class MeanPool2d {
 public:
  Tensor<S> forward(const Tensor<S>& x) {
    expect_rank(x.shape, 4, "mean pool input");
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    if (h % 2 || w % 2) throw ShapeError("mean pool needs even spatial dims, got " + shape_string(x.shape));
    in_shape_ = x.shape;
    Tensor<S> y({n, c, h / 2, w / 2});
    for (std::size_t plane = 0; plane < static_cast<std::size_t>(n) * c; ++plane) {
      const S* in = x.data.data() + plane * h * w;
      S* out = y.data.data() + plane * (h / 2) * (w / 2);
      for (int oy = 0; oy < h / 2; ++oy)
        for (int ox = 0; ox < w / 2; ++ox)
          out[oy * (w / 2) + ox] = (in[2 * oy * w + 2 * ox] + in[2 * oy * w + 2 * ox + 1] + in[(2 * oy + 1) * w + 2 * ox] +
                                    in[(2 * oy + 1) * w + 2 * ox + 1]) / S(4);
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    const int n = in_shape_[0], c = in_shape_[1], h = in_shape_[2], w = in_shape_[3];
    Tensor<S> dx(in_shape_);
    for (std::size_t plane = 0; plane < static_cast<std::size_t>(n) * c; ++plane) {
      const S* g = dy.data.data() + plane * (h / 2) * (w / 2);
      S* out = dx.data.data() + plane * h * w;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out[y * w + x] = g[(y / 2) * (w / 2) + x / 2] / S(4);
    }
    return dx;
  }

 private:
  Shape in_shape_;
};

/// N x C x H x W -> N x C spatial mean.
template <typename S>
class GlobalMeanPool {
 public:
  Tensor<S> forward(const Tensor<S>& x) {
    expect_rank(x.shape, 4, "global pool input");
    in_shape_ = x.shape;
    const int n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
    Tensor<S> y({n, c});
    for (std::size_t plane = 0; plane < static_cast<std::size_t>(n) * c; ++plane) {
      S sum = 0;
      for (int p = 0; p < hw; ++p) sum += x.data[plane * hw + p];
      y.data[plane] = sum / static_cast<S>(hw);
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    const int hw = in_shape_[2] * in_shape_[3];
    Tensor<S> dx(in_shape_);
    for (std::size_t plane = 0; plane < dy.size(); ++plane)
      for (int p = 0; p < hw; ++p) dx.data[plane * hw + p] = dy.data[plane] / static_cast<S>(hw);
    return dx;
  }

 private:
  Shape in_shape_;
};

template <typename S>
class LeakyRelu {
 public:
  explicit LeakyRelu(double slope = 0.01) : slope_(static_cast<S>(slope)) {
    if (!(slope > 0.0 && slope < 1.0)) throw std::invalid_argument("leaky relu slope must be in (0, 1)");
  }

  Tensor<S> forward(const Tensor<S>& x) {
    input_ = x;
    Tensor<S> y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] >= S(0) ? x.data[i] : slope_ * x.data[i];
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    Tensor<S> dx(dy.shape);
    for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = input_.data[i] >= S(0) ? dy.data[i] : slope_ * dy.data[i];
    return dx;
  }

 private:
  S slope_;
  Tensor<S> input_;
};

/// Inverted dropout: survivors are scaled by 1/(1-p) in training mode.
template <typename S>
class Dropout {
 public:
  explicit Dropout(double p = 0.5) : p_(p) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout probability must be in [0, 1)");
  }

  double p() const { return p_; }

  Tensor<S> forward(const Tensor<S>& x, Mode mode, std::mt19937_64& rng) {
    active_ = mode == Mode::Train && p_ > 0.0;
    if (!active_) return x;
    const S scale = static_cast<S>(1.0 / (1.0 - p_));
    mask_.assign(x.size(), S(0));
    Tensor<S> y(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) {
      // 53 random bits -> uniform in [0, 1), independent of the library's distributions.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      mask_[i] = u < p_ ? S(0) : scale;
      y.data[i] = x.data[i] * mask_[i];
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    if (!active_) return dy;
    Tensor<S> dx(dy.shape);
    for (std::size_t i = 0; i < dy.size(); ++i) dx.data[i] = dy.data[i] * mask_[i];
    return dx;
  }

 private:
  double p_;
  bool active_ = false;
  std::vector<S> mask_;
};

/// y = x W + b with W stored in_features x out_features.
template <typename S>
class Linear {
 public:
  Tensor<S> weight;
  Tensor<S> bias;

  Linear() = default;
  Linear(int in_features, int out_features) : weight({in_features, out_features}), bias({out_features}) {
    if (in_features < 1 || out_features < 1) throw ShapeError("linear layer needs positive widths");
    weight.enable_grad();
    bias.enable_grad();
  }

  int in_features() const { return weight.dim(0); }
  int out_features() const { return weight.dim(1); }

  void init(std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_features()));
    uniform_fill(weight, bound, rng);
    uniform_fill(bias, bound, rng);
  }
  void zero() {
    std::fill(weight.data.begin(), weight.data.end(), S(0));
    std::fill(bias.data.begin(), bias.data.end(), S(0));
  }

  void collect(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".weight", &weight});
    out.push_back({prefix + ".bias", &bias});
  }

  Tensor<S> forward(const Tensor<S>& x) {
    expect_rank(x.shape, 2, "linear input");
    if (x.dim(1) != in_features()) throw ShapeError("linear: input width mismatch");
    input_ = x;
    const int n = x.dim(0), out = out_features();
    Tensor<S> y({n, out});
    auto ym = as_matrix(y.data, n, out);
    ym.noalias() = as_matrix(x.data, n, in_features()) * as_matrix(weight.data, in_features(), out);
    ym.rowwise() += as_matrix(bias.data, 1, out).row(0);
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    const int n = input_.dim(0), in = in_features(), out = out_features();
    if (dy.shape != Shape{n, out}) throw ShapeError("linear backward: gradient shape mismatch");
    const auto g = as_matrix(dy.data, n, out);
    as_matrix(weight.grad, in, out).noalias() += as_matrix(input_.data, n, in).transpose() * g;
    add_column_sums(bias.grad, g);
    Tensor<S> dx({n, in});
    as_matrix(dx.data, n, in).noalias() = g * as_matrix(weight.data, in, out).transpose();
    return dx;
  }

 private:
  Tensor<S> input_;
};

}  // namespace ratingnet::nn
