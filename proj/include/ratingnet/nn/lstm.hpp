#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ratingnet/nn/layers.hpp"

namespace ratingnet::nn {

template <typename S>
inline S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

/// One LSTM direction over a padded time-major batch [T, B, D]. Gate order i, f, g, o.
/// Rows past their sequence length keep the previous state and emit zeros, so the
/// reverse direction starts at each sequence's own last step.
template <typename S>
class Lstm {
 public:
  Tensor<S> w_input;   // D x 4H
  Tensor<S> w_hidden;  // H x 4H
  Tensor<S> bias;      // 4H

  Lstm() = default;
  Lstm(int input_size, int hidden_size, bool reverse = false)
      : w_input({input_size, 4 * hidden_size}), w_hidden({hidden_size, 4 * hidden_size}), bias({4 * hidden_size}),
        reverse_(reverse) {
    if (input_size < 1 || hidden_size < 1) throw ShapeError("lstm needs positive sizes");
    w_input.enable_grad();
    w_hidden.enable_grad();
    bias.enable_grad();
  }

  int input_size() const { return w_input.dim(0); }
  int hidden_size() const { return w_hidden.dim(0); }
  bool reverse() const { return reverse_; }

  void init(std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size()));
    uniform_fill(w_input, bound, rng);
    uniform_fill(w_hidden, bound, rng);
    uniform_fill(bias, bound, rng);
    for (int j = 0; j < hidden_size(); ++j) bias.data[hidden_size() + j] += S(1);
  }

  void collect(ParamList<S>& out, const std::string& prefix) {
    out.push_back({prefix + ".w_input", &w_input});
    out.push_back({prefix + ".w_hidden", &w_hidden});
    out.push_back({prefix + ".bias", &bias});
  }

  Tensor<S> forward(const Tensor<S>& x, const std::vector<int>& lengths) {
    expect_rank(x.shape, 3, "lstm input");
    const int t_len = x.dim(0), batch = x.dim(1), d = x.dim(2), h = hidden_size(), g4 = 4 * h;
    if (d != input_size()) throw ShapeError("lstm: input width mismatch");
    if (static_cast<int>(lengths.size()) != batch) throw ShapeError("lstm: one length per batch row required");
    for (int len : lengths)
      if (len < 0 || len > t_len) throw ShapeError("lstm: sequence length out of range");
    input_ = x;
    lengths_ = lengths;

    // Input contribution for every step at once.
    pre_input_.resize(static_cast<Eigen::Index>(t_len) * batch, g4);
    pre_input_.noalias() = as_matrix(x.data, t_len * batch, d) * as_matrix(w_input.data, d, g4);
    pre_input_.rowwise() += as_matrix(bias.data, 1, g4).row(0);

    h_prev_.assign(static_cast<std::size_t>(t_len) * batch * h, S(0));
    c_prev_.assign(h_prev_.size(), S(0));
    tanh_c_.assign(h_prev_.size(), S(0));
    gates_.assign(static_cast<std::size_t>(t_len) * batch * g4, S(0));

    RowMatrix<S> hs = RowMatrix<S>::Zero(batch, h), cs = RowMatrix<S>::Zero(batch, h);
    Tensor<S> y({t_len, batch, h});
    const auto wh = as_matrix(w_hidden.data, h, g4);
    for (int s = 0; s < t_len; ++s) {
      const int t = reverse_ ? t_len - 1 - s : s;
      const RowMatrix<S> pre = pre_input_.middleRows(static_cast<Eigen::Index>(t) * batch, batch) + hs * wh;
      for (int b = 0; b < batch; ++b) {
        const std::size_t row = static_cast<std::size_t>(t) * batch + b;
        for (int j = 0; j < h; ++j) {
          h_prev_[row * h + j] = hs(b, j);
          c_prev_[row * h + j] = cs(b, j);
        }
        if (t >= lengths[b]) continue;
        S* gate = gates_.data() + row * g4;
        for (int j = 0; j < h; ++j) {
          const S i = sigmoid(pre(b, j));
          const S f = sigmoid(pre(b, h + j));
          const S g = std::tanh(pre(b, 2 * h + j));
          const S o = sigmoid(pre(b, 3 * h + j));
          gate[j] = i;
          gate[h + j] = f;
          gate[2 * h + j] = g;
          gate[3 * h + j] = o;
          const S c = f * cs(b, j) + i * g;
          const S tc = std::tanh(c);
          tanh_c_[row * h + j] = tc;
          cs(b, j) = c;
          hs(b, j) = o * tc;
          y.data[row * h + j] = hs(b, j);
        }
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    const int t_len = input_.dim(0), batch = input_.dim(1), d = input_.dim(2), h = hidden_size(), g4 = 4 * h;
    if (dy.shape != Shape{t_len, batch, h}) throw ShapeError("lstm backward: gradient shape mismatch");
    RowMatrix<S> dgates = RowMatrix<S>::Zero(static_cast<Eigen::Index>(t_len) * batch, g4);
    RowMatrix<S> dh = RowMatrix<S>::Zero(batch, h), dc = RowMatrix<S>::Zero(batch, h);
    const auto wh = as_matrix(w_hidden.data, h, g4);
    auto dwh = as_matrix(w_hidden.grad, h, g4);

    for (int s = t_len - 1; s >= 0; --s) {
      const int t = reverse_ ? t_len - 1 - s : s;
      bool any = false;
      for (int b = 0; b < batch; ++b) {
        if (t >= lengths_[b]) continue;
        any = true;
        const std::size_t row = static_cast<std::size_t>(t) * batch + b;
        const S* gate = gates_.data() + row * g4;
        for (int j = 0; j < h; ++j) {
          const S i = gate[j], f = gate[h + j], g = gate[2 * h + j], o = gate[3 * h + j];
          const S tc = tanh_c_[row * h + j];
          const S dht = dh(b, j) + dy.data[row * h + j];
          const S dct = dc(b, j) + dht * o * (S(1) - tc * tc);
          dgates(static_cast<Eigen::Index>(row), j) = dct * g * i * (S(1) - i);
          dgates(static_cast<Eigen::Index>(row), h + j) = dct * c_prev_[row * h + j] * f * (S(1) - f);
          dgates(static_cast<Eigen::Index>(row), 2 * h + j) = dct * i * (S(1) - g * g);
          dgates(static_cast<Eigen::Index>(row), 3 * h + j) = dht * tc * o * (S(1) - o);
          dc(b, j) = dct * f;
        }
      }
      if (!any) continue;
      const auto dg_t = dgates.middleRows(static_cast<Eigen::Index>(t) * batch, batch);
      const auto hp = as_matrix(h_prev_, t_len * batch, h).middleRows(static_cast<Eigen::Index>(t) * batch, batch);
      dwh.noalias() += hp.transpose() * dg_t;
      const RowMatrix<S> dh_prev = dg_t * wh.transpose();
      for (int b = 0; b < batch; ++b)
        if (t < lengths_[b]) dh.row(b) = dh_prev.row(b);
    }

    as_matrix(w_input.grad, d, g4).noalias() += as_matrix(input_.data, t_len * batch, d).transpose() * dgates;
    add_column_sums(bias.grad, dgates);
    Tensor<S> dx({t_len, batch, d});
    as_matrix(dx.data, t_len * batch, d).noalias() = dgates * as_matrix(w_input.data, d, g4).transpose();
    return dx;
  }

 private:
  bool reverse_ = false;
  Tensor<S> input_;
  std::vector<int> lengths_;
  RowMatrix<S> pre_input_;
  std::vector<S> h_prev_, c_prev_, tanh_c_, gates_;
};

/// Forward and reverse LSTMs; per-step output is [h_forward, h_backward].
template <typename S>
class BiLstm {
 public:
  Lstm<S> forward_dir;
  Lstm<S> backward_dir;

  BiLstm() = default;
  BiLstm(int input_size, int hidden_size)
      : forward_dir(input_size, hidden_size, false), backward_dir(input_size, hidden_size, true) {}

  int hidden_size() const { return forward_dir.hidden_size(); }

  void init(std::mt19937_64& rng) {
    forward_dir.init(rng);
    backward_dir.init(rng);
  }

  void collect(ParamList<S>& out, const std::string& prefix) {
    forward_dir.collect(out, prefix + ".fwd");
    backward_dir.collect(out, prefix + ".bwd");
  }

  Tensor<S> forward(const Tensor<S>& x, const std::vector<int>& lengths) {
    const auto a = forward_dir.forward(x, lengths);
    const auto b = backward_dir.forward(x, lengths);
    const int rows = x.dim(0) * x.dim(1), h = hidden_size();
    Tensor<S> y({x.dim(0), x.dim(1), 2 * h});
    auto ym = as_matrix(y.data, rows, 2 * h);
    ym.leftCols(h) = as_matrix(a.data, rows, h);
    ym.rightCols(h) = as_matrix(b.data, rows, h);
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    const int t_len = dy.dim(0), batch = dy.dim(1), rows = t_len * batch, h = hidden_size();
    Tensor<S> da({t_len, batch, h}), db({t_len, batch, h});
    const auto g = as_matrix(dy.data, rows, 2 * h);
    as_matrix(da.data, rows, h) = g.leftCols(h);
    as_matrix(db.data, rows, h) = g.rightCols(h);
    auto dx = forward_dir.backward(da);
    const auto dx2 = backward_dir.backward(db);
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += dx2.data[i];
    return dx;
  }
};

}  // namespace ratingnet::nn
