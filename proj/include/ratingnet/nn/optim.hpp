#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ratingnet/nn/tensor.hpp"

namespace ratingnet::nn {

struct TrainSchedule {
  double learning_rate = 1e-4;
  double weight_decay = 1e-5;
  int plateau_patience = 10;
  double plateau_factor = 0.5;
  int epoch_cap = 50;
  int batch_size = 32;
  double dropout_p = 0.5;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be non-negative");
    if (plateau_patience < 1) throw std::invalid_argument("plateau patience must be at least 1");
    if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) throw std::invalid_argument("plateau factor must be in (0, 1)");
    if (epoch_cap < 1) throw std::invalid_argument("epoch cap must be at least 1");
    if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
    if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw std::invalid_argument("dropout must be in [0, 1)");
  }

  friend bool operator==(const TrainSchedule&, const TrainSchedule&) = default;
};

/// Adam with decoupled weight decay. Moments are indexed like the parameter list.
template <typename S>
class Adam {
 public:
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;

  Adam() = default;
  Adam(const ParamList<S>& params, double weight_decay_) : weight_decay(weight_decay_) { reset(params); }

  void reset(const ParamList<S>& params) {
    m_.clear();
    v_.clear();
    for (const auto& p : params) {
      m_.emplace_back(p.tensor->size(), 0.0);
      v_.emplace_back(p.tensor->size(), 0.0);
    }
    step_ = 0;
  }

  void step(const ParamList<S>& params, double lr) {
    if (params.size() != m_.size()) throw std::logic_error("adam: parameter list changed");
    ++step_;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto& t = *params[k].tensor;
      auto& m = m_[k];
      auto& v = v_[k];
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double g = t.grad[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        double w = t.data[i];
        w -= lr * weight_decay * w;
        w -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        t.data[i] = static_cast<S>(w);
      }
    }
  }

  std::uint64_t steps() const { return step_; }
  std::vector<std::vector<double>>& first_moments() { return m_; }
  std::vector<std::vector<double>>& second_moments() { return v_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }
  void set_steps(std::uint64_t s) { step_ = s; }

 private:
  std::vector<std::vector<double>> m_, v_;
  std::uint64_t step_ = 0;
};

template <typename S>
void zero_grads(const ParamList<S>& params) {
  for (const auto& p : params) p.tensor->zero_grad();
}

/// Multiplies the learning rate by `factor` once the monitored loss has failed
/// to improve on its best value for `patience` consecutive epochs.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr, int patience, double factor) : lr_(lr), patience_(patience), factor_(factor) {}

  /// Returns true when the learning rate was reduced.
  bool step(double loss) {
    if (loss < best_) {
      best_ = loss;
      bad_epochs_ = 0;
      return false;
    }
    if (++bad_epochs_ >= patience_) {
      lr_ *= factor_;
      bad_epochs_ = 0;
      return true;
    }
    return false;
  }

  double lr() const { return lr_; }
  double best() const { return best_; }
  int bad_epochs() const { return bad_epochs_; }
  void restore(double lr, double best, int bad_epochs) {
    lr_ = lr;
    best_ = best;
    bad_epochs_ = bad_epochs;
  }

 private:
  double lr_;
  int patience_;
  double factor_;
  double best_ = std::numeric_limits<double>::infinity();
  int bad_epochs_ = 0;
};

/// Mean of squared residuals and its gradient with respect to `pred`.
template <typename S>
S mse_loss(const std::vector<S>& pred, const std::vector<S>& target, std::vector<S>* grad = nullptr) {
  if (pred.size() != target.size()) throw ShapeError("mse: size mismatch");
  if (pred.empty()) throw ShapeError("mse: empty input");
  const S n = static_cast<S>(pred.size());
  S sum = 0;
  if (grad) grad->assign(pred.size(), S(0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const S r = pred[i] - target[i];
    sum += r * r;
    if (grad) (*grad)[i] = S(2) * r / n;
  }
  return sum / n;
}

}  // namespace ratingnet::nn
