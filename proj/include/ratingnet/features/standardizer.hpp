#pragma once

#include <stdexcept>

namespace ratingnet::features {

/// Affine (x - mean) / std transform. std is always positive.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(double mean, double std) : mean_(mean), std_(std) {
    if (!(std > 0.0)) throw std::invalid_argument("standardizer std must be positive");
  }

  double mean() const { return mean_; }
  double std() const { return std_; }

  double standardize(double x) const { return (x - mean_) / std_; }
  double destandardize(double z) const { return z * std_ + mean_; }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  double mean_ = 0.0;
  double std_ = 1.0;
};

/// Rating constants of the reference Lichess corpus.
inline const Standardizer kDefaultRatingStandardizer{1514.0, 366.0};

}  // namespace ratingnet::features
