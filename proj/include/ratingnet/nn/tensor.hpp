#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ratingnet::nn {

enum class Mode { Train, Eval };

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Shape = std::vector<int>;

inline std::size_t numel(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

inline std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

/// Dense row-major tensor. `grad` is empty unless the tensor is a parameter.
template <typename S>
struct Tensor {
  Shape shape;
  std::vector<S> data;
  std::vector<S> grad;

  Tensor() = default;
  explicit Tensor(Shape s, S fill = S(0)) : shape(std::move(s)), data(numel(shape), fill) {}
  Tensor(Shape s, std::vector<S> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != numel(shape)) throw ShapeError("data size does not match shape " + shape_string(shape));
  }

  std::size_t size() const { return data.size(); }
  int dim(std::size_t i) const { return shape.at(i); }
  S& operator[](std::size_t i) { return data[i]; }
  const S& operator[](std::size_t i) const { return data[i]; }

  void enable_grad() { grad.assign(data.size(), S(0)); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), S(0)); }

  template <typename T>
  Tensor<T> cast() const {
    Tensor<T> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    if (!grad.empty()) out.grad.assign(grad.begin(), grad.end());
    return out;
  }
};

template <typename S>
using RowMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MatMap = Eigen::Map<RowMatrix<S>>;
template <typename S>
using ConstMatMap = Eigen::Map<const RowMatrix<S>>;

template <typename S>
MatMap<S> as_matrix(std::vector<S>& v, int rows, int cols) {
  return MatMap<S>(v.data(), rows, cols);
}
template <typename S>
ConstMatMap<S> as_matrix(const std::vector<S>& v, int rows, int cols) {
  return ConstMatMap<S>(v.data(), rows, cols);
}

/// grad[j] += sum over rows of m(i, j), accumulated row by row. Eigen's own
/// reductions pick their summation order from the buffer's alignment, which
/// would make training depend on where the allocator put things.
template <typename S, typename Mat>
void add_column_sums(std::vector<S>& grad, const Mat& m) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) grad[static_cast<std::size_t>(j)] += m(i, j);
}

/// A named trainable tensor, as exposed to optimizers and checkpoints.
template <typename S>
struct ParamRef {
  std::string name;
  Tensor<S>* tensor;
};

template <typename S>
using ParamList = std::vector<ParamRef<S>>;

inline void expect_rank(const Shape& s, std::size_t rank, const char* what) {
  if (s.size() != rank) throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " + shape_string(s));
}

}  // namespace ratingnet::nn
