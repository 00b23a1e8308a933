#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ratingnet/nn/tensor.hpp"
#include "ratingnet/util/binary_io.hpp"

namespace ratingnet::nn {

enum class DType : std::uint8_t { F32 = 0, F64 = 1 };

/// name, dtype, rank, dims, then little-endian values.
template <typename S>
void write_tensor(util::BinaryWriter& w, const std::string& name, const Tensor<S>& t, DType dtype = DType::F32) {
  w.put_string(name);
  w.put(static_cast<std::uint8_t>(dtype));
  w.put(static_cast<std::uint32_t>(t.shape.size()));
  for (int d : t.shape) w.put(static_cast<std::uint32_t>(d));
  for (S v : t.data) {
    if (dtype == DType::F32)
      w.put_f32(static_cast<float>(v));
    else
      w.put_f64(static_cast<double>(v));
  }
}

struct NamedTensor {
  std::string name;
  Tensor<double> tensor;
};

inline NamedTensor read_tensor(util::BinaryReader& r) {
  NamedTensor out;
  out.name = r.get_string(4096);
  const auto dtype = r.get<std::uint8_t>();
  if (dtype > 1) throw std::runtime_error("tensor " + out.name + ": unknown dtype");
  const auto rank = r.get<std::uint32_t>();
  if (rank > 8) throw std::runtime_error("tensor " + out.name + ": rank out of range");
  Shape shape;
  for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(static_cast<int>(r.get<std::uint32_t>()));
  const std::size_t n = numel(shape);
  if (n > (std::size_t{1} << 32)) throw std::runtime_error("tensor " + out.name + ": too large");
  out.tensor = Tensor<double>(shape);
  for (auto& v : out.tensor.data) v = dtype == 0 ? static_cast<double>(r.get_f32()) : r.get_f64();
  return out;
}

}  // namespace ratingnet::nn
