#pragma once

#include <array>
#include <bit>
#include <cstdint>

#include "ratingnet/chess/position.hpp"

namespace ratingnet::features {

inline constexpr int kNumPlanes = 12;
inline constexpr int kBoardSize = 8;

/// 12 binary 8x8 occupancy planes, white P N B R Q K then black p n b r q k.
/// Each plane is a 64-bit mask; bit (rank * 8 + file), rank 0 is white's back rank.
struct PlaneStack {
  std::array<std::uint64_t, kNumPlanes> planes{};

  static constexpr int plane_index(chess::Color c, chess::PieceKind k) {
    return static_cast<int>(c) * 6 + static_cast<int>(k);
  }

  bool at(int plane, int rank, int file) const { return (planes[plane] >> (rank * 8 + file)) & 1u; }
  int count() const {
    int n = 0;
    for (auto p : planes) n += std::popcount(p);
    return n;
  }

  friend bool operator==(const PlaneStack&, const PlaneStack&) = default;
};

PlaneStack encode_planes(const chess::Position& pos);

}  // namespace ratingnet::features
