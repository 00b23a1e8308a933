#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ratingnet/chess/types.hpp"

namespace ratingnet::chess {

struct Move {
  enum Flag : std::uint8_t {
    kNone = 0,
    kCapture = 1 << 0,
    kKingsideCastle = 1 << 1,
    kQueensideCastle = 1 << 2,
    kEnPassant = 1 << 3,
    kDoublePush = 1 << 4,
  };

  Square from;
  Square to;
  PieceKind piece = PieceKind::Pawn;
  std::optional<PieceKind> promotion;
  std::uint8_t flags = kNone;

  bool is_capture() const { return (flags & kCapture) != 0; }
  bool is_castle() const { return (flags & (kKingsideCastle | kQueensideCastle)) != 0; }
  bool is_en_passant() const { return (flags & kEnPassant) != 0; }
  bool is_double_push() const { return (flags & kDoublePush) != 0; }

  /// UCI long algebraic form, e.g. "e2e4", "e7e8q".
  std::string uci() const;

  friend bool operator==(const Move&, const Move&) = default;
};

}  // namespace ratingnet::chess
