#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ratingnet/chess/move.hpp"
#include "ratingnet/chess/types.hpp"

namespace ratingnet::chess {

struct CastlingRights {
  bool white_kingside = false;
  bool white_queenside = false;
  bool black_kingside = false;
  bool black_queenside = false;

  friend bool operator==(const CastlingRights&, const CastlingRights&) = default;
};

using Board = std::array<std::optional<Piece>, 64>;

enum class GameStatus { Ongoing, Checkmate, Stalemate };

/// Immutable chess position. All instances satisfy the structural invariants
/// checked in create(): one king per colour, no pawns on the back ranks, a
/// consistent en-passant square and the side not to move not in check.
class Position {
 public:
  static Position initial();

  /// Throws FenError when the parts violate a position invariant.
  static Position create(const Board& board, Color side_to_move, CastlingRights castling,
                         std::optional<Square> en_passant, int halfmove_clock, int fullmove_number);

  std::optional<Piece> piece_at(Square sq) const;
  Color side_to_move() const { return side_; }
  CastlingRights castling() const { return castling_; }
  std::optional<Square> en_passant() const { return en_passant_; }
  int halfmove_clock() const { return halfmove_; }
  int fullmove_number() const { return fullmove_; }

  Square king_square(Color c) const;
  bool is_attacked(Square sq, Color by) const;
  bool in_check() const { return is_attacked(king_square(side_), opposite(side_)); }

  /// Plays a move produced by legal_moves(). No legality check is done here;
  /// use apply_san / apply_uci for untrusted input.
  Position play(const Move& m) const;

  friend bool operator==(const Position&, const Position&) = default;

 private:
  Position() = default;

  // 0 = empty, otherwise 1 + color * 6 + kind.
  std::array<std::uint8_t, 64> cells_{};
  Color side_ = Color::White;
  CastlingRights castling_;
  std::optional<Square> en_passant_;
  int halfmove_ = 0;
  int fullmove_ = 1;

  friend std::vector<Move> pseudo_legal_moves(const Position& pos);
};

std::vector<Move> pseudo_legal_moves(const Position& pos);

/// Every move legal under FIDE rules (castling, en passant, promotion, check).
std::vector<Move> legal_moves(const Position& pos);

/// Leaf count of the legal move tree at exactly `depth` plies.
std::uint64_t perft(const Position& pos, int depth);

GameStatus game_status(const Position& pos);

}  // namespace ratingnet::chess
