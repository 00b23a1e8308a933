#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ratingnet::chess {

enum class Color : std::uint8_t { White = 0, Black = 1 };

constexpr Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

enum class PieceKind : std::uint8_t { Pawn = 0, Knight, Bishop, Rook, Queen, King };

struct Piece {
  Color color;
  PieceKind kind;

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// FEN letter for a piece: uppercase for white, lowercase for black.
char piece_to_char(Piece p);
std::optional<Piece> piece_from_char(char c);

/// Board square, file 0-7 (a-h) and rank 0-7 (1-8). Index is rank * 8 + file.
class Square {
 public:
  constexpr Square() = default;

  static constexpr Square from_index(int index) {
    if (index < 0 || index > 63) throw std::out_of_range("square index out of range");
    return Square(static_cast<std::uint8_t>(index));
  }
  static constexpr Square at(int file, int rank) {
    if (file < 0 || file > 7 || rank < 0 || rank > 7) throw std::out_of_range("square coordinates out of range");
    return Square(static_cast<std::uint8_t>(rank * 8 + file));
  }
  /// Parses "e4"; nullopt on anything else.
  static std::optional<Square> parse(std::string_view text);

  constexpr int index() const { return index_; }
  constexpr int file() const { return index_ & 7; }
  constexpr int rank() const { return index_ >> 3; }
  std::string to_string() const;

  friend constexpr bool operator==(Square, Square) = default;

 private:
  constexpr explicit Square(std::uint8_t index) : index_(index) {}
  std::uint8_t index_ = 0;
};

class ChessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FenError : public ChessError {
 public:
  using ChessError::ChessError;
};

class MoveError : public ChessError {
 public:
  enum class Kind { Malformed, NoMatch, Ambiguous, Illegal };
  MoveError(Kind kind, const std::string& what) : ChessError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace ratingnet::chess
