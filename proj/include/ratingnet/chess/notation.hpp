#pragma once

#include <string>
#include <string_view>

#include "ratingnet/chess/move.hpp"
#include "ratingnet/chess/position.hpp"

namespace ratingnet::chess {

inline constexpr std::string_view kStartFen = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

Position parse_fen(std::string_view text);
std::string position_to_fen(const Position& pos);

struct AppliedMove {
  Position position;
  Move move;
};

/// Resolves a SAN token against the legal moves of `pos`. Check, mate and
/// annotation suffixes (+ # ! ?) are accepted and ignored.
AppliedMove apply_san(const Position& pos, std::string_view san);

AppliedMove apply_uci(const Position& pos, std::string_view uci);

/// SAN for a legal move, with minimal disambiguation and a +/# suffix.
std::string move_to_san(const Position& pos, const Move& m);

}  // namespace ratingnet::chess
