#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ratingnet/features/planes.hpp"
#include "ratingnet/features/standardizer.hpp"
#include "ratingnet/pgn/game_record.hpp"

namespace ratingnet::features {

/// Which clock quantity feeds the per-step scalar.
enum class ClockFeature : std::uint8_t {
  Remaining = 0,  // mover's clock after the move
  Spent = 1,      // time the mover used on the move
};

struct Step {
  PlaneStack planes;  // position after the ply
  float clock_z = 0.0f;
  std::uint8_t side_to_move = 0;  // side that made the ply: 0 white, 1 black

  friend bool operator==(const Step&, const Step&) = default;
};

struct EncodedSequence {
  std::string id;
  pgn::TimeCategory category = pgn::TimeCategory::Blitz;
  std::vector<Step> steps;
  // Standardized targets: {white, black} for games, {puzzle} for puzzles.
  std::vector<float> targets;
  // The same targets on the display scale, kept exact for evaluation.
  std::vector<double> ratings;

  friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;
};

struct EncoderConfig {
  Standardizer clock;
  Standardizer rating = kDefaultRatingStandardizer;
  ClockFeature clock_feature = ClockFeature::Remaining;
};

/// Replays the game and encodes one step per ply. Throws chess::ChessError if
/// a move does not replay.
EncodedSequence encode_game(const pgn::GameRecord& g, const EncoderConfig& cfg);

/// Puzzle encoding: no clocks (every clock_z is 0), one optional rating target.
EncodedSequence encode_puzzle(std::string_view start_fen, const std::vector<std::string>& uci_moves,
                              std::optional<double> rating, const Standardizer& rating_std,
                              std::string id = {});

}  // namespace ratingnet::features
