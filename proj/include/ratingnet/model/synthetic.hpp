#pragma once

#include <cstdint>
#include <vector>

#include "ratingnet/pgn/game_record.hpp"

namespace ratingnet::model {

/// Random legal games whose ratings depend only on how fast each player moves.
/// Each player thinks a constant number of seconds per move, drawn uniformly
/// from [min_think, max_think]; the rating is an affine function of it.
struct SyntheticConfig {
  int games = 2000;
  int min_plies = 16;
  int max_plies = 24;
  int base_seconds = 300;
  double min_think = 1.0;
  double max_think = 10.0;
  double min_rating = 800.0;
  double max_rating = 2400.0;
  // Every move takes the same time regardless of rating, so clocks carry no signal.
  bool constant_clocks = false;
  std::uint64_t seed = 1;
};

double synthetic_rating(const SyntheticConfig& cfg, double think_seconds);

std::vector<pgn::GameRecord> synthetic_corpus(const SyntheticConfig& cfg);

}  // namespace ratingnet::model
