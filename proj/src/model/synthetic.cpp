#include "ratingnet/model/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "ratingnet/chess/notation.hpp"
#include "ratingnet/pgn/time_control.hpp"

namespace ratingnet::model {

double synthetic_rating(const SyntheticConfig& cfg, double think_seconds) {
  const double u = (think_seconds - cfg.min_think) / (cfg.max_think - cfg.min_think);
  return cfg.min_rating + u * (cfg.max_rating - cfg.min_rating);
}

std::vector<pgn::GameRecord> synthetic_corpus(const SyntheticConfig& cfg) {
  if (cfg.games < 1 || cfg.min_plies < 1 || cfg.max_plies < cfg.min_plies || !(cfg.max_think > cfg.min_think))
    throw std::invalid_argument("invalid synthetic corpus configuration");
  if (cfg.max_think * ((cfg.max_plies + 1) / 2) > cfg.base_seconds)
    throw std::invalid_argument("synthetic clocks would run out before the game ends");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> think(cfg.min_think, cfg.max_think);
  std::uniform_int_distribution<int> plies(cfg.min_plies, cfg.max_plies);
  const auto category = pgn::classify_time_control(cfg.base_seconds, 0);
  const double fixed_think = 0.5 * (cfg.min_think + cfg.max_think);

  std::vector<pgn::GameRecord> out;
  out.reserve(cfg.games);
  char id[32];
  for (int i = 0; i < cfg.games; ++i) {
    const double a[2] = {think(rng), think(rng)};
    pgn::GameRecord g;
    std::snprintf(id, sizeof id, "syn%06d", i);
    g.id = id;
    g.source_month = "2024-01";
    // Ratings are rounded like real ones; the clock still determines them up to that rounding.
    g.white_rating = static_cast<int>(std::lround(synthetic_rating(cfg, a[0])));
    g.black_rating = static_cast<int>(std::lround(synthetic_rating(cfg, a[1])));
    g.base_seconds = cfg.base_seconds;
    g.increment_seconds = 0;
    g.category = category;
    g.result = pgn::GameResult::Draw;

    auto pos = chess::Position::initial();
    const int target = plies(rng);
    int moves_made[2] = {0, 0};
    for (int t = 0; t < target; ++t) {
      const auto legal = chess::legal_moves(pos);
      if (legal.empty()) break;
      const auto& m = legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
      g.san_moves.push_back(chess::move_to_san(pos, m));
      pos = pos.play(m);
      const int side = t % 2;
      ++moves_made[side];
      const double per_move = cfg.constant_clocks ? fixed_think : a[side];
      g.clocks_remaining.push_back(static_cast<int>(std::lround(cfg.base_seconds - moves_made[side] * per_move)));
    }
    if (chess::game_status(pos) == chess::GameStatus::Checkmate)
      g.result = pos.side_to_move() == chess::Color::White ? pgn::GameResult::BlackWin : pgn::GameResult::WhiteWin;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace ratingnet::model
