#include "ratingnet/model/trajectory.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ratingnet::model {

RatingTrajectory predict_trajectory(Net& net, const pgn::GameRecord& game, const EncodingConstants& constants) {
  if (net.config().outputs != 2) throw std::invalid_argument("trajectories need a two-output (game) model");
  if (game.san_moves.empty()) throw std::invalid_argument("game " + game.id + " has no moves");
  const auto seq = features::encode_game(game, constants.encoder());
  const features::EncodedSequence* ptr = &seq;
  const auto batch = make_batch<float>(std::span(&ptr, 1), 2);
  const auto pred = net.forward(batch, nn::Mode::Eval);
  RatingTrajectory t;
  t.id = game.id;
  for (int row = 0; row < batch.steps(); ++row)
    t.points.push_back({row + 1, game.san_moves[row], constants.rating.destandardize(pred.data[2 * row]),
                        constants.rating.destandardize(pred.data[2 * row + 1])});
  return t;
}

void write_trajectory(std::ostream& out, const RatingTrajectory& t) {
  out << "ply,san,white_estimate,black_estimate\n";
  char buf[64];
  for (const auto& p : t.points) {
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", p.white_estimate, p.black_estimate);
    out << p.ply << ',' << p.san << ',' << buf << '\n';
  }
}

}  // namespace ratingnet::model
