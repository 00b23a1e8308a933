#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ratingnet/model/checkpoint.hpp"
#include "ratingnet/pgn/game_record.hpp"

namespace ratingnet::model {

struct TrajectoryPoint {
  int ply = 0;  // 1-based
  std::string san;
  double white_estimate = 0.0;
  double black_estimate = 0.0;
};

struct RatingTrajectory {
  std::string id;
  std::vector<TrajectoryPoint> points;

  const TrajectoryPoint& final() const { return points.back(); }
};

/// Display-scale estimates for both players after every ply.
RatingTrajectory predict_trajectory(Net& net, const pgn::GameRecord& game, const EncodingConstants& constants);

/// CSV: ply,san,white_estimate,black_estimate
void write_trajectory(std::ostream& out, const RatingTrajectory& t);

}  // namespace ratingnet::model
