#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ratingnet/nn/optim.hpp"

namespace ratingnet::model {

enum class LossMode {
  PerMove,    // every ply is supervised with the game's ratings
  FinalStep,  // only the last ply of each game
};

struct RatingNetConfig {
  // One conv block per entry; 2x2 mean pooling between blocks, global mean pooling after the last.
  std::vector<int> channels{32, 64, 128, 128};
  int lstm_hidden = 128;
  int fc_hidden = 128;
  double leaky_slope = 0.01;
  bool clock_feature_enabled = true;
  int outputs = 2;  // 2 for games (white, black), 1 for puzzles
  LossMode loss_mode = LossMode::PerMove;
  bool zero_head = false;  // start the output layer at zero
  nn::TrainSchedule schedule;

  void validate() const {
    if (channels.empty() || channels.size() > 4)
      throw std::invalid_argument("between 1 and 4 conv layers are supported on an 8x8 board");
    for (int c : channels)
      if (c < 1) throw std::invalid_argument("conv widths must be at least 1");
    if (lstm_hidden < 1 || fc_hidden < 1) throw std::invalid_argument("lstm and fc widths must be at least 1");
    if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) throw std::invalid_argument("leaky slope must be in (0, 1)");
    if (outputs != 1 && outputs != 2) throw std::invalid_argument("outputs must be 1 or 2");
    schedule.validate();
  }

  friend bool operator==(const RatingNetConfig&, const RatingNetConfig&) = default;
};

std::string loss_mode_name(LossMode m);
LossMode parse_loss_mode(const std::string& s);

/// JSON form used inside checkpoints, run metadata and config echoes.
std::string config_to_json(const RatingNetConfig& cfg);
RatingNetConfig config_from_json(const std::string& text);

}  // namespace ratingnet::model
