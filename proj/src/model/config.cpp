#include "ratingnet/model/config.hpp"

#include <json.hpp>

namespace ratingnet::model {

std::string loss_mode_name(LossMode m) { return m == LossMode::PerMove ? "per_move" : "final_step"; }

LossMode parse_loss_mode(const std::string& s) {
  if (s == "per_move") return LossMode::PerMove;
  if (s == "final_step") return LossMode::FinalStep;
  throw std::invalid_argument("unknown loss mode '" + s + "' (per_move or final_step)");
}

std::string config_to_json(const RatingNetConfig& cfg) {
  const auto& s = cfg.schedule;
  nlohmann::ordered_json j = {
      {"channels", cfg.channels},
      {"lstm_hidden", cfg.lstm_hidden},
      {"fc_hidden", cfg.fc_hidden},
      {"leaky_slope", cfg.leaky_slope},
      {"clock_feature_enabled", cfg.clock_feature_enabled},
      {"outputs", cfg.outputs},
      {"loss_mode", loss_mode_name(cfg.loss_mode)},
      {"zero_head", cfg.zero_head},
      {"schedule",
       {{"learning_rate", s.learning_rate},
        {"weight_decay", s.weight_decay},
        {"plateau_patience", s.plateau_patience},
        {"plateau_factor", s.plateau_factor},
        {"epoch_cap", s.epoch_cap},
        {"batch_size", s.batch_size},
        {"dropout_p", s.dropout_p},
        {"seed", s.seed}}},
  };
  return j.dump(2);
}

RatingNetConfig config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RatingNetConfig cfg;
  cfg.channels = j.at("channels").get<std::vector<int>>();
  cfg.lstm_hidden = j.at("lstm_hidden").get<int>();
  cfg.fc_hidden = j.at("fc_hidden").get<int>();
  cfg.leaky_slope = j.at("leaky_slope").get<double>();
  cfg.clock_feature_enabled = j.at("clock_feature_enabled").get<bool>();
  cfg.outputs = j.at("outputs").get<int>();
  cfg.loss_mode = parse_loss_mode(j.at("loss_mode").get<std::string>());
  cfg.zero_head = j.at("zero_head").get<bool>();
  const auto& s = j.at("schedule");
  cfg.schedule.learning_rate = s.at("learning_rate").get<double>();
  cfg.schedule.weight_decay = s.at("weight_decay").get<double>();
  cfg.schedule.plateau_patience = s.at("plateau_patience").get<int>();
  cfg.schedule.plateau_factor = s.at("plateau_factor").get<double>();
  cfg.schedule.epoch_cap = s.at("epoch_cap").get<int>();
  cfg.schedule.batch_size = s.at("batch_size").get<int>();
  cfg.schedule.dropout_p = s.at("dropout_p").get<double>();
  cfg.schedule.seed = s.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

}  // namespace ratingnet::model
