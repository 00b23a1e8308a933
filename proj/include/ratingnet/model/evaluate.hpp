#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ratingnet/model/checkpoint.hpp"
#include "ratingnet/model/trainer.hpp"
#include "ratingnet/pgn/game_record.hpp"

namespace ratingnet::model {

/// Game-level estimate: the final step's prediction, on the display scale.
struct GamePrediction {
  std::string id;
  pgn::TimeCategory category = pgn::TimeCategory::Blitz;
  std::vector<double> truth;
  std::vector<double> estimate;
};

std::vector<GamePrediction> predict_final(Net& net, const std::vector<features::EncodedSequence>& data,
                                          const features::Standardizer& rating, int batch_size = 64);

/// Constant predictor for every target of every sequence.
std::vector<GamePrediction> predict_constant(const std::vector<features::EncodedSequence>& data, double value);

/// Mean display rating over all targets of the training set.
double baseline_mean(const std::vector<features::EncodedSequence>& train);

struct Metrics {
  std::uint64_t games = 0;
  double mae = 0.0;
  double mse = 0.0;
};

/// One method's column: per time control and the count-weighted average.
struct MethodMetrics {
  std::string method;
  std::array<Metrics, pgn::kNumCategories> per_category{};
  Metrics average;
};

MethodMetrics score(const std::string& method, const std::vector<GamePrediction>& predictions);

struct EvalReport {
  std::vector<MethodMetrics> methods;
};

inline const std::string kClockMethod = "RatingNet";
inline const std::string kNoClockMethod = "RatingNetNoClock";
inline const std::string kMeanMethod = "Mean";

/// Scores the network's final-step predictions alongside the mean baseline.
EvalReport evaluate(Net& net, const std::vector<features::EncodedSequence>& test, const features::Standardizer& rating,
                    double train_mean);

/// CSV with rows metric x time control (Average first) and one column per method.
/// A category filter keeps only that row.
void write_report(std::ostream& out, const EvalReport& report, std::optional<pgn::TimeCategory> only = std::nullopt);

struct AblationResult {
  EvalReport report;  // RatingNet, RatingNetNoClock, Mean
  TrainResult clocked;
  TrainResult no_clock;
};

/// Trains two networks that differ only in clock_feature_enabled and scores both.
AblationResult ablate_clock(const RatingNetConfig& config, const std::vector<features::EncodedSequence>& train_set,
                            const std::vector<features::EncodedSequence>& test_set, const EncodingConstants& constants);

/// MAE reduction of the clocked model, absolute and relative to the no-clock model.
void write_ablation_deltas(std::ostream& out, const EvalReport& report);

}  // namespace ratingnet::model
