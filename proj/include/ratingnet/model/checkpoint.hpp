#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratingnet/features/encoder.hpp"
#include "ratingnet/model/rating_net.hpp"

namespace ratingnet::model {

using Net = RatingNet<float>;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything the feature pipeline needs to reproduce a model's inputs.
struct EncodingConstants {
  features::Standardizer clock;
  features::Standardizer rating = features::kDefaultRatingStandardizer;
  features::ClockFeature clock_feature = features::ClockFeature::Remaining;

  features::EncoderConfig encoder() const { return {clock, rating, clock_feature}; }
  friend bool operator==(const EncodingConstants&, const EncodingConstants&) = default;
};

/// Optimizer and scheduler progress, for resuming.
struct TrainingState {
  int epoch = 0;  // completed epochs
  std::uint64_t adam_steps = 0;
  double learning_rate = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;
  std::vector<std::vector<double>> adam_m;
  std::vector<std::vector<double>> adam_v;
};

struct LoadedCheckpoint {
  std::unique_ptr<Net> net;
  EncodingConstants constants;
  TrainingState state;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout: 8-byte magic "RNCKPT\0\1", u32 version, config JSON, encoding
/// constants, training state, then named f32 tensors (parameters and buffers)
/// and the f64 Adam moments.
void save_checkpoint(const std::string& path, Net& net, const EncodingConstants& constants, const TrainingState& state);
void write_checkpoint(std::ostream& out, Net& net, const EncodingConstants& constants, const TrainingState& state);
LoadedCheckpoint load_checkpoint(const std::string& path);
LoadedCheckpoint read_checkpoint(std::istream& in);

}  // namespace ratingnet::model
