#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratingnet/model/checkpoint.hpp"

namespace ratingnet::model {

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, int batch, double loss, double lr)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) +
                           ": loss " + std::to_string(loss) + " at learning rate " + std::to_string(lr)),
        epoch_(epoch),
        batch_(batch) {}
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

 private:
  int epoch_;
  int batch_;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double monitor_loss = 0.0;  // validation loss when a validation split is used, else train loss
  double learning_rate = 0.0;
};

struct TrainOptions {
  // Fraction of the train set held out to drive the scheduler and best-epoch choice.
  double validation_fraction = 0.0;
  // Best-epoch checkpoint; empty keeps it in memory only.
  std::string checkpoint_path;
  // Called after every epoch; returning false stops training.
  std::function<bool(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_loss = 0.0;
  TrainingState state;  // state at the end of the last epoch run
};

/// Seeded mini-batch training with Adam and a plateau scheduler. On return the
/// network holds the weights of the best epoch.
TrainResult train(Net& net, const std::vector<features::EncodedSequence>& data, const EncodingConstants& constants,
                  const TrainOptions& options = {}, TrainingState state = {});

/// Mean loss of the network over a set, in evaluation mode.
double evaluate_loss(Net& net, const std::vector<features::EncodedSequence>& data, LossMode mode, int batch_size = 64);

void write_loss_curve(std::ostream& out, const std::vector<EpochRecord>& curve);

}  // namespace ratingnet::model
