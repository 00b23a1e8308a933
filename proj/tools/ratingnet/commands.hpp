#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratingnet/model/config.hpp"

namespace ratingnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitRuntimeError = 3;

inline constexpr std::uint64_t kDefaultSeed = 20240701;

/// Bad arguments or unusable input files.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Files read and written by a run, recorded in its metadata.
struct RunRecord {
  std::string command;
  std::uint64_t seed = 0;
  std::string effective_config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

struct NetOptions {
  std::vector<int> channels{32, 64, 128, 128};
  int lstm_hidden = 128;
  int fc_hidden = 128;
  double leaky_slope = 0.01;
  double dropout = 0.5;
  double learning_rate = 1e-4;
  double weight_decay = 1e-5;
  int patience = 10;
  double factor = 0.5;
  int epochs = 50;
  int batch_size = 32;
  std::string loss = "per_move";
  bool no_clock = false;
  double validation_fraction = 0.0;

  model::RatingNetConfig to_config(std::uint64_t seed) const;
};

struct IngestArgs {
  std::vector<std::string> inputs;
  std::uint64_t games_per_month = 30000;
  double train_fraction = 0.8;
  std::string out_dir;
};

struct EncodeArgs {
  std::string dataset, manifest, split = "train", clock_feature = "remaining", out;
};

struct TrainArgs {
  std::string dataset, manifest, out_dir, resume, clock_feature = "remaining";
  NetOptions net;
};

struct EvalArgs {
  std::string checkpoint, dataset, manifest, split = "test", category, out;
};

struct AblateArgs {
  std::string dataset, manifest, out_dir, clock_feature = "remaining";
  // A positive count replaces the dataset with that many synthetic games.
  int synthetic = 0;
  std::uint64_t corpus_seed = 1;
  NetOptions net;
};

struct PredictArgs {
  std::string checkpoint, pgn, out;
};

struct PuzzleTrainArgs {
  std::string puzzles, out_dir;
  NetOptions net;
};

struct PuzzleEvalArgs {
  std::string checkpoint, puzzles, out;
};

struct GlickoArgs {
  std::string input, out;
  double tau = 0.5;
  double epsilon = 1e-6;
};

void run_ingest(const IngestArgs& a, RunRecord& rec);
void run_encode(const EncodeArgs& a, RunRecord& rec);
void run_train(const TrainArgs& a, RunRecord& rec);
void run_eval(const EvalArgs& a, RunRecord& rec);
void run_ablate(const AblateArgs& a, RunRecord& rec);
void run_predict(const PredictArgs& a, RunRecord& rec);
void run_puzzle_train(const PuzzleTrainArgs& a, RunRecord& rec);
void run_puzzle_eval(const PuzzleEvalArgs& a, RunRecord& rec);
void run_glicko(const GlickoArgs& a, RunRecord& rec);

/// JSON run metadata: seed, effective config and its digest, input/output digests, versions.
std::string run_metadata_json(const RunRecord& rec, const std::vector<std::string>& argv);

}  // namespace ratingnet::cli
