#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ratingnet/pgn/game_record.hpp"

namespace ratingnet::pgn {

struct MonthSummary {
  std::uint64_t seen = 0;
  std::uint64_t kept = 0;

  friend bool operator==(const MonthSummary&, const MonthSummary&) = default;
};

struct DatasetManifest {
  int version = 1;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  // Standardization constants, computed on the train split only.
  double clock_mean = 0.0;
  double clock_std = 1.0;
  double spent_mean = 0.0;
  double spent_std = 1.0;
  double rating_mean = 1514.0;
  double rating_std = 366.0;
  std::uint64_t games_per_month = 0;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  std::map<std::string, MonthSummary> months;
  // Share of decisive train games won by the higher-rated player.
  double higher_rated_winner_fraction = 0.0;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);
DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& m);

/// Dataset file: a comment header line, then one tab-separated key=value record per game.
void write_dataset(std::ostream& out, const std::vector<GameRecord>& games);
std::vector<GameRecord> read_dataset(std::istream& in);
std::vector<GameRecord> read_dataset_file(const std::string& path);
void write_dataset_file(const std::string& path, const std::vector<GameRecord>& games);

std::string format_record(const GameRecord& g);
GameRecord parse_record(const std::string& line);

/// Time spent on each ply: previous own clock + increment - current clock,
/// with the base time standing in for the clock before a player's first move.
std::vector<int> clock_spent(const GameRecord& g);

/// Per-month uniform sampling without replacement over a stream (reservoir
/// sampling), followed by a seeded train/test split.
class MonthlySampler {
 public:
  MonthlySampler(std::uint64_t games_per_month, std::uint64_t seed);

  void add(GameRecord record);
  /// Records a month that produced no qualifying games.
  void note_month(const std::string& month);

  struct Result {
    std::vector<GameRecord> games;  // retained, in stream order
    DatasetManifest manifest;
  };
  Result finish(double train_fraction) const;

 private:
  struct Reservoir {
    std::mt19937_64 rng;
    std::uint64_t seen = 0;
    std::vector<std::pair<std::uint64_t, GameRecord>> kept;  // (stream index, record)
  };
  Reservoir& reservoir(const std::string& month);

  std::uint64_t games_per_month_;
  std::uint64_t seed_;
  std::uint64_t next_index_ = 0;
  std::map<std::string, Reservoir> months_;
};

/// Fills the standardization constants of `m` from the given train games.
void compute_statistics(const std::vector<const GameRecord*>& train, DatasetManifest& m);

/// Convenience wrapper over MonthlySampler.
MonthlySampler::Result sample_and_split(const std::vector<GameRecord>& records, std::uint64_t games_per_month,
                                        double train_fraction, std::uint64_t seed);

}  // namespace ratingnet::pgn
