#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratingnet/model/checkpoint.hpp"

namespace ratingnet::model {

struct PuzzleRecord {
  std::string id;
  std::string fen;
  std::vector<std::string> uci_moves;
  std::optional<double> rating;
};

class PuzzleFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comma-separated puzzles with a header row. Required columns: FEN and Moves
/// (space-separated UCI); optional: PuzzleId and Rating. Column names are case-insensitive.
std::vector<PuzzleRecord> read_puzzles(std::istream& in);
std::vector<PuzzleRecord> read_puzzles_file(const std::string& path);

std::vector<features::EncodedSequence> encode_puzzles(const std::vector<PuzzleRecord>& puzzles,
                                                      const features::Standardizer& rating);

/// Game config turned into the single-output puzzle variant.
RatingNetConfig puzzle_config(RatingNetConfig base);

/// Public leaderboard MSE of the reference model, reported for comparison only.
inline constexpr double kReferencePuzzleMse = 82049.0;

struct PuzzleReport {
  std::size_t puzzles = 0;
  double mse = 0.0;
  double mae = 0.0;
};

PuzzleReport puzzle_evaluate(Net& net, const std::vector<features::EncodedSequence>& puzzles,
                             const features::Standardizer& rating);

void write_puzzle_report(std::ostream& out, const PuzzleReport& r);

}  // namespace ratingnet::model
