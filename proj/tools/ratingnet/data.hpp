#pragma once

#include <string>
#include <vector>

#include "ratingnet/features/encoder.hpp"
#include "ratingnet/model/checkpoint.hpp"
#include "ratingnet/pgn/dataset.hpp"

namespace ratingnet::cli {

enum class Split { Train, Test, All };

Split parse_split(const std::string& s);
features::ClockFeature parse_clock_feature(const std::string& s);

/// Games plus the manifest that splits them. Without a manifest path every
/// game is a train game and the statistics are computed from all of them.
struct LoadedDataset {
  std::vector<pgn::GameRecord> games;
  pgn::DatasetManifest manifest;
};
LoadedDataset load_dataset(const std::string& dataset_path, const std::string& manifest_path);
LoadedDataset split_games(std::vector<pgn::GameRecord> games, double train_fraction, std::uint64_t seed);

model::EncodingConstants constants_for(const pgn::DatasetManifest& m, features::ClockFeature feature);

std::vector<features::EncodedSequence> encode_split(const LoadedDataset& d, Split split,
                                                    const features::EncoderConfig& cfg);

void require_file(const std::string& path, const std::string& what);
void ensure_dir(const std::string& path);
std::string join_path(const std::string& dir, const std::string& name);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ratingnet::cli
