#include "data.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "commands.hpp"

namespace ratingnet::cli {

namespace fs = std::filesystem;

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  if (s == "all") return Split::All;
  throw UsageError("unknown split '" + s + "' (expected train, test or all)");
}

features::ClockFeature parse_clock_feature(const std::string& s) {
  if (s == "remaining") return features::ClockFeature::Remaining;
  if (s == "spent") return features::ClockFeature::Spent;
  throw UsageError("unknown clock feature '" + s + "' (expected remaining or spent)");
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " path is required");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError(what + " not found: " + path);
}

void ensure_dir(const std::string& path) {
  if (path.empty()) throw UsageError("output directory is required");
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec || !fs::is_directory(path)) throw UsageError("cannot create output directory " + path);
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

LoadedDataset load_dataset(const std::string& dataset_path, const std::string& manifest_path) {
  require_file(dataset_path, "dataset");
  LoadedDataset d;
  d.games = pgn::read_dataset_file(dataset_path);
  if (manifest_path.empty()) {
    std::vector<const pgn::GameRecord*> train;
    for (const auto& g : d.games) {
      d.manifest.train_ids.push_back(g.id);
      train.push_back(&g);
    }
    d.manifest.train_fraction = 1.0;
    pgn::compute_statistics(train, d.manifest);
    return d;
  }
  require_file(manifest_path, "manifest");
  d.manifest = pgn::read_manifest(manifest_path);
  std::unordered_set<std::string> ids;
  for (const auto& g : d.games) ids.insert(g.id);
  for (const auto* list : {&d.manifest.train_ids, &d.manifest.test_ids})
    for (const auto& id : *list)
      if (!ids.count(id)) throw UsageError("manifest names game '" + id + "' which is not in the dataset");
  return d;
}

LoadedDataset split_games(std::vector<pgn::GameRecord> games, double train_fraction, std::uint64_t seed) {
  auto r = pgn::sample_and_split(games, std::numeric_limits<std::uint64_t>::max(), train_fraction, seed);
  return {std::move(r.games), std::move(r.manifest)};
}

model::EncodingConstants constants_for(const pgn::DatasetManifest& m, features::ClockFeature feature) {
  model::EncodingConstants c;
  c.clock_feature = feature;
  c.clock = feature == features::ClockFeature::Spent ? features::Standardizer(m.spent_mean, m.spent_std)
                                                     : features::Standardizer(m.clock_mean, m.clock_std);
  c.rating = features::Standardizer(m.rating_mean, m.rating_std);
  return c;
}

std::vector<features::EncodedSequence> encode_split(const LoadedDataset& d, Split split,
                                                    const features::EncoderConfig& cfg) {
  std::unordered_set<std::string> wanted;
  if (split != Split::Test) wanted.insert(d.manifest.train_ids.begin(), d.manifest.train_ids.end());
  if (split != Split::Train) wanted.insert(d.manifest.test_ids.begin(), d.manifest.test_ids.end());
  std::vector<features::EncodedSequence> out;
  for (const auto& g : d.games)
    if (wanted.count(g.id)) out.push_back(features::encode_game(g, cfg));
  return out;
}

}  // namespace ratingnet::cli
