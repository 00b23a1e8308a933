#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "ratingnet/chess/notation.hpp"
#include "ratingnet/features/encoded_io.hpp"
#include "ratingnet/features/encoder.hpp"
#include "ratingnet/pgn/dataset.hpp"
#include "ratingnet/pgn/pgn_reader.hpp"

using namespace ratingnet;
using namespace ratingnet::features;
using chess::Color;
using chess::PieceKind;

namespace {

pgn::GameRecord load_fixture(const std::string& name) {
  auto in = pgn::open_dump(std::string(RATINGNET_FIXTURE_DIR) + "/" + name);
  pgn::GameStream s(*in);
  auto g = s.next();
  EXPECT_TRUE(g.has_value());
  return *g;
}

// Random legal game with a random monotone clock, for property checks.
pgn::GameRecord random_record(std::mt19937_64& rng, const std::string& id) {
  pgn::GameRecord g;
  g.id = id;
  g.source_month = "2021-0" + std::to_string(1 + rng() % 3);
  g.white_rating = 800 + static_cast<int>(rng() % 1600);
  g.black_rating = 800 + static_cast<int>(rng() % 1600);
  g.base_seconds = 180;
  g.increment_seconds = 0;
  g.category = pgn::TimeCategory::Blitz;
  g.result = pgn::GameResult::Draw;
  auto pos = chess::Position::initial();
  int clocks[2] = {180, 180};
  const int plies = 10 + static_cast<int>(rng() % 30);
  for (int t = 0; t < plies; ++t) {
    const auto moves = chess::legal_moves(pos);
    if (moves.empty()) break;
    const auto& m = moves[rng() % moves.size()];
    g.san_moves.push_back(chess::move_to_san(pos, m));
    pos = pos.play(m);
    auto& c = clocks[t % 2];
    c = std::max(0, c - static_cast<int>(rng() % 8));
    g.clocks_remaining.push_back(c);
  }
  return g;
}

}  // namespace

TEST(Planes, InitialPosition) {
  const auto p = encode_planes(chess::Position::initial());
  EXPECT_EQ(p.count(), 32);
  const int black_pawns = PlaneStack::plane_index(Color::Black, PieceKind::Pawn);
  const int white_king = PlaneStack::plane_index(Color::White, PieceKind::King);
  for (int file = 0; file < 8; ++file) {
    EXPECT_TRUE(p.at(black_pawns, 6, file));
    EXPECT_FALSE(p.at(black_pawns, 1, file));
  }
  EXPECT_EQ(std::popcount(p.planes[black_pawns]), 8);
  EXPECT_TRUE(p.at(white_king, 0, 4));
  EXPECT_EQ(std::popcount(p.planes[white_king]), 1);
}

TEST(Planes, KingsOnly) {
  const auto p = encode_planes(chess::parse_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 1"));
  EXPECT_EQ(p.count(), 2);
}

TEST(Planes, ExclusiveAndInjectiveOverRandomPositions) {
  std::mt19937_64 rng(11);
  std::set<std::string> fens;
  std::set<std::array<std::uint64_t, kNumPlanes>> encodings;
  for (int game = 0; game < 20; ++game) {
    auto pos = chess::Position::initial();
    for (int ply = 0; ply < 80; ++ply) {
      const auto moves = chess::legal_moves(pos);
      if (moves.empty()) break;
      pos = pos.play(moves[rng() % moves.size()]);
      const auto p = encode_planes(pos);
      std::uint64_t seen = 0;
      int pieces = 0;
      for (auto mask : p.planes) {
        EXPECT_EQ(seen & mask, 0u);
        seen |= mask;
      }
      for (int i = 0; i < 64; ++i) pieces += pos.piece_at(chess::Square::from_index(i)).has_value();
      EXPECT_EQ(p.count(), pieces);
      // Planes see placement only, so compare against the placement field of the FEN.
      const auto fen = chess::position_to_fen(pos);
      const auto placement = fen.substr(0, fen.find(' '));
      const bool new_fen = fens.insert(placement).second;
      const bool new_code = encodings.insert(p.planes).second;
      EXPECT_EQ(new_fen, new_code);
    }
  }
}

TEST(Standardizer, ReferenceConstants) {
  EXPECT_DOUBLE_EQ(kDefaultRatingStandardizer.standardize(1514.0), 0.0);
  EXPECT_DOUBLE_EQ(kDefaultRatingStandardizer.standardize(1880.0), 1.0);
  EXPECT_DOUBLE_EQ(kDefaultRatingStandardizer.destandardize(-1.0), 1148.0);
  EXPECT_THROW(Standardizer(0.0, 0.0), std::invalid_argument);
}

TEST(Encoder, SampleGameShape) {
  const auto g = load_fixture("sample_game1.pgn");
  double sum = 0.0;
  for (int c : g.clocks_remaining) sum += c;
  EncoderConfig cfg;
  cfg.clock = Standardizer(sum / static_cast<double>(g.clocks_remaining.size()), 10.0);
  const auto seq = encode_game(g, cfg);
  ASSERT_EQ(seq.steps.size(), 66u);
  ASSERT_EQ(seq.targets.size(), 2u);
  EXPECT_FLOAT_EQ(seq.targets[0], static_cast<float>((1224 - 1514) / 366.0));
  EXPECT_FLOAT_EQ(seq.targets[1], static_cast<float>((1238 - 1514) / 366.0));
  for (std::size_t t = 0; t < seq.steps.size(); ++t) {
    EXPECT_EQ(seq.steps[t].side_to_move, t % 2);
    EXPECT_NEAR(seq.steps[t].clock_z, (g.clocks_remaining[t] - cfg.clock.mean()) / 10.0, 1e-5);
  }
  // Step 0 holds the position after 1. e4.
  EXPECT_EQ(seq.steps[0].planes, encode_planes(chess::apply_san(chess::Position::initial(), "e4").position));
}

TEST(Encoder, ClocksAtTheMeanEncodeToZero) {
  auto g = load_fixture("sample_game1.pgn");
  std::fill(g.clocks_remaining.begin(), g.clocks_remaining.end(), 42);
  EncoderConfig cfg;
  cfg.clock = Standardizer(42.0, 7.0);
  for (const auto& s : encode_game(g, cfg).steps) EXPECT_EQ(s.clock_z, 0.0f);
}

TEST(Encoder, SpentClockMode) {
  const auto g = load_fixture("sample_game2.pgn");
  EncoderConfig cfg;
  cfg.clock_feature = ClockFeature::Spent;
  const auto seq = encode_game(g, cfg);
  const auto spent = pgn::clock_spent(g);
  for (std::size_t t = 0; t < seq.steps.size(); ++t) EXPECT_EQ(seq.steps[t].clock_z, static_cast<float>(spent[t]));
}

TEST(Encoder, PuzzleEncoding) {
  const auto seq = encode_puzzle(chess::kStartFen, {"e2e4"}, 1880.0, kDefaultRatingStandardizer, "p1");
  ASSERT_EQ(seq.steps.size(), 1u);
  EXPECT_EQ(seq.steps[0].clock_z, 0.0f);
  EXPECT_EQ(seq.steps[0].side_to_move, 0);
  ASSERT_EQ(seq.targets.size(), 1u);
  EXPECT_FLOAT_EQ(seq.targets[0], 1.0f);
  EXPECT_EQ(seq.steps[0].planes, encode_planes(chess::apply_uci(chess::Position::initial(), "e2e4").position));

  const auto two = encode_puzzle(chess::kStartFen, {"e2e4", "e7e5"}, std::nullopt, kDefaultRatingStandardizer);
  EXPECT_TRUE(two.targets.empty());
  EXPECT_EQ(two.steps[1].side_to_move, 1);
  EXPECT_THROW(encode_puzzle(chess::kStartFen, {"e2e5"}, 1500.0, kDefaultRatingStandardizer), chess::MoveError);
}

TEST(EncodedIo, BinaryRoundTripIsBitExact) {
  std::mt19937_64 rng(5);
  EncodedDataset data;
  data.clock = Standardizer(97.25, 41.5);
  data.rating = kDefaultRatingStandardizer;
  data.clock_feature = ClockFeature::Spent;
  EncoderConfig cfg{data.clock, data.rating, data.clock_feature};
  for (int i = 0; i < 12; ++i) data.sequences.push_back(encode_game(random_record(rng, "g" + std::to_string(i)), cfg));
  data.sequences.push_back(encode_puzzle(chess::kStartFen, {"g1f3", "d7d5"}, 1700.0, data.rating, "puzzle"));

  std::stringstream buf;
  write_encoded(buf, data);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 5), "RNSEQ");
  std::istringstream in(bytes);
  const auto back = read_encoded(in);
  EXPECT_EQ(back, data);
  std::stringstream again;
  write_encoded(again, back);
  EXPECT_EQ(again.str(), bytes);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_encoded(truncated), FormatError);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  std::istringstream versioned(bad_version);
  EXPECT_THROW(read_encoded(versioned), FormatError);
}

TEST(EncodedIo, TrainSplitClockFeatureIsStandardized) {
  std::mt19937_64 rng(21);
  std::vector<pgn::GameRecord> records;
  for (int i = 0; i < 300; ++i) records.push_back(random_record(rng, "r" + std::to_string(i)));
  const auto split = pgn::sample_and_split(records, 1000, 0.8, 3);
  const std::set<std::string> train(split.manifest.train_ids.begin(), split.manifest.train_ids.end());

  for (auto mode : {ClockFeature::Remaining, ClockFeature::Spent}) {
    EncoderConfig cfg;
    cfg.clock_feature = mode;
    cfg.clock = mode == ClockFeature::Remaining ? Standardizer(split.manifest.clock_mean, split.manifest.clock_std)
                                                : Standardizer(split.manifest.spent_mean, split.manifest.spent_std);
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (const auto& g : split.games) {
      if (!train.count(g.id)) continue;
      for (const auto& s : encode_game(g, cfg).steps) {
        sum += s.clock_z;
        sq += static_cast<double>(s.clock_z) * s.clock_z;
        ++n;
      }
    }
    const double mean = sum / static_cast<double>(n);
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_NEAR(std::sqrt(sq / static_cast<double>(n) - mean * mean), 1.0, 0.02);
  }
}
