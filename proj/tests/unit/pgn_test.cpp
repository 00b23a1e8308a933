#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <boost/iostreams/copy.hpp>
#include <boost/iostreams/filter/zstd.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "ratingnet/pgn/dataset.hpp"
#include "ratingnet/pgn/pgn_reader.hpp"
#include "ratingnet/pgn/time_control.hpp"

using namespace ratingnet::pgn;

namespace {

std::string fixture(const std::string& name) { return std::string(RATINGNET_FIXTURE_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string game(const std::string& extra_headers, const std::string& movetext, const std::string& result = "1-0",
                 const std::string& event = "Rated Blitz game", const std::string& elo = "[WhiteElo \"1500\"]\n") {
  return "[Event \"" + event + "\"]\n[Site \"https://lichess.org/x" + std::to_string(movetext.size()) +
         "\"]\n[UTCDate \"2021.04.03\"]\n[Result \"" + result + "\"]\n" + elo + "[BlackElo \"1450\"]\n" + extra_headers +
         "\n" + movetext + " " + result + "\n\n";
}

const std::string kGoodMoves =
    "1. e4 { [%clk 0:05:00] } 1... e5 { [%clk 0:05:00] } 2. Nf3 { [%clk 0:04:58] } 2... Nc6 { [%clk 0:04:55] } 3. Bb5 { "
    "[%clk 0:04:57] }";

std::vector<GameRecord> stream_all(std::istream& in, IngestStats* stats = nullptr) {
  GameStream s(in);
  std::vector<GameRecord> out;
  while (auto g = s.next()) out.push_back(*g);
  if (stats) *stats = s.stats();
  return out;
}

GameRecord synthetic_record(const std::string& id, const std::string& month, int white, int black) {
  GameRecord g;
  g.id = id;
  g.source_month = month;
  g.white_rating = white;
  g.black_rating = black;
  g.base_seconds = 60;
  g.increment_seconds = 0;
  g.category = TimeCategory::Bullet;
  g.result = white >= black ? GameResult::WhiteWin : GameResult::BlackWin;
  g.san_moves = {"e4", "e5"};
  g.clocks_remaining = {58, 57};
  return g;
}

}  // namespace

TEST(TimeControl, ClassifiesWorkedExamplesAndBoundaries) {
  EXPECT_EQ(estimated_duration(300, 3), 420);
  EXPECT_EQ(classify_time_control(300, 3), TimeCategory::Blitz);
  EXPECT_EQ(classify_time_control(15, 0), TimeCategory::UltraBullet);
  EXPECT_EQ(classify_time_control(1500, 0), TimeCategory::Classical);
  // Inclusive upper bounds.
  EXPECT_EQ(classify_time_control(29, 0), TimeCategory::UltraBullet);
  EXPECT_EQ(classify_time_control(30, 0), TimeCategory::Bullet);
  EXPECT_EQ(classify_time_control(179, 0), TimeCategory::Bullet);
  EXPECT_EQ(classify_time_control(180, 0), TimeCategory::Blitz);
  EXPECT_EQ(classify_time_control(479, 0), TimeCategory::Blitz);
  EXPECT_EQ(classify_time_control(480, 0), TimeCategory::Rapid);
  EXPECT_EQ(classify_time_control(1499, 0), TimeCategory::Rapid);
  EXPECT_EQ(classify_time_control(0, 1), TimeCategory::Bullet);
  EXPECT_THROW(classify_time_control(0, 0), IngestError);
  EXPECT_THROW(classify_time_control(-5, 0), IngestError);
}

TEST(TimeControl, MonotoneInBaseAndIncrement) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> base(0, 10800), inc(0, 180), bump(1, 600);
  for (int i = 0; i < 10000; ++i) {
    const int b = base(rng);
    const int n = inc(rng);
    if (b == 0 && n == 0) continue;
    const auto c = classify_time_control(b, n);
    EXPECT_GE(classify_time_control(b + bump(rng), n), c);
    EXPECT_GE(classify_time_control(b, n + bump(rng) / 10 + 1), c);
  }
}

TEST(TimeControl, ParsesHeader) {
  const auto tc = parse_time_control("300+3");
  ASSERT_TRUE(tc);
  EXPECT_EQ(tc->base_seconds, 300);
  EXPECT_EQ(tc->increment_seconds, 3);
  EXPECT_FALSE(parse_time_control("-"));
  EXPECT_FALSE(parse_time_control("300"));
  EXPECT_FALSE(parse_time_control("a+b"));
}

TEST(Clock, ParsesComments) {
  EXPECT_EQ(parse_clock_comment("[%clk 0:02:58]"), 178);
  EXPECT_EQ(parse_clock_comment("[%clk 1:00:00]"), 3600);
  EXPECT_EQ(parse_clock_comment("[%clk 0:00:00]"), 0);
  EXPECT_EQ(parse_clock_comment(" [%eval 0.2] [%clk 12:00:01] "), 43201);
  EXPECT_EQ(parse_clock_comment("[%clk 0:00:09.8]"), 9);
  EXPECT_THROW(parse_clock_comment("no clock here"), IngestError);
  EXPECT_THROW(parse_clock_comment("[%clk 0:2:58]"), IngestError);
  EXPECT_THROW(parse_clock_comment("[%clk 0:02:61]"), IngestError);
  EXPECT_THROW(parse_clock_comment("[%clk 0:02:58"), IngestError);
  EXPECT_FALSE(find_clock("[%eval 0.3]"));
}

TEST(Movetext, TokenizesMovesCommentsAndNoise) {
  const auto mt = parse_movetext(
      "1. e4 { [%clk 0:01:00] } 1... e5?! $2 { [%clk 0:00:59] } ( 1... c5 { side line } 2. Nf3 ) 2.Nf3 ; [%clk "
      "0:00:58]\n2... Nc6 1-0");
  ASSERT_EQ(mt.moves.size(), 4u);
  EXPECT_EQ(mt.moves[0].san, "e4");
  EXPECT_EQ(mt.moves[1].san, "e5?!");
  EXPECT_EQ(mt.moves[2].san, "Nf3");
  EXPECT_EQ(*mt.moves[0].clock, 60);
  EXPECT_EQ(*mt.moves[1].clock, 59);
  EXPECT_EQ(*mt.moves[2].clock, 58);
  EXPECT_FALSE(mt.moves[3].clock);
  EXPECT_EQ(*mt.result, "1-0");
  EXPECT_THROW(parse_movetext("1. e4 { open"), IngestError);
}

TEST(GameStream, ExtractsGoodGameAndCountsSkips) {
  std::string pgn;
  pgn += game("[TimeControl \"300+3\"]\n", kGoodMoves);
  pgn += game("[TimeControl \"300+3\"]\n", kGoodMoves + " ", "1-0", "Rated Blitz game", "");  // no WhiteElo
  pgn += game("[TimeControl \"300+3\"]\n", kGoodMoves + "  ", "1-0", "Casual Blitz game");
  pgn += game("[TimeControl \"300+3\"]\n", "1. e4 { [%clk 0:05:00] } 1... e5 2. Nf3 { [%clk 0:04:58] }");
  pgn += game("[TimeControl \"300+3\"]\n", "1. e4 { [%clk 0:05:00] } 1... e4 { [%clk 0:05:00] }");
  pgn += game("[TimeControl \"300+3\"]\n[Variant \"Chess960\"]\n", kGoodMoves + "   ");
  pgn += game("[TimeControl \"-\"]\n", kGoodMoves + "    ");
  pgn += game("[TimeControl \"300+3\"]\n", kGoodMoves + "     ", "*");
  pgn += game("[TimeControl \"60+0\"]\n", kGoodMoves + "      ");  // clocks above 60 + 0

  std::istringstream in(pgn);
  IngestStats stats;
  const auto games = stream_all(in, &stats);
  ASSERT_EQ(games.size(), 1u);
  const auto& g = games[0];
  EXPECT_EQ(g.white_rating, 1500);
  EXPECT_EQ(g.black_rating, 1450);
  EXPECT_EQ(g.base_seconds, 300);
  EXPECT_EQ(g.increment_seconds, 3);
  EXPECT_EQ(g.category, TimeCategory::Blitz);
  EXPECT_EQ(g.source_month, "2021-04");
  EXPECT_EQ(g.san_moves, (std::vector<std::string>{"e4", "e5", "Nf3", "Nc6", "Bb5"}));
  EXPECT_EQ(g.clocks_remaining, (std::vector<int>{300, 300, 298, 295, 297}));

  EXPECT_EQ(stats.games_seen, 9u);
  EXPECT_EQ(stats.games_kept, 1u);
  EXPECT_EQ(stats.skipped.at("missing_rating"), 1u);
  EXPECT_EQ(stats.skipped.at("unrated"), 1u);
  EXPECT_EQ(stats.skipped.at("missing_clock"), 1u);
  EXPECT_EQ(stats.skipped.at("illegal_move"), 1u);
  EXPECT_EQ(stats.skipped.at("non_standard_variant"), 1u);
  EXPECT_EQ(stats.skipped.at("bad_time_control"), 1u);
  EXPECT_EQ(stats.skipped.at("bad_result"), 1u);
  EXPECT_EQ(stats.skipped.at("clock_out_of_range"), 1u);
}

TEST(GameStream, SampleFixturesReplay) {
  for (const auto& [name, plies, white, black] :
       {std::tuple{"sample_game1.pgn", 66u, 1224, 1238}, std::tuple{"sample_game2.pgn", 50u, 2922, 3163}}) {
    auto in = open_dump(fixture(name));
    const auto games = stream_all(*in);
    ASSERT_EQ(games.size(), 1u) << name;
    EXPECT_EQ(games[0].ply_count(), plies);
    EXPECT_EQ(games[0].white_rating, white);
    EXPECT_EQ(games[0].black_rating, black);
    EXPECT_EQ(games[0].category, TimeCategory::Bullet);
    // No increment: each player's clock never goes up.
    for (std::size_t t = 2; t < games[0].clocks_remaining.size(); ++t)
      EXPECT_LE(games[0].clocks_remaining[t], games[0].clocks_remaining[t - 2]);
  }
}

TEST(GameStream, HandlesCrlfAndMissingBlankLines) {
  std::string pgn = game("[TimeControl \"300+3\"]\n", kGoodMoves) + game("[TimeControl \"300+3\"]\n", kGoodMoves + " ");
  std::string crlf;
  for (char c : pgn) crlf += c == '\n' ? std::string("\r\n") : std::string(1, c);
  std::istringstream in(crlf);
  EXPECT_EQ(stream_all(in).size(), 2u);
}

TEST(GameStream, CorruptionReportsByteOffset) {
  std::string pgn = game("[TimeControl \"300+3\"]\n", kGoodMoves);
  const std::size_t bad_at = pgn.size() + 10;
  pgn += game("[TimeControl \"300+3\"]\n", kGoodMoves);
  pgn[bad_at] = '\0';
  std::istringstream in(pgn);
  GameStream s(in);
  ASSERT_TRUE(s.next());
  try {
    s.next();
    FAIL() << "expected corruption";
  } catch (const StreamCorruption& e) {
    EXPECT_EQ(e.offset(), bad_at);
  }
}

TEST(GameStream, ReadsZstdCompressedDumps) {
  const std::string plain = read_file(fixture("sample_game1.pgn")) + read_file(fixture("sample_game2.pgn"));
  const std::string path = testing::TempDir() + "/dump.pgn.zst";
  {
    std::ofstream file(path, std::ios::binary);
    boost::iostreams::filtering_ostream out;
    out.push(boost::iostreams::zstd_compressor());
    out.push(file);
    out << plain;
  }
  auto in = open_dump(path);
  const auto games = stream_all(*in);
  ASSERT_EQ(games.size(), 2u);
  EXPECT_EQ(games[1].black_rating, 3163);

  // Truncated frame: decompression must fail loudly, not silently stop.
  const std::string compressed = read_file(path);
  const std::string broken_path = testing::TempDir() + "/broken.pgn.zst";
  {
    std::ofstream file(broken_path, std::ios::binary);
    file << compressed.substr(0, 20) << std::string(64, '\x7f') << compressed.substr(20);
  }
  auto broken = open_dump(broken_path);
  EXPECT_THROW(stream_all(*broken), StreamCorruption);
}

TEST(Dataset, RecordRoundTripAndSpentClock) {
  auto g = synthetic_record("abc", "2022-01", 1800, 1700);
  g.base_seconds = 60;
  g.increment_seconds = 1;
  g.san_moves = {"e4", "e5", "Nf3"};
  g.clocks_remaining = {60, 58, 55};
  const auto line = format_record(g);
  EXPECT_EQ(parse_record(line), g);
  EXPECT_EQ(clock_spent(g), (std::vector<int>{1, 3, 6}));
  EXPECT_THROW(parse_record("id=x\tmonth=2022-01"), IngestError);

  std::stringstream file;
  write_dataset(file, {g, g});
  EXPECT_EQ(read_dataset(file).size(), 2u);
}

TEST(Sampling, SplitsEightyTwentyAndIsDeterministic) {
  std::vector<GameRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(synthetic_record("g" + std::to_string(i), "2021-05", 1400 + i, 1500));
  const auto a = sample_and_split(records, 1000, 0.8, 42);
  EXPECT_EQ(a.manifest.train_ids.size(), 80u);
  EXPECT_EQ(a.manifest.test_ids.size(), 20u);
  std::set<std::string> train(a.manifest.train_ids.begin(), a.manifest.train_ids.end());
  for (const auto& id : a.manifest.test_ids) EXPECT_FALSE(train.count(id));

  const auto b = sample_and_split(records, 1000, 0.8, 42);
  EXPECT_EQ(manifest_to_json(a.manifest), manifest_to_json(b.manifest));
  const auto c = sample_and_split(records, 1000, 0.8, 43);
  EXPECT_NE(a.manifest.train_ids, c.manifest.train_ids);

  const auto parsed = manifest_from_json(manifest_to_json(a.manifest));
  EXPECT_EQ(parsed, a.manifest);
}

TEST(Sampling, ReservoirCapsEachMonth) {
  std::vector<GameRecord> records;
  for (int m = 1; m <= 3; ++m)
    for (int i = 0; i < 50 * m; ++i)
      records.push_back(synthetic_record("m" + std::to_string(m) + "-" + std::to_string(i), "2023-0" + std::to_string(m), 1500, 1500));
  MonthlySampler sampler(40, 9);
  for (const auto& r : records) sampler.add(r);
  sampler.note_month("2023-04");
  const auto result = sampler.finish(0.8);
  EXPECT_EQ(result.games.size(), 120u);
  EXPECT_EQ(result.manifest.months.at("2023-01").seen, 50u);
  EXPECT_EQ(result.manifest.months.at("2023-03").kept, 40u);
  EXPECT_EQ(result.manifest.months.at("2023-04").kept, 0u);
  EXPECT_EQ(result.manifest.train_ids.size(), 96u);

  // Reservoir sampling is uniform: every game of a 150-game month should appear
  // in roughly 40/150 of independent draws.
  std::vector<int> hits(150, 0);
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    MonthlySampler s(40, static_cast<std::uint64_t>(t));
    for (int i = 0; i < 150; ++i) s.add(synthetic_record(std::to_string(i), "2023-03", 1500, 1500));
    for (const auto& g : s.finish(1.0).games) ++hits[std::stoi(g.id)];
  }
  const double expected = trials * 40.0 / 150.0;
  int first_half = 0;
  for (int i = 0; i < 75; ++i) first_half += hits[i];
  EXPECT_NEAR(first_half / 75.0, expected, 0.1 * expected);
}

TEST(Sampling, StatisticsComeFromTrainSplitOnly) {
  std::vector<GameRecord> records;
  for (int i = 0; i < 10; ++i) records.push_back(synthetic_record("g" + std::to_string(i), "2021-05", 1000 + 100 * i, 1500));
  const auto r = sample_and_split(records, 100, 0.5, 5);
  double sum = 0.0;
  for (const auto& g : r.games)
    if (std::find(r.manifest.train_ids.begin(), r.manifest.train_ids.end(), g.id) != r.manifest.train_ids.end())
      sum += g.white_rating + g.black_rating;
  EXPECT_NEAR(r.manifest.rating_mean, sum / 10.0, 1e-9);
  EXPECT_GT(r.manifest.rating_std, 0.0);
}
