#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ratingnet/model/checkpoint.hpp"

namespace fs = std::filesystem;
using ratingnet::model::load_checkpoint;

namespace {

const std::string kBin = RATINGNET_BIN;
const std::string kFixtures = RATINGNET_FIXTURE_DIR;
const std::string kTinyNet = " --channels 4,4 --lstm-hidden 4 --fc-hidden 4 --lr 1e-3 --batch-size 8";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream s(text);
  for (std::string line; std::getline(s, line);) out.push_back(line);
  return out;
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("ratingnet_cli_" + std::string(info->name()) + "_" +
                                        std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

  Outcome run(const std::string& args) const {
    const auto out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = "cd '" + dir_.string() + "' && '" + kBin + "' " + args + " >'" + out + "' 2>'" + err + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
  }

  // Ingests both monthly fixture dumps into `out`.
  Outcome ingest(const std::string& out, const std::string& extra = "") const {
    return run("ingest --input " + fixture("cli/dump_2024-06.pgn") + " --input " + fixture("cli/dump_2024-07.pgn") +
               " --out " + out + extra);
  }

  Outcome train(const std::string& out, const std::string& extra) const {
    return run("train --dataset ing/dataset.tsv --manifest ing/manifest.json --out " + out + kTinyNet + extra);
  }

  fs::path dir_;
};

std::vector<double> glicko_row(const std::string& out) {
  const auto rows = lines_of(out);
  EXPECT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows.at(0), "rating,rd,volatility");
  std::vector<double> v;
  std::istringstream s(rows.at(1));
  for (std::string cell; std::getline(s, cell, ',');) v.push_back(std::stod(cell));
  return v;
}

}  // namespace

TEST_F(CliTest, GlickoWorkedExample) {
  const auto r = run("glicko --input " + fixture("cli/glickman_example.txt"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = glicko_row(r.out);
  EXPECT_NEAR(v[0], 1464.05, 0.01);
  EXPECT_NEAR(v[1], 151.52, 0.01);
  EXPECT_NEAR(v[2], 0.05999, 1e-5);
}

TEST_F(CliTest, GlickoIdlePeriodOnlyWidensDeviation) {
  const auto r = run("glicko --input " + fixture("cli/idle_player.txt"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto v = glicko_row(r.out);
  const double scale = 173.7178;
  const double phi = 200.0 / scale;
  EXPECT_NEAR(v[0], 1500.0, 1e-6);
  EXPECT_NEAR(v[1], std::sqrt(phi * phi + 0.06 * 0.06) * scale, 1e-5);
  EXPECT_NEAR(v[2], 0.06, 1e-9);
}

TEST_F(CliTest, GlickoTauFlagChangesVolatility) {
  const auto a = run("glicko --input " + fixture("cli/glickman_example.txt") + " --tau 0.5");
  const auto b = run("glicko --input " + fixture("cli/glickman_example.txt") + " --tau 1.2");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_NE(glicko_row(a.out)[2], glicko_row(b.out)[2]);
  EXPECT_NE(b.err.find("tau=1.2"), std::string::npos);
}

TEST_F(CliTest, IngestIsDeterministicAndReportsSkips) {
  ASSERT_EQ(ingest("a").code, 0);
  ASSERT_EQ(ingest("b").code, 0);
  EXPECT_EQ(read_file(path("a/manifest.json")), read_file(path("b/manifest.json")));
  EXPECT_EQ(read_file(path("a/dataset.tsv")), read_file(path("b/dataset.tsv")));
  const auto skips = read_file(path("a/skip_report.csv"));
  EXPECT_NE(skips.find("dump_2024-06.pgn,unrated,1"), std::string::npos) << skips;
  EXPECT_NE(skips.find("dump_2024-06.pgn,missing_clock,1"), std::string::npos) << skips;

  const auto m = nlohmann::json::parse(read_file(path("a/manifest.json")));
  EXPECT_EQ(m["train_ids"].size() + m["test_ids"].size(), 64u);

  const auto meta = nlohmann::json::parse(read_file(path("a/run.json")));
  EXPECT_EQ(meta["command"], "ingest");
  EXPECT_EQ(meta["inputs"].size(), 2u);
  EXPECT_EQ(meta["outputs"].size(), 3u);
  EXPECT_EQ(meta["config_sha256"].get<std::string>().size(), 64u);
  EXPECT_FALSE(meta.contains("timestamp"));
}

TEST_F(CliTest, IngestSeedChangesSplit) {
  ASSERT_EQ(ingest("a").code, 0);
  ASSERT_EQ(run("--seed 99 ingest --input " + fixture("cli/dump_2024-06.pgn") + " --input " +
                fixture("cli/dump_2024-07.pgn") + " --out b")
                .code,
            0);
  EXPECT_NE(read_file(path("a/manifest.json")), read_file(path("b/manifest.json")));
}

TEST_F(CliTest, IngestCorruptDumpFailsWithOffset) {
  const auto r = run("ingest --input " + fixture("cli/corrupt.pgn") + " --out bad");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("byte offset"), std::string::npos) << r.err;
}

TEST_F(CliTest, TrainCompletesAndNoClockIsRecorded) {
  ASSERT_EQ(ingest("ing").code, 0);
  const auto a = train("with", " --epochs 2");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(lines_of(read_file(path("with/loss_curve.csv"))).size(), 3u);
  EXPECT_TRUE(load_checkpoint(path("with/checkpoint.bin")).net->config().clock_feature_enabled);

  const auto b = train("without", " --epochs 1 --no-clock");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_FALSE(load_checkpoint(path("without/checkpoint.bin")).net->config().clock_feature_enabled);
}

TEST_F(CliTest, ResumeContinuesStepCounter) {
  ASSERT_EQ(ingest("ing").code, 0);
  ASSERT_EQ(train("t", " --epochs 1").code, 0);
  const auto before = load_checkpoint(path("t/checkpoint.bin")).state;
  const auto r = train("t", " --epochs 3 --patience 100 --resume t/checkpoint.bin");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("resuming after epoch 1"), std::string::npos);
  const auto curve = lines_of(read_file(path("t/loss_curve.csv")));
  ASSERT_EQ(curve.size(), 4u);
  EXPECT_EQ(curve[1].substr(0, 2), "1,");
  EXPECT_EQ(curve[3].substr(0, 2), "3,");
  const auto after = load_checkpoint(path("t/checkpoint.bin")).state;
  EXPECT_GT(after.epoch, before.epoch);
  EXPECT_GT(after.adam_steps, before.adam_steps);
}

TEST_F(CliTest, TrainIsDeterministic) {
  ASSERT_EQ(ingest("ing").code, 0);
  ASSERT_EQ(train("a", " --epochs 2").code, 0);
  ASSERT_EQ(train("b", " --epochs 2").code, 0);
  EXPECT_EQ(read_file(path("a/loss_curve.csv")), read_file(path("b/loss_curve.csv")));
  EXPECT_EQ(read_file(path("a/checkpoint.bin")), read_file(path("b/checkpoint.bin")));
}

TEST_F(CliTest, ConfigFileSitsBetweenDefaultsAndFlags) {
  ASSERT_EQ(ingest("ing").code, 0);
  std::ofstream(path("run.ini")) << "[train]\nepochs = 2\nlstm-hidden = 3\n";
  ASSERT_EQ(run("--config run.ini train --dataset ing/dataset.tsv --out f --channels 4 --fc-hidden 4").code, 0);
  EXPECT_EQ(lines_of(read_file(path("f/loss_curve.csv"))).size(), 3u);
  EXPECT_EQ(load_checkpoint(path("f/checkpoint.bin")).net->config().lstm_hidden, 3);

  const auto r = run("train --config run.ini --dataset ing/dataset.tsv --out g --channels 4 --fc-hidden 4 --epochs 1");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(read_file(path("g/loss_curve.csv"))).size(), 2u);
  EXPECT_EQ(load_checkpoint(path("g/checkpoint.bin")).net->config().lstm_hidden, 3);
  EXPECT_NE(r.err.find("epochs=1"), std::string::npos);
}

TEST_F(CliTest, EvalReportAndCategoryFilter) {
  ASSERT_EQ(ingest("ing").code, 0);
  ASSERT_EQ(train("t", " --epochs 1").code, 0);
  const std::string base = "eval --checkpoint t/checkpoint.bin --dataset ing/dataset.tsv --manifest ing/manifest.json";
  const auto all = run(base);
  ASSERT_EQ(all.code, 0) << all.err;
  const auto rows = lines_of(all.out);
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], "metric,time_control,games,RatingNet,Mean");

  const auto bullet = run(base + " --category bullet");
  ASSERT_EQ(bullet.code, 0);
  const auto b = lines_of(bullet.out);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[1].substr(0, 11), "MAE,Bullet,");
  EXPECT_EQ(b[2].substr(0, 11), "MSE,Bullet,");

  EXPECT_EQ(run(base + " --category hyperbullet").code, 2);
}

TEST_F(CliTest, EvalMissingCheckpointIsInputError) {
  ASSERT_EQ(ingest("ing").code, 0);
  const auto r = run("eval --checkpoint nowhere.bin --dataset ing/dataset.tsv");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("checkpoint not found: nowhere.bin"), std::string::npos) << r.err;
}

TEST_F(CliTest, PredictSampleGameStdoutMatchesFile) {
  ASSERT_EQ(ingest("ing").code, 0);
  ASSERT_EQ(train("t", " --epochs 1").code, 0);
  const std::string base = "predict --checkpoint t/checkpoint.bin --pgn " + fixture("sample_game1.pgn");
  const auto to_stdout = run(base);
  ASSERT_EQ(to_stdout.code, 0) << to_stdout.err;
  ASSERT_EQ(run(base + " --out traj.csv").code, 0);
  EXPECT_EQ(to_stdout.out, read_file(path("traj.csv")));
  const auto rows = lines_of(to_stdout.out);
  ASSERT_EQ(rows.size(), 67u);
  EXPECT_EQ(rows[0], "ply,san,white_estimate,black_estimate");
  EXPECT_EQ(rows[66].substr(0, 7), "66,Rg5,");
}

TEST_F(CliTest, PredictMalformedPgnIsInputError) {
  ASSERT_EQ(ingest("ing").code, 0);
  ASSERT_EQ(train("t", " --epochs 1").code, 0);
  EXPECT_EQ(run("predict --checkpoint t/checkpoint.bin --pgn " + fixture("cli/corrupt.pgn")).code, 2);
  std::ofstream(path("illegal.pgn")) << "[Event \"Rated Blitz game\"]\n[WhiteElo \"1500\"]\n[BlackElo \"1500\"]\n"
                                        "[TimeControl \"300+0\"]\n[Result \"1-0\"]\n\n"
                                        "1. e5 { [%clk 0:05:00] } 1-0\n";
  EXPECT_EQ(run("predict --checkpoint t/checkpoint.bin --pgn illegal.pgn").code, 2);
}

TEST_F(CliTest, PuzzleTrainAndEval) {
  const auto t = run("puzzle train --puzzles " + fixture("cli/puzzles.csv") +
                     " --out pz --channels 4 --lstm-hidden 4 --fc-hidden 4 --epochs 2");
  ASSERT_EQ(t.code, 0) << t.err;
  const auto e = run("puzzle eval --checkpoint pz/checkpoint.bin --puzzles " + fixture("cli/puzzles.csv"));
  ASSERT_EQ(e.code, 0) << e.err;
  const auto rows = lines_of(e.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "puzzles,mse,mae,reference_mse");
  EXPECT_EQ(rows[1].substr(0, 3), "12,");

  const auto lines = lines_of(read_file(fixture("cli/puzzles.csv")));
  std::ofstream(path("one.csv")) << lines[0] << '\n' << lines[1] << '\n';
  const auto one = run("puzzle eval --checkpoint pz/checkpoint.bin --puzzles one.csv");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(lines_of(one.out).at(1).substr(0, 2), "1,");

  std::ofstream(path("empty.csv")).flush();
  EXPECT_EQ(run("puzzle eval --checkpoint pz/checkpoint.bin --puzzles empty.csv").code, 2);
}

TEST_F(CliTest, UnknownFlagIsInputError) {
  EXPECT_EQ(run("glicko --input x --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
}
