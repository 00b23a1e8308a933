#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "commands.hpp"
#include "data.hpp"
#include "ratingnet/chess/types.hpp"
#include "ratingnet/features/encoded_io.hpp"
#include "ratingnet/glicko2/glicko2.hpp"
#include "ratingnet/model/checkpoint.hpp"
#include "ratingnet/model/puzzle.hpp"
#include "ratingnet/model/trainer.hpp"
#include "ratingnet/pgn/game_record.hpp"

namespace cli = ratingnet::cli;

namespace {

void add_net_options(CLI::App* sub, cli::NetOptions& n) {
  sub->add_option("--channels", n.channels, "Conv widths, one per block (1 to 4)")->delimiter(',');
  sub->add_option("--lstm-hidden", n.lstm_hidden, "Hidden units per LSTM direction")->check(CLI::PositiveNumber);
  sub->add_option("--fc-hidden", n.fc_hidden, "Width of the first dense layer")->check(CLI::PositiveNumber);
  sub->add_option("--leaky-slope", n.leaky_slope, "Negative slope of the leaky ReLU");
  sub->add_option("--dropout", n.dropout, "Dropout probability in the head")->check(CLI::Range(0.0, 0.999));
  sub->add_option("--lr", n.learning_rate, "Initial learning rate");
  sub->add_option("--weight-decay", n.weight_decay, "Decoupled weight decay");
  sub->add_option("--patience", n.patience, "Plateau patience in epochs");
  sub->add_option("--factor", n.factor, "Plateau reduction factor");
  sub->add_option("--epochs", n.epochs, "Epoch cap")->check(CLI::NonNegativeNumber);
  sub->add_option("--batch-size", n.batch_size, "Games per mini-batch")->check(CLI::PositiveNumber);
  sub->add_option("--loss", n.loss, "per_move or final_step")->check(CLI::IsMember({"per_move", "final_step"}));
  sub->add_flag("--no-clock", n.no_clock, "Zero the clock input");
  sub->add_option("--validation-fraction", n.validation_fraction, "Share of train games held out for monitoring")
      ->check(CLI::Range(0.0, 0.9));
}

// Where run.json goes when --run-metadata is not given.
std::string default_metadata_path(const std::string& out_dir, const std::string& out_file) {
  if (!out_dir.empty()) return cli::join_path(out_dir, "run.json");
  if (!out_file.empty()) return out_file + ".run.json";
  return {};
}

int classify(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const ratingnet::model::TrainingDiverged& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitRuntimeError;
  } catch (const ratingnet::glicko2::ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitRuntimeError;
  } catch (const cli::UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  } catch (const ratingnet::pgn::IngestError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
  } catch (const ratingnet::chess::ChessError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
  } catch (const ratingnet::features::FormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
  } catch (const ratingnet::model::CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error: %s\n", e.what());
  } catch (const ratingnet::model::PuzzleFormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
  } catch (const ratingnet::glicko2::GlickoError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kExitRuntimeError;
  }
  return cli::kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chess rating estimation from moves and clock times"};
  app.name("ratingnet");
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Config file; keys live in [subcommand] sections");

  std::uint64_t seed = cli::kDefaultSeed;
  int workers = 1;
  std::string metadata_path;
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--workers", workers, "Worker threads")->envname("RATINGNET_WORKERS")->check(CLI::PositiveNumber);
  app.add_option("--run-metadata", metadata_path, "Where to write the run metadata JSON");

  cli::IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Sample rated games from PGN dumps and split them");
  c_ingest->add_option("--input", ingest.inputs, "PGN dump, plain or .zst (repeatable)")->required();
  c_ingest->add_option("--games-per-month", ingest.games_per_month, "Games sampled from each month");
  c_ingest->add_option("--train-fraction", ingest.train_fraction, "Share of games in the train split")
      ->check(CLI::Range(0.0, 1.0));
  c_ingest->add_option("--out", ingest.out_dir, "Output directory")->required();

  cli::EncodeArgs encode;
  auto* c_encode = app.add_subcommand("encode", "Encode a dataset split into the binary feature format");
  c_encode->add_option("--dataset", encode.dataset, "Dataset file")->required();
  c_encode->add_option("--manifest", encode.manifest, "Manifest with the split and statistics");
  c_encode->add_option("--split", encode.split, "train, test or all");
  c_encode->add_option("--clock-feature", encode.clock_feature, "remaining or spent");
  c_encode->add_option("--out", encode.out, "Encoded output file")->required();

  cli::TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a rating network on the train split");
  c_train->add_option("--dataset", train.dataset, "Dataset file")->required();
  c_train->add_option("--manifest", train.manifest, "Manifest; without one every game is used for training");
  c_train->add_option("--clock-feature", train.clock_feature, "remaining or spent");
  c_train->add_option("--resume", train.resume, "Checkpoint to continue from");
  c_train->add_option("--out", train.out_dir, "Output directory")->required();
  add_net_options(c_train, train.net);

  cli::EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Score a checkpoint against the mean baseline");
  c_eval->add_option("--checkpoint", eval.checkpoint, "Trained checkpoint")->required();
  c_eval->add_option("--dataset", eval.dataset, "Dataset file")->required();
  c_eval->add_option("--manifest", eval.manifest, "Manifest with the split");
  c_eval->add_option("--split", eval.split, "train, test or all");
  c_eval->add_option("--category", eval.category, "Keep only one time control row");
  c_eval->add_option("--out", eval.out, "Report file (default stdout)");

  cli::AblateArgs ablate;
  auto* c_ablate = app.add_subcommand("ablate", "Train with and without clocks and compare");
  c_ablate->add_option("--dataset", ablate.dataset, "Dataset file");
  c_ablate->add_option("--manifest", ablate.manifest, "Manifest with the split");
  c_ablate->add_option("--synthetic", ablate.synthetic, "Use this many synthetic clock-driven games instead");
  c_ablate->add_option("--corpus-seed", ablate.corpus_seed, "Seed of the synthetic corpus and its split");
  c_ablate->add_option("--clock-feature", ablate.clock_feature, "remaining or spent");
  c_ablate->add_option("--out", ablate.out_dir, "Output directory")->required();
  add_net_options(c_ablate, ablate.net);

  cli::PredictArgs predict;
  auto* c_predict = app.add_subcommand("predict", "Per-ply rating estimates for the games of a PGN file");
  c_predict->add_option("--checkpoint", predict.checkpoint, "Trained checkpoint")->required();
  c_predict->add_option("--pgn", predict.pgn, "PGN file")->required();
  c_predict->add_option("--out", predict.out, "Trajectory file (default stdout)");

  auto* c_puzzle = app.add_subcommand("puzzle", "Puzzle difficulty regression");
  c_puzzle->require_subcommand(1);
  cli::PuzzleTrainArgs ptrain;
  auto* c_ptrain = c_puzzle->add_subcommand("train", "Train a puzzle model");
  c_ptrain->add_option("--puzzles", ptrain.puzzles, "Puzzle CSV")->required();
  c_ptrain->add_option("--out", ptrain.out_dir, "Output directory")->required();
  add_net_options(c_ptrain, ptrain.net);
  cli::PuzzleEvalArgs peval;
  auto* c_peval = c_puzzle->add_subcommand("eval", "Score a puzzle model");
  c_peval->add_option("--checkpoint", peval.checkpoint, "Puzzle checkpoint")->required();
  c_peval->add_option("--puzzles", peval.puzzles, "Puzzle CSV with ratings")->required();
  c_peval->add_option("--out", peval.out, "Report file (default stdout)");

  cli::GlickoArgs glicko;
  auto* c_glicko = app.add_subcommand("glicko", "One Glicko-2 rating period for one player");
  c_glicko->add_option("--input", glicko.input, "Lines 'player R RD vol' and 'opponent R RD score'")->required();
  c_glicko->add_option("--tau", glicko.tau, "System constant");
  c_glicko->add_option("--epsilon", glicko.epsilon, "Volatility iteration tolerance");
  c_glicko->add_option("--out", glicko.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitInputError;
  }

  CLI::App* active = app.get_subcommands().front();
  std::string section = active->get_name();
  if (!active->get_subcommands().empty()) {
    active = active->get_subcommands().front();
    section += "." + active->get_name();
  }

  cli::RunRecord rec;
  rec.seed = seed;
  rec.effective_config = "seed=" + std::to_string(seed) + "\nworkers=" + std::to_string(workers) + "\n[" + section +
                         "]\n" + active->config_to_str(true, false);
  std::fprintf(stderr, "# effective configuration\n%s", rec.effective_config.c_str());
  if (workers > 1) std::fprintf(stderr, "note: work runs on one thread; --workers %d is recorded only\n", workers);

  std::function<void()> run;
  std::string out_dir, out_file;
  if (c_ingest->parsed()) {
    rec.command = "ingest", out_dir = ingest.out_dir, run = [&] { cli::run_ingest(ingest, rec); };
  } else if (c_encode->parsed()) {
    rec.command = "encode", out_file = encode.out, run = [&] { cli::run_encode(encode, rec); };
  } else if (c_train->parsed()) {
    rec.command = "train", out_dir = train.out_dir, run = [&] { cli::run_train(train, rec); };
  } else if (c_eval->parsed()) {
    rec.command = "eval", out_file = eval.out, run = [&] { cli::run_eval(eval, rec); };
  } else if (c_ablate->parsed()) {
    rec.command = "ablate", out_dir = ablate.out_dir, run = [&] { cli::run_ablate(ablate, rec); };
  } else if (c_predict->parsed()) {
    rec.command = "predict", out_file = predict.out, run = [&] { cli::run_predict(predict, rec); };
  } else if (c_ptrain->parsed()) {
    rec.command = "puzzle train", out_dir = ptrain.out_dir, run = [&] { cli::run_puzzle_train(ptrain, rec); };
  } else if (c_peval->parsed()) {
    rec.command = "puzzle eval", out_file = peval.out, run = [&] { cli::run_puzzle_eval(peval, rec); };
  } else {
    rec.command = "glicko", out_file = glicko.out, run = [&] { cli::run_glicko(glicko, rec); };
  }

  try {
    run();
    if (metadata_path.empty()) metadata_path = default_metadata_path(out_dir, out_file);
    if (!metadata_path.empty())
      cli::write_text_file(metadata_path, cli::run_metadata_json(rec, std::vector<std::string>(argv, argv + argc)));
  } catch (...) {
    return classify(std::current_exception());
  }
  return cli::kExitOk;
}
