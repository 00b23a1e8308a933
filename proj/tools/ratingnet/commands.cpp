#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "data.hpp"
#include "ratingnet/features/encoded_io.hpp"
#include "ratingnet/glicko2/glicko2.hpp"
#include "ratingnet/model/evaluate.hpp"
#include "ratingnet/model/puzzle.hpp"
#include "ratingnet/model/synthetic.hpp"
#include "ratingnet/model/trainer.hpp"
#include "ratingnet/model/trajectory.hpp"
#include "ratingnet/pgn/pgn_reader.hpp"

namespace ratingnet::cli {

model::RatingNetConfig NetOptions::to_config(std::uint64_t seed) const {
  model::RatingNetConfig cfg;
  cfg.channels = channels;
  cfg.lstm_hidden = lstm_hidden;
  cfg.fc_hidden = fc_hidden;
  cfg.leaky_slope = leaky_slope;
  cfg.clock_feature_enabled = !no_clock;
  cfg.loss_mode = model::parse_loss_mode(loss);
  cfg.schedule.dropout_p = dropout;
  cfg.schedule.learning_rate = learning_rate;
  cfg.schedule.weight_decay = weight_decay;
  cfg.schedule.plateau_patience = patience;
  cfg.schedule.plateau_factor = factor;
  cfg.schedule.epoch_cap = epochs;
  cfg.schedule.batch_size = batch_size;
  cfg.schedule.seed = seed;
  cfg.validate();
  return cfg;
}

namespace {

std::string curve_text(const std::vector<model::EpochRecord>& curve) {
  std::ostringstream s;
  model::write_loss_curve(s, curve);
  return s.str();
}

void log_epoch(const model::EpochRecord& e) {
  std::fprintf(stderr, "epoch %d train_loss %.6g monitor_loss %.6g lr %.3g\n", e.epoch, e.train_loss,
               e.monitor_loss, e.learning_rate);
}

double population_std(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

void run_ingest(const IngestArgs& a, RunRecord& rec) {
  if (a.inputs.empty()) throw UsageError("at least one --input dump is required");
  for (const auto& p : a.inputs) require_file(p, "input dump");
  if (a.games_per_month == 0) throw UsageError("--games-per-month must be positive");
  ensure_dir(a.out_dir);

  pgn::MonthlySampler sampler(a.games_per_month, rec.seed);
  std::ostringstream skips;
  skips << "input,reason,count\n";
  for (const auto& path : a.inputs) {
    auto in = pgn::open_dump(path);
    pgn::GameStream stream(*in);
    while (auto g = stream.next()) sampler.add(std::move(*g));
    const auto& st = stream.stats();
    skips << path << ",seen," << st.games_seen << '\n' << path << ",kept," << st.games_kept << '\n';
    for (const auto& [reason, n] : st.skipped) skips << path << ',' << reason << ',' << n << '\n';
    std::fprintf(stderr, "%s: %llu games seen, %llu kept\n", path.c_str(),
                 static_cast<unsigned long long>(st.games_seen), static_cast<unsigned long long>(st.games_kept));
    rec.inputs.push_back(path);
  }
  auto result = sampler.finish(a.train_fraction);

  const auto dataset = join_path(a.out_dir, "dataset.tsv");
  const auto manifest = join_path(a.out_dir, "manifest.json");
  const auto report = join_path(a.out_dir, "skip_report.csv");
  pgn::write_dataset_file(dataset, result.games);
  pgn::write_manifest(manifest, result.manifest);
  write_text_file(report, skips.str());
  rec.outputs = {dataset, manifest, report};
  std::fprintf(stderr, "%zu games retained (%zu train, %zu test)\n", result.games.size(),
               result.manifest.train_ids.size(), result.manifest.test_ids.size());
}

void run_encode(const EncodeArgs& a, RunRecord& rec) {
  const auto split = parse_split(a.split);
  const auto feature = parse_clock_feature(a.clock_feature);
  if (a.out.empty()) throw UsageError("--out is required");
  const auto d = load_dataset(a.dataset, a.manifest);
  const auto constants = constants_for(d.manifest, feature);

  features::EncodedDataset enc;
  enc.clock = constants.clock;
  enc.rating = constants.rating;
  enc.clock_feature = feature;
  enc.sequences = encode_split(d, split, constants.encoder());
  features::write_encoded_file(a.out, enc);

  rec.inputs = {a.dataset};
  if (!a.manifest.empty()) rec.inputs.push_back(a.manifest);
  rec.outputs = {a.out};
  std::fprintf(stderr, "encoded %zu sequences\n", enc.sequences.size());
}

void run_train(const TrainArgs& a, RunRecord& rec) {
  const auto feature = parse_clock_feature(a.clock_feature);
  auto cfg = a.net.to_config(rec.seed);
  ensure_dir(a.out_dir);
  const auto d = load_dataset(a.dataset, a.manifest);
  rec.inputs = {a.dataset};
  if (!a.manifest.empty()) rec.inputs.push_back(a.manifest);

  model::EncodingConstants constants = constants_for(d.manifest, feature);
  model::TrainingState state;
  std::unique_ptr<model::Net> net;
  if (!a.resume.empty()) {
    require_file(a.resume, "checkpoint");
    auto loaded = model::load_checkpoint(a.resume);
    rec.inputs.push_back(a.resume);
    // Architecture, seed and encoding come from the checkpoint; only the epoch cap may grow.
    auto resumed = loaded.net->config();
    resumed.schedule.epoch_cap = cfg.schedule.epoch_cap;
    net = std::make_unique<model::Net>(resumed);
    auto src = loaded.net->parameters();
    auto dst = net->parameters();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i].tensor->data = src[i].tensor->data;
    auto src_buf = loaded.net->buffers();
    auto dst_buf = net->buffers();
    for (std::size_t i = 0; i < src_buf.size(); ++i) dst_buf[i].tensor->data = src_buf[i].tensor->data;
    constants = loaded.constants;
    state = loaded.state;
    std::fprintf(stderr, "resuming after epoch %d (%llu optimizer steps)\n", state.epoch,
                 static_cast<unsigned long long>(state.adam_steps));
  } else {
    net = std::make_unique<model::Net>(cfg);
  }

  const auto train_set = encode_split(d, Split::Train, constants.encoder());
  if (train_set.empty()) throw UsageError("the train split is empty");

  model::TrainOptions opt;
  opt.validation_fraction = a.net.validation_fraction;
  opt.checkpoint_path = join_path(a.out_dir, "checkpoint.bin");
  opt.on_epoch = [](const model::EpochRecord& e) {
    log_epoch(e);
    return true;
  };
  auto result = model::train(*net, train_set, constants, opt, state);
  // The saved checkpoint holds the best epoch; make sure one exists even if no epoch ran.
  if (result.curve.empty()) model::save_checkpoint(opt.checkpoint_path, *net, constants, result.state);

  const auto curve = join_path(a.out_dir, "loss_curve.csv");
  std::string prior;
  if (!a.resume.empty()) {
    std::ifstream old(curve);
    if (old) prior.assign(std::istreambuf_iterator<char>(old), {});
  }
  auto text = curve_text(result.curve);
  if (!prior.empty()) {
    // Keep earlier rows up to the epoch the checkpoint resumed from, then append the new ones.
    std::istringstream lines(prior);
    std::string line, kept;
    std::getline(lines, line);
    kept = line + '\n';
    while (std::getline(lines, line))
      if (!line.empty() && std::stoi(line) <= state.epoch) kept += line + '\n';
    text = kept + text.substr(text.find('\n') + 1);
  }
  write_text_file(curve, text);
  rec.outputs = {opt.checkpoint_path, curve};
  std::fprintf(stderr, "best epoch %d, loss %.6g\n", result.best_epoch, result.best_loss);
}

void run_eval(const EvalArgs& a, RunRecord& rec) {
  require_file(a.checkpoint, "checkpoint");
  const auto split = parse_split(a.split);
  std::optional<pgn::TimeCategory> only;
  if (!a.category.empty()) {
    only = pgn::parse_category(a.category);
    if (!only) throw UsageError("unknown time control '" + a.category + "'");
  }
  auto ck = model::load_checkpoint(a.checkpoint);
  const auto d = load_dataset(a.dataset, a.manifest);
  const auto train_set = encode_split(d, Split::Train, ck.constants.encoder());
  const auto test_set = encode_split(d, split, ck.constants.encoder());
  if (train_set.empty()) throw UsageError("the mean baseline needs a non-empty train split");

  auto report = model::evaluate(*ck.net, test_set, ck.constants.rating, model::baseline_mean(train_set));
  std::ostringstream s;
  model::write_report(s, report, only);
  if (a.out.empty()) {
    std::cout << s.str() << std::flush;
  } else {
    write_text_file(a.out, s.str());
    rec.outputs = {a.out};
  }
  rec.inputs = {a.checkpoint, a.dataset};
  if (!a.manifest.empty()) rec.inputs.push_back(a.manifest);
}

void run_ablate(const AblateArgs& a, RunRecord& rec) {
  const auto feature = parse_clock_feature(a.clock_feature);
  const auto cfg = a.net.to_config(rec.seed);
  ensure_dir(a.out_dir);
  LoadedDataset d;
  if (a.synthetic > 0) {
    model::SyntheticConfig sc;
    sc.games = a.synthetic;
    sc.seed = a.corpus_seed;
    d = split_games(model::synthetic_corpus(sc), 0.8, a.corpus_seed);
  } else {
    d = load_dataset(a.dataset, a.manifest);
    rec.inputs = {a.dataset};
    if (!a.manifest.empty()) rec.inputs.push_back(a.manifest);
  }
  const auto constants = constants_for(d.manifest, feature);
  const auto train_set = encode_split(d, Split::Train, constants.encoder());
  const auto test_set = encode_split(d, Split::Test, constants.encoder());
  if (train_set.empty() || test_set.empty()) throw UsageError("ablation needs non-empty train and test splits");

  auto result = model::ablate_clock(cfg, train_set, test_set, constants);
  std::ostringstream report, deltas;
  model::write_report(report, result.report);
  model::write_ablation_deltas(deltas, result.report);
  const std::vector<std::pair<std::string, std::string>> files{
      {"report.csv", report.str()},
      {"deltas.csv", deltas.str()},
      {"loss_curve_clock.csv", curve_text(result.clocked.curve)},
      {"loss_curve_no_clock.csv", curve_text(result.no_clock.curve)},
  };
  for (const auto& [name, text] : files) {
    write_text_file(join_path(a.out_dir, name), text);
    rec.outputs.push_back(join_path(a.out_dir, name));
  }
  std::cout << deltas.str() << std::flush;
}

void run_predict(const PredictArgs& a, RunRecord& rec) {
  require_file(a.checkpoint, "checkpoint");
  require_file(a.pgn, "PGN");
  auto ck = model::load_checkpoint(a.checkpoint);
  auto in = pgn::open_dump(a.pgn);
  pgn::PgnReader reader(*in);
  std::vector<model::RatingTrajectory> trajectories;
  while (auto raw = reader.next()) {
    auto e = pgn::extract_game(*raw);
    if (!e.record)
      throw pgn::IngestError("game at byte offset " + std::to_string(raw->offset) +
                             " cannot be predicted: " + std::string(pgn::skip_reason_name(*e.skipped)));
    trajectories.push_back(model::predict_trajectory(*ck.net, *e.record, ck.constants));
  }
  if (trajectories.empty()) throw pgn::IngestError("no games found in " + a.pgn);

  std::ostringstream s;
  for (const auto& t : trajectories) {
    if (trajectories.size() > 1) s << "# game " << t.id << '\n';
    model::write_trajectory(s, t);
  }
  if (a.out.empty()) {
    std::cout << s.str() << std::flush;
  } else {
    write_text_file(a.out, s.str());
    rec.outputs = {a.out};
  }
  rec.inputs = {a.checkpoint, a.pgn};
}

void run_puzzle_train(const PuzzleTrainArgs& a, RunRecord& rec) {
  require_file(a.puzzles, "puzzle file");
  auto cfg = model::puzzle_config(a.net.to_config(rec.seed));
  ensure_dir(a.out_dir);
  const auto puzzles = model::read_puzzles_file(a.puzzles);
  std::vector<double> ratings;
  for (const auto& p : puzzles)
    if (p.rating) ratings.push_back(*p.rating);
  if (ratings.empty()) throw model::PuzzleFormatError("no puzzle in " + a.puzzles + " has a rating to train on");

  double mean = 0.0;
  for (double r : ratings) mean += r;
  mean /= static_cast<double>(ratings.size());
  const double sd = population_std(ratings, mean);
  model::EncodingConstants constants;
  constants.rating = features::Standardizer(mean, sd > 0.0 ? sd : 1.0);

  std::vector<model::PuzzleRecord> rated;
  for (const auto& p : puzzles)
    if (p.rating) rated.push_back(p);
  const auto data = model::encode_puzzles(rated, constants.rating);

  model::Net net(cfg);
  model::TrainOptions opt;
  opt.validation_fraction = a.net.validation_fraction;
  opt.checkpoint_path = join_path(a.out_dir, "checkpoint.bin");
  opt.on_epoch = [](const model::EpochRecord& e) {
    log_epoch(e);
    return true;
  };
  auto result = model::train(net, data, constants, opt);
  if (result.curve.empty()) model::save_checkpoint(opt.checkpoint_path, net, constants, result.state);
  const auto curve = join_path(a.out_dir, "loss_curve.csv");
  write_text_file(curve, curve_text(result.curve));
  rec.inputs = {a.puzzles};
  rec.outputs = {opt.checkpoint_path, curve};
}

void run_puzzle_eval(const PuzzleEvalArgs& a, RunRecord& rec) {
  require_file(a.checkpoint, "checkpoint");
  require_file(a.puzzles, "puzzle file");
  auto ck = model::load_checkpoint(a.checkpoint);
  if (ck.net->config().outputs != 1) throw UsageError("checkpoint " + a.checkpoint + " is not a puzzle model");
  const auto puzzles = model::read_puzzles_file(a.puzzles);
  for (const auto& p : puzzles)
    if (!p.rating) throw model::PuzzleFormatError("puzzle '" + p.id + "' has no rating to score against");
  const auto data = model::encode_puzzles(puzzles, ck.constants.rating);
  const auto r = model::puzzle_evaluate(*ck.net, data, ck.constants.rating);
  std::ostringstream s;
  model::write_puzzle_report(s, r);
  if (a.out.empty()) {
    std::cout << s.str() << std::flush;
  } else {
    write_text_file(a.out, s.str());
    rec.outputs = {a.out};
  }
  rec.inputs = {a.checkpoint, a.puzzles};
}

namespace {

struct GlickoInput {
  glicko2::DisplayRating player;
  std::vector<std::pair<glicko2::DisplayRating, double>> opponents;
};

GlickoInput read_glicko_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  GlickoInput g;
  bool have_player = false;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    double a = 0, b = 0, c = 0;
    std::string extra;
    if (!(ls >> a >> b >> c) || (ls >> extra))
      throw UsageError(path + ":" + std::to_string(n) + ": expected '" + kind + "' followed by three numbers");
    if (kind == "player") {
      if (have_player) throw UsageError(path + ":" + std::to_string(n) + ": second player line");
      g.player = {a, b, c};
      have_player = true;
    } else if (kind == "opponent") {
      if (c != 0.0 && c != 0.5 && c != 1.0)
        throw UsageError(path + ":" + std::to_string(n) + ": score must be 0, 0.5 or 1");
      g.opponents.push_back({{a, b, 0.06}, c});
    } else {
      throw UsageError(path + ":" + std::to_string(n) + ": unknown line kind '" + kind + "'");
    }
  }
  if (!have_player) throw UsageError(path + ": no player line");
  if (!(g.player.rd > 0.0) || !(g.player.volatility > 0.0))
    throw UsageError(path + ": player RD and volatility must be positive");
  return g;
}

}  // namespace

void run_glicko(const GlickoArgs& a, RunRecord& rec) {
  require_file(a.input, "glicko input");
  if (!(a.tau > 0.0)) throw UsageError("--tau must be positive");
  if (!(a.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
  const auto input = read_glicko_input(a.input);
  glicko2::GlickoConfig cfg;
  cfg.tau = a.tau;
  cfg.epsilon = a.epsilon;
  std::vector<glicko2::GameOutcome> outcomes;
  for (const auto& [opp, score] : input.opponents) outcomes.push_back({glicko2::from_display(opp), score});
  const auto next = glicko2::to_display(glicko2::update_player(glicko2::from_display(input.player), outcomes, cfg));

  char buf[160];
  std::snprintf(buf, sizeof buf, "rating,rd,volatility\n%.6f,%.6f,%.8f\n", next.rating, next.rd, next.volatility);
  if (a.out.empty()) {
    std::cout << buf << std::flush;
  } else {
    write_text_file(a.out, buf);
    rec.outputs = {a.out};
  }
  rec.inputs = {a.input};
}

}  // namespace ratingnet::cli
