#include "ratingnet/model/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ratingnet::model {
namespace {

const MethodMetrics* find_method(const EvalReport& r, const std::string& name) {
  for (const auto& m : r.methods)
    if (m.method == name) return &m;
  return nullptr;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

const char* row_label(int category) {
  static const char* labels[] = {"Ultrabullet", "Bullet", "Blitz", "Rapid", "Classical"};
  return category < 0 ? "Average" : labels[category];
}

}  // namespace

std::vector<GamePrediction> predict_final(Net& net, const std::vector<features::EncodedSequence>& data,
                                          const features::Standardizer& rating, int batch_size) {
  const int outputs = net.config().outputs;
  std::vector<GamePrediction> out;
  out.reserve(data.size());
  std::vector<const features::EncodedSequence*> ptrs;
  for (const auto& s : data) ptrs.push_back(&s);
  for (std::size_t start = 0; start < ptrs.size(); start += batch_size) {
    const std::size_t end = std::min(ptrs.size(), start + static_cast<std::size_t>(batch_size));
    const auto span = std::span(ptrs).subspan(start, end - start);
    const auto batch = make_batch<float>(span, outputs);
    const auto pred = net.forward(batch, nn::Mode::Eval);
    for (int b = 0; b < batch.size(); ++b) {
      const auto& seq = *span[b];
      GamePrediction g{seq.id, seq.category, seq.ratings, {}};
      for (int o = 0; o < outputs; ++o)
        g.estimate.push_back(rating.destandardize(pred.data[static_cast<std::size_t>(batch.last_row(b)) * outputs + o]));
      out.push_back(std::move(g));
    }
  }
  return out;
}

std::vector<GamePrediction> predict_constant(const std::vector<features::EncodedSequence>& data, double value) {
  std::vector<GamePrediction> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back({s.id, s.category, s.ratings, std::vector<double>(s.ratings.size(), value)});
  return out;
}

double baseline_mean(const std::vector<features::EncodedSequence>& train) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : train)
    for (double r : s.ratings) {
      sum += r;
      ++n;
    }
  if (n == 0) throw std::invalid_argument("baseline needs at least one rated training example");
  return sum / static_cast<double>(n);
}

MethodMetrics score(const std::string& method, const std::vector<GamePrediction>& predictions) {
  // Sum in id order so the result does not depend on the order of the test set.
  std::vector<const GamePrediction*> sorted;
  for (const auto& p : predictions) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });

  MethodMetrics m;
  m.method = method;
  std::array<double, pgn::kNumCategories> abs_sum{}, sq_sum{};
  std::array<std::size_t, pgn::kNumCategories> terms{};
  for (const auto* p : sorted) {
    if (p->truth.size() != p->estimate.size()) throw std::invalid_argument("prediction " + p->id + " has no truth to compare");
    const auto c = static_cast<std::size_t>(p->category);
    ++m.per_category[c].games;
    for (std::size_t k = 0; k < p->truth.size(); ++k) {
      const double e = p->estimate[k] - p->truth[k];
      abs_sum[c] += std::abs(e);
      sq_sum[c] += e * e;
      ++terms[c];
    }
  }
  double abs_all = 0.0, sq_all = 0.0;
  std::size_t terms_all = 0;
  for (std::size_t c = 0; c < pgn::kNumCategories; ++c) {
    if (terms[c]) {
      m.per_category[c].mae = abs_sum[c] / static_cast<double>(terms[c]);
      m.per_category[c].mse = sq_sum[c] / static_cast<double>(terms[c]);
    }
    m.average.games += m.per_category[c].games;
    abs_all += abs_sum[c];
    sq_all += sq_sum[c];
    terms_all += terms[c];
  }
  if (terms_all) {
    m.average.mae = abs_all / static_cast<double>(terms_all);
    m.average.mse = sq_all / static_cast<double>(terms_all);
  }
  return m;
}

EvalReport evaluate(Net& net, const std::vector<features::EncodedSequence>& test, const features::Standardizer& rating,
                    double train_mean) {
  EvalReport r;
  r.methods.push_back(score(net.config().clock_feature_enabled ? kClockMethod : kNoClockMethod, predict_final(net, test, rating)));
  r.methods.push_back(score(kMeanMethod, predict_constant(test, train_mean)));
  return r;
}

void write_report(std::ostream& out, const EvalReport& report, std::optional<pgn::TimeCategory> only) {
  out << "metric,time_control,games";
  for (const auto& m : report.methods) out << ',' << m.method;
  out << '\n';
  for (const char* metric : {"MAE", "MSE"}) {
    const bool mae = metric[1] == 'A';
    for (int c = -1; c < pgn::kNumCategories; ++c) {
      if (only && c != static_cast<int>(*only)) continue;
      if (report.methods.empty()) continue;
      const auto& first = c < 0 ? report.methods[0].average : report.methods[0].per_category[c];
      out << metric << ',' << row_label(c) << ',' << first.games;
      for (const auto& m : report.methods) {
        const auto& v = c < 0 ? m.average : m.per_category[c];
        out << ',';
        if (v.games) out << fmt(mae ? v.mae : v.mse);
      }
      out << '\n';
    }
  }
}

AblationResult ablate_clock(const RatingNetConfig& config, const std::vector<features::EncodedSequence>& train_set,
                            const std::vector<features::EncodedSequence>& test_set, const EncodingConstants& constants) {
  AblationResult result;
  const double mean = baseline_mean(train_set);
  auto run = [&](bool clock, TrainResult& tr) {
    auto cfg = config;
    cfg.clock_feature_enabled = clock;
    Net net(cfg);
    tr = train(net, train_set, constants);
    return score(clock ? kClockMethod : kNoClockMethod, predict_final(net, test_set, constants.rating));
  };
  result.report.methods.push_back(run(true, result.clocked));
  result.report.methods.push_back(run(false, result.no_clock));
  result.report.methods.push_back(score(kMeanMethod, predict_constant(test_set, mean)));
  return result;
}

void write_ablation_deltas(std::ostream& out, const EvalReport& report) {
  const auto* clock = find_method(report, kClockMethod);
  const auto* none = find_method(report, kNoClockMethod);
  if (!clock || !none) throw std::invalid_argument("ablation deltas need both RatingNet and RatingNetNoClock columns");
  out << "time_control,games,RatingNet_MAE,RatingNetNoClock_MAE,mae_reduction,percent_improvement\n";
  for (int c = -1; c < pgn::kNumCategories; ++c) {
    const auto& a = c < 0 ? clock->average : clock->per_category[c];
    const auto& b = c < 0 ? none->average : none->per_category[c];
    const double reduction = b.mae - a.mae;
    const double pct = b.mae > 0.0 ? 100.0 * reduction / b.mae : 0.0;
    out << row_label(c) << ',' << a.games;
    if (a.games)
      out << ',' << fmt(a.mae) << ',' << fmt(b.mae) << ',' << fmt(reduction) << ',' << fmt(pct);
    else
      out << ",,,,";
    out << '\n';
  }
}

}  // namespace ratingnet::model
