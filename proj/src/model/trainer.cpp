#include "ratingnet/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

namespace ratingnet::model {
namespace {

std::vector<const features::EncodedSequence*> pointers(const std::vector<features::EncodedSequence>& data) {
  std::vector<const features::EncodedSequence*> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(&s);
  return out;
}

struct Snapshot {
  std::vector<std::vector<float>> values;

  static Snapshot take(Net& net) {
    Snapshot s;
    for (const auto& p : net.parameters()) s.values.push_back(p.tensor->data);
    for (const auto& p : net.buffers()) s.values.push_back(p.tensor->data);
    return s;
  }
  void restore(Net& net) const {
    std::size_t k = 0;
    for (const auto& p : net.parameters()) p.tensor->data = values[k++];
    for (const auto& p : net.buffers()) p.tensor->data = values[k++];
  }
};

}  // namespace

double evaluate_loss(Net& net, const std::vector<features::EncodedSequence>& data, LossMode mode, int batch_size) {
  const auto ptrs = pointers(data);
  const int outputs = net.config().outputs;
  double sum = 0.0;
  long terms = 0;
  for (std::size_t start = 0; start < ptrs.size(); start += batch_size) {
    const std::size_t end = std::min(ptrs.size(), start + static_cast<std::size_t>(batch_size));
    const auto batch = make_batch<float>(std::span(ptrs).subspan(start, end - start), outputs);
    const auto pred = net.forward(batch, nn::Mode::Eval);
    const int n = loss_terms(batch, mode, outputs);
    sum += static_cast<double>(loss_game(pred, batch, mode)) * n;
    terms += n;
  }
  return terms ? sum / static_cast<double>(terms) : 0.0;
}

TrainResult train(Net& net, const std::vector<features::EncodedSequence>& data, const EncodingConstants& constants,
                  const TrainOptions& options, TrainingState state) {
  const auto& cfg = net.config();
  const auto& sched = cfg.schedule;
  if (data.empty()) throw std::invalid_argument("training set is empty");
  if (options.validation_fraction < 0.0 || options.validation_fraction >= 1.0)
    throw std::invalid_argument("validation fraction must be in [0, 1)");

  // Optional validation split, fixed by the seed.
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<features::EncodedSequence> validation;
  std::vector<const features::EncodedSequence*> train_set;
  if (options.validation_fraction > 0.0) {
    std::shuffle(order.begin(), order.end(), std::mt19937_64(sched.seed ^ 0x76616c6964ULL));
    const auto n_val = static_cast<std::size_t>(std::llround(options.validation_fraction * static_cast<double>(data.size())));
    std::vector<bool> is_val(data.size(), false);
    for (std::size_t i = 0; i < n_val; ++i) is_val[order[i]] = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (is_val[i])
        validation.push_back(data[i]);
      else
        train_set.push_back(&data[i]);
    }
    if (train_set.empty()) throw std::invalid_argument("validation split leaves no training data");
  } else {
    train_set = pointers(data);
  }
  for (const auto* s : train_set)
    if (static_cast<int>(s->targets.size()) != cfg.outputs)
      throw std::invalid_argument("sequence " + s->id + " has " + std::to_string(s->targets.size()) + " targets, model expects " +
                                  std::to_string(cfg.outputs));

  auto params = net.parameters();
  nn::Adam<float> adam(params, sched.weight_decay);
  if (state.adam_m.size() == params.size()) {
    adam.first_moments() = state.adam_m;
    adam.second_moments() = state.adam_v;
  }
  adam.set_steps(state.adam_steps);
  nn::PlateauScheduler plateau(state.epoch > 0 ? state.learning_rate : sched.learning_rate, sched.plateau_patience,
                               sched.plateau_factor);
  if (state.epoch > 0) plateau.restore(state.learning_rate, state.best_loss, state.bad_epochs);

  TrainResult result;
  result.best_epoch = state.epoch;
  result.best_loss = state.best_loss;
  Snapshot best = Snapshot::take(net);

  for (int epoch = state.epoch + 1; epoch <= sched.epoch_cap; ++epoch) {
    // Per-epoch streams so a resumed run replays the same order.
    std::mt19937_64 shuffle_rng(sched.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(epoch));
    net.dropout_rng().seed(sched.seed ^ (static_cast<std::uint64_t>(epoch) << 32) ^ 0xd50f);
    auto epoch_order = train_set;
    std::shuffle(epoch_order.begin(), epoch_order.end(), shuffle_rng);

    const double lr = plateau.lr();
    double sum = 0.0;
    long terms = 0;
    int batch_index = 0;
    for (std::size_t start = 0; start < epoch_order.size(); start += sched.batch_size, ++batch_index) {
      const std::size_t end = std::min(epoch_order.size(), start + static_cast<std::size_t>(sched.batch_size));
      const auto batch = make_batch<float>(std::span(epoch_order).subspan(start, end - start), cfg.outputs);
      nn::zero_grads(params);
      const auto pred = net.forward(batch, nn::Mode::Train);
      nn::Tensor<float> grad;
      const float loss = loss_game(pred, batch, cfg.loss_mode, &grad);
      if (!std::isfinite(loss)) throw TrainingDiverged(epoch, batch_index, loss, lr);
      net.backward(grad);
      adam.step(params, lr);
      const int n = loss_terms(batch, cfg.loss_mode, cfg.outputs);
      sum += static_cast<double>(loss) * n;
      terms += n;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = lr;
    rec.train_loss = sum / static_cast<double>(terms);
    rec.monitor_loss = validation.empty() ? rec.train_loss : evaluate_loss(net, validation, cfg.loss_mode);
    if (!std::isfinite(rec.monitor_loss)) throw TrainingDiverged(epoch, batch_index, rec.monitor_loss, lr);
    result.curve.push_back(rec);

    const bool improved = rec.monitor_loss < plateau.best();
    plateau.step(rec.monitor_loss);
    state.epoch = epoch;
    state.adam_steps = adam.steps();
    state.learning_rate = plateau.lr();
    state.best_loss = plateau.best();
    state.bad_epochs = plateau.bad_epochs();
    if (improved) {
      result.best_epoch = epoch;
      result.best_loss = rec.monitor_loss;
      best = Snapshot::take(net);
      if (!options.checkpoint_path.empty()) {
        state.adam_m = adam.first_moments();
        state.adam_v = adam.second_moments();
        save_checkpoint(options.checkpoint_path, net, constants, state);
      }
    }
    if (options.on_epoch && !options.on_epoch(rec)) break;
  }
  state.adam_m = adam.first_moments();
  state.adam_v = adam.second_moments();
  result.state = std::move(state);
  best.restore(net);
  return result;
}

void write_loss_curve(std::ostream& out, const std::vector<EpochRecord>& curve) {
  out << "epoch,train_loss,monitor_loss,learning_rate\n";
  char buf[128];
  for (const auto& r : curve) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss, r.monitor_loss, r.learning_rate);
    out << buf;
  }
}

}  // namespace ratingnet::model
