#include "ratingnet/model/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "ratingnet/nn/serialize.hpp"
#include "ratingnet/util/binary_io.hpp"

namespace ratingnet::model {
namespace {

const std::string kMagic("RNCKPT\0\1", 8);

}  // namespace

void write_checkpoint(std::ostream& out, Net& net, const EncodingConstants& constants, const TrainingState& state) {
  util::BinaryWriter w(out);
  w.put_bytes(kMagic);
  w.put(kCheckpointVersion);
  w.put_string(config_to_json(net.config()));
  w.put_f64(constants.clock.mean());
  w.put_f64(constants.clock.std());
  w.put_f64(constants.rating.mean());
  w.put_f64(constants.rating.std());
  w.put(static_cast<std::uint8_t>(constants.clock_feature));

  w.put(static_cast<std::uint32_t>(state.epoch));
  w.put(state.adam_steps);
  w.put_f64(state.learning_rate);
  w.put_f64(state.best_loss);
  w.put(static_cast<std::int32_t>(state.bad_epochs));

  auto params = net.parameters();
  const auto buffers = net.buffers();
  w.put(static_cast<std::uint32_t>(params.size() + buffers.size()));
  for (const auto& p : params) nn::write_tensor(w, p.name, *p.tensor);
  for (const auto& p : buffers) nn::write_tensor(w, p.name, *p.tensor);

  const bool has_moments = state.adam_m.size() == params.size() && state.adam_v.size() == params.size();
  w.put(static_cast<std::uint8_t>(has_moments));
  if (has_moments)
    for (std::size_t k = 0; k < params.size(); ++k) {
      nn::write_tensor(w, params[k].name + ".adam_m", nn::Tensor<double>(params[k].tensor->shape, state.adam_m[k]), nn::DType::F64);
      nn::write_tensor(w, params[k].name + ".adam_v", nn::Tensor<double>(params[k].tensor->shape, state.adam_v[k]), nn::DType::F64);
    }
  if (!out) throw CheckpointError("checkpoint write failed");
}

void save_checkpoint(const std::string& path, Net& net, const EncodingConstants& constants, const TrainingState& state) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint " + path);
    write_checkpoint(out, net, constants, state);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw CheckpointError("cannot move checkpoint into place at " + path);
}

LoadedCheckpoint read_checkpoint(std::istream& in) {
  util::BinaryReader r(in);
  LoadedCheckpoint out;
  try {
    if (r.get_bytes(kMagic.size()) != kMagic) throw CheckpointError("not a checkpoint file (bad magic)");
    const auto version = r.get<std::uint32_t>();
    if (version != kCheckpointVersion)
      throw CheckpointError("checkpoint format version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
    const auto cfg = config_from_json(r.get_string());
    const double cm = r.get_f64(), cs = r.get_f64(), rm = r.get_f64(), rs = r.get_f64();
    out.constants.clock = features::Standardizer(cm, cs);
    out.constants.rating = features::Standardizer(rm, rs);
    const auto mode = r.get<std::uint8_t>();
    if (mode > 1) throw CheckpointError("unknown clock feature in checkpoint");
    out.constants.clock_feature = static_cast<features::ClockFeature>(mode);

    out.state.epoch = static_cast<int>(r.get<std::uint32_t>());
    out.state.adam_steps = r.get<std::uint64_t>();
    out.state.learning_rate = r.get_f64();
    out.state.best_loss = r.get_f64();
    out.state.bad_epochs = r.get<std::int32_t>();

    out.net = std::make_unique<Net>(cfg);
    std::map<std::string, nn::Tensor<float>*> slots;
    auto params = out.net->parameters();
    for (const auto& p : params) slots[p.name] = p.tensor;
    for (const auto& p : out.net->buffers()) slots[p.name] = p.tensor;
    const auto count = r.get<std::uint32_t>();
    if (count != slots.size()) throw CheckpointError("checkpoint tensor count does not match its configuration");
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto t = nn::read_tensor(r);
      const auto it = slots.find(t.name);
      if (it == slots.end()) throw CheckpointError("unexpected tensor " + t.name);
      if (it->second->shape != t.tensor.shape)
        throw CheckpointError("tensor " + t.name + " has shape " + nn::shape_string(t.tensor.shape) + ", expected " +
                              nn::shape_string(it->second->shape));
      std::copy(t.tensor.data.begin(), t.tensor.data.end(), it->second->data.begin());
      slots.erase(it);
    }
    if (r.get<std::uint8_t>()) {
      for (const auto& p : params) {
        auto m = nn::read_tensor(r);
        auto v = nn::read_tensor(r);
        if (m.name != p.name + ".adam_m" || v.name != p.name + ".adam_v" || m.tensor.size() != p.tensor->size() ||
            v.tensor.size() != p.tensor->size())
          throw CheckpointError("optimizer state does not match parameter " + p.name);
        out.state.adam_m.push_back(std::move(m.tensor.data));
        out.state.adam_v.push_back(std::move(v.tensor.data));
      }
    }
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
  return out;
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  return read_checkpoint(in);
}

}  // namespace ratingnet::model
