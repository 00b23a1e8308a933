#include "ratingnet/features/encoded_io.hpp"

#include <fstream>

#include "ratingnet/util/binary_io.hpp"

namespace ratingnet::features {
namespace {

const std::string kMagic("RNSEQ\0\0\1", 8);
constexpr std::uint32_t kVersion = 1;

}  // namespace

void write_encoded(std::ostream& out, const EncodedDataset& data) {
  util::BinaryWriter w(out);
  w.put_bytes(kMagic);
  w.put(kVersion);
  w.put(std::uint32_t{kNumPlanes});
  w.put(std::uint32_t{kBoardSize});
  w.put(std::uint32_t{kBoardSize});
  w.put_f64(data.clock.mean());
  w.put_f64(data.clock.std());
  w.put_f64(data.rating.mean());
  w.put_f64(data.rating.std());
  w.put(static_cast<std::uint8_t>(data.clock_feature));
  w.put(static_cast<std::uint64_t>(data.sequences.size()));
  for (const auto& seq : data.sequences) {
    if (seq.id.size() > 0xffff) throw FormatError("sequence id too long");
    w.put(static_cast<std::uint16_t>(seq.id.size()));
    w.put_bytes(seq.id);
    w.put(static_cast<std::uint8_t>(seq.category));
    w.put(static_cast<std::uint8_t>(seq.targets.size()));
    if (seq.ratings.size() != seq.targets.size()) throw FormatError("sequence " + seq.id + ": ratings and targets differ in length");
    for (float t : seq.targets) w.put_f32(t);
    for (double r : seq.ratings) w.put_f64(r);
    w.put(static_cast<std::uint32_t>(seq.steps.size()));
    for (const auto& step : seq.steps) {
      for (auto mask : step.planes.planes) w.put(mask);
      w.put_f32(step.clock_z);
      w.put(step.side_to_move);
    }
  }
  if (!out) throw FormatError("write failed");
}

EncodedDataset read_encoded(std::istream& in) {
  util::BinaryReader r(in);
  EncodedDataset data;
  try {
    if (r.get_bytes(kMagic.size()) != kMagic) throw FormatError("not an encoded dataset (bad magic)");
    const auto version = r.get<std::uint32_t>();
    if (version != kVersion) throw FormatError("unsupported encoded dataset version " + std::to_string(version));
    if (r.get<std::uint32_t>() != kNumPlanes || r.get<std::uint32_t>() != kBoardSize || r.get<std::uint32_t>() != kBoardSize)
      throw FormatError("unexpected plane dimensions");
    const double cm = r.get_f64();
    const double cs = r.get_f64();
    const double rm = r.get_f64();
    const double rs = r.get_f64();
    data.clock = Standardizer(cm, cs);
    data.rating = Standardizer(rm, rs);
    const auto mode = r.get<std::uint8_t>();
    if (mode > 1) throw FormatError("unknown clock feature");
    data.clock_feature = static_cast<ClockFeature>(mode);
    const auto count = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < count; ++i) {
      EncodedSequence seq;
      seq.id = r.get_bytes(r.get<std::uint16_t>());
      const auto category = r.get<std::uint8_t>();
      if (category >= pgn::kNumCategories) throw FormatError("bad category");
      seq.category = static_cast<pgn::TimeCategory>(category);
      const auto n_targets = r.get<std::uint8_t>();
      for (int t = 0; t < n_targets; ++t) seq.targets.push_back(r.get_f32());
      for (int t = 0; t < n_targets; ++t) seq.ratings.push_back(r.get_f64());
      const auto n_steps = r.get<std::uint32_t>();
      seq.steps.resize(n_steps);
      for (auto& step : seq.steps) {
        for (auto& mask : step.planes.planes) mask = r.get<std::uint64_t>();
        step.clock_z = r.get_f32();
        step.side_to_move = r.get<std::uint8_t>();
      }
      data.sequences.push_back(std::move(seq));
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("corrupt encoded dataset: ") + e.what());
  }
  return data;
}

void write_encoded_file(const std::string& path, const EncodedDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  write_encoded(out, data);
}

EncodedDataset read_encoded_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_encoded(in);
}

}  // namespace ratingnet::features
