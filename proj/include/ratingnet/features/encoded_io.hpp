#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratingnet/features/encoder.hpp"

namespace ratingnet::features {

/// Encoded dataset file. Layout (all integers and floats little-endian):
///
///   header:  8 bytes magic "RNSEQ\0\0\1", u32 version, u32 planes, u32 rows, u32 cols,
///            f64 clock_mean, f64 clock_std, f64 rating_mean, f64 rating_std,
///            u8 clock_feature, u64 sequence count
///   each sequence: u16 id length, id bytes, u8 category, u8 target count,
///            f32 targets[], f64 display ratings[], u32 step count, then per step
///            u64 plane masks[12], f32 clock_z, u8 side_to_move
struct EncodedDataset {
  Standardizer clock;
  Standardizer rating;
  ClockFeature clock_feature = ClockFeature::Remaining;
  std::vector<EncodedSequence> sequences;

  friend bool operator==(const EncodedDataset&, const EncodedDataset&) = default;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_encoded(std::ostream& out, const EncodedDataset& data);
EncodedDataset read_encoded(std::istream& in);
void write_encoded_file(const std::string& path, const EncodedDataset& data);
EncodedDataset read_encoded_file(const std::string& path);

}  // namespace ratingnet::features
