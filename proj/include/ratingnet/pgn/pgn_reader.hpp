#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ratingnet/pgn/game_record.hpp"

namespace ratingnet::pgn {

/// Unrecoverable damage to the byte stream (binary garbage, failed decompression).
class StreamCorruption : public IngestError {
 public:
  StreamCorruption(const std::string& what, std::uint64_t offset)
      : IngestError(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Headers and raw movetext of one PGN game, before any interpretation.
struct RawGame {
  std::vector<std::pair<std::string, std::string>> headers;
  std::string movetext;
  std::uint64_t offset = 0;

  const std::string* header(std::string_view key) const;
};

/// Splits a PGN byte stream into games. Tolerates CRLF and blank lines inside comments.
class PgnReader {
 public:
  explicit PgnReader(std::istream& in) : in_(in) {}

  /// Next game, or nullopt at end of stream. Throws StreamCorruption on control bytes
  /// or read failures that are not a clean end of file.
  std::optional<RawGame> next();

  std::uint64_t offset() const { return offset_; }

 private:
  bool read_line(std::string& line);
  void push_back(std::string line);

  std::istream& in_;
  std::uint64_t offset_ = 0;
  std::uint64_t line_start_ = 0;
  std::uint64_t pending_end_ = 0;
  std::optional<std::string> pending_;
};

struct MoveToken {
  std::string san;
  std::optional<int> clock;
};

struct Movetext {
  std::vector<MoveToken> moves;
  std::optional<std::string> result;
};

/// Tokenizes movetext: move numbers, NAGs and variations are dropped, the %clk
/// reading of the comment following each move is attached to it.
Movetext parse_movetext(std::string_view text);

enum class SkipReason {
  Unrated,
  NonStandardVariant,
  MissingRating,
  BadTimeControl,
  BadResult,
  NoMoves,
  MissingClock,
  IllegalMove,
  ClockOutOfRange,
  Malformed,
};
inline constexpr int kNumSkipReasons = 10;

std::string_view skip_reason_name(SkipReason r);

struct IngestStats {
  std::uint64_t games_seen = 0;
  std::uint64_t games_kept = 0;
  std::map<std::string, std::uint64_t> skipped;

  void skip(SkipReason r) { ++skipped[std::string(skip_reason_name(r))]; }
};

/// Interprets a raw game. Returns the record or the reason it was rejected.
/// Every accepted record has been replayed legally through the rules engine.
struct Extraction {
  std::optional<GameRecord> record;
  std::optional<SkipReason> skipped;
};
Extraction extract_game(const RawGame& raw);

/// Streams GameRecords out of a PGN source, skipping and counting rejects.
class GameStream {
 public:
  explicit GameStream(std::istream& in) : reader_(in) {}

  std::optional<GameRecord> next();
  const IngestStats& stats() const { return stats_; }

 private:
  PgnReader reader_;
  IngestStats stats_;
  std::uint64_t index_ = 0;
};

/// Opens a dump file for reading; `.zst` files (or files starting with the
/// zstd magic number) are decompressed on the fly.
std::unique_ptr<std::istream> open_dump(const std::string& path);

}  // namespace ratingnet::pgn
