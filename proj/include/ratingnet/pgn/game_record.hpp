#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ratingnet::pgn {

enum class TimeCategory : std::uint8_t { UltraBullet = 0, Bullet, Blitz, Rapid, Classical };
inline constexpr int kNumCategories = 5;

std::string_view category_name(TimeCategory c);
/// Case-insensitive; accepts "ultrabullet", "Bullet", ...
std::optional<TimeCategory> parse_category(std::string_view name);

enum class GameResult : std::uint8_t { WhiteWin, BlackWin, Draw };

std::string_view result_marker(GameResult r);
std::optional<GameResult> parse_result(std::string_view marker);

/// One rated game with a clock reading after every ply.
struct GameRecord {
  std::string id;
  std::string source_month;  // "YYYY-MM"
  int white_rating = 0;
  int black_rating = 0;
  int base_seconds = 0;
  int increment_seconds = 0;
  TimeCategory category = TimeCategory::Blitz;
  GameResult result = GameResult::Draw;
  std::vector<std::string> san_moves;
  std::vector<int> clocks_remaining;  // mover's clock after each ply, seconds

  std::size_t ply_count() const { return san_moves.size(); }

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws IngestError when the record breaks a structural invariant
/// (length mismatch, clock out of range, non-positive rating).
void validate(const GameRecord& g);

}  // namespace ratingnet::pgn
