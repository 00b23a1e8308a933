#pragma once

#include <optional>
#include <string_view>

#include "ratingnet/pgn/game_record.hpp"

namespace ratingnet::pgn {

struct TimeControl {
  int base_seconds = 0;
  int increment_seconds = 0;
};

/// Parses a PGN TimeControl header value "B+I". Returns nullopt for "-", "?" or junk.
std::optional<TimeControl> parse_time_control(std::string_view text);

/// Estimated duration base + 40 * increment.
int estimated_duration(int base_seconds, int increment_seconds);

/// Category by estimated duration with inclusive upper bounds:
/// <= 29 UltraBullet, <= 179 Bullet, <= 479 Blitz, <= 1499 Rapid, else Classical.
/// Throws IngestError when both inputs are zero or either is negative.
TimeCategory classify_time_control(int base_seconds, int increment_seconds);

/// Parses the `[%clk H:MM:SS]` tag inside a move comment into whole seconds
/// (fractional seconds are truncated). Throws IngestError if absent or malformed.
int parse_clock_comment(std::string_view comment);

/// Same as parse_clock_comment, but nullopt when no %clk tag is present.
std::optional<int> find_clock(std::string_view comment);

}  // namespace ratingnet::pgn
