#include "ratingnet/pgn/time_control.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <string>

namespace ratingnet::pgn {
namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {"UltraBullet", "Bullet", "Blitz", "Rapid",
                                                                         "Classical"};

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  if (s.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view category_name(TimeCategory c) { return kCategoryNames[static_cast<int>(c)]; }

std::optional<TimeCategory> parse_category(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    const auto candidate = kCategoryNames[i];
    if (candidate.size() == name.size() &&
        std::equal(name.begin(), name.end(), candidate.begin(),
                   [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b)); }))
      return static_cast<TimeCategory>(i);
  }
  return std::nullopt;
}

std::string_view result_marker(GameResult r) {
  switch (r) {
    case GameResult::WhiteWin: return "1-0";
    case GameResult::BlackWin: return "0-1";
    case GameResult::Draw: return "1/2-1/2";
  }
  return "*";
}

std::optional<GameResult> parse_result(std::string_view marker) {
  if (marker == "1-0") return GameResult::WhiteWin;
  if (marker == "0-1") return GameResult::BlackWin;
  if (marker == "1/2-1/2") return GameResult::Draw;
  return std::nullopt;
}

void validate(const GameRecord& g) {
  if (g.san_moves.size() != g.clocks_remaining.size())
    throw IngestError("game " + g.id + ": clock count differs from move count");
  if (g.white_rating <= 0 || g.black_rating <= 0) throw IngestError("game " + g.id + ": ratings must be positive");
  const long long cap = g.base_seconds + static_cast<long long>(g.increment_seconds) * static_cast<long long>(g.ply_count());
  for (int c : g.clocks_remaining)
    if (c < 0 || c > cap) throw IngestError("game " + g.id + ": clock value " + std::to_string(c) + " out of range");
}

std::optional<TimeControl> parse_time_control(std::string_view text) {
  const auto plus = text.find('+');
  if (plus == std::string_view::npos) return std::nullopt;
  const auto base = parse_int(text.substr(0, plus));
  const auto inc = parse_int(text.substr(plus + 1));
  if (!base || !inc || *base < 0 || *inc < 0) return std::nullopt;
  return TimeControl{*base, *inc};
}

int estimated_duration(int base_seconds, int increment_seconds) { return base_seconds + 40 * increment_seconds; }

TimeCategory classify_time_control(int base_seconds, int increment_seconds) {
  if (base_seconds < 0 || increment_seconds < 0) throw IngestError("time control values must be non-negative");
  if (base_seconds == 0 && increment_seconds == 0) throw IngestError("time control 0+0 does not exist");
  const int d = estimated_duration(base_seconds, increment_seconds);
  if (d <= 29) return TimeCategory::UltraBullet;
  if (d <= 179) return TimeCategory::Bullet;
  if (d <= 479) return TimeCategory::Blitz;
  if (d <= 1499) return TimeCategory::Rapid;
  return TimeCategory::Classical;
}

std::optional<int> find_clock(std::string_view comment) {
  const auto tag = comment.find("[%clk");
  if (tag == std::string_view::npos) return std::nullopt;
  const auto close = comment.find(']', tag);
  if (close == std::string_view::npos) throw IngestError("unterminated %clk tag");
  std::string_view body = comment.substr(tag + 5, close - tag - 5);
  while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  while (!body.empty() && body.back() == ' ') body.remove_suffix(1);

  const auto c1 = body.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : body.find(':', c1 + 1);
  if (c2 == std::string_view::npos) throw IngestError("malformed %clk value '" + std::string(body) + "'");
  std::string_view secs = body.substr(c2 + 1);
  if (const auto dot = secs.find('.'); dot != std::string_view::npos) {
    const auto frac = secs.substr(dot + 1);
    if (frac.empty() || !std::all_of(frac.begin(), frac.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw IngestError("malformed %clk value '" + std::string(body) + "'");
    secs = secs.substr(0, dot);
  }
  const auto h = parse_int(body.substr(0, c1));
  const auto m = parse_int(body.substr(c1 + 1, c2 - c1 - 1));
  const auto s = parse_int(secs);
  if (!h || !m || !s || *h < 0 || *m < 0 || *m > 59 || *s < 0 || *s > 59 || secs.size() != 2 || c2 - c1 - 1 != 2)
    throw IngestError("malformed %clk value '" + std::string(body) + "'");
  return *h * 3600 + *m * 60 + *s;
}

int parse_clock_comment(std::string_view comment) {
  const auto clock = find_clock(comment);
  if (!clock) throw IngestError("comment has no %clk tag");
  return *clock;
}

}  // namespace ratingnet::pgn
