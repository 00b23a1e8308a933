#include "ratingnet/pgn/pgn_reader.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>

#include <boost/iostreams/device/file.hpp>
#include <boost/iostreams/filter/zstd.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "ratingnet/chess/notation.hpp"
#include "ratingnet/pgn/time_control.hpp"

namespace ratingnet::pgn {
namespace {

bool is_blank(const std::string& line) {
  for (char c : line)
    if (c != ' ' && c != '\t') return false;
  return true;
}

bool starts_header(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return i < line.size() && line[i] == '[';
}

std::pair<std::string, std::string> parse_header(const std::string& line) {
  const auto open = line.find('[');
  const auto close = line.rfind(']');
  if (close == std::string::npos || close < open) throw IngestError("unterminated header line");
  const std::string body = line.substr(open + 1, close - open - 1);
  const auto space = body.find(' ');
  if (space == std::string::npos) throw IngestError("header without value");
  const auto q1 = body.find('"', space);
  const auto q2 = body.rfind('"');
  if (q1 == std::string::npos || q2 == q1) throw IngestError("header value not quoted");
  std::string value;
  for (std::size_t i = q1 + 1; i < q2; ++i) {
    if (body[i] == '\\' && i + 1 < q2) ++i;
    value += body[i];
  }
  return {body.substr(0, space), value};
}

std::optional<int> parse_positive(const std::string* text) {
  if (!text) return std::nullopt;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
  if (ec != std::errc{} || ptr != text->data() + text->size() || v <= 0) return std::nullopt;
  return v;
}

bool is_move_number(std::string_view tok) {
  std::size_t i = 0;
  while (i < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i]))) ++i;
  if (i == 0 || i == tok.size()) return false;
  while (i < tok.size() && tok[i] == '.') ++i;
  return i == tok.size();
}

std::string month_of(const RawGame& raw) {
  for (const char* key : {"UTCDate", "Date"}) {
    const auto* date = raw.header(key);
    if (!date || date->size() < 7) continue;
    const std::string year = date->substr(0, 4);
    const std::string month = date->substr(5, 2);
    auto digits = [](const std::string& s) {
      for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      return true;
    };
    if (digits(year) && digits(month)) return year + "-" + month;
  }
  return "unknown";
}

std::string id_of(const RawGame& raw) {
  if (const auto* site = raw.header("Site")) {
    const auto slash = site->find_last_of('/');
    std::string tail = slash == std::string::npos ? *site : site->substr(slash + 1);
    if (!tail.empty() && tail.find_first_of(" \t") == std::string::npos) return tail;
  }
  return "game-" + std::to_string(raw.offset);
}

}  // namespace

const std::string* RawGame::header(std::string_view key) const {
  for (const auto& [k, v] : headers)
    if (k == key) return &v;
  return nullptr;
}

bool PgnReader::read_line(std::string& line) {
  line_start_ = offset_;
  if (pending_) {
    line = std::move(*pending_);
    pending_.reset();
    offset_ = pending_end_;
    return true;
  }
  if (!std::getline(in_, line)) {
    if (in_.bad()) throw StreamCorruption("read failure", offset_);
    return false;
  }
  for (std::size_t i = 0; i < line.size(); ++i) {
    const auto c = static_cast<unsigned char>(line[i]);
    if ((c < 0x20 && c != '\t' && c != '\r') || c == 0x7f) {
      char hex[8];
      std::snprintf(hex, sizeof hex, "0x%02x", c);
      throw StreamCorruption(std::string("unexpected control byte ") + hex, offset_ + i);
    }
  }
  offset_ += line.size() + 1;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void PgnReader::push_back(std::string line) {
  pending_ = std::move(line);
  pending_end_ = offset_;
  offset_ = line_start_;
}

std::optional<RawGame> PgnReader::next() {
  std::string line;
  do {
    if (!read_line(line)) return std::nullopt;
  } while (is_blank(line));

  RawGame game;
  game.offset = line_start_;
  while (starts_header(line)) {
    game.headers.push_back(parse_header(line));
    if (!read_line(line)) return game;
  }
  while (is_blank(line)) {
    if (!read_line(line)) return game;
  }
  if (starts_header(line)) {
    push_back(std::move(line));
    return game;
  }

  int depth = 0;
  while (true) {
    if (depth == 0 && is_blank(line)) break;
    if (depth == 0 && starts_header(line) && !game.movetext.empty()) {
      push_back(std::move(line));
      break;
    }
    if (line.empty() || line[0] != '%') {
      for (char c : line) {
        if (c == '{') ++depth;
        else if (c == '}' && depth > 0) --depth;
      }
      game.movetext += line;
      game.movetext += '\n';
    }
    if (!read_line(line)) break;
  }
  return game;
}

Movetext parse_movetext(std::string_view text) {
  Movetext out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto attach_comment = [&](std::string_view comment) {
    const auto clock = find_clock(comment);
    if (clock && !out.moves.empty() && !out.moves.back().clock) out.moves.back().clock = clock;
  };

  while (i < n) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '{') {
      const auto close = text.find('}', i);
      if (close == std::string_view::npos) throw IngestError("unterminated comment");
      attach_comment(text.substr(i + 1, close - i - 1));
      i = close + 1;
    } else if (c == ';') {
      const auto eol = text.find('\n', i);
      const auto end = eol == std::string_view::npos ? n : eol;
      attach_comment(text.substr(i + 1, end - i - 1));
      i = end;
    } else if (c == '(') {
      int depth = 0;
      while (i < n) {
        if (text[i] == '{') {
          const auto close = text.find('}', i);
          if (close == std::string_view::npos) throw IngestError("unterminated comment");
          i = close;
        } else if (text[i] == '(') {
          ++depth;
        } else if (text[i] == ')' && --depth == 0) {
          break;
        }
        ++i;
      }
      if (depth != 0) throw IngestError("unterminated variation");
      ++i;
    } else if (c == ')' || c == '}') {
      throw IngestError(std::string("unbalanced '") + c + "' in movetext");
    } else if (c == '$') {
      ++i;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      const std::size_t start = i;
      while (i < n && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' && text[i] != '(' &&
             text[i] != ')' && text[i] != ';')
        ++i;
      std::string_view tok = text.substr(start, i - start);
      if (tok == "1-0" || tok == "0-1" || tok == "1/2-1/2" || tok == "*") {
        out.result = std::string(tok);
        continue;
      }
      if (is_move_number(tok)) continue;
      // Glued forms such as "12.e4" or "12...Nf6".
      std::size_t k = 0;
      while (k < tok.size() && std::isdigit(static_cast<unsigned char>(tok[k]))) ++k;
      if (k > 0 && k < tok.size() && tok[k] == '.') {
        while (k < tok.size() && tok[k] == '.') ++k;
        tok.remove_prefix(k);
      }
      if (!tok.empty()) out.moves.push_back(MoveToken{std::string(tok), std::nullopt});
    }
  }
  return out;
}

std::string_view skip_reason_name(SkipReason r) {
  static constexpr std::array<std::string_view, kNumSkipReasons> kNames = {
      "unrated",  "non_standard_variant", "missing_rating", "bad_time_control",  "bad_result",
      "no_moves", "missing_clock",        "illegal_move",   "clock_out_of_range", "malformed"};
  return kNames[static_cast<int>(r)];
}

Extraction extract_game(const RawGame& raw) {
  auto reject = [](SkipReason r) { return Extraction{std::nullopt, r}; };

  const auto* event = raw.header("Event");
  if (!event || event->rfind("Rated", 0) != 0) return reject(SkipReason::Unrated);
  if (const auto* variant = raw.header("Variant"); variant && *variant != "Standard")
    return reject(SkipReason::NonStandardVariant);
  if (raw.header("FEN") || (raw.header("SetUp") && *raw.header("SetUp") == "1"))
    return reject(SkipReason::NonStandardVariant);

  const auto* result_text = raw.header("Result");
  const auto result = result_text ? parse_result(*result_text) : std::nullopt;
  if (!result) return reject(SkipReason::BadResult);

  const auto white = parse_positive(raw.header("WhiteElo"));
  const auto black = parse_positive(raw.header("BlackElo"));
  if (!white || !black) return reject(SkipReason::MissingRating);

  const auto* tc_text = raw.header("TimeControl");
  const auto tc = tc_text ? parse_time_control(*tc_text) : std::nullopt;
  if (!tc || (tc->base_seconds == 0 && tc->increment_seconds == 0)) return reject(SkipReason::BadTimeControl);

  Movetext movetext;
  try {
    movetext = parse_movetext(raw.movetext);
  } catch (const IngestError&) {
    return reject(SkipReason::Malformed);
  }
  if (movetext.result && *movetext.result != *result_text) return reject(SkipReason::BadResult);
  if (movetext.moves.empty()) return reject(SkipReason::NoMoves);

  GameRecord g;
  g.id = id_of(raw);
  g.source_month = month_of(raw);
  g.white_rating = *white;
  g.black_rating = *black;
  g.base_seconds = tc->base_seconds;
  g.increment_seconds = tc->increment_seconds;
  g.category = classify_time_control(tc->base_seconds, tc->increment_seconds);
  g.result = *result;
  g.san_moves.reserve(movetext.moves.size());
  g.clocks_remaining.reserve(movetext.moves.size());
  for (auto& m : movetext.moves) {
    if (!m.clock) return reject(SkipReason::MissingClock);
    g.san_moves.push_back(std::move(m.san));
    g.clocks_remaining.push_back(*m.clock);
  }

  try {
    auto pos = chess::Position::initial();
    for (const auto& san : g.san_moves) pos = chess::apply_san(pos, san).position;
  } catch (const chess::ChessError&) {
    return reject(SkipReason::IllegalMove);
  }

  try {
    validate(g);
  } catch (const IngestError&) {
    return reject(SkipReason::ClockOutOfRange);
  }
  return Extraction{std::move(g), std::nullopt};
}

std::optional<GameRecord> GameStream::next() {
  while (auto raw = reader_.next()) {
    ++stats_.games_seen;
    Extraction e;
    try {
      e = extract_game(*raw);
    } catch (const IngestError&) {
      e.skipped = SkipReason::Malformed;
    }
    if (e.record) {
      ++stats_.games_kept;
      return std::move(e.record);
    }
    stats_.skip(*e.skipped);
  }
  return std::nullopt;
}

std::unique_ptr<std::istream> open_dump(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IngestError("cannot open " + path);
  std::array<unsigned char, 4> magic{};
  probe.read(reinterpret_cast<char*>(magic.data()), magic.size());
  const bool zstd_magic = probe.gcount() == 4 && magic == std::array<unsigned char, 4>{0x28, 0xb5, 0x2f, 0xfd};
  const bool zst_name = path.size() > 4 && path.compare(path.size() - 4, 4, ".zst") == 0;
  probe.close();

  if (zstd_magic || zst_name) {
    auto in = std::make_unique<boost::iostreams::filtering_istream>();
    in->push(boost::iostreams::zstd_decompressor());
    in->push(boost::iostreams::file_source(path, std::ios::binary));
    return in;
  }
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw IngestError("cannot open " + path);
  return in;
}

}  // namespace ratingnet::pgn
