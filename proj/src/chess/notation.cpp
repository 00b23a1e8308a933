#include "ratingnet/chess/notation.hpp"

#include <charconv>
#include <sstream>
#include <vector>

namespace ratingnet::chess {
namespace {

std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ') ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

int parse_count(std::string_view field, const char* what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) throw FenError(std::string("bad ") + what + " field");
  return value;
}

std::optional<PieceKind> kind_from_letter(char c) {
  switch (c) {
    case 'N': return PieceKind::Knight;
    case 'B': return PieceKind::Bishop;
    case 'R': return PieceKind::Rook;
    case 'Q': return PieceKind::Queen;
    case 'K': return PieceKind::King;
    default: return std::nullopt;
  }
}

char letter_for(PieceKind k) { return "PNBRQK"[static_cast<int>(k)]; }

}  // namespace

Position parse_fen(std::string_view text) {
  const auto fields = split_fields(text);
  if (fields.size() != 6) throw FenError("FEN needs 6 fields, got " + std::to_string(fields.size()));

  Board board{};
  int rank = 7;
  int file = 0;
  for (char c : fields[0]) {
    if (c == '/') {
      if (file != 8) throw FenError("rank does not cover 8 files");
      --rank;
      file = 0;
      if (rank < 0) throw FenError("too many ranks");
    } else if (c >= '1' && c <= '8') {
      file += c - '0';
      if (file > 8) throw FenError("rank overflows 8 files");
    } else {
      const auto piece = piece_from_char(c);
      if (!piece) throw FenError(std::string("invalid piece letter '") + c + "'");
      if (file > 7) throw FenError("rank overflows 8 files");
      board[Square::at(file, rank).index()] = piece;
      ++file;
    }
  }
  if (rank != 0 || file != 8) throw FenError("placement does not describe 8 ranks");

  Color side;
  if (fields[1] == "w") side = Color::White;
  else if (fields[1] == "b") side = Color::Black;
  else throw FenError("side to move must be 'w' or 'b'");

  CastlingRights castling;
  if (fields[2] != "-") {
    for (char c : fields[2]) {
      switch (c) {
        case 'K': castling.white_kingside = true; break;
        case 'Q': castling.white_queenside = true; break;
        case 'k': castling.black_kingside = true; break;
        case 'q': castling.black_queenside = true; break;
        default: throw FenError(std::string("invalid castling letter '") + c + "'");
      }
    }
  }

  std::optional<Square> ep;
  if (fields[3] != "-") {
    ep = Square::parse(fields[3]);
    if (!ep) throw FenError("invalid en passant square");
  }

  return Position::create(board, side, castling, ep, parse_count(fields[4], "halfmove"),
                          parse_count(fields[5], "fullmove"));
}

std::string position_to_fen(const Position& pos) {
  std::string out;
  for (int rank = 7; rank >= 0; --rank) {
    int empty = 0;
    for (int file = 0; file < 8; ++file) {
      const auto piece = pos.piece_at(Square::at(file, rank));
      if (!piece) {
        ++empty;
        continue;
      }
      if (empty) out += static_cast<char>('0' + empty);
      empty = 0;
      out += piece_to_char(*piece);
    }
    if (empty) out += static_cast<char>('0' + empty);
    if (rank) out += '/';
  }
  out += pos.side_to_move() == Color::White ? " w " : " b ";
  const auto c = pos.castling();
  std::string rights;
  if (c.white_kingside) rights += 'K';
  if (c.white_queenside) rights += 'Q';
  if (c.black_kingside) rights += 'k';
  if (c.black_queenside) rights += 'q';
  out += rights.empty() ? "-" : rights;
  out += ' ';
  out += pos.en_passant() ? pos.en_passant()->to_string() : "-";
  out += ' ' + std::to_string(pos.halfmove_clock()) + ' ' + std::to_string(pos.fullmove_number());
  return out;
}

AppliedMove apply_san(const Position& pos, std::string_view san) {
  const std::string original(san);
  while (!san.empty() && (san.back() == '+' || san.back() == '#' || san.back() == '!' || san.back() == '?'))
    san.remove_suffix(1);
  if (san.empty()) throw MoveError(MoveError::Kind::Malformed, "empty SAN token '" + original + "'");

  const auto moves = legal_moves(pos);
  auto unique = [&](auto&& pred) -> AppliedMove {
    const Move* found = nullptr;
    for (const auto& m : moves) {
      if (!pred(m)) continue;
      if (found) throw MoveError(MoveError::Kind::Ambiguous, "ambiguous SAN '" + original + "'");
      found = &m;
    }
    if (!found)
      throw MoveError(MoveError::Kind::NoMatch, "no legal move matches SAN '" + original + "' in " + position_to_fen(pos));
    return AppliedMove{pos.play(*found), *found};
  };

  if (san == "O-O" || san == "0-0") return unique([](const Move& m) { return (m.flags & Move::kKingsideCastle) != 0; });
  if (san == "O-O-O" || san == "0-0-0")
    return unique([](const Move& m) { return (m.flags & Move::kQueensideCastle) != 0; });

  PieceKind piece = PieceKind::Pawn;
  if (const auto k = kind_from_letter(san.front())) {
    piece = *k;
    san.remove_prefix(1);
  }

  std::optional<PieceKind> promotion;
  if (san.size() >= 2 && kind_from_letter(san.back()) && san.back() != 'K') {
    promotion = kind_from_letter(san.back());
    san.remove_suffix(1);
    if (!san.empty() && san.back() == '=') san.remove_suffix(1);
  }

  if (san.size() < 2) throw MoveError(MoveError::Kind::Malformed, "malformed SAN '" + original + "'");
  const auto dest = Square::parse(san.substr(san.size() - 2));
  if (!dest) throw MoveError(MoveError::Kind::Malformed, "malformed SAN destination '" + original + "'");
  san.remove_suffix(2);
  if (!san.empty() && (san.back() == 'x' || san.back() == ':')) san.remove_suffix(1);

  std::optional<int> from_file;
  std::optional<int> from_rank;
  for (char c : san) {
    if (c >= 'a' && c <= 'h' && !from_file) from_file = c - 'a';
    else if (c >= '1' && c <= '8' && !from_rank) from_rank = c - '1';
    else throw MoveError(MoveError::Kind::Malformed, "malformed SAN disambiguation '" + original + "'");
  }
  if (piece == PieceKind::Pawn && from_rank && !from_file)
    throw MoveError(MoveError::Kind::Malformed, "malformed pawn SAN '" + original + "'");

  return unique([&](const Move& m) {
    return m.piece == piece && m.to == *dest && m.promotion == promotion && !m.is_castle() &&
           (!from_file || m.from.file() == *from_file) && (!from_rank || m.from.rank() == *from_rank);
  });
}

AppliedMove apply_uci(const Position& pos, std::string_view uci) {
  if (uci.size() != 4 && uci.size() != 5) throw MoveError(MoveError::Kind::Malformed, "malformed UCI '" + std::string(uci) + "'");
  const auto from = Square::parse(uci.substr(0, 2));
  const auto to = Square::parse(uci.substr(2, 2));
  if (!from || !to) throw MoveError(MoveError::Kind::Malformed, "malformed UCI '" + std::string(uci) + "'");
  std::optional<PieceKind> promotion;
  if (uci.size() == 5) {
    const auto piece = piece_from_char(uci[4]);
    if (!piece || piece->kind == PieceKind::Pawn || piece->kind == PieceKind::King)
      throw MoveError(MoveError::Kind::Malformed, "bad promotion in UCI '" + std::string(uci) + "'");
    promotion = piece->kind;
  }
  for (const auto& m : legal_moves(pos)) {
    if (m.from == *from && m.to == *to && m.promotion == promotion) return AppliedMove{pos.play(m), m};
  }
  throw MoveError(MoveError::Kind::Illegal, "illegal UCI move '" + std::string(uci) + "' in " + position_to_fen(pos));
}

std::string move_to_san(const Position& pos, const Move& m) {
  std::string out;
  if (m.flags & Move::kKingsideCastle) {
    out = "O-O";
  } else if (m.flags & Move::kQueensideCastle) {
    out = "O-O-O";
  } else {
    if (m.piece == PieceKind::Pawn) {
      if (m.is_capture()) out += static_cast<char>('a' + m.from.file());
    } else {
      out += letter_for(m.piece);
      bool clash = false;
      bool same_file = false;
      bool same_rank = false;
      for (const auto& other : legal_moves(pos)) {
        if (other.piece != m.piece || other.to != m.to || other.from == m.from) continue;
        clash = true;
        same_file |= other.from.file() == m.from.file();
        same_rank |= other.from.rank() == m.from.rank();
      }
      if (clash) {
        if (!same_file) out += static_cast<char>('a' + m.from.file());
        else if (!same_rank) out += static_cast<char>('1' + m.from.rank());
        else out += m.from.to_string();
      }
    }
    if (m.is_capture()) out += 'x';
    out += m.to.to_string();
    if (m.promotion) {
      out += '=';
      out += letter_for(*m.promotion);
    }
  }
  const Position next = pos.play(m);
  if (next.in_check()) out += game_status(next) == GameStatus::Checkmate ? '#' : '+';
  return out;
}

}  // namespace ratingnet::chess
