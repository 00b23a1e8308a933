#include "ratingnet/chess/position.hpp"

#include <array>
#include <string>
#include <utility>

namespace ratingnet::chess {
namespace {

constexpr std::uint8_t encode(Piece p) {
  return static_cast<std::uint8_t>(1 + static_cast<int>(p.color) * 6 + static_cast<int>(p.kind));
}

constexpr std::optional<Piece> decode(std::uint8_t cell) {
  if (cell == 0) return std::nullopt;
  const int v = cell - 1;
  return Piece{static_cast<Color>(v / 6), static_cast<PieceKind>(v % 6)};
}

constexpr std::uint8_t code(Color c, PieceKind k) { return encode(Piece{c, k}); }

struct Delta {
  int df;
  int dr;
};

constexpr std::array<Delta, 8> kKnightDeltas{{{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
constexpr std::array<Delta, 8> kKingDeltas{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr std::array<Delta, 4> kRookDirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<Delta, 4> kBishopDirs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

constexpr bool on_board(int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; }

constexpr int home_rank(Color c) { return c == Color::White ? 0 : 7; }
constexpr int pawn_dir(Color c) { return c == Color::White ? 1 : -1; }

}  // namespace

char piece_to_char(Piece p) {
  static constexpr std::string_view kLetters = "pnbrqk";
  const char lower = kLetters[static_cast<int>(p.kind)];
  return p.color == Color::White ? static_cast<char>(lower - 'a' + 'A') : lower;
}

std::optional<Piece> piece_from_char(char c) {
  static constexpr std::string_view kLetters = "pnbrqk";
  const bool white = c >= 'A' && c <= 'Z';
  const char lower = white ? static_cast<char>(c - 'A' + 'a') : c;
  const auto pos = kLetters.find(lower);
  if (pos == std::string_view::npos) return std::nullopt;
  return Piece{white ? Color::White : Color::Black, static_cast<PieceKind>(pos)};
}

std::optional<Square> Square::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  const int f = text[0] - 'a';
  const int r = text[1] - '1';
  if (!on_board(f, r)) return std::nullopt;
  return Square::at(f, r);
}

std::string Square::to_string() const {
  return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

std::string Move::uci() const {
  std::string out = from.to_string() + to.to_string();
  if (promotion) out += piece_to_char(Piece{Color::Black, *promotion});
  return out;
}

Position Position::initial() {
  Board board{};
  constexpr std::array<PieceKind, 8> kBack{PieceKind::Rook, PieceKind::Knight, PieceKind::Bishop, PieceKind::Queen,
                                           PieceKind::King, PieceKind::Bishop, PieceKind::Knight, PieceKind::Rook};
  for (int f = 0; f < 8; ++f) {
    board[Square::at(f, 0).index()] = Piece{Color::White, kBack[f]};
    board[Square::at(f, 1).index()] = Piece{Color::White, PieceKind::Pawn};
    board[Square::at(f, 6).index()] = Piece{Color::Black, PieceKind::Pawn};
    board[Square::at(f, 7).index()] = Piece{Color::Black, kBack[f]};
  }
  return create(board, Color::White, CastlingRights{true, true, true, true}, std::nullopt, 0, 1);
}

Position Position::create(const Board& board, Color side_to_move, CastlingRights castling,
                          std::optional<Square> en_passant, int halfmove_clock, int fullmove_number) {
  Position p;
  int kings[2] = {0, 0};
  for (int i = 0; i < 64; ++i) {
    if (!board[i]) continue;
    const Piece pc = *board[i];
    const int rank = i >> 3;
    if (pc.kind == PieceKind::Pawn && (rank == 0 || rank == 7)) throw FenError("pawn on first or last rank");
    if (pc.kind == PieceKind::King) ++kings[static_cast<int>(pc.color)];
    p.cells_[i] = encode(pc);
  }
  if (kings[0] != 1 || kings[1] != 1) throw FenError("each side needs exactly one king");
  if (halfmove_clock < 0) throw FenError("negative halfmove clock");
  if (fullmove_number < 1) throw FenError("fullmove number must be at least 1");

  auto has = [&](int f, int r, Color c, PieceKind k) { return p.cells_[Square::at(f, r).index()] == code(c, k); };
  if ((castling.white_kingside || castling.white_queenside) && !has(4, 0, Color::White, PieceKind::King))
    throw FenError("white castling rights without king on e1");
  if ((castling.black_kingside || castling.black_queenside) && !has(4, 7, Color::Black, PieceKind::King))
    throw FenError("black castling rights without king on e8");
  if (castling.white_kingside && !has(7, 0, Color::White, PieceKind::Rook)) throw FenError("white O-O right without rook on h1");
  if (castling.white_queenside && !has(0, 0, Color::White, PieceKind::Rook)) throw FenError("white O-O-O right without rook on a1");
  if (castling.black_kingside && !has(7, 7, Color::Black, PieceKind::Rook)) throw FenError("black O-O right without rook on h8");
  if (castling.black_queenside && !has(0, 7, Color::Black, PieceKind::Rook)) throw FenError("black O-O-O right without rook on a8");

  if (en_passant) {
    // White to move means black just double-pushed, so the target is on rank 6.
    const int expected_rank = side_to_move == Color::White ? 5 : 2;
    if (en_passant->rank() != expected_rank) throw FenError("en passant square on wrong rank");
    const Color pusher = opposite(side_to_move);
    const int pawn_rank = expected_rank - pawn_dir(side_to_move);
    if (p.cells_[en_passant->index()] != 0 || !has(en_passant->file(), pawn_rank, pusher, PieceKind::Pawn))
      throw FenError("en passant square without a double-pushed pawn");
  }

  p.side_ = side_to_move;
  p.castling_ = castling;
  p.en_passant_ = en_passant;
  p.halfmove_ = halfmove_clock;
  p.fullmove_ = fullmove_number;
  if (p.is_attacked(p.king_square(opposite(side_to_move)), side_to_move))
    throw FenError("side not to move is in check");
  return p;
}

std::optional<Piece> Position::piece_at(Square sq) const { return decode(cells_[sq.index()]); }

Square Position::king_square(Color c) const {
  const auto k = code(c, PieceKind::King);
  for (int i = 0; i < 64; ++i)
    if (cells_[i] == k) return Square::from_index(i);
  throw ChessError("king missing");
}

bool Position::is_attacked(Square sq, Color by) const {
  const int f = sq.file();
  const int r = sq.rank();
  auto at = [&](int ff, int rr) { return cells_[rr * 8 + ff]; };

  // Pawns attack diagonally forward, so look one rank behind from the attacker's view.
  const int pr = r - pawn_dir(by);
  for (int df : {-1, 1})
    if (on_board(f + df, pr) && at(f + df, pr) == code(by, PieceKind::Pawn)) return true;
  for (auto d : kKnightDeltas)
    if (on_board(f + d.df, r + d.dr) && at(f + d.df, r + d.dr) == code(by, PieceKind::Knight)) return true;
  for (auto d : kKingDeltas)
    if (on_board(f + d.df, r + d.dr) && at(f + d.df, r + d.dr) == code(by, PieceKind::King)) return true;

  auto slides = [&](const std::array<Delta, 4>& dirs, PieceKind kind) {
    for (auto d : dirs) {
      int ff = f + d.df;
      int rr = r + d.dr;
      while (on_board(ff, rr)) {
        const auto c = at(ff, rr);
        if (c != 0) {
          if (c == code(by, kind) || c == code(by, PieceKind::Queen)) return true;
          break;
        }
        ff += d.df;
        rr += d.dr;
      }
    }
    return false;
  };
  return slides(kRookDirs, PieceKind::Rook) || slides(kBishopDirs, PieceKind::Bishop);
}

Position Position::play(const Move& m) const {
  Position next = *this;
  const Color us = side_;
  const auto moving = cells_[m.from.index()];
  const bool reset_clock = m.piece == PieceKind::Pawn || m.is_capture();

  next.cells_[m.from.index()] = 0;
  if (m.is_en_passant()) next.cells_[Square::at(m.to.file(), m.from.rank()).index()] = 0;
  next.cells_[m.to.index()] = m.promotion ? code(us, *m.promotion) : moving;

  if (m.is_castle()) {
    const int r = home_rank(us);
    const bool kingside = (m.flags & Move::kKingsideCastle) != 0;
    const auto rook_from = Square::at(kingside ? 7 : 0, r);
    const auto rook_to = Square::at(kingside ? 5 : 3, r);
    next.cells_[rook_to.index()] = next.cells_[rook_from.index()];
    next.cells_[rook_from.index()] = 0;
  }

  auto touch = [&](Square sq) {
    if (sq == Square::at(4, 0)) next.castling_.white_kingside = next.castling_.white_queenside = false;
    if (sq == Square::at(4, 7)) next.castling_.black_kingside = next.castling_.black_queenside = false;
    if (sq == Square::at(7, 0)) next.castling_.white_kingside = false;
    if (sq == Square::at(0, 0)) next.castling_.white_queenside = false;
    if (sq == Square::at(7, 7)) next.castling_.black_kingside = false;
    if (sq == Square::at(0, 7)) next.castling_.black_queenside = false;
  };
  touch(m.from);
  touch(m.to);

  next.en_passant_ = m.is_double_push() ? std::optional<Square>(Square::at(m.from.file(), m.from.rank() + pawn_dir(us)))
                                        : std::nullopt;
  next.halfmove_ = reset_clock ? 0 : halfmove_ + 1;
  if (us == Color::Black) ++next.fullmove_;
  next.side_ = opposite(us);
  return next;
}

std::vector<Move> pseudo_legal_moves(const Position& pos) {
  std::vector<Move> moves;
  moves.reserve(64);
  const Color us = pos.side_;
  const Color them = opposite(us);
  const auto& cells = pos.cells_;

  auto color_of = [&](int idx) { return static_cast<Color>((cells[idx] - 1) / 6); };
  auto add = [&](int from, int to, PieceKind piece, std::uint8_t flags) {
    if (cells[to] != 0) flags |= Move::kCapture;
    moves.push_back(Move{Square::from_index(from), Square::from_index(to), piece, std::nullopt, flags});
  };

  for (int from = 0; from < 64; ++from) {
    if (cells[from] == 0 || color_of(from) != us) continue;
    const auto kind = static_cast<PieceKind>((cells[from] - 1) % 6);
    const int f = from & 7;
    const int r = from >> 3;

    switch (kind) {
      case PieceKind::Pawn: {
        const int dir = pawn_dir(us);
        const int last = us == Color::White ? 7 : 0;
        auto push_pawn = [&](int to, std::uint8_t flags) {
          if ((to >> 3) == last) {
            for (auto promo : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight}) {
              Move m{Square::from_index(from), Square::from_index(to), PieceKind::Pawn, promo, flags};
              if (cells[to] != 0) m.flags |= Move::kCapture;
              moves.push_back(m);
            }
          } else {
            add(from, to, PieceKind::Pawn, flags);
          }
        };
        const int r1 = r + dir;
        if (on_board(f, r1) && cells[r1 * 8 + f] == 0) {
          push_pawn(r1 * 8 + f, Move::kNone);
          const int start = us == Color::White ? 1 : 6;
          const int r2 = r + 2 * dir;
          if (r == start && cells[r2 * 8 + f] == 0) add(from, r2 * 8 + f, PieceKind::Pawn, Move::kDoublePush);
        }
        for (int df : {-1, 1}) {
          const int ff = f + df;
          if (!on_board(ff, r1)) continue;
          const int to = r1 * 8 + ff;
          if (cells[to] != 0 && color_of(to) == them) {
            push_pawn(to, Move::kCapture);
          } else if (pos.en_passant_ && pos.en_passant_->index() == to) {
            moves.push_back(Move{Square::from_index(from), Square::from_index(to), PieceKind::Pawn, std::nullopt,
                                 static_cast<std::uint8_t>(Move::kCapture | Move::kEnPassant)});
          }
        }
        break;
      }
      case PieceKind::Knight:
      case PieceKind::King: {
        const auto& deltas = kind == PieceKind::Knight ? kKnightDeltas : kKingDeltas;
        for (auto d : deltas) {
          const int ff = f + d.df;
          const int rr = r + d.dr;
          if (!on_board(ff, rr)) continue;
          const int to = rr * 8 + ff;
          if (cells[to] == 0 || color_of(to) == them) add(from, to, kind, Move::kNone);
        }
        break;
      }
      default: {
        auto slide = [&](const std::array<Delta, 4>& dirs) {
          for (auto d : dirs) {
            int ff = f + d.df;
            int rr = r + d.dr;
            while (on_board(ff, rr)) {
              const int to = rr * 8 + ff;
              if (cells[to] != 0) {
                if (color_of(to) == them) add(from, to, kind, Move::kNone);
                break;
              }
              add(from, to, kind, Move::kNone);
              ff += d.df;
              rr += d.dr;
            }
          }
        };
        if (kind != PieceKind::Bishop) slide(kRookDirs);
        if (kind != PieceKind::Rook) slide(kBishopDirs);
        break;
      }
    }
  }

  // Castling: rights, empty path, and king not passing through attacked squares.
  const int hr = home_rank(us);
  const bool ks = us == Color::White ? pos.castling_.white_kingside : pos.castling_.black_kingside;
  const bool qs = us == Color::White ? pos.castling_.white_queenside : pos.castling_.black_queenside;
  if ((ks || qs) && !pos.is_attacked(Square::at(4, hr), them)) {
    auto empty = [&](int f) { return cells[hr * 8 + f] == 0; };
    auto safe = [&](int f) { return !pos.is_attacked(Square::at(f, hr), them); };
    if (ks && empty(5) && empty(6) && safe(5) && safe(6))
      moves.push_back(Move{Square::at(4, hr), Square::at(6, hr), PieceKind::King, std::nullopt, Move::kKingsideCastle});
    if (qs && empty(1) && empty(2) && empty(3) && safe(3) && safe(2))
      moves.push_back(Move{Square::at(4, hr), Square::at(2, hr), PieceKind::King, std::nullopt, Move::kQueensideCastle});
  }
  return moves;
}

std::vector<Move> legal_moves(const Position& pos) {
  auto moves = pseudo_legal_moves(pos);
  const Color us = pos.side_to_move();
  std::erase_if(moves, [&](const Move& m) {
    const Position next = pos.play(m);
    return next.is_attacked(next.king_square(us), next.side_to_move());
  });
  return moves;
}

std::uint64_t perft(const Position& pos, int depth) {
  if (depth <= 0) return 1;
  const auto moves = legal_moves(pos);
  if (depth == 1) return moves.size();
  std::uint64_t nodes = 0;
  for (const auto& m : moves) nodes += perft(pos.play(m), depth - 1);
  return nodes;
}

GameStatus game_status(const Position& pos) {
  if (!legal_moves(pos).empty()) return GameStatus::Ongoing;
  return pos.in_check() ? GameStatus::Checkmate : GameStatus::Stalemate;
}

}  // namespace ratingnet::chess
