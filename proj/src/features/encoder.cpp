#include "ratingnet/features/encoder.hpp"

#include "ratingnet/chess/notation.hpp"
#include "ratingnet/pgn/dataset.hpp"

namespace ratingnet::features {

PlaneStack encode_planes(const chess::Position& pos) {
  PlaneStack out;
  for (int i = 0; i < 64; ++i) {
    const auto piece = pos.piece_at(chess::Square::from_index(i));
    if (!piece) continue;
    out.planes[PlaneStack::plane_index(piece->color, piece->kind)] |= std::uint64_t{1} << i;
  }
  return out;
}

EncodedSequence encode_game(const pgn::GameRecord& g, const EncoderConfig& cfg) {
  if (g.san_moves.size() != g.clocks_remaining.size())
    throw pgn::IngestError("game " + g.id + ": clock count differs from move count");
  EncodedSequence seq;
  seq.id = g.id;
  seq.category = g.category;
  seq.targets = {static_cast<float>(cfg.rating.standardize(g.white_rating)),
                 static_cast<float>(cfg.rating.standardize(g.black_rating))};
  seq.ratings = {static_cast<double>(g.white_rating), static_cast<double>(g.black_rating)};

  std::vector<int> clock_values = cfg.clock_feature == ClockFeature::Spent ? pgn::clock_spent(g) : g.clocks_remaining;
  seq.steps.reserve(g.san_moves.size());
  auto pos = chess::Position::initial();
  for (std::size_t t = 0; t < g.san_moves.size(); ++t) {
    const auto mover = pos.side_to_move();
    pos = chess::apply_san(pos, g.san_moves[t]).position;
    seq.steps.push_back(Step{encode_planes(pos), static_cast<float>(cfg.clock.standardize(clock_values[t])),
                             static_cast<std::uint8_t>(mover == chess::Color::White ? 0 : 1)});
  }
  return seq;
}

EncodedSequence encode_puzzle(std::string_view start_fen, const std::vector<std::string>& uci_moves,
                              std::optional<double> rating, const Standardizer& rating_std, std::string id) {
  EncodedSequence seq;
  seq.id = std::move(id);
  if (rating) {
    seq.targets = {static_cast<float>(rating_std.standardize(*rating))};
    seq.ratings = {*rating};
  }
  auto pos = chess::parse_fen(start_fen);
  seq.steps.reserve(uci_moves.size());
  for (const auto& uci : uci_moves) {
    const auto mover = pos.side_to_move();
    pos = chess::apply_uci(pos, uci).position;
    seq.steps.push_back(Step{encode_planes(pos), 0.0f, static_cast<std::uint8_t>(mover == chess::Color::White ? 0 : 1)});
  }
  return seq;
}

}  // namespace ratingnet::features
