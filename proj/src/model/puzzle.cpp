#include "ratingnet/model/puzzle.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ratingnet/model/evaluate.hpp"

namespace ratingnet::model {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::vector<PuzzleRecord> read_puzzles(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.find_first_not_of(" \t\r") == std::string::npos)
    throw PuzzleFormatError("puzzle file is empty");
  const auto header = split_csv(line);
  int fen_col = -1, moves_col = -1, id_col = -1, rating_col = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const auto name = lower(header[i]);
    if (name == "fen") fen_col = i;
    if (name == "moves") moves_col = i;
    if (name == "puzzleid" || name == "id") id_col = i;
    if (name == "rating") rating_col = i;
  }
  if (fen_col < 0 || moves_col < 0) throw PuzzleFormatError("puzzle header needs FEN and Moves columns");

  std::vector<PuzzleRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv(line);
    const auto need = static_cast<std::size_t>(std::max({fen_col, moves_col, id_col, rating_col}));
    if (fields.size() <= need) throw PuzzleFormatError("line " + std::to_string(line_no) + ": too few columns");
    PuzzleRecord p;
    p.id = id_col >= 0 ? fields[id_col] : "puzzle" + std::to_string(out.size() + 1);
    p.fen = fields[fen_col];
    std::istringstream moves(fields[moves_col]);
    for (std::string m; moves >> m;) p.uci_moves.push_back(m);
    if (p.uci_moves.empty()) throw PuzzleFormatError("line " + std::to_string(line_no) + ": no moves");
    if (rating_col >= 0 && !fields[rating_col].empty()) {
      try {
        p.rating = std::stod(fields[rating_col]);
      } catch (const std::exception&) {
        throw PuzzleFormatError("line " + std::to_string(line_no) + ": bad rating '" + fields[rating_col] + "'");
      }
    }
    out.push_back(std::move(p));
  }
  if (out.empty()) throw PuzzleFormatError("puzzle file has no puzzles");
  return out;
}

std::vector<PuzzleRecord> read_puzzles_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PuzzleFormatError("cannot open " + path);
  return read_puzzles(in);
}

std::vector<features::EncodedSequence> encode_puzzles(const std::vector<PuzzleRecord>& puzzles,
                                                      const features::Standardizer& rating) {
  std::vector<features::EncodedSequence> out;
  out.reserve(puzzles.size());
  for (const auto& p : puzzles) {
    try {
      out.push_back(features::encode_puzzle(p.fen, p.uci_moves, p.rating, rating, p.id));
    } catch (const chess::ChessError& e) {
      throw PuzzleFormatError("puzzle " + p.id + ": " + e.what());
    }
  }
  return out;
}

RatingNetConfig puzzle_config(RatingNetConfig base) {
  base.outputs = 1;
  base.clock_feature_enabled = false;
  return base;
}

PuzzleReport puzzle_evaluate(Net& net, const std::vector<features::EncodedSequence>& puzzles,
                             const features::Standardizer& rating) {
  if (net.config().outputs != 1) throw std::invalid_argument("puzzle evaluation needs a single-output model");
  const auto preds = predict_final(net, puzzles, rating);
  PuzzleReport r;
  for (const auto& p : preds) {
    if (p.truth.size() != 1) throw std::invalid_argument("puzzle " + p.id + " has no rating");
    const double e = p.estimate[0] - p.truth[0];
    r.mse += e * e;
    r.mae += std::abs(e);
    ++r.puzzles;
  }
  if (r.puzzles) {
    r.mse /= static_cast<double>(r.puzzles);
    r.mae /= static_cast<double>(r.puzzles);
  }
  return r;
}

void write_puzzle_report(std::ostream& out, const PuzzleReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "puzzles,mse,mae,reference_mse\n%zu,%.6f,%.6f,%.0f\n", r.puzzles, r.mse, r.mae,
                kReferencePuzzleMse);
  out << buf;
}

}  // namespace ratingnet::model
