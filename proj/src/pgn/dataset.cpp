#include "ratingnet/pgn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ratingnet/pgn/time_control.hpp"

namespace ratingnet::pgn {
namespace {

using nlohmann::json;

constexpr std::string_view kDatasetHeader = "# ratingnet-dataset v1";

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

int to_int(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw IngestError("bad integer in field '" + field + "': " + text);
  }
  if (used != text.size()) throw IngestError("bad integer in field '" + field + "': " + text);
  return value;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t n = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double std_dev() const {
    if (n == 0) return 1.0;
    const double m = mean();
    const double var = std::max(0.0, sum_sq / static_cast<double>(n) - m * m);
    const double s = std::sqrt(var);
    return s > 0.0 ? s : 1.0;
  }
};

}  // namespace

std::string manifest_to_json(const DatasetManifest& m) {
  json months = json::object();
  for (const auto& [month, s] : m.months) months[month] = {{"seen", s.seen}, {"kept", s.kept}};
  const json j = {
      {"version", m.version},
      {"split_seed", m.split_seed},
      {"games_per_month", m.games_per_month},
      {"train_fraction", m.train_fraction},
      {"clock_mean", m.clock_mean},
      {"clock_std", m.clock_std},
      {"spent_mean", m.spent_mean},
      {"spent_std", m.spent_std},
      {"rating_mean", m.rating_mean},
      {"rating_std", m.rating_std},
      {"higher_rated_winner_fraction", m.higher_rated_winner_fraction},
      {"months", months},
      {"train_ids", m.train_ids},
      {"test_ids", m.test_ids},
  };
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  DatasetManifest m;
  try {
    const json j = json::parse(text);
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw IngestError("unsupported manifest version " + std::to_string(m.version));
    m.split_seed = j.at("split_seed").get<std::uint64_t>();
    m.games_per_month = j.at("games_per_month").get<std::uint64_t>();
    m.train_fraction = j.at("train_fraction").get<double>();
    m.clock_mean = j.at("clock_mean").get<double>();
    m.clock_std = j.at("clock_std").get<double>();
    m.spent_mean = j.at("spent_mean").get<double>();
    m.spent_std = j.at("spent_std").get<double>();
    m.rating_mean = j.at("rating_mean").get<double>();
    m.rating_std = j.at("rating_std").get<double>();
    m.higher_rated_winner_fraction = j.at("higher_rated_winner_fraction").get<double>();
    for (const auto& [month, s] : j.at("months").items())
      m.months[month] = MonthSummary{s.at("seen").get<std::uint64_t>(), s.at("kept").get<std::uint64_t>()};
    m.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    m.test_ids = j.at("test_ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw IngestError(std::string("invalid manifest: ") + e.what());
  }
  if (!(m.clock_std > 0.0) || !(m.rating_std > 0.0) || !(m.spent_std > 0.0))
    throw IngestError("manifest standard deviations must be positive");
  return m;
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open manifest " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

void write_manifest(const std::string& path, const DatasetManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write manifest " + path);
  out << manifest_to_json(m);
}

std::string format_record(const GameRecord& g) {
  std::string out;
  out += "id=" + g.id;
  out += "\tmonth=" + g.source_month;
  out += "\twhite=" + std::to_string(g.white_rating);
  out += "\tblack=" + std::to_string(g.black_rating);
  out += "\ttc=" + std::to_string(g.base_seconds) + "+" + std::to_string(g.increment_seconds);
  out += "\tcategory=" + std::string(category_name(g.category));
  out += "\tresult=" + std::string(result_marker(g.result));
  out += "\tmoves=";
  for (std::size_t i = 0; i < g.san_moves.size(); ++i) out += (i ? " " : "") + g.san_moves[i];
  out += "\tclocks=";
  for (std::size_t i = 0; i < g.clocks_remaining.size(); ++i) out += (i ? " " : "") + std::to_string(g.clocks_remaining[i]);
  return out;
}

GameRecord parse_record(const std::string& line) {
  std::map<std::string, std::string> fields;
  std::istringstream in(line);
  std::string item;
  while (std::getline(in, item, '\t')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw IngestError("dataset field without '=': " + item);
    fields[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw IngestError(std::string("dataset record missing field '") + key + "'");
    return it->second;
  };

  GameRecord g;
  g.id = need("id");
  g.source_month = need("month");
  g.white_rating = to_int(need("white"), "white");
  g.black_rating = to_int(need("black"), "black");
  const auto tc = parse_time_control(need("tc"));
  if (!tc) throw IngestError("bad tc field: " + need("tc"));
  g.base_seconds = tc->base_seconds;
  g.increment_seconds = tc->increment_seconds;
  const auto cat = parse_category(need("category"));
  if (!cat) throw IngestError("bad category field: " + need("category"));
  g.category = *cat;
  const auto res = parse_result(need("result"));
  if (!res) throw IngestError("bad result field: " + need("result"));
  g.result = *res;
  g.san_moves = split(need("moves"), ' ');
  for (const auto& c : split(need("clocks"), ' ')) g.clocks_remaining.push_back(to_int(c, "clocks"));
  validate(g);
  return g;
}

void write_dataset(std::ostream& out, const std::vector<GameRecord>& games) {
  out << kDatasetHeader << '\n';
  for (const auto& g : games) out << format_record(g) << '\n';
}

std::vector<GameRecord> read_dataset(std::istream& in) {
  std::vector<GameRecord> games;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      if (line != kDatasetHeader) throw IngestError("not a ratingnet dataset (bad header line)");
      first = false;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    games.push_back(parse_record(line));
  }
  if (first) throw IngestError("empty dataset file");
  return games;
}

std::vector<GameRecord> read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open dataset " + path);
  return read_dataset(in);
}

void write_dataset_file(const std::string& path, const std::vector<GameRecord>& games) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write dataset " + path);
  write_dataset(out, games);
}

std::vector<int> clock_spent(const GameRecord& g) {
  std::vector<int> spent(g.clocks_remaining.size());
  int previous[2] = {g.base_seconds, g.base_seconds};
  for (std::size_t t = 0; t < spent.size(); ++t) {
    const int side = static_cast<int>(t % 2);
    spent[t] = std::max(0, previous[side] + g.increment_seconds - g.clocks_remaining[t]);
    previous[side] = g.clocks_remaining[t];
  }
  return spent;
}

MonthlySampler::MonthlySampler(std::uint64_t games_per_month, std::uint64_t seed)
    : games_per_month_(games_per_month), seed_(seed) {}

MonthlySampler::Reservoir& MonthlySampler::reservoir(const std::string& month) {
  auto it = months_.find(month);
  if (it == months_.end()) {
    std::vector<std::uint32_t> material{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    for (unsigned char c : month) material.push_back(c);
    std::seed_seq seq(material.begin(), material.end());
    it = months_.emplace(month, Reservoir{std::mt19937_64(seq), 0, {}}).first;
  }
  return it->second;
}

void MonthlySampler::note_month(const std::string& month) { reservoir(month); }

void MonthlySampler::add(GameRecord record) {
  auto& r = reservoir(record.source_month);
  const std::uint64_t index = next_index_++;
  const std::uint64_t i = r.seen++;
  if (r.kept.size() < games_per_month_) {
    r.kept.emplace_back(index, std::move(record));
    return;
  }
  const auto j = std::uniform_int_distribution<std::uint64_t>(0, i)(r.rng);
  if (j < games_per_month_) r.kept[j] = {index, std::move(record)};
}

void compute_statistics(const std::vector<const GameRecord*>& train, DatasetManifest& m) {
  Moments ratings, clocks, spent;
  std::uint64_t decisive = 0;
  std::uint64_t higher_won = 0;
  for (const auto* g : train) {
    ratings.add(g->white_rating);
    ratings.add(g->black_rating);
    for (int c : g->clocks_remaining) clocks.add(c);
    for (int s : clock_spent(*g)) spent.add(s);
    if (g->result != GameResult::Draw) {
      ++decisive;
      const bool white_won = g->result == GameResult::WhiteWin;
      if ((white_won && g->white_rating > g->black_rating) || (!white_won && g->black_rating > g->white_rating))
        ++higher_won;
    }
  }
  if (ratings.n) {
    m.rating_mean = ratings.mean();
    m.rating_std = ratings.std_dev();
  }
  m.clock_mean = clocks.mean();
  m.clock_std = clocks.std_dev();
  m.spent_mean = spent.mean();
  m.spent_std = spent.std_dev();
  m.higher_rated_winner_fraction = decisive ? static_cast<double>(higher_won) / static_cast<double>(decisive) : 0.0;
}

MonthlySampler::Result MonthlySampler::finish(double train_fraction) const {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) throw IngestError("train fraction must lie in [0, 1]");
  Result out;
  auto& m = out.manifest;
  m.games_per_month = games_per_month_;
  m.train_fraction = train_fraction;
  m.split_seed = seed_;

  std::vector<std::pair<std::uint64_t, GameRecord>> kept;
  for (const auto& [month, r] : months_) {
    m.months[month] = MonthSummary{r.seen, r.kept.size()};
    kept.insert(kept.end(), r.kept.begin(), r.kept.end());
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::set<std::string> used;
  for (auto& [index, g] : kept) {
    std::string id = g.id;
    for (int k = 2; used.count(id); ++k) id = g.id + "-" + std::to_string(k);
    used.insert(id);
    g.id = id;
    out.games.push_back(std::move(g));
  }

  const std::size_t n = out.games.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed_);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<bool> is_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) is_train[order[i]] = true;

  std::vector<const GameRecord*> train;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_train[i]) {
      m.train_ids.push_back(out.games[i].id);
      train.push_back(&out.games[i]);
    } else {
      m.test_ids.push_back(out.games[i].id);
    }
  }
  compute_statistics(train, m);
  return out;
}

MonthlySampler::Result sample_and_split(const std::vector<GameRecord>& records, std::uint64_t games_per_month,
                                        double train_fraction, std::uint64_t seed) {
  MonthlySampler sampler(games_per_month, seed);
  for (const auto& r : records) sampler.add(r);
  return sampler.finish(train_fraction);
}

}  // namespace ratingnet::pgn
