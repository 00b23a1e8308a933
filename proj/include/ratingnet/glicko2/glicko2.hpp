#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace ratingnet::glicko2 {

/// Conversion factor between the display scale and the internal scale.
inline constexpr double kScale = 173.7178;
inline constexpr double kDisplayCenter = 1500.0;

/// Rating on the internal (Glicko-2) scale.
struct GlickoState {
  double mu = 0.0;
  double phi = 350.0 / kScale;
  double sigma = 0.06;
};

/// Display-scale triple as shown by rating sites.
struct DisplayRating {
  double rating = kDisplayCenter;
  double rd = 350.0;
  double volatility = 0.06;
};

struct GlickoConfig {
  double tau = 0.5;
  double epsilon = 1e-6;
  int max_iterations = 100;
  double default_rating = 1500.0;
  double default_rd = 350.0;
  double default_sigma = 0.06;
  // Optional bound on the post-period deviation (internal scale). Off by default.
  bool clamp_deviation = false;
  double min_phi = 0.3;
  double max_phi = 1.2;
};

struct GameOutcome {
  GlickoState opponent;
  double score = 0.0;  // 1 win, 0.5 draw, 0 loss
};

class GlickoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public GlickoError {
 public:
  ConvergenceError(const std::string& what, int iterations) : GlickoError(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

double g(double phi);
double expected_score(double mu, double mu_j, double phi_j);

/// Estimated variance of the rating from game outcomes alone. Throws on an empty list.
double variance(double mu, std::span<const GameOutcome> outcomes);

/// Estimated improvement in rating, v * sum g(phi_j) (s_j - E_j).
double delta(double v, double mu, std::span<const GameOutcome> outcomes);

/// New volatility via the Illinois (regula falsi) iteration on Glickman's f(x).
double update_volatility(double sigma, double delta, double phi, double v, const GlickoConfig& cfg);

/// Result of one rating period, with the intermediates kept for inspection.
struct PeriodUpdate {
  GlickoState state;
  double v = 0.0;
  double delta = 0.0;
  double phi_star = 0.0;
};

/// Full rating-period update. An empty outcome list is an idle period.
PeriodUpdate rate_period(const GlickoState& state, std::span<const GameOutcome> outcomes, const GlickoConfig& cfg);

GlickoState update_player(const GlickoState& state, std::span<const GameOutcome> outcomes, const GlickoConfig& cfg);

/// Idle period: phi grows to sqrt(phi^2 + sigma^2); mu and sigma are unchanged.
GlickoState no_games_update(const GlickoState& state, const GlickoConfig& cfg);

DisplayRating to_display(const GlickoState& state);
GlickoState from_display(const DisplayRating& rating);

}  // namespace ratingnet::glicko2
