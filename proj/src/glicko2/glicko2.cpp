#include "ratingnet/glicko2/glicko2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace ratingnet::glicko2 {

double g(double phi) { return 1.0 / std::sqrt(1.0 + 3.0 * phi * phi / (std::numbers::pi * std::numbers::pi)); }

double expected_score(double mu, double mu_j, double phi_j) {
  return 1.0 / (1.0 + std::exp(-g(phi_j) * (mu - mu_j)));
}

double variance(double mu, std::span<const GameOutcome> outcomes) {
  if (outcomes.empty()) throw GlickoError("variance needs at least one outcome");
  double sum = 0.0;
  for (const auto& o : outcomes) {
    const double gj = g(o.opponent.phi);
    const double e = expected_score(mu, o.opponent.mu, o.opponent.phi);
    sum += gj * gj * e * (1.0 - e);
  }
  return 1.0 / sum;
}

namespace {

double improvement_sum(double mu, std::span<const GameOutcome> outcomes) {
  double sum = 0.0;
  for (const auto& o : outcomes) sum += g(o.opponent.phi) * (o.score - expected_score(mu, o.opponent.mu, o.opponent.phi));
  return sum;
}

void check_outcomes(std::span<const GameOutcome> outcomes) {
  for (const auto& o : outcomes)
    if (o.score != 0.0 && o.score != 0.5 && o.score != 1.0)
      throw GlickoError("score must be 0, 0.5 or 1, got " + std::to_string(o.score));
}

}  // namespace

double delta(double v, double mu, std::span<const GameOutcome> outcomes) { return v * improvement_sum(mu, outcomes); }

double update_volatility(double sigma, double delta, double phi, double v, const GlickoConfig& cfg) {
  if (!(v > 0.0) || !std::isfinite(delta) || !std::isfinite(phi) || !(sigma > 0.0))
    throw GlickoError("update_volatility needs finite inputs with v > 0 and sigma > 0");
  const double tau2 = cfg.tau * cfg.tau;
  const double d2 = delta * delta;
  const double phi2 = phi * phi;
  const double a = std::log(sigma * sigma);
  auto f = [&](double x) {
    const double ex = std::exp(x);
    const double denom = phi2 + v + ex;
    return ex * (d2 - phi2 - v - ex) / (2.0 * denom * denom) - (x - a) / tau2;
  };

  double lo = a;
  double hi;
  if (d2 > phi2 + v) {
    hi = std::log(d2 - phi2 - v);
  } else {
    int k = 1;
    while (f(a - k * cfg.tau) < 0.0) {
      if (++k > cfg.max_iterations) throw ConvergenceError("volatility bracket search did not terminate", k);
    }
    hi = a - k * cfg.tau;
  }

  double f_lo = f(lo);
  double f_hi = f(hi);
  int iterations = 0;
  while (std::abs(hi - lo) > cfg.epsilon) {
    if (++iterations > cfg.max_iterations)
      throw ConvergenceError("volatility iteration exceeded " + std::to_string(cfg.max_iterations) + " steps", iterations);
    const double c = lo + (lo - hi) * f_lo / (f_hi - f_lo);
    const double f_c = f(c);
    if (f_c * f_hi <= 0.0) {
      lo = hi;
      f_lo = f_hi;
    } else {
      f_lo /= 2.0;
    }
    hi = c;
    f_hi = f_c;
  }
  return std::exp(lo / 2.0);
}

PeriodUpdate rate_period(const GlickoState& state, std::span<const GameOutcome> outcomes, const GlickoConfig& cfg) {
  if (outcomes.empty()) {
    const auto idle = no_games_update(state, cfg);
    return PeriodUpdate{idle, 0.0, 0.0, idle.phi};
  }
  check_outcomes(outcomes);
  PeriodUpdate out;
  out.v = variance(state.mu, outcomes);
  const double sum = improvement_sum(state.mu, outcomes);
  out.delta = out.v * sum;
  const double sigma_new = update_volatility(state.sigma, out.delta, state.phi, out.v, cfg);
  out.phi_star = std::sqrt(state.phi * state.phi + sigma_new * sigma_new);
  double phi_new = 1.0 / std::sqrt(1.0 / (out.phi_star * out.phi_star) + 1.0 / out.v);
  if (cfg.clamp_deviation) phi_new = std::clamp(phi_new, cfg.min_phi, cfg.max_phi);
  out.state = GlickoState{state.mu + phi_new * phi_new * sum, phi_new, sigma_new};
  return out;
}

GlickoState update_player(const GlickoState& state, std::span<const GameOutcome> outcomes, const GlickoConfig& cfg) {
  return rate_period(state, outcomes, cfg).state;
}

GlickoState no_games_update(const GlickoState& state, const GlickoConfig&) {
  return GlickoState{state.mu, std::sqrt(state.phi * state.phi + state.sigma * state.sigma), state.sigma};
}

DisplayRating to_display(const GlickoState& state) {
  return DisplayRating{state.mu * kScale + kDisplayCenter, state.phi * kScale, state.sigma};
}

GlickoState from_display(const DisplayRating& rating) {
  return GlickoState{(rating.rating - kDisplayCenter) / kScale, rating.rd / kScale, rating.volatility};
}

}  // namespace ratingnet::glicko2
