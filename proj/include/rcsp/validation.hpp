#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rcsp {

/// (1/alpha) times the integral of the empirical quantile function over
/// [1 - alpha, 1], integrated exactly piece by piece. Throws UsageError for
/// empty input or alpha outside (0, 1].
double cvar_oracle(std::span<const double> risks, double alpha);

/// Mixture of a point mass at `atom` (weight `atom_weight`) and a uniform on
/// [lo, hi]. Supports analytic quantiles and CVaR.
struct MixtureDistribution {
  double atom = 0.0;
  double atom_weight = 0.0;  // in [0, 1)
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double mean() const;
  [[nodiscard]] double quantile(double p) const;
  /// E[(X - eta)^+]
  [[nodiscard]] double expected_excess(double eta) const;
  /// eta* + E[(X - eta*)^+]/alpha with eta* the (1 - alpha) quantile.
  [[nodiscard]] double cvar(double alpha) const;
  /// Direct integral of the quantile function over the upper tail.
  [[nodiscard]] double cvar_by_integral(double alpha) const;
};

class Rng;

/// Random mixture with support inside [0, 1].
MixtureDistribution random_mixture(Rng& rng);
double sample(const MixtureDistribution& d, Rng& rng);

struct BoundCheckReport {
  int trials = 0;
  int violations = 0;
  double bound = 0.0;
  double max_error = 0.0;  // largest sup-error (C2) or regret (C3) seen
  bool pass = false;       // violations / trials <= delta
  std::vector<char> violated;  // per-trial flags
};

nlohmann::json to_json(const BoundCheckReport& report);

/// Uniform CVaR bound (B_G/alpha) sqrt(log(2|U|/delta)/(2N)).
double cvar_uniform_bound(int n, double alpha, double delta, int lattice_size,
                          double b_g = 1.0);

/// epsilon_N = (B_R + lambda B_G/alpha) sqrt(log(4|U|/delta)/(2N)).
double objective_uniform_bound(int n, double alpha, double delta,
                               double lambda, int lattice_size,
                               double b_r = 1.0, double b_g = 1.0);

/// Per trial, draws |U| mixtures on [0, b_g], samples N risks from each, and
/// flags the trial when the sup over commands of |empirical - analytic CVaR|
/// exceeds the uniform bound.
BoundCheckReport check_prop_c2(int n, double alpha, double delta,
                               int lattice_size, int trials,
                               std::uint64_t seed, double b_g = 1.0);

/// Per trial, draws |U| commands with uniform rewards on [0, 1] and mixture
/// risks, picks the empirical maximizer of mean reward - lambda CVaR and
/// flags the trial when its population regret exceeds 2 epsilon_N.
BoundCheckReport check_prop_c3(int n, double alpha, double delta,
                               double lambda, int lattice_size, int trials,
                               std::uint64_t seed);

struct PairedComparison {
  std::vector<std::pair<double, double>> pairs;
  double mean_advantage = 0.0;
  double level = 0.95;
  double lower = 0.0;
  double upper = 0.0;
  double p_nonpositive = 0.0;  // share of resampled means <= 0
};

/// Percentile bootstrap over pairs of (metric_a, metric_b); advantage is
/// a - b. The interval is widened if needed so it contains the mean.
PairedComparison paired_bootstrap(
    const std::vector<std::pair<double, double>>& pairs, int resamples,
    double level, std::uint64_t seed);

/// Same statistics computed over all n^n equally likely resamples.
/// Intended for very small n.
PairedComparison exhaustive_bootstrap(
    const std::vector<std::pair<double, double>>& pairs, double level);

}  // namespace rcsp
