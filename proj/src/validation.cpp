#include "rcsp/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcsp/errors.hpp"
#include "rcsp/planner.hpp"
#include "rcsp/random.hpp"

namespace rcsp {

double cvar_oracle(std::span<const double> risks, double alpha) {
  if (risks.empty()) throw UsageError("cvar_oracle: empty sample");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw UsageError("cvar_oracle: alpha must lie in (0, 1]");
  }
  std::vector<double> x(risks.begin(), risks.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double tail_start = 1.0 - alpha;
  // The quantile function equals x[i] on ((i)/n, (i+1)/n].
  double integral = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lo = std::max(static_cast<double>(i) / n, tail_start);
    double hi = static_cast<double>(i + 1) / n;
    if (hi > lo) integral += x[i] * (hi - lo);
  }
  return integral / alpha;
}

namespace {

double uniform_cdf(double x, double lo, double hi) {
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

double MixtureDistribution::mean() const {
  return atom_weight * atom + (1.0 - atom_weight) * 0.5 * (lo + hi);
}

double MixtureDistribution::quantile(double p) const {
  const double w = atom_weight;
  if (p <= 0.0) return w > 0.0 ? std::min(atom, lo) : lo;
  const double below_atom = (1.0 - w) * uniform_cdf(atom, lo, hi);
  if (p <= below_atom) return lo + (hi - lo) * p / (1.0 - w);
  if (p <= below_atom + w) return atom;
  return lo + (hi - lo) * (p - w) / (1.0 - w);
}

double MixtureDistribution::expected_excess(double eta) const {
  double uniform_part = 0.0;
  if (eta <= lo) {
    uniform_part = 0.5 * (lo + hi) - eta;
  } else if (eta < hi) {
    uniform_part = (hi - eta) * (hi - eta) / (2.0 * (hi - lo));
  }
  return atom_weight * std::max(atom - eta, 0.0) +
         (1.0 - atom_weight) * uniform_part;
}

double MixtureDistribution::cvar(double alpha) const {
  double eta = quantile(1.0 - alpha);
  return eta + expected_excess(eta) / alpha;
}

double MixtureDistribution::cvar_by_integral(double alpha) const {
  const double w = atom_weight;
  const double p1 = (1.0 - w) * uniform_cdf(atom, lo, hi);
  const double p2 = p1 + w;
  const double start = 1.0 - alpha;
  auto lower_branch = [&](double p) { return lo + (hi - lo) * p / (1.0 - w); };
  auto upper_branch = [&](double p) {
    return lo + (hi - lo) * (p - w) / (1.0 - w);
  };
  double total = 0.0;
  // Linear pieces integrate exactly by the trapezoid rule.
  auto add_linear = [&](double a, double b, auto&& f) {
    a = std::max(a, start);
    if (b > a) total += 0.5 * (b - a) * (f(a) + f(b));
  };
  add_linear(0.0, p1, lower_branch);
  double a = std::max(p1, start);
  if (p2 > a) total += (p2 - a) * atom;
  add_linear(p2, 1.0, upper_branch);
  return total / alpha;
}

MixtureDistribution random_mixture(Rng& rng) {
  MixtureDistribution d;
  d.atom_weight = rng.uniform(0.0, 0.6);
  d.atom = rng.uniform();
  d.lo = rng.uniform(0.0, 0.8);
  d.hi = rng.uniform(d.lo + 0.05, 1.0);
  return d;
}

double sample(const MixtureDistribution& d, Rng& rng) {
  if (rng.uniform() < d.atom_weight) return d.atom;
  return rng.uniform(d.lo, d.hi);
}

nlohmann::json to_json(const BoundCheckReport& report) {
  return nlohmann::json{{"trials", report.trials},
                        {"violations", report.violations},
                        {"violation_rate",
                         report.trials > 0 ? static_cast<double>(report.violations) /
                                                 report.trials
                                           : 0.0},
                        {"bound", report.bound},
                        {"max_error", report.max_error},
                        {"pass", report.pass}};
}

double cvar_uniform_bound(int n, double alpha, double delta, int lattice_size,
                          double b_g) {
  return (b_g / alpha) *
         std::sqrt(std::log(2.0 * lattice_size / delta) / (2.0 * n));
}

double objective_uniform_bound(int n, double alpha, double delta,
                               double lambda, int lattice_size, double b_r,
                               double b_g) {
  return (b_r + lambda * b_g / alpha) *
         std::sqrt(std::log(4.0 * lattice_size / delta) / (2.0 * n));
}

namespace {

void check_bound_args(int n, double alpha, double delta, int lattice_size,
                      int trials) {
  if (n < 1 || lattice_size < 1 || trials < 1) {
    throw ConfigError("N, lattice size and trials must be positive");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

void finish(BoundCheckReport& r, double delta) {
  r.pass = static_cast<double>(r.violations) <=
           delta * static_cast<double>(r.trials);
}

}  // namespace

BoundCheckReport check_prop_c2(int n, double alpha, double delta,
                               int lattice_size, int trials,
                               std::uint64_t seed, double b_g) {
  check_bound_args(n, alpha, delta, lattice_size, trials);
  if (!(b_g > 0.0)) throw ConfigError("B_G must be positive");
  BoundCheckReport report;
  report.trials = trials;
  report.bound = cvar_uniform_bound(n, alpha, delta, lattice_size, b_g);
  report.violated.assign(static_cast<std::size_t>(trials), 0);
  std::vector<double> risks(static_cast<std::size_t>(n));
  for (int t = 0; t < trials; ++t) {
    double sup = 0.0;
    for (int u = 0; u < lattice_size; ++u) {
      Rng rng(seed, Stream::kValidation,
              {2, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(u)});
      MixtureDistribution d = random_mixture(rng);
      for (double& r : risks) r = b_g * sample(d, rng);
      double err = std::abs(empirical_cvar(risks, alpha) - b_g * d.cvar(alpha));
      sup = std::max(sup, err);
    }
    report.max_error = std::max(report.max_error, sup);
    if (sup > report.bound) {
      ++report.violations;
      report.violated[static_cast<std::size_t>(t)] = 1;
    }
  }
  finish(report, delta);
  return report;
}

BoundCheckReport check_prop_c3(int n, double alpha, double delta,
                               double lambda, int lattice_size, int trials,
                               std::uint64_t seed) {
  check_bound_args(n, alpha, delta, lattice_size, trials);
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  BoundCheckReport report;
  report.trials = trials;
  report.bound = 2.0 * objective_uniform_bound(n, alpha, delta, lambda,
                                               lattice_size);
  report.violated.assign(static_cast<std::size_t>(trials), 0);
  std::vector<double> rewards(static_cast<std::size_t>(n));
  std::vector<double> risks(static_cast<std::size_t>(n));
  std::vector<double> population(static_cast<std::size_t>(lattice_size));
  for (int t = 0; t < trials; ++t) {
    double best_empirical = -std::numeric_limits<double>::infinity();
    int chosen = 0;
    for (int u = 0; u < lattice_size; ++u) {
      Rng rng(seed, Stream::kValidation,
              {3, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(u)});
      double r_lo = rng.uniform(0.0, 0.5);
      double r_hi = rng.uniform(r_lo + 0.05, 1.0);
      MixtureDistribution g = random_mixture(rng);
      population[static_cast<std::size_t>(u)] =
          0.5 * (r_lo + r_hi) - lambda * g.cvar(alpha);
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        rewards[static_cast<std::size_t>(i)] = rng.uniform(r_lo, r_hi);
        risks[static_cast<std::size_t>(i)] = sample(g, rng);
        sum += rewards[static_cast<std::size_t>(i)];
      }
      double j = sum / n - lambda * empirical_cvar(risks, alpha);
      if (j > best_empirical) {
        best_empirical = j;
        chosen = u;
      }
    }
    double best = *std::max_element(population.begin(), population.end());
    double regret = best - population[static_cast<std::size_t>(chosen)];
    report.max_error = std::max(report.max_error, regret);
    if (regret > report.bound) {
      ++report.violations;
      report.violated[static_cast<std::size_t>(t)] = 1;
    }
  }
  finish(report, delta);
  return report;
}

namespace {

std::vector<double> advantages(
    const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw UsageError("bootstrap needs at least one pair");
  std::vector<double> adv;
  adv.reserve(pairs.size());
  for (const auto& [a, b] : pairs) adv.push_back(a - b);
  return adv;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Percentile of a sorted sample: element ceil(p B) - 1.
double percentile(const std::vector<double>& sorted, double p) {
  auto b = static_cast<double>(sorted.size());
  auto idx = static_cast<std::ptrdiff_t>(std::ceil(p * b - 1e-9)) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0,
                                   static_cast<std::ptrdiff_t>(sorted.size()) - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
}

}  // namespace

PairedComparison paired_bootstrap(
    const std::vector<std::pair<double, double>>& pairs, int resamples,
    double level, std::uint64_t seed) {
  check_level(level);
  if (resamples < 1000) throw ConfigError("resamples must be at least 1000");
  std::vector<double> adv = advantages(pairs);
  PairedComparison out;
  out.pairs = pairs;
  out.level = level;
  out.mean_advantage = mean_of(adv);

  Rng rng(seed, Stream::kBootstrap);
  std::vector<double> means(static_cast<std::size_t>(resamples));
  int nonpositive = 0;
  for (double& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < adv.size(); ++i) {
      s += adv[rng.uniform_index(adv.size())];
    }
    m = s / static_cast<double>(adv.size());
    if (m <= 0.0) ++nonpositive;
  }
  std::sort(means.begin(), means.end());
  out.lower = std::min(percentile(means, 0.5 * (1.0 - level)), out.mean_advantage);
  out.upper = std::max(percentile(means, 0.5 * (1.0 + level)), out.mean_advantage);
  out.p_nonpositive = static_cast<double>(nonpositive) / resamples;
  return out;
}

PairedComparison exhaustive_bootstrap(
    const std::vector<std::pair<double, double>>& pairs, double level) {
  check_level(level);
  std::vector<double> adv = advantages(pairs);
  const std::size_t n = adv.size();
  if (n > 8) throw UsageError("exhaustive bootstrap is limited to n <= 8");
  PairedComparison out;
  out.pairs = pairs;
  out.level = level;
  out.mean_advantage = mean_of(adv);

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= n;
  std::vector<double> means;
  means.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    double s = 0.0;
    for (std::size_t i : idx) s += adv[i];
    means.push_back(s / static_cast<double>(n));
    for (std::size_t d = 0; d < n; ++d) {
      if (++idx[d] < n) break;
      idx[d] = 0;
    }
  }
  std::sort(means.begin(), means.end());
  auto nonpositive = std::count_if(means.begin(), means.end(),
                                   [](double m) { return m <= 0.0; });
  out.lower = std::min(percentile(means, 0.5 * (1.0 - level)), out.mean_advantage);
  out.upper = std::max(percentile(means, 0.5 * (1.0 + level)), out.mean_advantage);
  out.p_nonpositive = static_cast<double>(nonpositive) / static_cast<double>(total);
  return out;
}

}  // namespace rcsp
