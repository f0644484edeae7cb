#pragma once

// Probabilistic cache sets: cache sizes are order statistics of i.i.d. draws
// from a normal parental law restricted to [0, N]. Monte Carlo estimators of
// the expected gap and of the grouping increment, plus their closed-form
// bounds.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hetcache/analytics.hpp"
#include "hetcache/error.hpp"
#include "hetcache/grouping.hpp"
#include "hetcache/model.hpp"
#include "hetcache/parallel.hpp"

namespace hetcache {

inline constexpr double kMinAcceptance = 1e-3;

/// Probability that a N(mu, sigma^2) draw lands in [0, N].
inline double truncation_acceptance(const DistributionSpec& spec) {
  if (spec.sigma == 0.0) return 1.0;
  auto phi = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  return phi((static_cast<double>(spec.support_max) - spec.mu) / spec.sigma) - phi(-spec.mu / spec.sigma);
}

/// K sorted draws by rejection from the truncated normal; deterministic in seed.
inline CacheSet sample_cache_set(const DistributionSpec& spec, std::size_t users, std::uint64_t seed) {
  spec.validate();
  require(users >= 1, ErrorKind::OutOfRange, "K must be >= 1");
  std::vector<double> sizes(users, spec.mu);
  if (spec.sigma > 0.0) {
    require(truncation_acceptance(spec) >= kMinAcceptance, ErrorKind::SamplingFailure,
            "truncation to [0, N] accepts fewer than 1 in 1000 draws");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(spec.mu, spec.sigma);
    const auto n = static_cast<double>(spec.support_max);
    for (auto& s : sizes) {
      do {
        s = normal(rng);
      } while (s < 0.0 || s > n);
    }
  }
  return CacheSet::make(std::move(sizes), spec.support_max);
}

/// Bound on E[R_coded / R_cutset] for two users.
inline double theorem5_bound(double mu, double sigma, std::int64_t n) {
  require(n >= 2, ErrorKind::OutOfRange, "N must be >= 2");
  const double sp = std::sqrt(std::numbers::pi);
  return 2.0 - (sp * mu + sigma) / (sp * static_cast<double>(n));
}

/// Bound on E[R_uncoded / R_cutset] for two users.
inline double uncoded_gap_bound(double /*mu*/, double sigma, std::int64_t n) {
  require(n >= 2, ErrorKind::OutOfRange, "N must be >= 2");
  return 2.0 - 2.0 * sigma / (std::sqrt(std::numbers::pi) * static_cast<double>(n));
}

struct TrialRecord {
  std::string fingerprint;
  double coded;
  double cutset;
  double uncoded;
  double gcd_total;  // NaN when no grouping was requested
  double mean_size;
  double sd_size;
};

struct TrialBatch {
  DistributionSpec spec;
  std::size_t num_users;
  std::optional<std::size_t> groups;
  std::size_t num_trials;
  std::uint64_t seed;
  std::vector<TrialRecord> records;
  /// Trials breaking cutset <= coded <= uncoded, or coded/cutset <= 12 when K <= N.
  std::size_t invariant_violations = 0;
};

/// Runs every trial with its own seed split from `seed`; the batch is identical
/// for any thread count.
inline TrialBatch run_trials(const DistributionSpec& spec, std::size_t users, std::size_t trials, std::uint64_t seed,
                             std::optional<std::size_t> groups = std::nullopt, std::size_t threads = 0) {
  spec.validate();
  require(trials >= 1, ErrorKind::OutOfRange, "at least one trial is required");
  if (groups) require(*groups >= 1 && *groups <= users, ErrorKind::OutOfRange, "L must lie in [1, K]");
  // surface a pathological spec on the caller's thread
  if (spec.sigma > 0.0)
    require(truncation_acceptance(spec) >= kMinAcceptance, ErrorKind::SamplingFailure,
            "truncation to [0, N] accepts fewer than 1 in 1000 draws");

  TrialBatch batch{spec, users, groups, trials, seed, std::vector<TrialRecord>(trials)};
  std::optional<GroupPartition> partition;
  if (groups) partition = partition_contiguous(users, *groups);
  std::vector<char> violated(trials, 0);
  parallel_for(
      trials,
      [&](std::size_t t) {
        const CacheSet cs = sample_cache_set(spec, users, derive_seed(seed, t));
        TrialRecord rec;
        rec.fingerprint = cs.fingerprint();
        rec.coded = traffic_closed_form(cs).rate;
        rec.cutset = cutset_bound(cs).rate;
        rec.uncoded = traffic_uncoded(cs).rate;
        rec.gcd_total = std::numeric_limits<double>::quiet_NaN();
        if (partition) {
          rec.gcd_total = 0.0;
          for (const auto& g : partition->groups()) rec.gcd_total += traffic_closed_form(cs.subset(g)).rate;
        }
        rec.mean_size = cs.mean();
        double ss = 0.0;
        for (double m : cs.sizes()) ss += (m - rec.mean_size) * (m - rec.mean_size);
        rec.sd_size = std::sqrt(ss / static_cast<double>(users));
        const double tol = 1e-12 * std::max(1.0, rec.uncoded);
        bool bad = rec.cutset > rec.coded + tol || rec.coded > rec.uncoded + tol;
        if (cs.k_le_n() && rec.cutset > kDegenerateBound && rec.coded / rec.cutset > 12.0) bad = true;
        violated[t] = bad;
        batch.records[t] = std::move(rec);
      },
      threads);
  for (char v : violated) batch.invariant_violations += v ? 1 : 0;
  return batch;
}

enum class Baseline { Coded, Uncoded };

inline std::string_view to_string(Baseline b) { return b == Baseline::Coded ? "coded" : "uncoded"; }

struct GapEstimate {
  double mean_ratio;
  double stderr_;
  std::size_t num_trials;        // trials contributing to the mean
  std::size_t discarded_trials;  // degenerate denominators
  double bound_value;            // NaN when no closed-form bound applies
  double empirical_mu;           // moments of the drawn sizes, to expose truncation
  double empirical_sigma;
  std::size_t invariant_violations;
};

namespace detail {

inline GapEstimate summarize(const std::vector<double>& ratios, std::size_t discarded, const TrialBatch& batch) {
  require(!ratios.empty(), ErrorKind::Degenerate, "every trial had a degenerate denominator");
  double sum = 0.0;
  for (double r : ratios) sum += r;
  const double n = static_cast<double>(ratios.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double r : ratios) ss += (r - mean) * (r - mean);
  const double se = ratios.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  double mu = 0.0, sd = 0.0;
  for (const auto& rec : batch.records) {
    mu += rec.mean_size;
    sd += rec.sd_size;
  }
  mu /= static_cast<double>(batch.records.size());
  sd /= static_cast<double>(batch.records.size());
  return {mean, se, ratios.size(), discarded, std::numeric_limits<double>::quiet_NaN(), mu, sd,
          batch.invariant_violations};
}

}  // namespace detail

/// E[R / R_cutset] with R the zero-padding (coded) or uncoded rate. For K = 2
/// the matching closed-form bound is attached.
inline GapEstimate mc_expected_gap(const DistributionSpec& spec, std::size_t users, std::size_t trials,
                                   std::uint64_t seed, Baseline baseline = Baseline::Coded, std::size_t threads = 0) {
  const TrialBatch batch = run_trials(spec, users, trials, seed, std::nullopt, threads);
  std::vector<double> ratios;
  ratios.reserve(trials);
  std::size_t discarded = 0;
  for (const auto& rec : batch.records) {
    if (rec.cutset <= kDegenerateBound) {
      ++discarded;
      continue;
    }
    ratios.push_back((baseline == Baseline::Coded ? rec.coded : rec.uncoded) / rec.cutset);
  }
  GapEstimate est = detail::summarize(ratios, discarded, batch);
  if (users == 2 && spec.support_max >= 2)
    est.bound_value = baseline == Baseline::Coded ? theorem5_bound(spec.mu, spec.sigma, spec.support_max)
                                                  : uncoded_gap_bound(spec.mu, spec.sigma, spec.support_max);
  return est;
}

/// E[gcd_total / joint_rate] under the contiguous L-group partition, with the
/// grouping bound attached.
inline GapEstimate mc_gcd_increment(const DistributionSpec& spec, std::size_t users, std::size_t groups,
                                    std::size_t trials, std::uint64_t seed, std::size_t threads = 0) {
  const TrialBatch batch = run_trials(spec, users, trials, seed, groups, threads);
  std::vector<double> ratios;
  ratios.reserve(trials);
  std::size_t discarded = 0;
  for (const auto& rec : batch.records) {
    if (rec.coded <= kDegenerateBound) {
      ++discarded;
      continue;
    }
    ratios.push_back(rec.gcd_total / rec.coded);
  }
  GapEstimate est = detail::summarize(ratios, discarded, batch);
  est.bound_value = theorem6_bound(spec.mu, spec.sigma, spec.support_max, static_cast<std::int64_t>(users),
                                   static_cast<std::int64_t>(groups));
  return est;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepExperiment { GapVsMu, GapVsSigma, GapVsScale, GcdVsL };

inline std::string_view to_string(SweepExperiment e) {
  switch (e) {
    case SweepExperiment::GapVsMu: return "gap_vs_mu";
    case SweepExperiment::GapVsSigma: return "gap_vs_sigma";
    case SweepExperiment::GapVsScale: return "gap_vs_scale";
    case SweepExperiment::GcdVsL: return "gcd_vs_L";
  }
  return "unknown";
}

inline SweepExperiment parse_experiment(std::string_view s) {
  for (auto e : {SweepExperiment::GapVsMu, SweepExperiment::GapVsSigma, SweepExperiment::GapVsScale,
                 SweepExperiment::GcdVsL})
    if (s == to_string(e)) return e;
  fail(ErrorKind::ConfigError, "unknown experiment '" + std::string(s) + "'");
}

/// Grid description. Which fields are read depends on the experiment:
///   gap_vs_mu     n, k, mu_grid x sigma_ratios
///   gap_vs_sigma  n, k, mu, sigma_ratios
///   gap_vs_scale  k (or k_grid paired with n_grid), n_grid, mu (or mu_ratio), sigma_ratios
///   gcd_vs_L      n, k, mu, sigma_ratios x l_grid
/// sigma is always given relative to mu.
struct SweepConfig {
  SweepExperiment experiment = SweepExperiment::GapVsSigma;
  std::int64_t n = 100;
  std::int64_t k = 50;
  double mu = 30.0;
  double mu_ratio = 0.0;  // gap_vs_scale: mu = mu_ratio * N when > 0
  std::vector<double> mu_grid;
  std::vector<double> sigma_ratios;
  std::vector<std::int64_t> n_grid;
  std::vector<std::int64_t> k_grid;
  std::vector<std::int64_t> l_grid;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  bool include_uncoded = false;
};

struct SweepRow {
  std::string experiment;
  std::int64_t n;
  std::int64_t k;
  double mu;
  double sigma;
  std::int64_t groups;  // 0 when not applicable
  std::size_t trials;
  double mean_ratio;
  double stderr_;
  double bound;  // NaN when not applicable
  std::size_t discarded_trials;
  std::uint64_t seed;
};

inline constexpr std::string_view kSweepCsvHeader =
    "experiment,N,K,mu,sigma,L,trials,mean_ratio,stderr,bound,discarded_trials,seed";

/// %.10g; empty for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string to_csv_line(const SweepRow& r) {
  std::ostringstream os;
  os << r.experiment << ',' << r.n << ',' << r.k << ',' << format_number(r.mu) << ',' << format_number(r.sigma) << ','
     << (r.groups > 0 ? std::to_string(r.groups) : std::string()) << ',' << r.trials << ','
     << format_number(r.mean_ratio) << ',' << format_number(r.stderr_) << ',' << format_number(r.bound) << ','
     << r.discarded_trials << ',' << r.seed;
  return os.str();
}

inline std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& r : rows) out += to_csv_line(r) + '\n';
  return out;
}

namespace detail {

inline void validate_sweep(const SweepConfig& c) {
  auto need = [](bool ok, const char* what) { require(ok, ErrorKind::ConfigError, what); };
  need(c.trials >= 1, "trials must be >= 1");
  need(!c.sigma_ratios.empty(), "sigma_ratios grid is empty");
  for (double r : c.sigma_ratios) need(r >= 0.0 && std::isfinite(r), "sigma ratios must be finite and >= 0");
  switch (c.experiment) {
    case SweepExperiment::GapVsMu:
      need(!c.mu_grid.empty(), "mu_grid is empty");
      need(c.n >= 1 && c.k >= 1, "N and K must be positive");
      break;
    case SweepExperiment::GapVsSigma:
      need(c.n >= 1 && c.k >= 1, "N and K must be positive");
      break;
    case SweepExperiment::GapVsScale:
      need(!c.n_grid.empty(), "n_grid is empty");
      need(c.k_grid.empty() || c.k_grid.size() == c.n_grid.size(), "k_grid must pair with n_grid");
      need(c.k_grid.empty() ? c.k >= 1 : true, "K must be positive");
      break;
    case SweepExperiment::GcdVsL:
      need(!c.l_grid.empty(), "l_grid is empty");
      for (auto l : c.l_grid) need(l >= 1 && l <= c.k, "every L must lie in [1, K]");
      break;
  }
}

}  // namespace detail

/// One row per grid point (and per baseline). Every point reuses the master
/// seed, so neighbouring points see common random numbers.
inline std::vector<SweepRow> sweep(const SweepConfig& c, std::size_t threads = 0) {
  detail::validate_sweep(c);
  std::vector<SweepRow> rows;
  const std::string name(to_string(c.experiment));
  auto gap_rows = [&](std::int64_t n, std::int64_t k, double mu, double sigma) {
    const DistributionSpec spec{mu, sigma, n};
    try {
      spec.validate();
    } catch (const Error& e) {
      fail(ErrorKind::ConfigError, e.what());
    }
    for (auto b : {Baseline::Coded, Baseline::Uncoded}) {
      if (b == Baseline::Uncoded && !c.include_uncoded) continue;
      const auto est = mc_expected_gap(spec, static_cast<std::size_t>(k), c.trials, c.seed, b, threads);
      rows.push_back({b == Baseline::Coded ? name : name + ":uncoded", n, k, mu, sigma, 0, c.trials, est.mean_ratio,
                      est.stderr_, est.bound_value, est.discarded_trials, c.seed});
    }
  };
  switch (c.experiment) {
    case SweepExperiment::GapVsMu:
      for (double r : c.sigma_ratios)
        for (double mu : c.mu_grid) gap_rows(c.n, c.k, mu, r * mu);
      break;
    case SweepExperiment::GapVsSigma:
      for (double r : c.sigma_ratios) gap_rows(c.n, c.k, c.mu, r * c.mu);
      break;
    case SweepExperiment::GapVsScale:
      for (double r : c.sigma_ratios)
        for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
          const std::int64_t n = c.n_grid[i];
          const std::int64_t k = c.k_grid.empty() ? c.k : c.k_grid[i];
          const double mu = c.mu_ratio > 0.0 ? c.mu_ratio * static_cast<double>(n) : c.mu;
          gap_rows(n, k, mu, r * mu);
        }
      break;
    case SweepExperiment::GcdVsL:
      for (double r : c.sigma_ratios) {
        const DistributionSpec spec{c.mu, r * c.mu, c.n};
        try {
          spec.validate();
        } catch (const Error& e) {
          fail(ErrorKind::ConfigError, e.what());
        }
        for (auto l : c.l_grid) {
          const auto est = mc_gcd_increment(spec, static_cast<std::size_t>(c.k), static_cast<std::size_t>(l), c.trials,
                                            c.seed, threads);
          rows.push_back({name, c.n, c.k, c.mu, r * c.mu, l, c.trials, est.mean_ratio, est.stderr_, est.bound_value,
                          est.discarded_trials, c.seed});
        }
      }
      break;
  }
  return rows;
}

}  // namespace hetcache
