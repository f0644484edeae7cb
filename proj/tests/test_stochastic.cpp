#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hetcache/stochastic.hpp"

using namespace hetcache;

TEST(Sampling, ZeroSigmaIsDeterministic) {
  const auto cs = sample_cache_set({3, 0, 10}, 5, 99);
  for (double m : cs.sizes()) EXPECT_DOUBLE_EQ(m, 3.0);
}

TEST(Sampling, SortedWithinSupport) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto cs = sample_cache_set({5, 4, 10}, 40, seed);
    EXPECT_TRUE(std::is_sorted(cs.sizes().begin(), cs.sizes().end()));
    EXPECT_GE(cs.size(0), 0.0);
    EXPECT_LE(cs.size(39), 10.0);
  }
}

TEST(Sampling, MeanNearMu) {
  const DistributionSpec spec{200, 100, 500};
  const std::size_t k = 300;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto cs = sample_cache_set(spec, k, seed);
    EXPECT_NEAR(cs.mean(), spec.mu, 4.0 * spec.sigma / std::sqrt(static_cast<double>(k)));
  }
}

TEST(Sampling, ReproducibleFromSeed) {
  const DistributionSpec spec{30, 9, 100};
  EXPECT_EQ(sample_cache_set(spec, 20, 5), sample_cache_set(spec, 20, 5));
  EXPECT_NE(sample_cache_set(spec, 20, 5), sample_cache_set(spec, 20, 6));
}

TEST(Sampling, PathologicalSpecFails) {
  // almost all of the mass falls outside [0, N]
  const DistributionSpec spec{0.001, 100000, 1};
  EXPECT_LT(truncation_acceptance(spec), kMinAcceptance);
  try {
    sample_cache_set(spec, 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SamplingFailure);
  }
  EXPECT_THROW(run_trials(spec, 3, 2, 1), Error);
  EXPECT_THROW(sample_cache_set({0, 1, 10}, 3, 1), Error);
}

TEST(Bounds, TwoUserValues) {
  EXPECT_NEAR(theorem5_bound(3, 1, 10), 2.0 - (std::sqrt(std::numbers::pi) * 3 + 1) / (std::sqrt(std::numbers::pi) * 10),
              1e-12);
  EXPECT_NEAR(theorem5_bound(3, 1, 10), 1.64357, 5e-5);
  EXPECT_NEAR(uncoded_gap_bound(3, 1, 10), 1.88716, 1e-5);
  EXPECT_LT(theorem5_bound(3, 2, 10), theorem5_bound(3, 1, 10));
  EXPECT_LT(theorem5_bound(4, 1, 10), theorem5_bound(3, 1, 10));
  EXPECT_LT(uncoded_gap_bound(3, 2, 10), uncoded_gap_bound(3, 1, 10));
  EXPECT_THROW(theorem5_bound(3, 1, 1), Error);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  const DistributionSpec spec{30, 9, 100};
  const auto a = mc_expected_gap(spec, 20, 200, 17, Baseline::Coded, 1);
  const auto b = mc_expected_gap(spec, 20, 200, 17, Baseline::Coded, 4);
  EXPECT_EQ(a.mean_ratio, b.mean_ratio);
  EXPECT_EQ(a.stderr_, b.stderr_);
  const auto g1 = mc_gcd_increment(spec, 20, 4, 100, 3, 1);
  const auto g2 = mc_gcd_increment(spec, 20, 4, 100, 3, 3);
  EXPECT_EQ(g1.mean_ratio, g2.mean_ratio);
}

TEST(MonteCarlo, DegenerateSigmaMatchesDeterministicValue) {
  const DistributionSpec spec{3, 0, 10};
  const auto est = mc_expected_gap(spec, 4, 10, 1);
  const auto cs = new_cache_set({3, 3, 3, 3}, 10);
  EXPECT_NEAR(est.mean_ratio, gap_ratio(cs), 1e-12);
  EXPECT_DOUBLE_EQ(est.stderr_, 0.0);
  EXPECT_TRUE(std::isnan(est.bound_value));
  EXPECT_DOUBLE_EQ(est.empirical_mu, 3.0);
}

TEST(MonteCarlo, CodedNeverWorseThanUncoded) {
  const DistributionSpec spec{30, 15, 100};
  const auto coded = mc_expected_gap(spec, 30, 300, 8, Baseline::Coded);
  const auto uncoded = mc_expected_gap(spec, 30, 300, 8, Baseline::Uncoded);
  EXPECT_LE(coded.mean_ratio, uncoded.mean_ratio);
  EXPECT_EQ(coded.invariant_violations, 0u);
  EXPECT_EQ(coded.discarded_trials, 0u);
}

TEST(MonteCarlo, TwoUserEstimateCarriesBound) {
  const DistributionSpec spec{3, 1, 10};
  const auto est = mc_expected_gap(spec, 2, 2000, 4);
  EXPECT_NEAR(est.bound_value, theorem5_bound(3, 1, 10), 1e-12);
  EXPECT_LE(est.mean_ratio, est.bound_value);
  const auto unc = mc_expected_gap(spec, 2, 2000, 4, Baseline::Uncoded);
  EXPECT_NEAR(unc.bound_value, uncoded_gap_bound(3, 1, 10), 1e-12);
}

TEST(MonteCarlo, GcdIncrementAtLeastOne) {
  const auto est = mc_gcd_increment({30, 9, 100}, 20, 4, 200, 2);
  EXPECT_GE(est.mean_ratio, 1.0);
  EXPECT_NEAR(est.bound_value, theorem6_bound(30, 9, 100, 20, 4), 1e-12);
  const auto one = mc_gcd_increment({30, 9, 100}, 20, 1, 50, 2);
  EXPECT_NEAR(one.mean_ratio, 1.0, 1e-12);
}

TEST(RunTrials, RecordsAreConsistent) {
  const auto batch = run_trials({30, 9, 100}, 10, 20, 5, std::size_t{2});
  ASSERT_EQ(batch.records.size(), 20u);
  for (const auto& r : batch.records) {
    EXPECT_LE(r.cutset, r.coded + 1e-12);
    EXPECT_LE(r.coded, r.uncoded + 1e-12);
    EXPECT_GE(r.gcd_total, r.coded - 1e-12);
    EXPECT_EQ(r.fingerprint.size(), 16u);
  }
  EXPECT_THROW(run_trials({30, 9, 100}, 10, 0, 5), Error);
  EXPECT_THROW(run_trials({30, 9, 100}, 10, 5, 5, std::size_t{11}), Error);
}

TEST(Sweep, ParsesExperimentNames) {
  EXPECT_EQ(parse_experiment("gcd_vs_L"), SweepExperiment::GcdVsL);
  try {
    parse_experiment("gap_vs_everything");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(Sweep, RejectsBadConfigs) {
  SweepConfig c;
  c.sigma_ratios = {};
  EXPECT_THROW(sweep(c), Error);
  c.sigma_ratios = {0.1};
  c.experiment = SweepExperiment::GcdVsL;
  c.l_grid = {0};
  EXPECT_THROW(sweep(c), Error);
  c.experiment = SweepExperiment::GapVsSigma;
  c.mu = 200;  // mu >= N
  try {
    sweep(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(Sweep, RowsAndCsv) {
  SweepConfig c;
  c.experiment = SweepExperiment::GapVsSigma;
  c.n = 100;
  c.k = 10;
  c.mu = 30;
  c.sigma_ratios = {0.1, 0.5};
  c.trials = 50;
  c.seed = 3;
  c.include_uncoded = true;
  const auto rows = sweep(c, 1);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].experiment, "gap_vs_sigma");
  EXPECT_EQ(rows[1].experiment, "gap_vs_sigma:uncoded");
  EXPECT_DOUBLE_EQ(rows[2].sigma, 15.0);
  const auto csv = to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kSweepCsvHeader);
  EXPECT_EQ(to_csv(sweep(c, 2)), csv);
  EXPECT_EQ(format_number(std::nan("")), "");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
}

TEST(Sweep, CodedGainOverUncodedShrinksWithSpread) {
  SweepConfig c;
  c.experiment = SweepExperiment::GapVsSigma;
  c.n = 100;
  c.k = 50;
  c.mu = 30;
  c.sigma_ratios = {0.05, 0.2, 0.4, 0.6};
  c.trials = 300;
  c.seed = 1;
  c.include_uncoded = true;
  const auto rows = sweep(c);
  ASSERT_EQ(rows.size(), 8u);
  std::vector<double> gain;
  for (std::size_t i = 0; i < rows.size(); i += 2) gain.push_back(rows[i + 1].mean_ratio / rows[i].mean_ratio);
  for (std::size_t i = 1; i < gain.size(); ++i) EXPECT_LT(gain[i], gain[i - 1]);
  EXPECT_NEAR(gain.front(), 15.0, 0.3 * 15.0);
}
