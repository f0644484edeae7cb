#pragma once

// Group coded delivery: users are split into groups and each group runs the
// zero-padding scheme on its own.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hetcache/analytics.hpp"
#include "hetcache/error.hpp"
#include "hetcache/model.hpp"

namespace hetcache {

struct GcdReport {
  GroupPartition partition;
  std::vector<double> per_group_rates;
  double gcd_total;
  double joint_rate;
  double increment_ratio;
};

/// L contiguous blocks of the size-sorted users; block sizes differ by at most
/// one, larger blocks first, smallest caches in the first block.
inline GroupPartition partition_contiguous(std::size_t users, std::size_t groups) {
  require(groups >= 1 && groups <= users, ErrorKind::OutOfRange, "number of groups L must lie in [1, K]");
  std::vector<std::vector<std::size_t>> out(groups);
  const std::size_t base = users / groups, extra = users % groups;
  std::size_t next = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t len = base + (g < extra ? 1 : 0);
    for (std::size_t i = 0; i < len; ++i) out[g].push_back(next++);
  }
  return GroupPartition::make(std::move(out), users);
}

inline GcdReport gcd_traffic(const CacheSet& cs, const GroupPartition& partition) {
  require(partition.num_users() == cs.num_users(), ErrorKind::InvalidArgument,
          "partition does not cover this cache set's users");
  GcdReport r{partition, {}, 0.0, traffic_closed_form(cs).rate, 0.0};
  for (const auto& g : partition.groups()) {
    const double rate = traffic_closed_form(cs.subset(g)).rate;
    r.per_group_rates.push_back(rate);
    r.gcd_total += rate;
  }
  require(r.joint_rate > kDegenerateBound, ErrorKind::Degenerate, "joint rate is zero");
  r.increment_ratio = r.gcd_total / r.joint_rate;
  return r;
}

struct Decomposition {
  double lhs;
  double rhs;
};

/// Joint rate of K/2 users at M and K/2 at alpha*M, against the split
/// R(lower half) + (1 - M/N)^{K/2} R(upper half).
inline Decomposition example5_decomposition(double m, double alpha, std::int64_t n, std::int64_t k) {
  require(k >= 2 && k % 2 == 0, ErrorKind::InvalidArgument, "K must be a positive even number");
  require(m > 0.0, ErrorKind::OutOfRange, "M must be positive");
  require(alpha >= 1.0, ErrorKind::OutOfRange, "alpha must be >= 1");
  require(alpha * m <= static_cast<double>(n), ErrorKind::OutOfRange, "alpha*M must not exceed N");
  const auto half = static_cast<std::size_t>(k / 2);
  std::vector<double> low(half, m), high(half, alpha * m), both(low);
  both.insert(both.end(), high.begin(), high.end());
  const double lhs = traffic_closed_form(CacheSet::make(both, n)).rate;
  const double q = std::pow(1.0 - m / static_cast<double>(n), static_cast<double>(half));
  const double rhs =
      traffic_closed_form(CacheSet::make(low, n)).rate + q * traffic_closed_form(CacheSet::make(high, n)).rate;
  return {lhs, rhs};
}

/// Approximate expected upper bound on gcd_total / joint_rate for cache sizes
/// drawn from a distribution with mean mu and deviation sigma.
inline double theorem6_bound(double mu, double sigma, std::int64_t n, std::int64_t k, std::int64_t groups) {
  require(mu > 0.0, ErrorKind::OutOfRange, "mu must be positive");
  require(sigma >= 0.0, ErrorKind::OutOfRange, "sigma must be non-negative");
  require(n >= 1 && k >= 1 && groups >= 1, ErrorKind::OutOfRange, "N, K, L must be positive");
  const double logistic = 1.0 / (1.0 + std::exp(-static_cast<double>(k) * mu / static_cast<double>(n)));
  return logistic * std::pow(static_cast<double>(groups), mu / (mu + sigma));
}

}  // namespace hetcache
