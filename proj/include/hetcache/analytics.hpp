#pragma once

// Analytic memory/traffic relations for decentralized coded caching with
// heterogeneous cache sizes. All rates are normalized by the content size F.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "hetcache/error.hpp"
#include "hetcache/model.hpp"
#include "hetcache/subsets.hpp"

namespace hetcache {

enum class TrafficMethod { ClosedForm, Summation, SubsetEnumeration, Uncoded, UniformFormula, SingularityFormula };

inline std::string_view to_string(TrafficMethod m) {
  switch (m) {
    case TrafficMethod::ClosedForm: return "closed_form";
    case TrafficMethod::Summation: return "summation";
    case TrafficMethod::SubsetEnumeration: return "subset_enumeration";
    case TrafficMethod::Uncoded: return "uncoded";
    case TrafficMethod::UniformFormula: return "uniform_formula";
    case TrafficMethod::SingularityFormula: return "singularity_formula";
  }
  return "unknown";
}

struct TrafficReport {
  double rate;
  TrafficMethod method;
  std::string fingerprint;
};

struct BoundReport {
  double rate;
  std::size_t critical_s;            // 1-based cut size attaining the maximum
  std::vector<double> per_s_values;  // index s-1; -inf where floor(N/s) == 0
};

inline constexpr std::size_t kSummationMaxUsers = 12;
inline constexpr std::size_t kEnumerationMaxUsers = 20;

/// Expected size of V_{k,S}: the part of user k's request cached by exactly
/// the users in `holders`.
inline double expected_segment_size(const CacheSet& cs, std::size_t user, UserMask holders) {
  const std::size_t k = cs.num_users();
  require(user < k, ErrorKind::OutOfRange, "user index outside 1..K");
  require((holders & ~full_mask(k)) == 0, ErrorKind::OutOfRange, "holder set outside 1..K");
  require(!contains(holders, user), ErrorKind::InvalidArgument, "user cannot be in its own holder set");
  double p = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double m = cs.fraction(j);
    if (j == user)
      p *= 1.0 - m;
    else
      p *= contains(holders, j) ? m : 1.0 - m;
  }
  return p;
}

/// User of U whose segment is the longest component of X_U; ties resolve to
/// the smallest index.
inline std::size_t argmax_segment_user(const CacheSet& cs, UserMask subset) {
  require(subset != 0, ErrorKind::InvalidArgument, "subset must be non-empty");
  std::size_t best = lowest_member(subset);
  double best_size = expected_segment_size(cs, best, subset & ~bit(best));
  for (auto u : members(subset)) {
    const double v = expected_segment_size(cs, u, subset & ~bit(u));
    // near-equal products differ only by multiplication order
    if (v > best_size * (1.0 + 1e-12) + 1e-300) {
      best = u;
      best_size = v;
    }
  }
  return best;
}

/// sum_i prod_{j<=i} (1 - M_j/N)
inline TrafficReport traffic_closed_form(const CacheSet& cs) {
  double rate = 0.0, prod = 1.0;
  for (std::size_t i = 0; i < cs.num_users(); ++i) {
    prod *= 1.0 - cs.fraction(i);
    rate += prod;
  }
  return {rate, TrafficMethod::ClosedForm, cs.fingerprint()};
}

namespace detail {

// Sum over all `count`-element combinations C of {first..k-1} of
// prod_{j in C} (1-m_j)/m_j.  Requires m_j > 0 on the range.
inline double combination_ratio_sum(const CacheSet& cs, std::size_t first, std::size_t count) {
  const std::size_t k = cs.num_users();
  double total = 0.0;
  for_each_combination(k - first, count, [&](UserMask c) {
    double p = 1.0;
    for (auto j : members(c)) {
      const double m = cs.fraction(first + j);
      p *= (1.0 - m) / m;
    }
    total += p;
  });
  return total;
}

// Same sum with prod_{j>=first} m_j distributed into every term; the
// continuous extension of the literal form when some m_j == 0.
inline double combination_distributed_sum(const CacheSet& cs, std::size_t first, std::size_t count) {
  const std::size_t k = cs.num_users();
  double total = 0.0;
  for_each_combination(k - first, count, [&](UserMask c) {
    double p = 1.0;
    for (std::size_t j = first; j < k; ++j) {
      const double m = cs.fraction(j);
      p *= contains(c, j - first) ? 1.0 - m : m;
    }
    total += p;
  });
  return total;
}

}  // namespace detail

/// Literal multi-summation form of the zero-padding traffic. The outer index
/// s enumerates transmissions of size K-s+1; i is the smallest user of the
/// transmission; the inner sum runs over strictly increasing index tuples.
inline TrafficReport traffic_summation(const CacheSet& cs) {
  const std::size_t k = cs.num_users();
  require(k <= kSummationMaxUsers, ErrorKind::ComplexityGuard,
          "summation form limited to K <= " + std::to_string(kSummationMaxUsers));
  double rate = 0.0;
  for (std::size_t s = 1; s <= k; ++s) {
    for (std::size_t i = 1; i <= s; ++i) {
      double tail = 1.0;
      bool tail_has_zero = false;
      for (std::size_t j = i + 1; j <= k; ++j) {
        tail *= cs.fraction(j - 1);
        tail_has_zero = tail_has_zero || cs.fraction(j - 1) == 0.0;
      }
      const double dagger = tail == 0.0 ? 1.0 : tail;
      double head = 1.0;
      for (std::size_t j = 1; j <= i; ++j) head *= 1.0 - cs.fraction(j - 1);
      if (!tail_has_zero) {
        rate += dagger * head * detail::combination_ratio_sum(cs, i, s - i);
      } else {
        rate += head * detail::combination_distributed_sum(cs, i, s - i);
      }
    }
  }
  return {rate, TrafficMethod::Summation, cs.fingerprint()};
}

/// Expected zero-padding traffic by direct enumeration of every non-empty
/// user subset: sum_U max_{k in U} |V_{k,U\{k}}|.
inline TrafficReport traffic_subset_enumeration(const CacheSet& cs) {
  const std::size_t k = cs.num_users();
  require(k <= kEnumerationMaxUsers, ErrorKind::ComplexityGuard,
          "subset enumeration limited to K <= " + std::to_string(kEnumerationMaxUsers));
  double rate = 0.0;
  for (UserMask u = 1; u <= full_mask(k); ++u) {
    double longest = 0.0;
    for (auto member : members(u)) longest = std::max(longest, expected_segment_size(cs, member, u & ~bit(member)));
    rate += longest;
  }
  return {rate, TrafficMethod::SubsetEnumeration, cs.fingerprint()};
}

inline TrafficReport traffic_uncoded(const CacheSet& cs) {
  double rate = 0.0;
  for (std::size_t i = 0; i < cs.num_users(); ++i) rate += 1.0 - cs.fraction(i);
  return {rate, TrafficMethod::Uncoded, cs.fingerprint()};
}

/// Cut-set lower bound using the ordered reduction (the s smallest caches
/// form the tightest cut). Cuts with floor(N/s) == 0 are excluded.
inline BoundReport cutset_bound(const CacheSet& cs) {
  const std::size_t k = cs.num_users();
  BoundReport r{-std::numeric_limits<double>::infinity(), 1, std::vector<double>(k)};
  double prefix = 0.0;
  for (std::size_t s = 1; s <= k; ++s) {
    prefix += cs.size(s - 1);
    const auto contents_per_cut = cs.catalog_size() / static_cast<std::int64_t>(s);
    const double v = contents_per_cut == 0 ? -std::numeric_limits<double>::infinity()
                                           : static_cast<double>(s) - prefix / static_cast<double>(contents_per_cut);
    r.per_s_values[s - 1] = v;
    if (v > r.rate) {
      r.rate = v;
      r.critical_s = s;
    }
  }
  return r;
}

/// Largest s with sum_{i<=s} M_i + (s-1) M_s <= N, clamped to [1, K].
/// Locates the maximizer of the bound with floor(N/s) relaxed to N/s; the
/// exact maximizer is BoundReport::critical_s.
inline std::size_t cutset_critical_s(const CacheSet& cs) {
  std::size_t best = 1;
  double prefix = 0.0;
  for (std::size_t s = 1; s <= cs.num_users(); ++s) {
    prefix += cs.size(s - 1);
    if (prefix + static_cast<double>(s - 1) * cs.size(s - 1) <= cs.n())
      best = s;
    else
      break;
  }
  return best;
}

/// Zero-padding traffic for K users with identical cache size M.
inline double traffic_uniform_formula(double m, std::int64_t n, std::int64_t k) {
  require(n >= 1 && k >= 1, ErrorKind::OutOfRange, "N and K must be positive");
  require(m > 0.0, ErrorKind::InvalidArgument, "uniform formula is singular at M = 0");
  require(m <= static_cast<double>(n), ErrorKind::OutOfRange, "M must not exceed N");
  const double q = 1.0 - m / static_cast<double>(n);
  const double kd = static_cast<double>(k);
  // 1 - q^K via expm1/log1p; the N/(KM) factor magnifies cancellation at small M.
  const double one_minus_qk = -std::expm1(kd * std::log1p(-m / static_cast<double>(n)));
  return kd * q * (static_cast<double>(n) / (kd * m)) * one_minus_qk;
}

/// Zero-padding traffic for {M, ..., M, (1+alpha)M}.
inline double traffic_singularity_formula(double m, double alpha, std::int64_t n, std::int64_t k) {
  require(alpha > 0.0, ErrorKind::OutOfRange, "alpha must be positive");
  require((1.0 + alpha) * m <= static_cast<double>(n), ErrorKind::OutOfRange, "(1+alpha)M must not exceed N");
  const double f = m / static_cast<double>(n);
  return traffic_uniform_formula(m, n, k) - alpha * f * std::pow(1.0 - f, static_cast<double>(k - 1));
}

/// Per-user unicast loads of the equivalent hierarchical-unicast network:
/// user k is served prod_{i<=k} (1 - M_i/N).
inline std::vector<double> equivalent_model_loads(const CacheSet& cs) {
  std::vector<double> loads(cs.num_users());
  double prod = 1.0;
  for (std::size_t i = 0; i < cs.num_users(); ++i) {
    prod *= 1.0 - cs.fraction(i);
    loads[i] = prod;
  }
  return loads;
}

inline constexpr double kDegenerateBound = 1e-12;

/// Achievable zero-padding rate over the cut-set bound.
inline double gap_ratio(const CacheSet& cs) {
  const double bound = cutset_bound(cs).rate;
  require(bound > kDegenerateBound, ErrorKind::Degenerate, "cut-set bound is zero (all caches hold the catalog)");
  return traffic_closed_form(cs).rate / bound;
}

}  // namespace hetcache
