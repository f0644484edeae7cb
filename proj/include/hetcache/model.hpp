#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hetcache/error.hpp"

namespace hetcache {

/// Ordered per-user cache sizes in content units plus the catalog size N.
/// Sizes are kept sorted non-decreasing; user identity is not preserved.
class CacheSet {
 public:
  static CacheSet make(std::vector<double> sizes, std::int64_t catalog_size) {
    require(catalog_size >= 1, ErrorKind::OutOfRange, "catalog size N must be >= 1");
    require(!sizes.empty(), ErrorKind::InvalidArgument, "cache set must contain at least one user");
    const auto n = static_cast<double>(catalog_size);
    for (double m : sizes) {
      require(std::isfinite(m), ErrorKind::InvalidArgument, "cache sizes must be finite");
      require(m >= 0.0 && m <= n, ErrorKind::OutOfRange,
              "cache size " + std::to_string(m) + " outside [0, N=" + std::to_string(catalog_size) + "]");
    }
    std::sort(sizes.begin(), sizes.end());
    return CacheSet(std::move(sizes), catalog_size);
  }

  std::span<const double> sizes() const noexcept { return sizes_; }
  double size(std::size_t user) const { return sizes_.at(user); }
  /// M_k / N
  double fraction(std::size_t user) const { return sizes_.at(user) / static_cast<double>(catalog_); }
  std::int64_t catalog_size() const noexcept { return catalog_; }
  double n() const noexcept { return static_cast<double>(catalog_); }
  std::size_t num_users() const noexcept { return sizes_.size(); }
  bool k_le_n() const noexcept { return static_cast<std::int64_t>(sizes_.size()) <= catalog_; }

  double total() const { return std::accumulate(sizes_.begin(), sizes_.end(), 0.0); }
  double mean() const { return total() / static_cast<double>(sizes_.size()); }
  bool homogeneous() const { return sizes_.front() == sizes_.back(); }

  /// Sub-cache-set of the given users (same N).
  CacheSet subset(std::span<const std::size_t> users) const {
    std::vector<double> s;
    s.reserve(users.size());
    for (auto u : users) s.push_back(sizes_.at(u));
    return make(std::move(s), catalog_);
  }

  /// Stable identifier of (sizes, N); used to tag reports.
  std::string fingerprint() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](const void* p, std::size_t len) {
      const auto* b = static_cast<const unsigned char*>(p);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
      }
    };
    mix(&catalog_, sizeof catalog_);
    for (double m : sizes_) mix(&m, sizeof m);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  friend bool operator==(const CacheSet&, const CacheSet&) = default;

 private:
  CacheSet(std::vector<double> sizes, std::int64_t catalog) : sizes_(std::move(sizes)), catalog_(catalog) {}

  std::vector<double> sizes_;
  std::int64_t catalog_;
};

inline CacheSet new_cache_set(std::vector<double> raw_sizes, std::int64_t catalog_size) {
  return CacheSet::make(std::move(raw_sizes), catalog_size);
}

/// Homogeneous cache set with the same aggregate memory.
inline CacheSet homogenize(const CacheSet& cs) {
  if (cs.homogeneous()) return cs;  // avoid ulp drift from re-averaging
  std::vector<double> s(cs.num_users(), cs.mean());
  return CacheSet::make(std::move(s), cs.catalog_size());
}

struct ProblemInstance {
  CacheSet cache_set;
  std::size_t num_users;

  explicit ProblemInstance(CacheSet cs) : cache_set(std::move(cs)), num_users(cache_set.num_users()) {}
  ProblemInstance(CacheSet cs, std::size_t k) : cache_set(std::move(cs)), num_users(k) {
    require(num_users == cache_set.num_users(), ErrorKind::InvalidArgument,
            "num_users does not match the cache set length");
  }

  bool k_le_n() const { return cache_set.k_le_n(); }
  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

/// Requested content per user, 0-based content indices.
struct DemandVector {
  std::vector<std::size_t> demands;

  void validate(std::size_t users, std::int64_t catalog) const {
    require(demands.size() == users, ErrorKind::InvalidArgument,
            "demand vector has " + std::to_string(demands.size()) + " entries, expected " + std::to_string(users));
    for (auto d : demands)
      require(static_cast<std::int64_t>(d) < catalog, ErrorKind::OutOfRange, "demanded content outside catalog");
  }

  bool all_distinct() const {
    auto s = demands;
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
  }

  friend bool operator==(const DemandVector&, const DemandVector&) = default;
};

/// Users 0..K-1 split into disjoint non-empty groups, ordered by their
/// smallest member.
class GroupPartition {
 public:
  static GroupPartition make(std::vector<std::vector<std::size_t>> groups, std::size_t users) {
    std::vector<char> seen(users, 0);
    for (auto& g : groups) {
      require(!g.empty(), ErrorKind::InvalidArgument, "groups must be non-empty");
      std::sort(g.begin(), g.end());
      for (auto u : g) {
        require(u < users, ErrorKind::OutOfRange, "group member outside 1..K");
        require(!seen[u], ErrorKind::InvalidArgument, "groups must be disjoint");
        seen[u] = 1;
      }
    }
    require(std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }), ErrorKind::InvalidArgument,
            "groups must cover every user");
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return GroupPartition(std::move(groups), users);
  }

  const std::vector<std::vector<std::size_t>>& groups() const noexcept { return groups_; }
  std::size_t num_groups() const noexcept { return groups_.size(); }
  std::size_t num_users() const noexcept { return users_; }

  friend bool operator==(const GroupPartition&, const GroupPartition&) = default;

 private:
  GroupPartition(std::vector<std::vector<std::size_t>> g, std::size_t users) : groups_(std::move(g)), users_(users) {}

  std::vector<std::vector<std::size_t>> groups_;
  std::size_t users_;
};

/// Parental distribution of probabilistic cache sizes: a normal law with
/// mean `mu` and standard deviation `sigma`, restricted to [0, support_max].
struct DistributionSpec {
  double mu;
  double sigma;
  std::int64_t support_max;

  void validate() const {
    require(support_max >= 1, ErrorKind::OutOfRange, "support_max (N) must be >= 1");
    require(std::isfinite(mu) && mu > 0.0 && mu < static_cast<double>(support_max), ErrorKind::OutOfRange,
            "mu must lie in (0, N)");
    require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::OutOfRange, "sigma must be >= 0");
  }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

}  // namespace hetcache
