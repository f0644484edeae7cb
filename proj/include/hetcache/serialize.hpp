#pragma once

// JSON forms of the domain types and reports. User and content indices are
// 1-based in JSON (0-based in the C++ API).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include "json.hpp"

#include "hetcache/analytics.hpp"
#include "hetcache/bitsim.hpp"
#include "hetcache/grouping.hpp"
#include "hetcache/model.hpp"
#include "hetcache/oracle.hpp"
#include "hetcache/stochastic.hpp"

namespace hetcache {

using json = nlohmann::ordered_json;

namespace detail {

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json users_json(UserMask m) {
  json a = json::array();
  for (auto u : members(m)) a.push_back(u + 1);
  return a;
}

inline UserMask users_from_json(const json& j) {
  UserMask m = 0;
  for (const auto& v : j) {
    const auto u = v.get<std::int64_t>();
    require(u >= 1 && u <= static_cast<std::int64_t>(kMaxMaskUsers), ErrorKind::OutOfRange, "user index out of range");
    m |= bit(static_cast<std::size_t>(u - 1));
  }
  return m;
}

}  // namespace detail

/// Rounds every floating-point value in the tree to 10 significant digits,
/// the precision used by all machine-readable outputs.
inline void round_numbers(json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      j = nullptr;
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    j = std::strtod(buf, nullptr);
  } else if (j.is_structured()) {
    for (auto& el : j) round_numbers(el);
  }
}

inline void to_json(json& j, const CacheSet& cs) {
  j = json{{"sizes", std::vector<double>(cs.sizes().begin(), cs.sizes().end())}, {"catalog_size", cs.catalog_size()}};
}
inline CacheSet cache_set_from_json(const json& j) {
  return CacheSet::make(j.at("sizes").get<std::vector<double>>(), j.at("catalog_size").get<std::int64_t>());
}

inline void to_json(json& j, const ProblemInstance& p) {
  j = json{{"cache_set", p.cache_set}, {"num_users", p.num_users}, {"k_le_n", p.k_le_n()}};
}
inline ProblemInstance problem_instance_from_json(const json& j) {
  return ProblemInstance(cache_set_from_json(j.at("cache_set")), j.at("num_users").get<std::size_t>());
}

inline void to_json(json& j, const DemandVector& d) {
  json a = json::array();
  for (auto v : d.demands) a.push_back(v + 1);
  j = json{{"demands", a}};
}
inline void from_json(const json& j, DemandVector& d) {
  d.demands.clear();
  for (const auto& v : j.at("demands")) {
    const auto c = v.get<std::int64_t>();
    require(c >= 1, ErrorKind::OutOfRange, "content indices are 1-based");
    d.demands.push_back(static_cast<std::size_t>(c - 1));
  }
}

inline void to_json(json& j, const GroupPartition& p) {
  json groups = json::array();
  for (const auto& g : p.groups()) {
    json a = json::array();
    for (auto u : g) a.push_back(u + 1);
    groups.push_back(a);
  }
  j = json{{"groups", groups}};
}
inline GroupPartition group_partition_from_json(const json& j, std::size_t users) {
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& g : j.at("groups")) {
    std::vector<std::size_t> members;
    for (const auto& v : g) {
      const auto u = v.get<std::int64_t>();
      require(u >= 1, ErrorKind::OutOfRange, "user indices are 1-based");
      members.push_back(static_cast<std::size_t>(u - 1));
    }
    groups.push_back(std::move(members));
  }
  return GroupPartition::make(std::move(groups), users);
}

inline void to_json(json& j, const DistributionSpec& s) {
  j = json{{"mu", s.mu}, {"sigma", s.sigma}, {"support_max", s.support_max}};
}
inline void from_json(const json& j, DistributionSpec& s) {
  s = {j.at("mu").get<double>(), j.at("sigma").get<double>(), j.at("support_max").get<std::int64_t>()};
  s.validate();
}

inline void to_json(json& j, const TrafficReport& r) {
  j = json{{"rate", r.rate}, {"method", std::string(to_string(r.method))}, {"fingerprint", r.fingerprint}};
}

inline void to_json(json& j, const BoundReport& r) {
  json per = json::array();
  for (double v : r.per_s_values) per.push_back(detail::finite_or_null(v));
  j = json{{"rate", r.rate}, {"critical_s", r.critical_s}, {"per_s_values", per}};
}

inline void to_json(json& j, const GcdReport& r) {
  j = json{{"partition", r.partition},
           {"per_group_rates", r.per_group_rates},
           {"gcd_total", r.gcd_total},
           {"joint_rate", r.joint_rate},
           {"increment_ratio", r.increment_ratio}};
}

inline void to_json(json& j, const PaddingRow& r) {
  j = json{{"index", r.index},
           {"zero_padding", r.zero_padding},
           {"useful_padding", r.useful_padding},
           {"zero_length", r.zero_length},
           {"useful_length", r.useful_length},
           {"borrowed_in", r.borrowed_in},
           {"borrowed_out", r.borrowed_out}};
}

inline void to_json(json& j, const PaddingLedger& l) {
  j = json{{"rows", l.rows}, {"total_zero_pad", l.total_zero_pad}, {"total_useful_pad", l.total_useful_pad}};
}

/// Audit form of a transcript: lengths and subsets only, no payload bits.
inline void to_json(json& j, const Transcript& t) {
  json txs = json::array();
  for (const auto& tx : t.transmissions) {
    json comps = json::array();
    for (const auto& c : tx.component_segments)
      comps.push_back(json{{"user", c.user + 1}, {"holders", detail::users_json(c.holders)}, {"length", c.length}});
    json also = json::array();
    for (auto m : tx.also_serves) also.push_back(detail::users_json(m));
    txs.push_back(json{{"target_subset", detail::users_json(tx.target_subset)},
                       {"mask", tx.target_subset},
                       {"payload_length_bits", tx.payload_length_bits},
                       {"component_segments", comps},
                       {"also_serves", also}});
  }
  j = json{{"file_size_bits", t.file_size_bits},
           {"total_bits", t.total_bits},
           {"demands", t.demands},
           {"transmissions", txs}};
}

inline void to_json(json& j, const GapEstimate& e) {
  j = json{{"mean_ratio", e.mean_ratio},
           {"stderr", e.stderr_},
           {"num_trials", e.num_trials},
           {"discarded_trials", e.discarded_trials},
           {"bound_value", detail::finite_or_null(e.bound_value)},
           {"empirical_mu", e.empirical_mu},
           {"empirical_sigma", e.empirical_sigma},
           {"invariant_violations", e.invariant_violations}};
}

inline void to_json(json& j, const TrialRecord& r) {
  j = json{{"fingerprint", r.fingerprint},
           {"coded", r.coded},
           {"cutset", r.cutset},
           {"uncoded", r.uncoded},
           {"gcd_total", detail::finite_or_null(r.gcd_total)}};
}

inline void to_json(json& j, const TrialBatch& b) {
  j = json{{"spec", b.spec},
           {"N", b.spec.support_max},
           {"K", b.num_users},
           {"L", b.groups ? json(*b.groups) : json(nullptr)},
           {"num_trials", b.num_trials},
           {"seed", b.seed},
           {"records", b.records}};
}

inline void to_json(json& j, const SweepRow& r) {
  j = json{{"experiment", r.experiment}, {"N", r.n},
           {"K", r.k},                   {"mu", r.mu},
           {"sigma", r.sigma},           {"L", r.groups > 0 ? json(r.groups) : json(nullptr)},
           {"trials", r.trials},         {"mean_ratio", r.mean_ratio},
           {"stderr", r.stderr_},        {"bound", detail::finite_or_null(r.bound)},
           {"discarded_trials", r.discarded_trials}, {"seed", r.seed}};
}

}  // namespace hetcache
