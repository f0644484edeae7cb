#include <gtest/gtest.h>

#include <cmath>

#include "hetcache/serialize.hpp"

using namespace hetcache;

namespace {
std::vector<std::string> keys(const json& j) {
  std::vector<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.push_back(it.key());
  return out;
}
using Keys = std::vector<std::string>;
}  // namespace

TEST(Json, CacheSetRoundTrip) {
  const auto cs = new_cache_set({2.5, 1, 3}, 4);
  const json j = cs;
  EXPECT_EQ(keys(j), (Keys{"sizes", "catalog_size"}));
  EXPECT_EQ(j.at("sizes"), json::parse("[1.0, 2.5, 3.0]"));
  EXPECT_EQ(cache_set_from_json(j), cs);
  EXPECT_THROW(cache_set_from_json(json::parse(R"({"sizes":[5],"catalog_size":4})")), Error);
}

TEST(Json, ProblemInstanceRoundTrip) {
  const ProblemInstance p(new_cache_set({1, 2}, 4));
  const json j = p;
  EXPECT_EQ(keys(j), (Keys{"cache_set", "num_users", "k_le_n"}));
  const auto back = problem_instance_from_json(j);
  EXPECT_EQ(back.cache_set, p.cache_set);
  EXPECT_EQ(back.num_users, 2u);
}

TEST(Json, DemandsAreOneBased) {
  const DemandVector d{{0, 2, 2}};
  const json j = d;
  EXPECT_EQ(j.dump(), R"({"demands":[1,3,3]})");
  EXPECT_EQ(j.get<DemandVector>(), d);
  EXPECT_THROW(json::parse(R"({"demands":[0]})").get<DemandVector>(), Error);
}

TEST(Json, GroupPartitionRoundTrip) {
  const auto p = GroupPartition::make({{0, 1}, {2}}, 3);
  const json j = p;
  EXPECT_EQ(j.dump(), R"({"groups":[[1,2],[3]]})");
  EXPECT_EQ(group_partition_from_json(j, 3).groups(), p.groups());
}

TEST(Json, DistributionSpecRoundTrip) {
  const DistributionSpec s{200, 100, 500};
  const json j = s;
  EXPECT_EQ(keys(j), (Keys{"mu", "sigma", "support_max"}));
  const auto back = j.get<DistributionSpec>();
  EXPECT_DOUBLE_EQ(back.mu, 200);
  EXPECT_EQ(back.support_max, 500);
  EXPECT_THROW(json::parse(R"({"mu":0,"sigma":1,"support_max":5})").get<DistributionSpec>(), Error);
}

TEST(Json, ReportFieldNames) {
  const auto cs = new_cache_set({1, 2, 3}, 4);
  EXPECT_EQ(keys(json(traffic_closed_form(cs))), (Keys{"rate", "method", "fingerprint"}));
  EXPECT_EQ(json(traffic_closed_form(cs)).at("method"), "closed_form");
  const json b = cutset_bound(new_cache_set({0, 0, 0}, 2));
  EXPECT_EQ(keys(b), (Keys{"rate", "critical_s", "per_s_values"}));
  EXPECT_TRUE(b.at("per_s_values")[2].is_null());
  EXPECT_EQ(keys(json(gcd_traffic(new_cache_set({1, 1, 2, 2}, 4), partition_contiguous(4, 2)))),
            (Keys{"partition", "per_group_rates", "gcd_total", "joint_rate", "increment_ratio"}));
  const json ledger = useful_padding_deliver(cs);
  EXPECT_EQ(keys(ledger), (Keys{"rows", "total_zero_pad", "total_useful_pad"}));
  EXPECT_EQ(keys(ledger.at("rows")[0]), (Keys{"index", "zero_padding", "useful_padding", "zero_length",
                                              "useful_length", "borrowed_in", "borrowed_out"}));
  const json est = mc_expected_gap({30, 9, 100}, 10, 5, 1);
  EXPECT_EQ(keys(est), (Keys{"mean_ratio", "stderr", "num_trials", "discarded_trials", "bound_value", "empirical_mu",
                             "empirical_sigma", "invariant_violations"}));
  EXPECT_TRUE(est.at("bound_value").is_null());
}

TEST(Json, TrialBatchAndSweepRow) {
  const json b = run_trials({30, 9, 100}, 4, 3, 2);
  EXPECT_EQ(keys(b), (Keys{"spec", "N", "K", "L", "num_trials", "seed", "records"}));
  EXPECT_EQ(b.at("records").size(), 3u);
  EXPECT_EQ(keys(b.at("records")[0]), (Keys{"fingerprint", "coded", "cutset", "uncoded", "gcd_total"}));
  const SweepRow r{"gcd_vs_L", 500, 300, 200, 20, 3, 10, 2.0, 0.1, std::nan(""), 0, 7};
  const json jr = r;
  EXPECT_EQ(keys(jr), (Keys{"experiment", "N", "K", "mu", "sigma", "L", "trials", "mean_ratio", "stderr", "bound",
                            "discarded_trials", "seed"}));
  EXPECT_TRUE(jr.at("bound").is_null());
}

TEST(Json, TranscriptAuditFormHasNoPayload) {
  const auto p = place(ProblemInstance(new_cache_set({1, 1}, 2)), 64, 3);
  const DemandVector d{{0, 1}};
  const json j = deliver(p, d);
  EXPECT_EQ(keys(j), (Keys{"file_size_bits", "total_bits", "demands", "transmissions"}));
  const auto& tx = j.at("transmissions")[0];
  EXPECT_EQ(keys(tx), (Keys{"target_subset", "mask", "payload_length_bits", "component_segments", "also_serves"}));
  EXPECT_EQ(tx.at("target_subset"), json::parse("[1,2]"));
  EXPECT_EQ(tx.at("mask"), 3);
  EXPECT_EQ(keys(tx.at("component_segments")[0]), (Keys{"user", "holders", "length"}));
  EXPECT_EQ(j.dump().find("payload\""), std::string::npos);
}

TEST(Json, RoundsToTenSignificantDigits) {
  json j = {{"a", 1.0 / 3.0}, {"b", json::array({2.0 / 3.0, std::numeric_limits<double>::infinity()})}, {"c", 5}};
  round_numbers(j);
  EXPECT_EQ(j.dump(), R"({"a":0.3333333333,"b":[0.6666666667,null],"c":5})");
}
