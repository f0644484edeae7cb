#pragma once

// Small-instance checks that zero-padding is the best coded delivery for the
// random placement. Works on expected segment sizes (fluid model) with
// distinct demands: user k requests content k.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hetcache/analytics.hpp"
#include "hetcache/error.hpp"
#include "hetcache/model.hpp"
#include "hetcache/simplex.hpp"
#include "hetcache/subsets.hpp"

namespace hetcache {

struct PaddingRow {
  std::size_t index;  // 1-based
  std::string zero_padding;
  std::string useful_padding;
  double zero_length;
  double useful_length;
  double borrowed_in;   // superset-held bits appended to a short segment
  double borrowed_out;  // bits removed from order-2 segments
};

struct PaddingLedger {
  std::vector<PaddingRow> rows;
  double total_zero_pad = 0.0;
  double total_useful_pad = 0.0;
};

namespace detail {

inline std::string segment_name(std::size_t user, UserMask holders) {
  std::string s(1, static_cast<char>('A' + user));
  if (holders == 0) return s + "\xE2\x88\x85";  // empty-set sign
  for (auto h : members(holders)) s += std::to_string(h + 1);
  return s;
}

}  // namespace detail

/// Three-user delivery that pads each short pairwise segment with bits
/// borrowed from the same request's segment held by both other users, instead
/// of zeros. Returns both schemes' per-transmission lengths side by side.
inline PaddingLedger useful_padding_deliver(const CacheSet& cs) {
  require(cs.num_users() == 3, ErrorKind::Unsupported, "useful-padding ledger is defined for K = 3 only");
  auto seg = [&](std::size_t k, UserMask holders) { return expected_segment_size(cs, k, holders); };
  const UserMask all = full_mask(3);

  PaddingLedger ledger;
  std::vector<double> remaining(3);  // order-2 segment V_{k, others}
  for (std::size_t k = 0; k < 3; ++k) remaining[k] = seg(k, all & ~bit(k));

  std::size_t idx = 1;
  double total_borrowed = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double li = seg(i, bit(j));
      const double lj = seg(j, bit(i));
      const std::size_t longer = li >= lj ? i : j;
      const std::size_t shorter = longer == i ? j : i;
      const UserMask short_holders = bit(longer);
      const UserMask donor_holders = all & ~bit(shorter);
      const double gap = std::abs(li - lj);
      const double borrow = std::min(gap, remaining[shorter]);
      remaining[shorter] -= borrow;
      total_borrowed += borrow;

      const std::string long_name = detail::segment_name(longer, bit(shorter));
      const std::string short_name = detail::segment_name(shorter, short_holders);
      const std::string donor_prime = detail::segment_name(shorter, donor_holders) + "'";
      PaddingRow row;
      row.index = idx++;
      row.zero_padding = long_name + " ^ " + short_name;
      row.useful_padding = long_name + " ^ {" + short_name + "'=" + short_name + "+" + donor_prime + "}";
      row.zero_length = std::max(li, lj);
      row.useful_length = std::max(std::max(li, lj), std::min(li, lj) + borrow);
      row.borrowed_in = borrow;
      row.borrowed_out = 0.0;
      ledger.rows.push_back(row);
    }
  }

  {
    PaddingRow row;
    row.index = idx++;
    double zero = 0.0, useful = 0.0;
    std::string zexpr, uexpr;
    for (std::size_t k = 0; k < 3; ++k) {
      const UserMask h = all & ~bit(k);
      const double full = seg(k, h);
      zero = std::max(zero, full);
      useful = std::max(useful, remaining[k]);
      const std::string name = detail::segment_name(k, h);
      if (k) {
        zexpr += " ^ ";
        uexpr += " ^ ";
      }
      zexpr += name;
      uexpr += full == remaining[k] ? name : "{" + name + "-" + name + "'}";
    }
    row.zero_padding = zexpr;
    row.useful_padding = uexpr;
    row.zero_length = zero;
    row.useful_length = useful;
    row.borrowed_in = 0.0;
    row.borrowed_out = total_borrowed;
    ledger.rows.push_back(row);
  }

  {
    PaddingRow row;
    row.index = idx++;
    double sum = 0.0;
    std::string expr;
    for (std::size_t k = 0; k < 3; ++k) {
      sum += seg(k, 0);
      if (k) expr += ", ";
      expr += detail::segment_name(k, 0);
    }
    row.zero_padding = row.useful_padding = expr;
    row.zero_length = row.useful_length = sum;
    row.borrowed_in = row.borrowed_out = 0.0;
    ledger.rows.push_back(row);
  }

  for (const auto& r : ledger.rows) {
    ledger.total_zero_pad += r.zero_length;
    ledger.total_useful_pad += r.useful_length;
  }
  return ledger;
}

inline constexpr std::size_t kOracleMaxUsers = 3;

/// Minimum delivery rate over every plan that XORs one component per user in
/// each subset transmission, where the component slot of (k, S) may carry
/// bits of V_{k,S'} for any S' strictly containing S (such bits are cached by
/// every other member of S u {k}, so the transmission stays decodable).
/// Moved amounts are real-valued; the plan polytope is searched exactly with
/// the simplex method, whose vertex walk covers every extreme plan.
inline double exhaustive_optimal_rate(const CacheSet& cs) {
  const std::size_t k = cs.num_users();
  require(k <= kOracleMaxUsers, ErrorKind::Unsupported, "delivery oracle supports K <= 3 only");
  const UserMask all = full_mask(k);

  struct Move {
    std::size_t user;
    UserMask to;    // slot receiving the bits
    UserMask from;  // strict superset the bits come from
  };
  std::vector<Move> moves;
  for (std::size_t u = 0; u < k; ++u) {
    const UserMask others = all & ~bit(u);
    for_each_submask(others, [&](UserMask to) {
      for_each_submask(others, [&](UserMask from) {
        if (from != to && (from & to) == to) moves.push_back({u, to, from});
      });
    });
  }

  std::vector<UserMask> subsets;
  for (UserMask s = 1; s <= all; ++s) subsets.push_back(s);

  // variables: moves..., then T+_U, T-_U per subset
  const std::size_t nm = moves.size();
  const std::size_t nv = nm + 2 * subsets.size();
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  double zero_padding_total = 0.0;
  std::vector<double> zp(subsets.size());
  for (std::size_t si = 0; si < subsets.size(); ++si) {
    const UserMask s = subsets[si];
    for (auto u : members(s)) zp[si] = std::max(zp[si], expected_segment_size(cs, u, s & ~bit(u)));
    zero_padding_total += zp[si];
  }

  for (std::size_t si = 0; si < subsets.size(); ++si) {
    const UserMask s = subsets[si];
    for (auto u : members(s)) {
      const UserMask slot = s & ~bit(u);
      std::vector<double> row(nv, 0.0);
      for (std::size_t mi = 0; mi < nm; ++mi) {
        if (moves[mi].user != u) continue;
        if (moves[mi].to == slot) row[mi] += 1.0;
        if (moves[mi].from == slot) row[mi] -= 1.0;
      }
      row[nm + 2 * si] = -1.0;
      row[nm + 2 * si + 1] = 1.0;
      a.push_back(std::move(row));
      b.push_back(zp[si] - expected_segment_size(cs, u, slot));
    }
  }
  for (std::size_t u = 0; u < k; ++u) {
    const UserMask others = all & ~bit(u);
    for_each_submask(others, [&](UserMask from) {
      std::vector<double> row(nv, 0.0);
      bool any = false;
      for (std::size_t mi = 0; mi < nm; ++mi)
        if (moves[mi].user == u && moves[mi].from == from) {
          row[mi] = 1.0;
          any = true;
        }
      if (!any) return;
      a.push_back(std::move(row));
      b.push_back(expected_segment_size(cs, u, from));
    });
  }

  std::vector<double> c(nv, 0.0);
  for (std::size_t si = 0; si < subsets.size(); ++si) {
    c[nm + 2 * si] = -1.0;
    c[nm + 2 * si + 1] = 1.0;
  }
  const auto sol = lp::maximize(a, b, c);
  return zero_padding_total - sol.objective;
}

inline constexpr double kTheorem2Tolerance = 1e-9;

/// True iff no plan in the oracle's search space beats zero-padding.
inline bool verify_theorem2(const CacheSet& cs) {
  return std::abs(exhaustive_optimal_rate(cs) - traffic_closed_form(cs).rate) <= kTheorem2Tolerance;
}

}  // namespace hetcache
