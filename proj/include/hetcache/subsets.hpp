#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace hetcache {

/// Bit i set <=> user i (0-based) belongs to the subset.
using UserMask = std::uint32_t;

inline constexpr std::size_t kMaxMaskUsers = 20;

constexpr UserMask full_mask(std::size_t users) {
  return users >= 32 ? ~UserMask{0} : (UserMask{1} << users) - 1u;
}

constexpr UserMask bit(std::size_t user) { return UserMask{1} << user; }

constexpr bool contains(UserMask mask, std::size_t user) { return (mask >> user) & 1u; }

constexpr int cardinality(UserMask mask) { return std::popcount(mask); }

/// Smallest member; undefined for the empty mask.
constexpr std::size_t lowest_member(UserMask mask) {
  return static_cast<std::size_t>(std::countr_zero(mask));
}

inline std::vector<std::size_t> members(UserMask mask) {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(cardinality(mask)));
  while (mask != 0) {
    out.push_back(lowest_member(mask));
    mask &= mask - 1;
  }
  return out;
}

inline UserMask mask_of(const std::vector<std::size_t>& users) {
  UserMask m = 0;
  for (auto u : users) m |= bit(u);
  return m;
}

/// Visits every `size`-element subset of {0..n-1} in lexicographic order of
/// the sorted member lists ({0,1} < {0,2} < {1,2}).
template <class Fn>
void for_each_combination(std::size_t n, std::size_t size, Fn&& fn) {
  if (size > n) return;
  std::vector<std::size_t> idx(size);
  for (std::size_t i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    UserMask m = 0;
    for (auto i : idx) m |= bit(i);
    fn(m);
    if (size == 0) return;
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == n - size + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Visits every subset of `mask` (including empty and `mask` itself).
template <class Fn>
void for_each_submask(UserMask mask, Fn&& fn) {
  UserMask sub = mask;
  while (true) {
    fn(sub);
    if (sub == 0) return;
    sub = (sub - 1) & mask;
  }
}

}  // namespace hetcache
