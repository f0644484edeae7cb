#pragma once

// Bit-level execution of decentralized coded caching: random placement,
// zero-padded XOR delivery over every user subset, and per-user decoding.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hetcache/error.hpp"
#include "hetcache/model.hpp"
#include "hetcache/parallel.hpp"
#include "hetcache/subsets.hpp"

namespace hetcache {

/// Packed bit string, bit i stored at word i/64, position i%64.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t bits) : words_((bits + 63) / 64, 0), bits_(bits) {}

  std::size_t size() const noexcept { return bits_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    words_[i >> 6] = v ? (words_[i >> 6] | m) : (words_[i >> 6] & ~m);
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::vector<std::uint64_t>& words() noexcept { return words_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  /// LSB-first byte packing: bit i lands in byte i/8 at position i%8.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((bits_ + 7) / 8);
    for (std::size_t b = 0; b < out.size(); ++b) out[b] = static_cast<std::uint8_t>(words_[b / 8] >> (8 * (b % 8)));
    return out;
  }
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bits) {
    BitString s(bits);
    for (std::size_t b = 0; b < bytes.size() && b * 8 < bits; ++b)
      s.words_[b / 8] |= std::uint64_t{bytes[b]} << (8 * (b % 8));
    if (bits % 64 != 0 && !s.words_.empty()) s.words_.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bits_ = 0;
};

enum class PlacementMode {
  ExactCount,  // floor(M_k F / N) distinct positions per (user, content)
  Bernoulli,   // each bit independently with probability M_k / N
};

inline constexpr std::uint64_t kContentStream = 0xC0FFEEull;

/// Result of the placement phase. Immutable after construction; fully
/// determined by (instance, F, seed, mode).
class PlacementState {
 public:
  PlacementState(ProblemInstance instance, std::size_t file_size_bits, std::uint64_t seed,
                 PlacementMode mode = PlacementMode::ExactCount, std::size_t threads = 0)
      : instance_(std::move(instance)), file_size_bits_(file_size_bits), seed_(seed), mode_(mode) {
    const std::size_t k = instance_.num_users;
    require(file_size_bits_ >= 1, ErrorKind::OutOfRange, "file size F must be >= 1");
    require(file_size_bits_ < (std::size_t{1} << 32), ErrorKind::OutOfRange, "file size F must be < 2^32");
    require(k <= kMaxMaskUsers, ErrorKind::ComplexityGuard,
            "bit-level placement limited to K <= " + std::to_string(kMaxMaskUsers));
    const auto n = static_cast<std::size_t>(instance_.cache_set.catalog_size());
    index_.resize(n);
    contents_.resize(n);
    parallel_for(n, [&](std::size_t c) { build_content(c); }, threads);
  }

  const ProblemInstance& instance() const noexcept { return instance_; }
  const CacheSet& cache_set() const noexcept { return instance_.cache_set; }
  std::size_t num_users() const noexcept { return instance_.num_users; }
  std::size_t num_contents() const noexcept { return contents_.size(); }
  std::size_t file_size_bits() const noexcept { return file_size_bits_; }
  std::uint64_t seed() const noexcept { return seed_; }
  PlacementMode mode() const noexcept { return mode_; }

  /// Bits cached per (user, content) under exact-count placement.
  std::size_t bits_per_content(std::size_t user) const {
    const double x = cache_set().size(user) * static_cast<double>(file_size_bits_) / cache_set().n();
    return std::min(file_size_bits_, static_cast<std::size_t>(std::floor(x * (1.0 + 1e-12))));
  }

  /// Positions of content `c` cached by exactly the users in `holders`, ascending.
  std::span<const std::uint32_t> segment(std::size_t c, UserMask holders) const {
    const auto& ix = index_.at(c);
    return {ix.positions.data() + ix.offsets[holders], ix.positions.data() + ix.offsets[holders + 1]};
  }
  std::size_t segment_length(std::size_t c, UserMask holders) const {
    const auto& ix = index_.at(c);
    return ix.offsets[holders + 1] - ix.offsets[holders];
  }

  std::vector<std::uint32_t> cached_positions(std::size_t user, std::size_t c) const {
    std::vector<std::uint32_t> out;
    for (UserMask m = 0; m <= full_mask(num_users()); ++m)
      if (contains(m, user)) {
        auto s = segment(c, m);
        out.insert(out.end(), s.begin(), s.end());
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Holder mask of every position of content `c`.
  std::vector<UserMask> holder_masks(std::size_t c) const {
    std::vector<UserMask> out(file_size_bits_);
    for (UserMask m = 0; m <= full_mask(num_users()); ++m)
      for (auto p : segment(c, m)) out[p] = m;
    return out;
  }

  const BitString& content(std::size_t c) const { return contents_.at(c); }

 private:
  struct ContentIndex {
    std::vector<std::uint32_t> offsets;    // 2^K + 1 entries
    std::vector<std::uint32_t> positions;  // F entries grouped by holder mask
  };

  void build_content(std::size_t c) {
    const std::size_t k = num_users();
    const std::size_t f = file_size_bits_;
    std::vector<UserMask> mask(f, 0);
    std::vector<std::uint32_t> perm;
    for (std::size_t u = 0; u < k; ++u) {
      std::mt19937_64 rng(derive_seed(seed_, u, c));
      if (mode_ == PlacementMode::ExactCount) {
        const std::size_t count = bits_per_content(u);
        perm.resize(f);
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t i = 0; i < count; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, f - 1);
          std::swap(perm[i], perm[pick(rng)]);
          mask[perm[i]] |= bit(u);
        }
      } else {
        std::bernoulli_distribution coin(cache_set().fraction(u));
        for (std::size_t p = 0; p < f; ++p)
          if (coin(rng)) mask[p] |= bit(u);
      }
    }
    auto& ix = index_[c];
    const std::size_t cells = std::size_t{1} << k;
    ix.offsets.assign(cells + 1, 0);
    for (auto m : mask) ++ix.offsets[m + 1];
    std::partial_sum(ix.offsets.begin(), ix.offsets.end(), ix.offsets.begin());
    ix.positions.resize(f);
    std::vector<std::uint32_t> cursor(ix.offsets.begin(), ix.offsets.end() - 1);
    for (std::size_t p = 0; p < f; ++p) ix.positions[cursor[mask[p]]++] = static_cast<std::uint32_t>(p);

    BitString bits(f);
    std::mt19937_64 rng(derive_seed(seed_, kContentStream, c));
    for (auto& w : bits.words()) w = rng();
    if (f % 64 != 0) bits.words().back() &= (std::uint64_t{1} << (f % 64)) - 1;
    contents_[c] = std::move(bits);
  }

  ProblemInstance instance_;
  std::size_t file_size_bits_;
  std::uint64_t seed_;
  PlacementMode mode_;
  std::vector<ContentIndex> index_;
  std::vector<BitString> contents_;
};

inline PlacementState place(const ProblemInstance& instance, std::size_t file_size_bits, std::uint64_t seed,
                            PlacementMode mode = PlacementMode::ExactCount, std::size_t threads = 0) {
  return PlacementState(instance, file_size_bits, seed, mode, threads);
}

struct SegmentRef {
  std::size_t user;
  UserMask holders;
  std::size_t length;

  friend auto operator<=>(const SegmentRef&, const SegmentRef&) = default;
};

struct Transmission {
  UserMask target_subset;
  std::size_t payload_length_bits;
  BitString payload;
  std::vector<SegmentRef> component_segments;
  /// Further subsets whose identical transmission was folded into this one.
  std::vector<UserMask> also_serves;
};

struct Transcript {
  std::vector<Transmission> transmissions;
  std::size_t total_bits = 0;
  DemandVector demands;
  std::size_t file_size_bits = 0;
};

namespace detail {

// Component identity that determines payload bits: (content, holder mask, length).
using ComponentKey = std::vector<std::tuple<std::size_t, UserMask, std::size_t>>;

inline ComponentKey component_key(const std::vector<SegmentRef>& comps, const DemandVector& d) {
  ComponentKey key;
  key.reserve(comps.size());
  for (const auto& c : comps) key.emplace_back(d.demands[c.user], c.holders, c.length);
  std::sort(key.begin(), key.end());
  return key;
}

inline void check_placement_demands(const PlacementState& placement, const DemandVector& demands) {
  demands.validate(placement.num_users(), placement.cache_set().catalog_size());
}

}  // namespace detail

/// Zero-padded coded delivery: for every non-empty U, largest |U| first and
/// lexicographic within a size, XOR the left-aligned segments V_{l,U\{l}}.
/// Empty transmissions are not sent. With `dedup`, a transmission built from
/// exactly the same segments as an earlier one (repeated demands) is sent once.
inline Transcript deliver(const PlacementState& placement, const DemandVector& demands, bool dedup = true) {
  detail::check_placement_demands(placement, demands);
  const std::size_t k = placement.num_users();
  Transcript t;
  t.demands = demands;
  t.file_size_bits = placement.file_size_bits();
  std::map<detail::ComponentKey, std::size_t> seen;
  for (std::size_t size = k; size >= 1; --size) {
    for_each_combination(k, size, [&](UserMask u) {
      Transmission tx{u, 0, {}, {}, {}};
      for (auto l : members(u)) {
        const UserMask holders = u & ~bit(l);
        const std::size_t len = placement.segment_length(demands.demands[l], holders);
        tx.component_segments.push_back({l, holders, len});
        tx.payload_length_bits = std::max(tx.payload_length_bits, len);
      }
      if (tx.payload_length_bits == 0) return;
      tx.payload = BitString(tx.payload_length_bits);
      for (const auto& c : tx.component_segments) {
        const auto& src = placement.content(demands.demands[c.user]);
        const auto seg = placement.segment(demands.demands[c.user], c.holders);
        for (std::size_t i = 0; i < seg.size(); ++i)
          if (src.get(seg[i])) tx.payload.flip(i);
      }
      if (dedup) {
        auto key = detail::component_key(tx.component_segments, demands);
        auto it = seen.find(key);
        if (it != seen.end() && t.transmissions[it->second].payload == tx.payload) {
          t.transmissions[it->second].also_serves.push_back(u);
          return;
        }
        seen.emplace(std::move(key), t.transmissions.size());
      }
      t.total_bits += tx.payload_length_bits;
      t.transmissions.push_back(std::move(tx));
    });
  }
  return t;
}

/// Broadcast bits of a delivery without materializing payloads.
inline std::size_t delivered_bits(const PlacementState& placement, const DemandVector& demands, bool dedup = true) {
  detail::check_placement_demands(placement, demands);
  const std::size_t k = placement.num_users();
  std::size_t total = 0;
  std::vector<detail::ComponentKey> seen;
  for (UserMask u = 1; u <= full_mask(k); ++u) {
    std::size_t longest = 0;
    std::vector<SegmentRef> comps;
    for (auto l : members(u)) {
      const UserMask holders = u & ~bit(l);
      const std::size_t len = placement.segment_length(demands.demands[l], holders);
      comps.push_back({l, holders, len});
      longest = std::max(longest, len);
    }
    if (longest == 0) continue;
    if (dedup) {
      auto key = detail::component_key(comps, demands);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(std::move(key));
    }
    total += longest;
  }
  return total;
}

inline double measured_rate(const Transcript& transcript) {
  if (transcript.file_size_bits == 0) return 0.0;
  return static_cast<double>(transcript.total_bits) / static_cast<double>(transcript.file_size_bits);
}

/// Reconstructs every user's requested content from its own cache and the
/// transcript. Placement metadata (who holds which positions) is shared
/// knowledge; cached bit values are only read where the user holds them.
/// Throws DecodeFailure when any user cannot recover its request bit-exactly.
inline std::vector<BitString> decode(const PlacementState& placement, const Transcript& transcript,
                                     const DemandVector& demands) {
  detail::check_placement_demands(placement, demands);
  require(transcript.demands == demands, ErrorKind::InvalidArgument, "transcript was produced for other demands");
  require(transcript.file_size_bits == placement.file_size_bits(), ErrorKind::InvalidArgument,
          "transcript was produced for another file size");
  const std::size_t k = placement.num_users();
  const std::size_t f = placement.file_size_bits();

  std::map<std::size_t, std::vector<UserMask>> holder_cache;
  auto holders_of = [&](std::size_t c) -> const std::vector<UserMask>& {
    auto it = holder_cache.find(c);
    if (it == holder_cache.end()) it = holder_cache.emplace(c, placement.holder_masks(c)).first;
    return it->second;
  };

  std::vector<BitString> out;
  out.reserve(k);
  for (std::size_t user = 0; user < k; ++user) {
    const std::size_t want = demands.demands[user];
    auto read_cached = [&](std::size_t c, std::uint32_t p) {
      if (!contains(holders_of(c)[p], user))
        fail(ErrorKind::DecodeFailure, "user " + std::to_string(user + 1) + " needs an uncached bit of content " +
                                           std::to_string(c + 1));
      return placement.content(c).get(p);
    };

    BitString rec(f);
    std::vector<char> known(f, 0);
    const auto& own = holders_of(want);
    for (std::size_t p = 0; p < f; ++p)
      if (contains(own[p], user)) {
        rec.set(p, placement.content(want).get(p));
        known[p] = 1;
      }

    for (const auto& tx : transcript.transmissions) {
      std::vector<UserMask> targets{tx.target_subset};
      targets.insert(targets.end(), tx.also_serves.begin(), tx.also_serves.end());
      for (UserMask u : targets) {
        if (!contains(u, user)) continue;
        BitString acc = tx.payload;
        for (auto l : members(u)) {
          if (l == user) continue;
          const std::size_t c = demands.demands[l];
          const auto seg = placement.segment(c, u & ~bit(l));
          require(seg.size() <= acc.size(), ErrorKind::DecodeFailure, "payload shorter than a component");
          for (std::size_t i = 0; i < seg.size(); ++i)
            if (read_cached(c, seg[i])) acc.flip(i);
        }
        const auto mine = placement.segment(want, u & ~bit(user));
        require(mine.size() <= acc.size(), ErrorKind::DecodeFailure, "payload shorter than own segment");
        for (std::size_t i = 0; i < mine.size(); ++i) {
          rec.set(mine[i], acc.get(i));
          known[mine[i]] = 1;
        }
        // what remains past the own segment is its zero padding
        for (std::size_t i = mine.size(); i < acc.size(); ++i)
          if (acc.get(i))
            fail(ErrorKind::DecodeFailure, "non-zero padding in transmission to user " + std::to_string(user + 1));
      }
    }
    if (std::find(known.begin(), known.end(), 0) != known.end())
      fail(ErrorKind::DecodeFailure, "user " + std::to_string(user + 1) + " is missing bits of its request");
    if (!(rec == placement.content(want)))
      fail(ErrorKind::DecodeFailure, "user " + std::to_string(user + 1) + " reconstructed a corrupted content");
    out.push_back(std::move(rec));
  }
  return out;
}

inline constexpr std::uint64_t kWorstCaseMaxVectors = 1'000'000;

struct WorstCase {
  DemandVector demands;
  double rate;
};

/// Exhaustive maximization of the delivered rate over all N^K demand vectors.
/// Ties keep the lexicographically first vector.
inline WorstCase worst_case_search(const PlacementState& placement, bool dedup = true) {
  const std::size_t k = placement.num_users();
  const std::size_t n = placement.num_contents();
  double space = std::pow(static_cast<double>(n), static_cast<double>(k));
  require(space <= static_cast<double>(kWorstCaseMaxVectors), ErrorKind::ComplexityGuard,
          "worst-case search limited to N^K <= 10^6");
  DemandVector d{std::vector<std::size_t>(k, 0)};
  WorstCase best{d, -1.0};
  while (true) {
    const double rate =
        static_cast<double>(delivered_bits(placement, d, dedup)) / static_cast<double>(placement.file_size_bits());
    if (rate > best.rate) best = {d, rate};
    std::size_t i = k;
    while (i > 0 && d.demands[i - 1] == n - 1) d.demands[--i] = 0;
    if (i == 0) break;
    ++d.demands[i - 1];
  }
  return best;
}

// Raw payload dump: "HCTX" magic, u32 version, u32 K, u64 F, u64 frame count,
// then per frame u64 byte length of the rest of the frame, u32 target mask,
// u64 payload bits, payload bytes (LSB-first). All integers little-endian.
inline constexpr std::array<char, 4> kDumpMagic{'H', 'C', 'T', 'X'};
inline constexpr std::uint32_t kDumpVersion = 1;

struct DumpFrame {
  UserMask target_subset;
  std::size_t payload_length_bits;
  BitString payload;
};

struct PayloadDump {
  std::uint32_t num_users;
  std::uint64_t file_size_bits;
  std::vector<DumpFrame> frames;
};

namespace detail {

template <class T>
void put_le(std::ostream& os, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <class T>
T get_le(std::istream& is) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int ch = is.get();
    require(ch != std::char_traits<char>::eof(), ErrorKind::InvalidArgument, "truncated payload dump");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(ch)) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace detail

inline void write_payload_dump(std::ostream& os, const Transcript& t, std::size_t num_users) {
  os.write(kDumpMagic.data(), kDumpMagic.size());
  detail::put_le<std::uint32_t>(os, kDumpVersion);
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(num_users));
  detail::put_le<std::uint64_t>(os, t.file_size_bits);
  detail::put_le<std::uint64_t>(os, t.transmissions.size());
  for (const auto& tx : t.transmissions) {
    const auto bytes = tx.payload.to_bytes();
    detail::put_le<std::uint64_t>(os, 4 + 8 + bytes.size());
    detail::put_le<std::uint32_t>(os, tx.target_subset);
    detail::put_le<std::uint64_t>(os, tx.payload_length_bits);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

inline PayloadDump read_payload_dump(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  require(is.good() && magic == kDumpMagic, ErrorKind::InvalidArgument, "not a payload dump");
  require(detail::get_le<std::uint32_t>(is) == kDumpVersion, ErrorKind::InvalidArgument, "unsupported dump version");
  PayloadDump d;
  d.num_users = detail::get_le<std::uint32_t>(is);
  d.file_size_bits = detail::get_le<std::uint64_t>(is);
  const auto frames = detail::get_le<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < frames; ++i) {
    const auto len = detail::get_le<std::uint64_t>(is);
    require(len >= 12, ErrorKind::InvalidArgument, "frame too short");
    DumpFrame fr;
    fr.target_subset = detail::get_le<std::uint32_t>(is);
    fr.payload_length_bits = detail::get_le<std::uint64_t>(is);
    std::vector<std::uint8_t> bytes(len - 12);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    require(static_cast<std::uint64_t>(is.gcount()) == bytes.size(), ErrorKind::InvalidArgument, "truncated frame");
    require(bytes.size() == (fr.payload_length_bits + 7) / 8, ErrorKind::InvalidArgument, "frame length mismatch");
    fr.payload = BitString::from_bytes(bytes, fr.payload_length_bits);
    d.frames.push_back(std::move(fr));
  }
  return d;
}

}  // namespace hetcache
