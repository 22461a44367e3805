#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quadlod/ring.hpp"

namespace quadlod {

enum class SplitType : std::uint8_t { split = 0, inert = 1, ramified = 2 };

struct PrimeEntry {
  AlgInt prime;  // canonical associate
  SplitType split;
  Int rational_prime;

  friend bool operator==(const PrimeEntry&, const PrimeEntry&) = default;
};

/// Kronecker symbol (D/p) for a rational prime p.
int kronecker_symbol(Int disc, Int p);

bool is_rational_prime(Int n);

/// Canonical prime elements above the rational prime p, sorted by (norm, x, y):
/// two for split p, one for inert (p itself) or ramified p.
std::vector<AlgInt> primes_above(const RingDescriptor& ring, Int p);

struct SieveLimits {
  Int max_norm = 50'000'000;
};

/// Prime elements of norm <= max_norm with a smallest-prime-factor table
/// over [0, max_norm] for factoring norms.
class PrimeTable {
 public:
  PrimeTable(const RingDescriptor& ring, Int max_norm, std::vector<PrimeEntry> primes);

  const RingDescriptor& ring() const { return *ring_; }
  Int max_norm() const { return max_norm_; }
  std::span<const PrimeEntry> primes() const { return primes_; }

  /// Indices into primes() of the entries lying above rational prime p.
  std::span<const std::uint32_t> above(Int p) const;
  Int smallest_prime_factor(Int n) const { return spf_[static_cast<std::size_t>(n)]; }

  friend bool operator==(const PrimeTable& a, const PrimeTable& b) {
    return a.ring_ == b.ring_ && a.max_norm_ == b.max_norm_ && a.primes_ == b.primes_;
  }

 private:
  const RingDescriptor* ring_;
  Int max_norm_;
  std::vector<PrimeEntry> primes_;
  std::vector<std::uint32_t> spf_;
  std::unordered_map<Int, std::vector<std::uint32_t>> above_;
};

PrimeTable sieve_primes(const RingDescriptor& ring, Int max_norm, const SieveLimits& limits = {});

/// Throws zero_or_unit for 0 and units.
bool is_prime(const AlgInt& xi);

struct FactorMap {
  AlgInt unit;
  std::vector<std::pair<AlgInt, int>> factors;

  AlgInt product() const;
};

FactorMap factor(const AlgInt& xi, const PrimeTable& table);

/// log N(p) when xi is associate to a prime power p^k, else 0.
double von_mangoldt(const AlgInt& xi, const PrimeTable& table);

// --- on-disk cache ----------------------------------------------------------
//
// Little-endian, no padding:
//   "QLOD" | u32 version | i64 d | u64 max_norm | u64 count |
//   count x (i64 x | i64 y | u8 split_type)

inline constexpr std::uint32_t kCacheVersion = 1;

struct CacheHeader {
  std::uint32_t version;
  Int d;
  std::uint64_t max_norm;
  std::uint64_t count;
};

void cache_save(const PrimeTable& table, const std::filesystem::path& path);
PrimeTable cache_load(const RingDescriptor& ring, const std::filesystem::path& path);
CacheHeader cache_inspect(const std::filesystem::path& path);

}  // namespace quadlod
