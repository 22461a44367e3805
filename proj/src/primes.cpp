#include "quadlod/primes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>

namespace quadlod {

namespace {

std::vector<std::uint32_t> smallest_prime_factors(Int limit) {
  std::vector<std::uint32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
  for (Int i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    spf[i] = static_cast<std::uint32_t>(i);
    for (Wide j = Wide(i) * i; j <= limit; j += i)
      if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(i);
  }
  return spf;
}

Int powmod(Int base, Int exp, Int mod) {
  Wide result = 1;
  Wide b = floor_mod(base, mod);
  while (exp > 0) {
    if (exp & 1) result = result * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<Int>(result);
}

// Solve norm(x + y*omega) = n with y > 0 by scanning rows.
std::optional<AlgInt> solve_norm_equation(const RingDescriptor& ring, Int n) {
  const Int t = ring.trace();
  for (Int y = 1;; ++y) {
    const Wide rest = Wide(4) * n - Wide(ring.abs_disc()) * y * y;
    if (rest < 0) return std::nullopt;
    const Int v = isqrt(rest);
    if (Wide(v) * v == rest && floor_mod(v - t * y, 2) == 0) return ring.element((v - t * y) / 2, y);
  }
}

bool by_key(const AlgInt& a, const AlgInt& b) { return a.key() < b.key(); }

}  // namespace

bool is_rational_prime(Int n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (Int k = 3; Wide(k) * k <= n; k += 2)
    if (n % k == 0) return false;
  return true;
}

int kronecker_symbol(Int disc, Int p) {
  if (p == 2) {
    if (floor_mod(disc, 2) == 0) return 0;
    const Int r = floor_mod(disc, 8);
    return (r == 1 || r == 7) ? 1 : -1;
  }
  const Int a = floor_mod(disc, p);
  if (a == 0) return 0;
  return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

std::vector<AlgInt> primes_above(const RingDescriptor& ring, Int p) {
  const int k = kronecker_symbol(ring.disc(), p);
  if (k == -1) return {ring.element(p, 0)};
  const auto root = solve_norm_equation(ring, p);
  if (!root) throw Error(ErrorCode::invalid_argument, "no element of norm " + std::to_string(p));
  const AlgInt a = canonical_associate(*root);
  if (k == 0) return {a};
  std::vector<AlgInt> out{a, canonical_associate(root->conj())};
  std::sort(out.begin(), out.end(), by_key);
  return out;
}

PrimeTable::PrimeTable(const RingDescriptor& ring, Int max_norm, std::vector<PrimeEntry> primes)
    : ring_(&ring), max_norm_(max_norm), primes_(std::move(primes)), spf_(smallest_prime_factors(max_norm)) {
  for (std::size_t i = 0; i < primes_.size(); ++i)
    above_[primes_[i].rational_prime].push_back(static_cast<std::uint32_t>(i));
}

std::span<const std::uint32_t> PrimeTable::above(Int p) const {
  auto it = above_.find(p);
  if (it == above_.end()) return {};
  return it->second;
}

PrimeTable sieve_primes(const RingDescriptor& ring, Int max_norm, const SieveLimits& limits) {
  if (max_norm < 2) throw Error(ErrorCode::invalid_argument, "sieve_primes requires max_norm >= 2");
  if (max_norm > limits.max_norm)
    throw Error(ErrorCode::bounds_too_large, "max_norm exceeds sieve guard " + std::to_string(limits.max_norm));

  const auto spf = smallest_prime_factors(max_norm);
  std::vector<Int> rational;
  for (Int n = 2; n <= max_norm; ++n)
    if (spf[n] == n) rational.push_back(n);

  std::vector<std::vector<PrimeEntry>> per_prime(rational.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t i = 0; i < rational.size(); ++i) {
    const Int p = rational[i];
    const int k = kronecker_symbol(ring.disc(), p);
    if (k == -1 && Wide(p) * p > max_norm) continue;
    const SplitType type = k == 1 ? SplitType::split : k == 0 ? SplitType::ramified : SplitType::inert;
    for (const AlgInt& pi : primes_above(ring, p)) per_prime[i].push_back({pi, type, p});
  }

  std::vector<PrimeEntry> entries;
  for (auto& v : per_prime) entries.insert(entries.end(), v.begin(), v.end());
  std::sort(entries.begin(), entries.end(),
            [](const PrimeEntry& a, const PrimeEntry& b) { return by_key(a.prime, b.prime); });
  return PrimeTable(ring, max_norm, std::move(entries));
}

bool is_prime(const AlgInt& xi) {
  const Int n = xi.norm();
  if (n <= 1) throw Error(ErrorCode::zero_or_unit, xi.to_string() + " is zero or a unit");
  if (is_rational_prime(n)) return true;
  const Int p = isqrt(n);
  if (Wide(p) * p != n || !is_rational_prime(p)) return false;
  if (kronecker_symbol(xi.ring().disc(), p) != -1) return false;
  return canonical_associate(xi) == xi.ring().element(p, 0);
}

AlgInt FactorMap::product() const {
  AlgInt out = unit;
  for (const auto& [pi, e] : factors) out = out * pow(pi, static_cast<unsigned>(e));
  return out;
}

FactorMap factor(const AlgInt& xi, const PrimeTable& table) {
  if (xi.is_zero()) throw Error(ErrorCode::zero_element, "factor of 0");
  if (&xi.ring() != &table.ring()) throw Error(ErrorCode::ring_mismatch, "table built for another ring");
  Int n = xi.norm();
  if (n > table.max_norm())
    throw Error(ErrorCode::table_too_small,
                "norm " + std::to_string(n) + " exceeds table bound " + std::to_string(table.max_norm()));
  FactorMap out;
  AlgInt rest = xi;
  while (n > 1) {
    const Int p = table.smallest_prime_factor(n);
    while (n % p == 0) n /= p;
    for (std::uint32_t idx : table.above(p)) {
      const AlgInt& pi = table.primes()[idx].prime;
      int e = 0;
      while (divides(pi, rest)) {
        rest = exact_quotient(rest, pi);
        ++e;
      }
      if (e > 0) out.factors.emplace_back(pi, e);
    }
  }
  if (!rest.is_unit()) throw Error(ErrorCode::invalid_argument, "factorization incomplete for " + xi.to_string());
  out.unit = rest;
  std::sort(out.factors.begin(), out.factors.end(),
            [](const auto& a, const auto& b) { return by_key(a.first, b.first); });
  return out;
}

double von_mangoldt(const AlgInt& xi, const PrimeTable& table) {
  const FactorMap fm = factor(xi, table);
  if (fm.factors.size() != 1) return 0.0;
  return std::log(static_cast<double>(fm.factors.front().first.norm()));
}

// --- cache ------------------------------------------------------------------

namespace {

constexpr std::array<char, 4> kMagic = {'Q', 'L', 'O', 'D'};

template <typename T>
void put_le(std::ostream& os, T value) {
  auto u = static_cast<std::make_unsigned_t<T>>(value);
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  os.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> buf{};
  if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size()))
    throw Error(ErrorCode::io_error, "truncated cache file");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
  return static_cast<T>(u);
}

CacheHeader read_header(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    throw Error(ErrorCode::format_version_mismatch, "bad magic, not a prime cache");
  CacheHeader h{};
  h.version = get_le<std::uint32_t>(is);
  if (h.version != kCacheVersion)
    throw Error(ErrorCode::format_version_mismatch, "cache version " + std::to_string(h.version));
  h.d = get_le<std::int64_t>(is);
  h.max_norm = get_le<std::uint64_t>(is);
  h.count = get_le<std::uint64_t>(is);
  return h;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return is;
}

}  // namespace

void cache_save(const PrimeTable& table, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kCacheVersion);
  put_le<std::int64_t>(os, table.ring().d());
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(table.max_norm()));
  put_le<std::uint64_t>(os, table.primes().size());
  for (const PrimeEntry& e : table.primes()) {
    put_le<std::int64_t>(os, e.prime.x());
    put_le<std::int64_t>(os, e.prime.y());
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(e.split));
  }
  if (!os) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

CacheHeader cache_inspect(const std::filesystem::path& path) {
  auto is = open_for_read(path);
  return read_header(is);
}

PrimeTable cache_load(const RingDescriptor& ring, const std::filesystem::path& path) {
  auto is = open_for_read(path);
  const CacheHeader h = read_header(is);
  if (h.d != ring.d())
    throw Error(ErrorCode::ring_mismatch,
                "cache built for d = " + std::to_string(h.d) + ", requested d = " + std::to_string(ring.d()));
  std::vector<PrimeEntry> entries;
  entries.reserve(h.count);
  for (std::uint64_t i = 0; i < h.count; ++i) {
    const Int x = get_le<std::int64_t>(is);
    const Int y = get_le<std::int64_t>(is);
    const auto raw = get_le<std::uint8_t>(is);
    if (raw > 2) throw Error(ErrorCode::format_version_mismatch, "invalid split type in cache");
    const auto type = static_cast<SplitType>(raw);
    const AlgInt pi = ring.element(x, y);
    const Int p = type == SplitType::inert ? x : pi.norm();
    entries.push_back({pi, type, p});
  }
  return PrimeTable(ring, static_cast<Int>(h.max_norm), std::move(entries));
}

}  // namespace quadlod
