#include "quadlod/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace quadlod {

namespace {

constexpr int kMantissaBits = 53;

Wide mantissa_square(double v, int& exponent2) {
  int e = 0;
  const double m = std::frexp(v, &e);
  const auto mant = static_cast<Wide>(std::ldexp(m, kMantissaBits));
  exponent2 = 2 * (e - kMantissaBits);
  return mant * mant;
}

Int shift_square(double v, bool round_up) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw Error(ErrorCode::invalid_argument, "region bound must be finite and nonnegative");
  if (v == 0.0) return 0;
  int shift = 0;
  const Wide sq = mantissa_square(v, shift);
  if (shift >= 0) {
    if (shift > 62) throw Error(ErrorCode::bounds_too_large, "region bound too large");
    const Wide r = sq << shift;
    return narrow(r);
  }
  const int k = -shift;
  if (k >= 120) return round_up ? 1 : 0;
  const Wide one = 1;
  const Wide floor_v = sq >> k;
  const bool exact = (sq & ((one << k) - 1)) == 0;
  return narrow(round_up && !exact ? floor_v + 1 : floor_v);
}

Int ceil_sqrt(Wide n) {
  if (n <= 0) return 0;
  const Int r = isqrt(n);
  return Wide(r) * r == n ? r : r + 1;
}

Int count_with_parity(Int lo, Int hi, Int parity) {
  if (lo > hi) return 0;
  const Int first = lo + floor_mod(parity - lo, 2);
  if (first > hi) return 0;
  return (hi - first) / 2 + 1;
}

// Admissible values v = 2x + t*y for one row y: [lo, hi] intervals.
struct RowRange {
  Int s_lo;  // 0 when the inner disc does not reach this row
  Int s_hi;
  bool valid;
};

RowRange row_range(const NormRegion& r, Int y) {
  const Int abs_d = r.ring->abs_disc();
  const Wide dy = Wide(abs_d) * y * y;
  const Wide outer = Wide(4) * r.hi_sq - dy;
  if (outer < 0) return {0, 0, false};
  const Wide inner = Wide(4) * r.lo_sq - dy;
  return {ceil_sqrt(inner), isqrt(outer), true};
}

Int row_count(const NormRegion& r, Int y) {
  const RowRange rr = row_range(r, y);
  if (!rr.valid) return 0;
  const Int parity = floor_mod(r.ring->trace() * y, 2);
  if (rr.s_lo == 0) return count_with_parity(-rr.s_hi, rr.s_hi, parity);
  return count_with_parity(rr.s_lo, rr.s_hi, parity) + count_with_parity(-rr.s_hi, -rr.s_lo, parity);
}

template <typename Emit>
void row_points(const NormRegion& r, Int y, Emit&& emit) {
  const RowRange rr = row_range(r, y);
  if (!rr.valid) return;
  const Int t = r.ring->trace();
  const Int parity = floor_mod(t * y, 2);
  auto span = [&](Int lo, Int hi) {
    for (Int v = lo + floor_mod(parity - lo, 2); v <= hi; v += 2) {
      const Int x = (v - t * y) / 2;
      emit(LatticePoint{x, y, static_cast<Int>((Wide(v) * v + Wide(r.ring->abs_disc()) * y * y) / 4)});
    }
  };
  if (rr.s_lo == 0) {
    span(-rr.s_hi, rr.s_hi);
  } else {
    span(-rr.s_hi, -rr.s_lo);
    span(rr.s_lo, rr.s_hi);
  }
}

Int row_limit(const NormRegion& r) {
  return isqrt(Wide(4) * r.hi_sq / r.ring->abs_disc());
}

void check_guard(const NormRegion& r, Int guard) {
  if (r.hi_sq > guard)
    throw Error(ErrorCode::bounds_too_large,
                "hi_sq = " + std::to_string(r.hi_sq) + " exceeds guard " + std::to_string(guard));
}

}  // namespace

Int exact_floor_square(double v) { return shift_square(v, false); }
Int exact_ceil_square(double v) { return shift_square(v, true); }

NormRegion NormRegion::annulus(const RingDescriptor& ring, double y_prime, double y, double n, double b) {
  if (!(n > 1.0) || !(b > 0.0) || !(y >= 0.0) || !(y_prime >= 0.0))
    throw Error(ErrorCode::invalid_argument, "annulus requires N > 1, b > 0, Y >= 0, Y' >= 0");
  const double outer = b == 1.0 ? y + n : y + std::pow(n, b);
  NormRegion r;
  r.ring = &ring;
  r.lo_sq = std::max<Int>(1, exact_ceil_square(y_prime));
  r.hi_sq = exact_floor_square(outer);
  r.params = {y_prime, y, n, b};
  return r;
}

NormRegion NormRegion::a0(const RingDescriptor& ring, double n) {
  if (!(n >= 0.0)) throw Error(ErrorCode::invalid_argument, "A0(N) requires N >= 0");
  NormRegion r;
  r.ring = &ring;
  r.lo_sq = 1;
  r.hi_sq = exact_floor_square(n);
  r.params = {1.0, 0.0, n, 1.0};
  return r;
}

NormRegion NormRegion::from_norms(const RingDescriptor& ring, Int lo_sq, Int hi_sq) {
  NormRegion r;
  r.ring = &ring;
  r.lo_sq = std::max<Int>(1, lo_sq);
  r.hi_sq = hi_sq;
  r.params = {std::sqrt(double(r.lo_sq)), 0.0, std::sqrt(double(hi_sq)), 1.0};
  return r;
}

Int count_region(const NormRegion& r, const RegionLimits& limits) {
  if (r.empty()) return 0;
  check_guard(r, limits.max_count_norm);
  const Int ymax = row_limit(r);
  Int total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (Int y = -ymax; y <= ymax; ++y) total += row_count(r, y);
  return total;
}

std::vector<LatticePoint> enumerate_points(const NormRegion& r, const RegionLimits& limits) {
  std::vector<LatticePoint> out;
  if (r.empty()) return out;
  check_guard(r, limits.max_enumerate_norm);
  const Int ymax = row_limit(r);
  out.reserve(static_cast<std::size_t>(count_region(r, limits)));
#pragma omp parallel
  {
    std::vector<LatticePoint> local;
#pragma omp for schedule(static) nowait
    for (Int y = -ymax; y <= ymax; ++y) row_points(r, y, [&](const LatticePoint& p) { local.push_back(p); });
#pragma omp critical
    out.insert(out.end(), local.begin(), local.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AlgInt> enumerate_region(const NormRegion& r, const RegionLimits& limits) {
  const auto pts = enumerate_points(r, limits);
  std::vector<AlgInt> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(*r.ring, p.x, p.y);
  return out;
}

double density_ratio(const RingDescriptor& ring, double n) {
  if (!(n >= 2.0)) throw Error(ErrorCode::invalid_argument, "density_ratio requires N >= 2");
  const double model = 2.0 * std::numbers::pi * n * n / std::sqrt(double(ring.abs_disc()));
  return double(count_region(NormRegion::a0(ring, n))) / model;
}

std::vector<AlgInt> canonical_classes(const RingDescriptor& ring, Int lo_norm, Int hi_norm,
                                      const RegionLimits& limits) {
  const NormRegion r = NormRegion::from_norms(ring, lo_norm, hi_norm);
  std::vector<AlgInt> out;
  if (r.empty()) return out;
  check_guard(r, limits.max_enumerate_norm);
  std::vector<LatticePoint> pts;
  // Canonical representatives always have y >= 0.
  for (Int y = 0, ymax = row_limit(r); y <= ymax; ++y)
    row_points(r, y, [&](const LatticePoint& p) {
      if (ring.in_canonical_sector(p.x, p.y)) pts.push_back(p);
    });
  std::sort(pts.begin(), pts.end());
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(ring, p.x, p.y);
  return out;
}

}  // namespace quadlod
