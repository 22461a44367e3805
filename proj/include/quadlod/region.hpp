#pragma once

#include <vector>

#include "quadlod/ring.hpp"

namespace quadlod {

/// Coordinates plus cached norm; the unit of work in enumeration kernels.
struct LatticePoint {
  Int x;
  Int y;
  Int norm;

  friend auto operator<=>(const LatticePoint& a, const LatticePoint& b) {
    if (auto c = a.norm <=> b.norm; c != 0) return c;
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// Guards against runaway enumeration sizes.
struct RegionLimits {
  Int max_enumerate_norm = 4'000'000;
  Int max_count_norm = 1'000'000'000'000'000;
};

/// The annulus A0_b(Y', Y, N) = { xi : Y' <= |sigma(xi)| <= Y + N^b },
/// stored as exact squared-norm bounds lo_sq = ceil(Y'^2),
/// hi_sq = floor((Y + N^b)^2).
struct NormRegion {
  struct Params {
    double y_prime = 1.0;
    double y = 0.0;
    double n = 1.0;
    double b = 1.0;
  };

  const RingDescriptor* ring = nullptr;
  Int lo_sq = 1;
  Int hi_sq = 0;
  Params params;

  static NormRegion annulus(const RingDescriptor& ring, double y_prime, double y, double n, double b);
  /// A0(N): 1 <= norm <= floor(N^2).
  static NormRegion a0(const RingDescriptor& ring, double n);
  static NormRegion from_norms(const RingDescriptor& ring, Int lo_sq, Int hi_sq);

  bool empty() const { return hi_sq < lo_sq; }
  bool contains(const AlgInt& xi) const {
    const Int n = xi.norm();
    return lo_sq <= n && n <= hi_sq;
  }
};

/// floor(v^2) and ceil(v^2) computed exactly from the binary value of v.
Int exact_floor_square(double v);
Int exact_ceil_square(double v);

/// Every point of the region exactly once, sorted by (norm, x, y).
std::vector<LatticePoint> enumerate_points(const NormRegion& r, const RegionLimits& limits = {});
std::vector<AlgInt> enumerate_region(const NormRegion& r, const RegionLimits& limits = {});

/// Same count as enumerate_region without materialising points: O(sqrt(hi_sq)).
Int count_region(const NormRegion& r, const RegionLimits& limits = {});

/// count(A0(N)) / (2*pi*N^2 / sqrt|D_K|).
double density_ratio(const RingDescriptor& ring, double n);

/// Canonical associates (one per nonzero principal ideal) with
/// lo_norm <= norm <= hi_norm, sorted by (norm, x, y).
std::vector<AlgInt> canonical_classes(const RingDescriptor& ring, Int lo_norm, Int hi_norm,
                                      const RegionLimits& limits = {});

}  // namespace quadlod
