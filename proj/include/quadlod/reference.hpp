#pragma once

// Serial, deliberately naive counterparts of the parallel kernels. They are
// linked only into tests and the benchmark and must not share code paths
// with the kernels they check.

#include <vector>

#include "quadlod/arith.hpp"
#include "quadlod/distribution.hpp"
#include "quadlod/region.hpp"

namespace quadlod::reference {

/// Bounding-box scan over all (x, y) with an explicit norm test.
std::vector<LatticePoint> enumerate_region(const NormRegion& r);
Int count_region(const NormRegion& r);

/// Largest-norm common divisor found by scanning candidate classes whose
/// norm divides gcd(N(a), N(b)).
AlgInt gcd(const AlgInt& a, const AlgInt& b);

/// Canonical classes of norm <= max_norm with no proper divisor, by trial
/// division over classes of norm <= sqrt(N).
std::vector<AlgInt> primes_by_trial_division(const RingDescriptor& ring, Int max_norm);

/// Pair loop over classes d, e with N(d)N(e) <= bound.
ArithFn convolve(const ArithFn& f, const ArithFn& g);

/// max over every norm breakpoint M^2 <= N^2 and coprime gamma of a
/// directly evaluated epsilon.
double epsilon_sweep(const ArithFn& f, double n, const ResidueSystem& q);

/// Serial loop over moduli using the production sweep.
std::vector<LodTable> lod_scan(const ArithFn& f, const LodScanConfig& cfg);

}  // namespace quadlod::reference
