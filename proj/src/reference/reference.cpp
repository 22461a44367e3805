#include "quadlod/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "quadlod/summation.hpp"

namespace quadlod::reference {

std::vector<LatticePoint> enumerate_region(const NormRegion& r) {
  std::vector<LatticePoint> out;
  if (r.empty()) return out;
  const RingDescriptor& ring = *r.ring;
  // norm >= (|D|/4) y^2 and norm >= x^2 * (1 - t^2/|D|)-ish; a generous box.
  const Int ybox = static_cast<Int>(std::sqrt(4.0 * double(r.hi_sq) / double(ring.abs_disc()))) + 2;
  const Int xbox = static_cast<Int>(std::sqrt(double(r.hi_sq))) + ybox + 2;
  for (Int x = -xbox; x <= xbox; ++x)
    for (Int y = -ybox; y <= ybox; ++y) {
      const Wide n = ring.norm_form(x, y);
      if (n >= r.lo_sq && n <= r.hi_sq) out.push_back({x, y, static_cast<Int>(n)});
    }
  std::sort(out.begin(), out.end());
  return out;
}

Int count_region(const NormRegion& r) {
  if (r.empty()) return 0;
  const RingDescriptor& ring = *r.ring;
  const Int ybox = static_cast<Int>(std::sqrt(4.0 * double(r.hi_sq) / double(ring.abs_disc()))) + 2;
  const Int xbox = static_cast<Int>(std::sqrt(double(r.hi_sq))) + ybox + 2;
  Int total = 0;
  for (Int x = -xbox; x <= xbox; ++x)
    for (Int y = -ybox; y <= ybox; ++y) {
      const Wide n = ring.norm_form(x, y);
      total += (n >= r.lo_sq && n <= r.hi_sq);
    }
  return total;
}

AlgInt gcd(const AlgInt& a, const AlgInt& b) {
  if (a.is_zero()) return canonical_associate(b);
  if (b.is_zero()) return canonical_associate(a);
  const Int g = std::gcd(a.norm(), b.norm());
  for (Int k = g; k >= 1; --k) {
    if (g % k != 0) continue;
    for (const AlgInt& d : canonical_classes(a.ring(), k, k))
      if (divides(d, a) && divides(d, b)) return d;
  }
  return a.ring().one();
}

std::vector<AlgInt> primes_by_trial_division(const RingDescriptor& ring, Int max_norm) {
  const auto classes = canonical_classes(ring, 2, max_norm);
  const Int root = isqrt(max_norm);
  std::vector<AlgInt> small;
  for (const AlgInt& c : classes)
    if (c.norm() <= root) small.push_back(c);
  std::vector<AlgInt> out;
  for (const AlgInt& c : classes) {
    const Int n = c.norm();
    bool composite = false;
    for (const AlgInt& d : small) {
      const Int m = d.norm();
      if (m * m > n) break;
      if (n % m == 0 && divides(d, c)) {
        composite = true;
        break;
      }
    }
    if (!composite) out.push_back(c);
  }
  return out;
}

ArithFn convolve(const ArithFn& f, const ArithFn& g) {
  const auto& classes_ptr = f.norm_bound() <= g.norm_bound() ? f.classes_ptr() : g.classes_ptr();
  const ClassIndex& idx = *classes_ptr;
  const Int bound = idx.norm_bound();
  std::vector<std::complex<double>> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const AlgInt d = idx.element(i);
    for (std::size_t j = 0; j < idx.size() && idx[i].norm * idx[j].norm <= bound; ++j)
      out[idx.class_of(d * idx.element(j))] += f[f.classes().class_of(d)] * g[g.classes().class_of(idx.element(j))];
  }
  return ArithFn(classes_ptr, std::move(out), "reference-convolution");
}

double epsilon_sweep(const ArithFn& f, double n, const ResidueSystem& q) {
  const NormRegion region = NormRegion::a0(f.ring(), n);
  const auto points = reference::enumerate_region(region);
  std::vector<Int> breakpoints;
  for (const auto& p : points)
    if (breakpoints.empty() || breakpoints.back() != p.norm) breakpoints.push_back(p.norm);

  std::vector<std::size_t> residue(points.size());
  std::vector<std::complex<double>> value(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    residue[i] = q.index(points[i].x, points[i].y);
    value[i] = f.at(f.ring().element(points[i].x, points[i].y));
  }

  double best = 0.0;
  const double phi = static_cast<double>(q.phi());
  for (Int level : breakpoints) {
    for (std::size_t gamma = 0; gamma < static_cast<std::size_t>(q.norm()); ++gamma) {
      if (!q.coprime(gamma)) continue;
      ComplexSum in_class;
      ComplexSum coprime;
      for (std::size_t i = 0; i < points.size() && points[i].norm <= level; ++i) {
        if (!q.coprime(residue[i])) continue;
        coprime.add(value[i]);
        if (residue[i] == gamma) in_class.add(value[i]);
      }
      best = std::max(best, std::abs(in_class.value() - coprime.value() / phi));
    }
  }
  return best;
}

std::vector<LodTable> lod_scan(const ArithFn& f, const LodScanConfig& cfg) {
  std::vector<LodTable> out;
  for (double n : cfg.N_grid) {
    LodTable t;
    t.N = n;
    t.count = quadlod::count_region(NormRegion::a0(f.ring(), n));
    t.Q = level_Q(t.count, n, cfg.theta, cfg.B);
    t.degenerate = t.Q < 2.0;
    const Support support = make_support(f, n);
    if (!t.degenerate)
      for (const AlgInt& q : canonical_classes(f.ring(), 2, static_cast<Int>(std::floor(t.Q)))) {
        const ResidueSystem rs(q);
        t.records.push_back({q, rs.phi(), quadlod::epsilon_sweep(support, rs)});
      }
    CompensatedSum e;
    for (const auto& r : t.records) e.add(r.sweep.max_abs);
    t.E = e.value();
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace quadlod::reference
