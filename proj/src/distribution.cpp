#include "quadlod/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "quadlod/summation.hpp"

namespace quadlod {

namespace {

// Max and min over a fixed array with point updates; ties resolve to the
// leftmost position.
class MinMaxTree {
 public:
  explicit MinMaxTree(std::size_t n) : n_(n) {
    size_ = 1;
    while (size_ < n) size_ <<= 1;
    max_.assign(2 * size_, {-HUGE_VAL, 0});
    min_.assign(2 * size_, {HUGE_VAL, 0});
    for (std::size_t i = 0; i < n; ++i) {
      max_[size_ + i] = {0.0, i};
      min_[size_ + i] = {0.0, i};
    }
    for (std::size_t i = size_ - 1; i >= 1; --i) pull(i);
  }

  void set(std::size_t pos, double v) {
    std::size_t i = size_ + pos;
    max_[i] = {v, pos};
    min_[i] = {v, pos};
    for (i >>= 1; i >= 1; i >>= 1) pull(i);
  }

  std::pair<double, std::size_t> max() const { return max_[1]; }
  std::pair<double, std::size_t> min() const { return min_[1]; }

 private:
  void pull(std::size_t i) {
    max_[i] = max_[2 * i].first >= max_[2 * i + 1].first ? max_[2 * i] : max_[2 * i + 1];
    min_[i] = min_[2 * i].first <= min_[2 * i + 1].first ? min_[2 * i] : min_[2 * i + 1];
  }

  std::size_t n_;
  std::size_t size_;
  std::vector<std::pair<double, std::size_t>> max_;
  std::vector<std::pair<double, std::size_t>> min_;
};

Int a0_count(const RingDescriptor& ring, double n) { return count_region(NormRegion::a0(ring, n)); }

}  // namespace

std::complex<double> epsilon(const ArithFn& f, double m, const ResidueSystem& q, const AlgInt& gamma) {
  if (&q.ring() != &f.ring() || &gamma.ring() != &f.ring())
    throw Error(ErrorCode::ring_mismatch, "epsilon arguments from different rings");
  const std::size_t target = q.index(gamma);
  if (!q.coprime(target)) throw Error(ErrorCode::not_coprime, gamma.to_string() + " is not coprime to the modulus");
  const ElementSet set = element_set(f.classes(), m);
  ComplexSum in_class;
  ComplexSum coprime;
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const std::size_t r = q.index(set.points[i].x, set.points[i].y);
    if (!q.coprime(r)) continue;
    const auto v = f[set.classes[i]];
    coprime.add(v);
    if (r == target) in_class.add(v);
  }
  return in_class.value() - coprime.value() / static_cast<double>(q.phi());
}

Support make_support(const ArithFn& f, double n) {
  const ElementSet set = element_set(f.classes(), n);
  Support s;
  s.ring = &f.ring();
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const auto v = f[set.classes[i]];
    if (v == std::complex<double>{0.0, 0.0}) continue;
    s.points.push_back(set.points[i]);
    s.values.push_back(v);
    if (v.imag() != 0.0) s.real = false;
  }
  return s;
}

SweepResult epsilon_sweep(const Support& support, const ResidueSystem& q) {
  const auto size = static_cast<std::size_t>(q.norm());
  std::vector<std::int64_t> slot(size, -1);
  std::vector<std::size_t> coprime_residues;
  for (std::size_t r = 0; r < size; ++r)
    if (q.coprime(r)) {
      slot[r] = static_cast<std::int64_t>(coprime_residues.size());
      coprime_residues.push_back(r);
    }
  const std::size_t phi = coprime_residues.size();
  const double phi_d = static_cast<double>(phi);

  SweepResult best;
  best.argmax_gamma = q.ring().one();

  std::vector<ComplexSum> acc(phi);
  ComplexSum total;
  MinMaxTree tree(support.real ? phi : 0);

  const auto& pts = support.points;
  for (std::size_t i = 0; i < pts.size();) {
    const Int level = pts[i].norm;
    for (; i < pts.size() && pts[i].norm == level; ++i) {
      const std::int64_t s = slot[q.index(pts[i].x, pts[i].y)];
      if (s < 0) continue;
      const auto pos = static_cast<std::size_t>(s);
      acc[pos].add(support.values[i]);
      total.add(support.values[i]);
      if (support.real) tree.set(pos, acc[pos].value().real());
    }
    const std::complex<double> mean = total.value() / phi_d;
    if (support.real) {
      const auto [hi, hi_pos] = tree.max();
      const auto [lo, lo_pos] = tree.min();
      const double up = hi - mean.real();
      const double down = mean.real() - lo;
      const bool use_hi = up >= down;
      const double cand = use_hi ? up : down;
      if (cand > best.max_abs) {
        const std::size_t pos = use_hi ? hi_pos : lo_pos;
        best.max_abs = cand;
        best.max_eps = {acc[pos].value().real() - mean.real(), 0.0};
        best.argmax_norm = level;
        best.argmax_gamma = q.representative(coprime_residues[pos]);
      }
    } else {
      for (std::size_t pos = 0; pos < phi; ++pos) {
        const std::complex<double> e = acc[pos].value() - mean;
        const double a = std::abs(e);
        if (a > best.max_abs) {
          best.max_abs = a;
          best.max_eps = e;
          best.argmax_norm = level;
          best.argmax_gamma = q.representative(coprime_residues[pos]);
        }
      }
    }
  }
  return best;
}

SweepResult epsilon_sweep(const ArithFn& f, double n, const ResidueSystem& q) {
  if (&q.ring() != &f.ring()) throw Error(ErrorCode::ring_mismatch, "modulus from another ring");
  return epsilon_sweep(make_support(f, n), q);
}

double level_Q(Int count, double n, double theta, double b) {
  return std::pow(static_cast<double>(count), theta) / std::pow(std::log(n), b);
}

std::vector<LodTable> lod_scan(const ArithFn& f, const LodScanConfig& cfg) {
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw Error(ErrorCode::invalid_argument, "theta must lie in (0, 1]");
  if (cfg.B < 0.0) throw Error(ErrorCode::invalid_argument, "B must be >= 0");
  for (std::size_t i = 0; i < cfg.N_grid.size(); ++i) {
    if (!(cfg.N_grid[i] > 1.0)) throw Error(ErrorCode::invalid_argument, "grid values must exceed 1");
    if (i > 0 && !(cfg.N_grid[i] > cfg.N_grid[i - 1]))
      throw Error(ErrorCode::invalid_argument, "N_grid must be strictly increasing");
  }

  std::vector<LodTable> out;
  for (double n : cfg.N_grid) {
    LodTable t;
    t.N = n;
    t.count = a0_count(f.ring(), n);
    t.Q = level_Q(t.count, n, cfg.theta, cfg.B);
    t.degenerate = t.Q < 2.0;
    const Support support = make_support(f, n);
    if (!t.degenerate) {
      const auto moduli = canonical_classes(f.ring(), 2, static_cast<Int>(std::floor(t.Q)));
      t.records.resize(moduli.size());
#pragma omp parallel for schedule(dynamic, 1)
      for (std::size_t i = 0; i < moduli.size(); ++i) {
        const ResidueSystem rs(moduli[i]);
        t.records[i] = {moduli[i], rs.phi(), epsilon_sweep(support, rs)};
      }
    }
    CompensatedSum e;
    for (const auto& r : t.records) e.add(r.sweep.max_abs);
    t.E = e.value();
    out.push_back(std::move(t));
  }
  return out;
}

// --- Siegel-Walfisz ---------------------------------------------------------

namespace {

// Element sums of f per residue class of q over A0(N).
std::vector<ComplexSum> residue_sums(const ElementSet& set, const ArithFn& f, const ResidueSystem& q) {
  std::vector<ComplexSum> sums(static_cast<std::size_t>(q.norm()));
  for (std::size_t i = 0; i < set.points.size(); ++i)
    sums[q.index(set.points[i].x, set.points[i].y)].add(f[set.classes[i]]);
  return sums;
}

std::complex<double> twisted(const std::vector<ComplexSum>& sums, const DirichletCharacter& chi) {
  ComplexSum out;
  for (std::size_t u : chi.modulus().unit_residues()) out.add(sums[u].value() * chi.value(u));
  return out.value();
}

}  // namespace

std::complex<double> sw_sum(const ArithFn& f, double n, const DirichletCharacter& chi) {
  if (&chi.modulus().ring() != &f.ring()) throw Error(ErrorCode::ring_mismatch, "character from another ring");
  const ElementSet set = element_set(f.classes(), n);
  ComplexSum out;
  const ResidueSystem& q = chi.modulus().residues();
  for (std::size_t i = 0; i < set.points.size(); ++i)
    out.add(f[set.classes[i]] * chi.value(q.index(set.points[i].x, set.points[i].y)));
  return out.value();
}

double sw_bound_ratio(const ArithFn& f, double n, const DirichletCharacter& chi, double cancellation_exponent) {
  if (chi.is_principal()) throw Error(ErrorCode::principal_character, "S-W bound needs a non-principal character");
  return std::abs(sw_sum(f, n, chi)) * std::pow(std::log(n), cancellation_exponent) /
         static_cast<double>(a0_count(f.ring(), n));
}

SwReport sw_check(const ArithFn& f, double n, double D, std::optional<double> cancellation_exponent) {
  if (!(n > 1.0) || !(D > 0.0)) throw Error(ErrorCode::invalid_argument, "sw_check needs N > 1 and D > 0");
  SwReport rep;
  rep.N = n;
  rep.D = D;
  rep.cancellation_exponent = cancellation_exponent.value_or(3.0 * D);
  rep.worst_q = f.ring().one();
  const ElementSet set = element_set(f.classes(), n);
  const auto bound = static_cast<Int>(std::floor(std::pow(std::log(n), D)));
  for (const AlgInt& q : canonical_classes(f.ring(), 2, bound)) {
    const auto m = make_modulus(q);
    const auto sums = residue_sums(set, f, m->residues());
    ++rep.moduli;
    for (const auto& chi : characters(m)) {
      if (chi.is_principal()) continue;
      ++rep.characters;
      const double a = std::abs(twisted(sums, chi));
      if (a > rep.max_abs_sum) {
        rep.max_abs_sum = a;
        rep.worst_q = q;
        rep.worst_exponents.assign(chi.exponents().begin(), chi.exponents().end());
      }
    }
  }
  rep.normalized = rep.max_abs_sum * std::pow(std::log(n), rep.cancellation_exponent) /
                   static_cast<double>(a0_count(f.ring(), n));
  return rep;
}

// --- convolution experiment -------------------------------------------------

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

ConvolutionReport convolution_experiment(const ArithFn& f, const ArithFn& g, const PrimeTable& table,
                                         const LodScanConfig& cfg) {
  const ArithFn h = convolve(f, g, table);
  const auto tf = lod_scan(f, cfg);
  const auto tg = lod_scan(g, cfg);
  const auto th = lod_scan(h, cfg);
  ConvolutionReport rep;
  std::vector<double> ef, eg, eh;
  for (std::size_t i = 0; i < tf.size(); ++i) {
    rep.rows.push_back({tf[i].N, tf[i].normalized(), tg[i].normalized(), th[i].normalized()});
    ef.push_back(tf[i].normalized());
    eg.push_back(tg[i].normalized());
    eh.push_back(th[i].normalized());
  }
  rep.f_decays = strictly_decreasing(ef);
  rep.g_decays = strictly_decreasing(eg);
  rep.conv_decays = strictly_decreasing(eh);
  return rep;
}

// --- large sieve --------------------------------------------------------------

namespace {

struct WeightEval {
  const SieveWeight& weight;

  double value(double x) const {
    if (std::holds_alternative<InverseWeight>(weight)) return 1.0 / x;
    const auto& t = std::get<TabulatedWeight>(weight);
    auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    if (it == t.x.end()) return t.w.back();
    if (it == t.x.begin()) return t.w.front();
    const std::size_t j = static_cast<std::size_t>(it - t.x.begin());
    const double s = (t.w[j] - t.w[j - 1]) / (t.x[j] - t.x[j - 1]);
    return t.w[j - 1] + s * (x - t.x[j - 1]);
  }

  // int_a^b x w(x) dx
  double moment(double a, double b) const {
    if (std::holds_alternative<InverseWeight>(weight)) return b - a;
    const auto& t = std::get<TabulatedWeight>(weight);
    double total = 0.0;
    for (std::size_t j = 1; j < t.x.size(); ++j) {
      const double lo = std::max(a, t.x[j - 1]);
      const double hi = std::min(b, t.x[j]);
      if (!(hi > lo)) continue;
      const double s = (t.w[j] - t.w[j - 1]) / (t.x[j] - t.x[j - 1]);
      const double c0 = t.w[j - 1] - s * t.x[j - 1];
      total += c0 * (hi * hi - lo * lo) / 2.0 + s * (hi * hi * hi - lo * lo * lo) / 3.0;
    }
    return total;
  }
};

void validate_weight(const SieveWeight& weight, double q1, double q2) {
  if (std::holds_alternative<InverseWeight>(weight)) return;
  const auto& t = std::get<TabulatedWeight>(weight);
  if (t.x.size() < 2 || t.x.size() != t.w.size())
    throw Error(ErrorCode::unsupported_weight, "tabulated weight needs >= 2 matching nodes");
  for (std::size_t j = 0; j < t.x.size(); ++j) {
    if (!(t.w[j] > 0.0)) throw Error(ErrorCode::unsupported_weight, "weight must be positive");
    if (j > 0 && !(t.x[j] > t.x[j - 1])) throw Error(ErrorCode::unsupported_weight, "nodes must increase");
    if (j > 0 && t.w[j] > t.w[j - 1]) throw Error(ErrorCode::unsupported_weight, "weight must be non-increasing");
  }
  if (t.x.front() > q1 || t.x.back() < q2)
    throw Error(ErrorCode::unsupported_weight, "tabulation must cover [Q1, Q2]");
}

}  // namespace

LargeSieveResult large_sieve_ratio(std::span<const Coefficient> coeffs, const NormRegion& region, double q1,
                                   double q2, const SieveWeight& weight) {
  if (!(q1 > 0.0) || !(q2 > q1)) throw Error(ErrorCode::invalid_argument, "large sieve needs 0 < Q1 < Q2");
  validate_weight(weight, q1, q2);
  const RingDescriptor& ring = *region.ring;
  for (const auto& c : coeffs) {
    if (&c.xi.ring() != &ring) throw Error(ErrorCode::ring_mismatch, "coefficient from another ring");
    if (!region.contains(c.xi))
      throw Error(ErrorCode::invalid_argument, "coefficient at " + c.xi.to_string() + " outside the region");
  }
  const auto moduli = canonical_classes(ring, static_cast<Int>(std::floor(q1)) + 1, static_cast<Int>(std::floor(q2)));
  if (moduli.empty()) throw Error(ErrorCode::empty_modulus_range, "no moduli with Q1 < norm <= Q2");

  const WeightEval w{weight};
  LargeSieveResult res;
  res.moduli = static_cast<Int>(moduli.size());
  std::vector<double> per_modulus(moduli.size());
  std::vector<Int> primitive_count(moduli.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const auto m = make_modulus(moduli[i]);
    std::vector<ComplexSum> sums(static_cast<std::size_t>(m->norm()));
    for (const auto& c : coeffs) sums[m->residues().index(c.xi)].add(c.c);
    CompensatedSum inner;
    for (const auto& chi : primitive_characters(m)) {
      ++primitive_count[i];
      inner.add(std::norm(twisted(sums, chi)));
    }
    const double nq = static_cast<double>(m->norm());
    per_modulus[i] = w.value(nq) * nq / static_cast<double>(m->phi()) * inner.value();
  }
  CompensatedSum lhs;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    lhs.add(per_modulus[i]);
    res.primitive_characters += primitive_count[i];
  }
  CompensatedSum mass;
  for (const auto& c : coeffs) mass.add(std::norm(c.c));

  const double count = static_cast<double>(a0_count(ring, region.params.n));
  const double factor = std::holds_alternative<InverseWeight>(weight)
                            ? count / q1 + q2
                            : w.value(q1) * (q1 * q1 + count) + w.moment(q1, q2);
  res.lhs = lhs.value();
  res.rhs = factor * mass.value();
  res.ratio = res.rhs > 0.0 ? res.lhs / res.rhs : 0.0;
  return res;
}

// --- Mertens ----------------------------------------------------------------

MertensSums mertens_sums(const RingDescriptor& ring, Int r, Int max_r) {
  if (r < 2) throw Error(ErrorCode::invalid_argument, "mertens_sums requires R >= 2");
  if (r > max_r) throw Error(ErrorCode::bounds_too_large, "R exceeds " + std::to_string(max_r));
  // Classes per norm: every class has exactly w_K associates.
  std::vector<std::uint32_t> per_norm(static_cast<std::size_t>(r) + 1, 0);
  const Int ymax = isqrt(Wide(4) * r / ring.abs_disc());
  for (Int y = 0; y <= ymax; ++y) {
    const Wide rest = Wide(4) * r - Wide(ring.abs_disc()) * y * y;
    const Int s = isqrt(rest);
    for (Int v = -s; v <= s; ++v) {
      if (floor_mod(v - ring.trace() * y, 2) != 0) continue;
      const Int x = (v - ring.trace() * y) / 2;
      if (!ring.in_canonical_sector(x, y)) continue;
      ++per_norm[static_cast<std::size_t>((Wide(v) * v + Wide(ring.abs_disc()) * y * y) / 4)];
    }
  }
  CompensatedSum ideals;
  for (Int n = 1; n <= r; ++n)
    if (per_norm[static_cast<std::size_t>(n)]) ideals.add(per_norm[static_cast<std::size_t>(n)] / static_cast<double>(n));

  CompensatedSum primes;
  const PrimeTable table = sieve_primes(ring, r);
  for (const auto& e : table.primes()) primes.add(1.0 / static_cast<double>(e.prime.norm()));

  MertensSums out;
  out.ideal_sum = ideals.value();
  out.prime_sum = primes.value();
  out.ideal_ratio = out.ideal_sum / std::log(static_cast<double>(r));
  out.prime_ratio = out.prime_sum / std::log(std::log(static_cast<double>(r)));
  return out;
}

}  // namespace quadlod
