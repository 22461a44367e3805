#include <cmath>
#include <random>

#include "doctest.h"
#include "quadlod/distribution.hpp"
#include "quadlod/reference.hpp"

using namespace quadlod;

namespace {

struct Fixture {
  const RingDescriptor& ring;
  PrimeTable table;
  std::shared_ptr<const ClassIndex> idx;

  Fixture(Int d, Int bound)
      : ring(make_ring(d)), table(sieve_primes(ring, bound)), idx(std::make_shared<ClassIndex>(ring, bound)) {}

  ArithFn fn(Builtin b) const { return tabulate(b, idx, table); }
  ArithFn zero() const { return ArithFn(idx, std::vector<std::complex<double>>(idx->size()), "zero"); }
  ArithFn random(std::mt19937_64& rng, bool complex) const {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::complex<double>> v(idx->size());
    for (auto& z : v) z = {u(rng), complex ? u(rng) : 0.0};
    return ArithFn(idx, std::move(v), "random");
  }
};

// Double loop over a coordinate box, independent of the enumeration kernels.
std::complex<double> brute_epsilon(const ArithFn& f, Int m_sq, const ResidueSystem& q, const AlgInt& gamma) {
  const auto& r = f.ring();
  const Int box = 2 * isqrt(m_sq) + 2;
  std::complex<double> in = 0, all = 0;
  for (Int x = -box; x <= box; ++x)
    for (Int y = -box; y <= box; ++y) {
      const AlgInt a = r.element(x, y);
      if (a.is_zero() || a.norm() > m_sq) continue;
      if (!gcd(a, q.generator()).is_unit()) continue;
      all += f.at(a);
      if (divides(q.generator(), a - gamma)) in += f.at(a);
    }
  return in - all / static_cast<double>(q.phi());
}

}  // namespace

TEST_CASE("epsilon examples") {
  Fixture fx(-1, 400);
  const auto& g = fx.ring;
  const ArithFn one = fx.fn(Builtin::one);
  const ResidueSystem q1i(g.element(1, 1));
  CHECK(q1i.phi() == 1);
  CHECK(std::abs(epsilon(one, 5, q1i, g.one())) == 0.0);

  const ResidueSystem q3(g.element(3, 0));
  for (std::size_t i = 0; i < 9; ++i) {
    if (!q3.coprime(i)) continue;
    const AlgInt gamma = q3.representative(i);
    CHECK(std::abs(epsilon(one, 5, q3, gamma) - brute_epsilon(one, 25, q3, gamma)) < 1e-12);
  }
  CHECK_THROWS_AS(epsilon(one, 5, q3, g.element(3, 0)), Error);
  CHECK_THROWS_AS(epsilon(one, 25, q3, g.one()), Error);  // M^2 beyond the table
}

TEST_CASE("epsilon is invariant under the unit action on gamma for unit-invariant f") {
  std::mt19937_64 rng(2);
  for (Int d : {-1, -3, -7}) {
    Fixture fx(d, 400);
    const ArithFn f = fx.random(rng, true);
    for (const AlgInt& q : canonical_classes(fx.ring, 2, 30)) {
      const ResidueSystem rs(q);
      for (std::size_t i = 0; i < static_cast<std::size_t>(rs.norm()); ++i) {
        if (!rs.coprime(i)) continue;
        const AlgInt gamma = rs.representative(i);
        const auto e = epsilon(f, 17, rs, gamma);
        for (const AlgInt& u : fx.ring.units()) CHECK(std::abs(epsilon(f, 17, rs, u * gamma) - e) < 1e-9);
      }
    }
  }
}

TEST_CASE("epsilon decomposition: the sum over coprime classes vanishes") {
  std::mt19937_64 rng(4);
  Fixture fx(-2, 600);
  const ArithFn f = fx.random(rng, true);
  for (const AlgInt& q : canonical_classes(fx.ring, 2, 40)) {
    const ResidueSystem rs(q);
    std::complex<double> s = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(rs.norm()); ++i)
      if (rs.coprime(i)) s += epsilon(f, 23, rs, rs.representative(i));
    CHECK(std::abs(s) <= 1e-9);
  }
}

TEST_CASE("epsilon_sweep examples") {
  Fixture fx(-1, 400);
  const auto& g = fx.ring;
  const ArithFn one = fx.fn(Builtin::one);
  const ResidueSystem q3(g.element(3, 0));
  const SweepResult s = epsilon_sweep(one, 10, q3);
  CHECK(s.max_abs == reference::epsilon_sweep(one, 10, q3));
  CHECK(s.max_abs > 0.0);
  CHECK(q3.coprime(q3.index(s.argmax_gamma)));
  CHECK(std::abs(std::abs(epsilon(one, std::sqrt(double(s.argmax_norm)), q3, s.argmax_gamma)) - s.max_abs) < 1e-12);

  CHECK(epsilon_sweep(fx.zero(), 10, q3).max_abs == 0.0);
  CHECK(epsilon_sweep(one, 10, ResidueSystem(g.element(1, 1))).max_abs == 0.0);
  CHECK_THROWS_AS(epsilon_sweep(one, 21, q3), Error);
}

TEST_CASE("epsilon_sweep equals the brute-force maximum") {
  std::mt19937_64 rng(6);
  for (Int d : {-1, -3, -19}) {
    Fixture fx(d, 200);
    for (bool complex : {false, true}) {
      const ArithFn f = fx.random(rng, complex);
      for (const AlgInt& q : canonical_classes(fx.ring, 2, 30)) {
        const ResidueSystem rs(q);
        const double fast = epsilon_sweep(f, 14, rs).max_abs;
        const double slow = reference::epsilon_sweep(f, 14, rs);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("lod_scan examples") {
  Fixture fx(-1, 2500);
  LodScanConfig cfg;
  cfg.theta = 0.4;
  cfg.N_grid = {10, 20, 50};
  for (const LodTable& t : lod_scan(fx.zero(), cfg)) CHECK(t.E == 0.0);

  const ArithFn pi = fx.fn(Builtin::prime_indicator);
  const auto tables = lod_scan(pi, cfg);
  const auto ref = reference::lod_scan(pi, cfg);
  REQUIRE(tables.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const LodTable& t = tables[i];
    CHECK(t.count == count_region(NormRegion::a0(fx.ring, cfg.N_grid[i])));
    CHECK(t.Q == doctest::Approx(std::pow(double(t.count), 0.4)));
    CHECK(t.records.size() == canonical_classes(fx.ring, 2, Int(std::floor(t.Q))).size());
    double sum = 0;
    for (const auto& r : t.records) {
      sum += r.sweep.max_abs;
      const ResidueSystem rs(r.q);
      CHECK(rs.coprime(rs.index(r.sweep.argmax_gamma)));
    }
    CHECK(t.E == doctest::Approx(sum).epsilon(1e-12));
    CHECK(t.E == ref[i].E);
    CHECK(t.normalized() == t.E / double(t.count));
  }

  cfg.theta = 0.05;
  cfg.N_grid = {3};
  const auto deg = lod_scan(pi, cfg);
  CHECK(deg[0].degenerate);
  CHECK(deg[0].records.empty());
  CHECK(deg[0].E == 0.0);

  cfg.N_grid = {20, 10};
  CHECK_THROWS_AS(lod_scan(pi, cfg), Error);
}

TEST_CASE("closed form for the unit-class indicator") {
  Fixture fx(-3, 900);
  const ArithFn e = convolve(fx.fn(Builtin::one), fx.fn(Builtin::moebius), fx.table);
  LodScanConfig cfg;
  cfg.theta = 0.5;
  cfg.N_grid = {30};
  const auto t = lod_scan(e, cfg)[0];
  for (const auto& rec : t.records) {
    const ResidueSystem rs(rec.q);
    // Only the w_K units carry mass.
    std::vector<int> hits(static_cast<std::size_t>(rs.norm()), 0);
    for (const AlgInt& u : fx.ring.units()) ++hits[rs.index(u)];
    const double mean = double(fx.ring.w_K()) / double(rs.phi());
    double best = 0;
    for (std::size_t i = 0; i < hits.size(); ++i)
      if (rs.coprime(i)) best = std::max(best, std::abs(hits[i] - mean));
    CHECK(rec.sweep.max_abs == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("Siegel-Walfisz sums") {
  Fixture fx(-1, 10'000);
  const auto& g = fx.ring;
  const ArithFn one = fx.fn(Builtin::one);
  const auto m = make_modulus(g.element(3, 0));
  const auto chars = characters(m);

  Int coprime = 0;
  const auto pts = enumerate_region(NormRegion::a0(g, 30));
  for (const AlgInt& a : pts) coprime += m->residues().coprime(m->residues().index(a));
  CHECK(sw_sum(one, 30, chars[0]) == std::complex<double>(double(coprime)));
  CHECK_THROWS_AS(sw_bound_ratio(one, 30, chars[0], 3.0), Error);

  for (std::size_t k = 1; k < chars.size(); ++k) {
    std::complex<double> direct = 0;
    for (const AlgInt& a : pts) direct += chars[k](a);
    CHECK(std::abs(sw_sum(one, 30, chars[k]) - direct) < 1e-9);
    CHECK(std::abs(direct) < 0.05 * double(pts.size()));
  }

  const ArithFn pi = fx.fn(Builtin::prime_indicator);
  const double count = double(count_region(NormRegion::a0(g, 100)));
  for (std::size_t k = 1; k < chars.size(); ++k) CHECK(std::abs(sw_sum(pi, 100, chars[k])) <= count / std::log(100.0));

  const SwReport rep = sw_check(pi, 100, 1.5);
  CHECK(rep.cancellation_exponent == 4.5);
  CHECK(rep.moduli == Int(canonical_classes(g, 2, Int(std::floor(std::pow(std::log(100.0), 1.5)))).size()));
  CHECK(rep.characters > 0);
  CHECK(rep.normalized == doctest::Approx(rep.max_abs_sum * std::pow(std::log(100.0), 4.5) / count));
  CHECK(sw_check(pi, 100, 1.5, 1.5).cancellation_exponent == 1.5);
}

TEST_CASE("convolution experiment with zero functions") {
  Fixture fx(-1, 400);
  LodScanConfig cfg;
  cfg.N_grid = {5, 10, 20};
  const auto rep = convolution_experiment(fx.zero(), fx.zero(), fx.table, cfg);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& r : rep.rows) {
    CHECK(r.E_f == 0.0);
    CHECK(r.E_g == 0.0);
    CHECK(r.E_conv == 0.0);
  }
  CHECK_FALSE(rep.f_decays);
  CHECK(strictly_decreasing({3, 2, 1}));
  CHECK_FALSE(strictly_decreasing({3, 3, 1}));
}

TEST_CASE("large sieve") {
  const auto& g = make_ring(-1);
  const NormRegion region = NormRegion::a0(g, 50);
  const std::vector<Coefficient> zero{{g.element(3, 4), 0.0}};
  const auto z = large_sieve_ratio(zero, region, 10, 100);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.ratio == 0.0);

  // Single coefficient at 1: lhs = sum_q #primitive(q) / phi(q).
  const std::vector<Coefficient> single{{g.one(), 1.0}};
  const auto s = large_sieve_ratio(single, region, 1, 50);
  double expect = 0;
  Int prim = 0;
  for (const AlgInt& q : canonical_classes(g, 2, 50)) {
    const auto m = make_modulus(q);
    const auto p = primitive_characters(m).size();
    prim += Int(p);
    expect += double(p) / double(m->phi());
  }
  CHECK(s.lhs == doctest::Approx(expect).epsilon(1e-12));
  CHECK(s.primitive_characters == prim);
  const double count = double(count_region(region));
  CHECK(s.rhs == doctest::Approx(count / 1.0 + 50.0));

  // A tabulated 1/x reproduces the inverse-weight right side.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> sign(0, 1);
  std::vector<Coefficient> cs;
  for (const AlgInt& a : enumerate_region(NormRegion::a0(g, 12))) cs.push_back({a, sign(rng) ? 1.0 : -1.0});
  TabulatedWeight tw;
  for (double x = 5; x <= 60.0001; x += 0.01) {
    tw.x.push_back(x);
    tw.w.push_back(1.0 / x);
  }
  const NormRegion r12 = NormRegion::a0(g, 12);
  const auto inv = large_sieve_ratio(cs, r12, 10, 50);
  const auto tab = large_sieve_ratio(cs, r12, 10, 50, tw);
  CHECK(inv.lhs >= 0.0);
  CHECK(tab.lhs == doctest::Approx(inv.lhs).epsilon(1e-4));
  CHECK(tab.rhs == doctest::Approx(inv.rhs).epsilon(1e-4));

  CHECK_THROWS_AS(large_sieve_ratio(single, region, 10, 10.5), Error);
  TabulatedWeight up{{1, 100}, {1, 2}};
  CHECK_THROWS_AS(large_sieve_ratio(single, region, 10, 50, up), Error);
  const std::vector<Coefficient> outside{{g.element(60, 0), 1.0}};
  CHECK_THROWS_AS(large_sieve_ratio(outside, region, 10, 50), Error);
}

TEST_CASE("large sieve vanishes on coefficients orthogonal to every primitive character") {
  const auto& g = make_ring(-1);
  // Moduli of norm in (1, 2]: only 1+i, which has no primitive characters.
  const std::vector<Coefficient> cs{{g.element(2, 1), 1.0}, {g.element(1, 1), 2.0}};
  const auto r = large_sieve_ratio(cs, NormRegion::a0(g, 10), 1, 2);
  CHECK(r.lhs == 0.0);
  CHECK(r.primitive_characters == 0);
}

TEST_CASE("Mertens sums") {
  const auto& g = make_ring(-1);
  CHECK(mertens_sums(g, 3).ideal_sum == 1.5);
  CHECK(mertens_sums(g, 2).prime_sum == 0.5);
  const auto m = mertens_sums(g, 1000);
  CHECK(m.ideal_ratio == doctest::Approx(m.ideal_sum / std::log(1000.0)));
  CHECK_THROWS_AS(mertens_sums(g, 1), Error);
  CHECK_THROWS_AS(mertens_sums(g, 1000, 100), Error);
}
