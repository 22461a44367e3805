#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "quadlod/arith.hpp"
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

  ArithFn random(std::mt19937_64& rng, bool complex, bool integer = false) const {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> k(-3, 3);
    std::vector<std::complex<double>> v(idx->size());
    for (auto& z : v) z = integer ? std::complex<double>(k(rng), 0) : std::complex<double>(u(rng), complex ? u(rng) : 0.0);
    return ArithFn(idx, std::move(v), "random");
  }
};

double max_diff(const ArithFn& a, const ArithFn& b) {
  double m = 0;
  for (std::size_t i = 0; i < std::min(a.values().size(), b.values().size()); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("class index lookup") {
  Fixture fx(-3, 500);
  const ClassIndex& idx = *fx.idx;
  CHECK(idx.size() == canonical_classes(fx.ring, 1, 500).size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (const AlgInt& u : fx.ring.units()) CHECK(idx.class_of(u * idx.element(i)) == i);
  CHECK(idx.class_of(30, 0) == ClassIndex::npos);
  CHECK(idx.prefix(1) == 1);
  CHECK(idx.prefix(0) == 0);
}

TEST_CASE("builtin examples") {
  Fixture fx(-1, 2000);
  const auto& g = fx.ring;
  const ArithFn mu = fx.fn(Builtin::moebius);
  CHECK(mu.at(g.one()) == 1.0);
  CHECK(mu.at(g.element(1, 1)) == -1.0);
  CHECK(mu.at(g.element(0, 2)) == 0.0);
  CHECK(fx.fn(Builtin::tau).at(g.element(2, 0)) == 3.0);
  CHECK(fx.fn(Builtin::prime_indicator).at(g.element(3, 0)) == 1.0);
  CHECK(fx.fn(Builtin::lambda).at(g.element(3, 0)).real() == doctest::Approx(std::log(9.0)));
  CHECK(fx.fn(Builtin::log_norm).at(g.element(2, 1)).real() == doctest::Approx(std::log(5.0)));
  CHECK(parse_builtin("mu") == Builtin::moebius);
  CHECK(parse_builtin("prime") == Builtin::prime_indicator);
  CHECK(parse_builtin("von_mangoldt") == Builtin::lambda);
  CHECK_THROWS_AS(parse_builtin("nope"), Error);
  CHECK_THROWS_AS(fx.fn(Builtin::one).at(g.element(100, 0)), Error);
  CHECK_THROWS_AS(tabulate(Builtin::moebius, std::make_shared<ClassIndex>(g, 5000), fx.table), Error);
}

TEST_CASE("Moebius inversion, 1*1 = tau, mu*log = Lambda") {
  Fixture fx(-1, 10'000);
  const ArithFn one = fx.fn(Builtin::one), mu = fx.fn(Builtin::moebius);
  const ArithFn e = convolve(mu, one, fx.table);
  CHECK(e[0] == 1.0);
  for (std::size_t i = 1; i < e.values().size(); ++i) REQUIRE(e[i] == 0.0);
  const ArithFn tau = fx.fn(Builtin::tau);
  const ArithFn oo = convolve(one, one, fx.table);
  for (std::size_t i = 0; i < tau.values().size(); ++i) REQUIRE(oo[i] == tau[i]);
  CHECK(max_diff(convolve(mu, fx.fn(Builtin::log_norm), fx.table), fx.fn(Builtin::lambda)) <= 1e-9);
}

TEST_CASE("convolution matches the pair-loop reference and is a commutative bilinear product") {
  std::mt19937_64 rng(13);
  Fixture fx(-7, 1000);
  const ArithFn f = fx.random(rng, true), g = fx.random(rng, true), h = fx.random(rng, true);
  CHECK(max_diff(convolve(f, g, fx.table), reference::convolve(f, g)) <= 1e-9);
  CHECK(max_diff(convolve(f, g, fx.table), convolve(g, f, fx.table)) <= 1e-9);
  CHECK(max_diff(convolve(convolve(f, g, fx.table), h, fx.table), convolve(f, convolve(g, h, fx.table), fx.table)) <=
        1e-9);
  std::vector<std::complex<double>> sum(f.values().size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = g[i] + h[i];
  const ArithFn gh(fx.idx, sum, "g+h");
  const ArithFn lhs = convolve(f, gh, fx.table);
  const ArithFn a = convolve(f, g, fx.table), b = convolve(f, h, fx.table);
  double m = 0;
  for (std::size_t i = 0; i < sum.size(); ++i) m = std::max(m, std::abs(lhs[i] - a[i] - b[i]));
  CHECK(m <= 1e-9);
}

TEST_CASE("Moebius inversion for integer-valued f") {
  std::mt19937_64 rng(17);
  Fixture fx(-2, 3000);
  const ArithFn f = fx.random(rng, false, true);
  const ArithFn back = convolve(convolve(f, fx.fn(Builtin::one), fx.table), fx.fn(Builtin::moebius), fx.table);
  for (std::size_t i = 0; i < f.values().size(); ++i) REQUIRE(back[i] == f[i]);
}

TEST_CASE("convolution of different bounds lives on the smaller index") {
  const auto& r = make_ring(-1);
  const PrimeTable t = sieve_primes(r, 500);
  const auto a = tabulate(Builtin::one, std::make_shared<ClassIndex>(r, 500), t);
  const auto b = tabulate(Builtin::one, std::make_shared<ClassIndex>(r, 200), t);
  CHECK(convolve(a, b, t).norm_bound() == 200);
  const auto other = tabulate(Builtin::one, std::make_shared<ClassIndex>(make_ring(-2), 100), sieve_primes(make_ring(-2), 100));
  CHECK_THROWS_AS(convolve(a, other, t), Error);
}

TEST_CASE("Dirichlet series") {
  const auto& g = make_ring(-1);
  // zeta(2) * L(2, chi_-4) = pi^2/6 * Catalan.
  const double expect = M_PI * M_PI / 6.0 * 0.915965594177219015;
  const auto idx = std::make_shared<ClassIndex>(g, 1'000'000);
  const ArithFn one = tabulate([](const AlgInt&) { return std::complex<double>(1.0); }, idx, "one");
  CHECK(std::abs(dirichlet_series(one, 2.0, 1'000'000) - expect) < 1e-3);
  CHECK(std::abs(expect - 1.5067) < 1e-4);
  CHECK(dirichlet_series(one, 2.0, 1) == std::complex<double>(1.0));
  CHECK_THROWS_AS(dirichlet_series(one, 2.0, 2'000'000), Error);

  Fixture fx(-1, 10'000);
  const ArithFn e = convolve(fx.fn(Builtin::moebius), fx.fn(Builtin::one), fx.table);
  CHECK(dirichlet_series(e, {1.3, 4.0}, 10'000) == std::complex<double>(1.0));

  // Homomorphism at Re s = 3 up to the truncation tail.
  std::mt19937_64 rng(31);
  const ArithFn f = fx.random(rng, true), h = fx.random(rng, true);
  const std::complex<double> s(3.0, 0.5);
  const auto lhs = dirichlet_series(convolve(f, h, fx.table), s, 10'000);
  const auto rhs = dirichlet_series(f, s, 10'000) * dirichlet_series(h, s, 10'000);
  CHECK(std::abs(lhs - rhs) < 1e-2);
}

TEST_CASE("weighted log sums") {
  Fixture fx(-1, 400);
  const auto& g = fx.ring;
  const ArithFn one = fx.fn(Builtin::one);
  double brute = 0;
  int terms = 0;
  for (Int x = -2; x <= 2; ++x)
    for (Int y = -2; y <= 2; ++y) {
      const Int n = x * x + y * y;
      if (n < 1 || n > 4) continue;
      ++terms;
      CHECK(std::log(4.0 / n) >= 0.0);
      brute += std::log(4.0 / n);
    }
  CHECK(terms == 12);
  CHECK(weighted_log_sum(one, 2, 1).real() == doctest::Approx(brute));
  CHECK(weighted_log_sum(one, 1, 3) == std::complex<double>(0.0));

  const ArithFn pi = fx.fn(Builtin::prime_indicator);
  double b2 = 0;
  for (Int x = -10; x <= 10; ++x)
    for (Int y = -10; y <= 10; ++y) {
      const Int n = x * x + y * y;
      if (n > 1 && n <= 100 && is_prime(g.element(x, y))) b2 += std::pow(std::log(100.0 / n), 2);
    }
  CHECK(weighted_log_sum(pi, 10, 2).real() == doctest::Approx(b2).epsilon(1e-12));
}

TEST_CASE("unit folding identity") {
  Fixture fx(-1, 400);
  const UnitFold u = unit_fold_check(fx.fn(Builtin::one), 5);
  CHECK(u.element_sum == std::complex<double>(80.0));
  CHECK(u.folded_class_sum == std::complex<double>(80.0));
  CHECK(fx.idx->prefix(25) == 20);

  Fixture e(-3, 100);
  const UnitFold u3 = unit_fold_check(e.fn(Builtin::one), 1);
  CHECK(u3.element_sum == std::complex<double>(6.0));
  CHECK(u3.folded_class_sum == std::complex<double>(6.0));

  std::mt19937_64 rng(37);
  const ArithFn f = fx.random(rng, true);
  const UnitFold r = unit_fold_check(f, 20);
  CHECK(std::abs(r.element_sum - r.folded_class_sum) <= 1e-12);
}

TEST_CASE("growth diagnostic") {
  Fixture fx(-1, 1000);
  const ArithFn tau = fx.fn(Builtin::tau);
  CHECK(growth_ratio(fx.fn(Builtin::one), tau, 2.0) == doctest::Approx(1.0));
  CHECK(growth_ratio(tau, tau, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("CSV round trip") {
  std::mt19937_64 rng(43);
  Fixture fx(-11, 300);
  const ArithFn f = fx.random(rng, true);
  std::stringstream ss;
  write_csv(f, ss);
  const std::string text = ss.str();
  CHECK(text.rfind("# quadlod-arithfn d=-11 norm_bound=300 name=random\n", 0) == 0);
  const ArithFn back = read_csv(ss);
  CHECK(back.norm_bound() == 300);
  CHECK(&back.ring() == &fx.ring);
  CHECK(back.name() == "random");
  REQUIRE(back.values().size() == f.values().size());
  for (std::size_t i = 0; i < f.values().size(); ++i) CHECK(back[i] == f[i]);
  std::stringstream bad("garbage\n");
  CHECK_THROWS_AS(read_csv(bad), Error);
}
