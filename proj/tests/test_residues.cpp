#include <complex>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "quadlod/region.hpp"
#include "quadlod/residues.hpp"

using namespace quadlod;

namespace {

// Coprimality by brute force: gcd of representative and q is a unit.
std::vector<AlgInt> coprime_reps(const ResidueSystem& rs) {
  std::vector<AlgInt> out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(rs.norm()); ++i) {
    const AlgInt r = rs.representative(i);
    if (!r.is_zero() && gcd(r, rs.generator()).is_unit()) out.push_back(r);
  }
  return out;
}

Int brute_order(const ResidueSystem& rs, const AlgInt& a) {
  AlgInt p = a;
  Int k = 1;
  while (rs.index(p) != rs.one_index()) {
    p = p * a;
    p = rs.representative(rs.index(p));
    ++k;
  }
  return k;
}

std::vector<AlgInt> brute_divisors(const AlgInt& q) {
  std::vector<AlgInt> out;
  for (const AlgInt& c : canonical_classes(q.ring(), 1, q.norm()))
    if (q.norm() % c.norm() == 0 && divides(c, q)) out.push_back(c);
  return out;
}

// Smallest-norm divisor f with chi == 1 on coprime residues congruent to 1 mod f.
AlgInt brute_conductor(const DirichletCharacter& chi) {
  const ResidueSystem& rs = chi.modulus().residues();
  const auto reps = coprime_reps(rs);
  for (const AlgInt& f : brute_divisors(rs.generator())) {
    bool trivial = true;
    for (const AlgInt& a : reps)
      if (divides(f, a - a.ring().one()) && std::abs(chi(a) - 1.0) > 1e-9) trivial = false;
    if (trivial) return f;
  }
  return rs.generator();
}

}  // namespace

TEST_CASE("residue systems are complete and incongruent") {
  for (Int d : kSupportedD) {
    const auto& r = make_ring(d);
    for (const AlgInt& q : canonical_classes(r, 2, 60)) {
      const ResidueSystem rs(q);
      CHECK(rs.norm() == q.norm());
      std::set<std::size_t> seen;
      for (std::size_t i = 0; i < static_cast<std::size_t>(rs.norm()); ++i) {
        const AlgInt rep = rs.representative(i);
        CHECK(rs.index(rep) == i);
        seen.insert(i);
        for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(divides(q, rep - rs.representative(j)));
      }
      CHECK(static_cast<Int>(coprime_reps(rs).size()) == rs.phi());
      Int coprime = 0;
      for (std::size_t i = 0; i < static_cast<std::size_t>(rs.norm()); ++i) coprime += rs.coprime(i);
      CHECK(coprime == rs.phi());
    }
  }
  CHECK_THROWS_AS(ResidueSystem(make_ring(-1).one()), Error);
  CHECK_THROWS_AS(ResidueSystem(make_ring(-1).element(0, 0)), Error);
}

TEST_CASE("make_modulus examples") {
  const auto& g = make_ring(-1);
  const auto m3 = make_modulus(g.element(3, 0));
  CHECK(m3->norm() == 9);
  CHECK(m3->phi() == 8);
  Int max_order = 0;
  for (const AlgInt& a : coprime_reps(m3->residues())) max_order = std::max(max_order, brute_order(m3->residues(), a));
  CHECK(max_order == 8);
  CHECK(m3->exponent() == 8);

  const auto m1i = make_modulus(g.element(1, 1));
  CHECK(m1i->norm() == 2);
  CHECK(m1i->phi() == 1);

  const auto m5 = make_modulus(g.element(5, 0));
  CHECK(m5->phi() == 16);
  std::map<Int, int> orders;
  for (const AlgInt& a : coprime_reps(m5->residues())) ++orders[brute_order(m5->residues(), a)];
  CHECK(orders == std::map<Int, int>{{1, 1}, {2, 3}, {4, 12}});  // Z/4 x Z/4
  CHECK(m5->exponent() == 4);
  std::vector<Int> o(m5->orders().begin(), m5->orders().end());
  std::sort(o.begin(), o.end());
  CHECK(o == std::vector<Int>{4, 4});

  CHECK_THROWS_AS(make_modulus(g.one()), Error);
  ResidueLimits lim;
  lim.max_norm = 10;
  CHECK_THROWS_AS(make_modulus(g.element(4, 0), lim), Error);
  // Associates produce the same canonical modulus.
  CHECK(make_modulus(g.element(0, 3))->generator() == g.element(3, 0));
}

TEST_CASE("euler_phi examples and product formula") {
  const auto& g = make_ring(-1);
  CHECK(euler_phi(*make_modulus(g.element(3, 0))) == 8);
  CHECK(euler_phi(*make_modulus(pow(g.element(1, 1), 3))) == 4);
  for (Int d : kSupportedD) {
    const auto& r = make_ring(d);
    for (const AlgInt& q : canonical_classes(r, 2, 300)) {
      const ResidueSystem rs(q);
      double expect = static_cast<double>(q.norm());
      for (const auto& [p, e] : rs.prime_divisors()) expect *= 1.0 - 1.0 / static_cast<double>(p.norm());
      CHECK(static_cast<double>(rs.phi()) == doctest::Approx(expect));
      if (rs.prime_divisors().size() == 1 && rs.prime_divisors()[0].second == 1) CHECK(rs.phi() == q.norm() - 1);
    }
  }
}

TEST_CASE("unit group decomposition") {
  for (Int d : {-1, -3, -7, -163}) {
    const auto& r = make_ring(d);
    for (const AlgInt& q : canonical_classes(r, 2, 200)) {
      const auto m = make_modulus(q);
      Int prod = 1;
      for (std::size_t i = 0; i < m->orders().size(); ++i) {
        prod *= m->orders()[i];
        CHECK(brute_order(m->residues(), m->residues().representative(m->generators()[i])) == m->orders()[i]);
      }
      CHECK(prod == m->phi());
      // dlog inverts the decomposition.
      for (std::size_t u : m->unit_residues()) {
        const auto e = m->dlog(u);
        std::size_t acc = m->residues().one_index();
        for (std::size_t i = 0; i < e.size(); ++i)
          for (Int k = 0; k < e[i]; ++k) acc = m->multiply(acc, m->generators()[i]);
        CHECK(acc == u);
      }
    }
  }
}

TEST_CASE("characters: counts, distinctness, multiplicativity") {
  const auto& g = make_ring(-1);
  CHECK(characters(make_modulus(g.element(3, 0))).size() == 8);
  const auto c1i = characters(make_modulus(g.element(1, 1)));
  CHECK(c1i.size() == 1);
  CHECK(c1i[0].is_principal());

  std::mt19937_64 rng(41);
  for (Int d : {-1, -3, -2}) {
    const auto& r = make_ring(d);
    for (const AlgInt& q : canonical_classes(r, 2, 60)) {
      const auto m = make_modulus(q);
      const auto chars = characters(m);
      CHECK(static_cast<Int>(chars.size()) == m->phi());
      CHECK(chars[0].is_principal());
      std::set<std::vector<Int>> tables;
      for (const auto& chi : chars) tables.insert(chi.phase_table());
      CHECK(tables.size() == chars.size());
      const auto reps = coprime_reps(m->residues());
      std::uniform_int_distribution<std::size_t> pick(0, reps.size() - 1);
      for (const auto& chi : chars) {
        for (int i = 0; i < 30; ++i) {
          const AlgInt a = reps[pick(rng)], b = reps[pick(rng)];
          CHECK(std::abs(chi(a * b) - chi(a) * chi(b)) < 1e-12);
          CHECK(std::abs(std::abs(chi(a)) - 1.0) < 1e-12);
        }
        for (std::size_t i = 0; i < static_cast<std::size_t>(m->norm()); ++i)
          if (!m->residues().coprime(i)) CHECK(chi.value(i) == std::complex<double>(0.0, 0.0));
      }
    }
  }
}

TEST_CASE("orthogonality on small moduli") {
  const auto& g = make_ring(-1);
  for (const AlgInt& q : canonical_classes(g, 2, 50)) {
    const auto m = make_modulus(q);
    const auto chars = characters(m);
    for (std::size_t i = 0; i < chars.size(); ++i)
      for (std::size_t j = 0; j < chars.size(); ++j) {
        std::complex<double> s = 0;
        for (std::size_t u : m->unit_residues()) s += chars[i].value(u) * std::conj(chars[j].value(u));
        CHECK(std::abs(s - (i == j ? double(m->phi()) : 0.0)) < 1e-9);
      }
  }
}

TEST_CASE("conductors") {
  const auto& g = make_ring(-1);
  for (const auto& chi : characters(make_modulus(g.element(3, 0)))) {
    if (chi.is_principal()) {
      CHECK(chi.conductor() == g.one());
      CHECK_FALSE(chi.is_primitive());
    } else {
      CHECK(chi.conductor() == g.element(3, 0));
      CHECK(chi.is_primitive());
    }
  }
  // Characters mod (1+i)*3 that factor through mod 3 have conductor 3.
  const auto m = make_modulus(g.element(1, 1) * g.element(3, 0));
  const auto reps = coprime_reps(m->residues());
  int induced = 0;
  for (const auto& chi : characters(m)) {
    if (chi.is_principal()) continue;
    bool through3 = true;
    for (const AlgInt& a : reps)
      for (const AlgInt& b : reps)
        if (divides(g.element(3, 0), a - b) && std::abs(chi(a) - chi(b)) > 1e-9) through3 = false;
    if (through3) {
      ++induced;
      CHECK(chi.conductor() == g.element(3, 0));
    }
  }
  CHECK(induced == 7);

  for (Int d : {-1, -3, -7}) {
    const auto& r = make_ring(d);
    for (const AlgInt& q : canonical_classes(r, 2, 100))
      for (const auto& chi : characters(make_modulus(q))) CHECK(chi.conductor() == brute_conductor(chi));
  }
}

TEST_CASE("primitive character counts") {
  const auto& g = make_ring(-1);
  CHECK(primitive_characters(make_modulus(g.element(3, 0))).size() == 7);
  CHECK(primitive_characters(make_modulus(g.element(9, 0))).size() == 64);
  CHECK(primitive_characters(make_modulus(g.element(1, 1))).empty());
  // Prime modulus: every non-principal character is primitive.
  for (Int d : kSupportedD) {
    const auto& r = make_ring(d);
    for (const AlgInt& q : canonical_classes(r, 2, 50)) {
      const ResidueSystem rs(q);
      if (rs.prime_divisors().size() == 1 && rs.prime_divisors()[0].second == 1)
        CHECK(static_cast<Int>(primitive_characters(make_modulus(q)).size()) == rs.phi() - 1);
    }
  }
}

TEST_CASE("CRT consistency") {
  const auto& g = make_ring(-1);
  const AlgInt q1 = g.element(2, 1), q2 = g.element(3, 0);
  const auto m = make_modulus(q1 * q2);
  CHECK(m->phi() == make_modulus(q1)->phi() * make_modulus(q2)->phi());
  CHECK(primitive_characters(m).size() ==
        primitive_characters(make_modulus(q1)).size() * primitive_characters(make_modulus(q2)).size());
}
