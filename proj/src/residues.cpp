#include "quadlod/residues.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "quadlod/primes.hpp"

namespace quadlod {

namespace {

std::vector<std::pair<Int, int>> factor_integer(Int n);

std::vector<std::pair<AlgInt, int>> factor_by_trial_division(const AlgInt& q) {
  std::vector<std::pair<AlgInt, int>> out;
  AlgInt rest = q;
  for (const auto& [p, unused] : factor_integer(q.norm())) {
    for (const AlgInt& pi : primes_above(q.ring(), p)) {
      int e = 0;
      while (divides(pi, rest)) {
        rest = exact_quotient(rest, pi);
        ++e;
      }
      if (e > 0) out.emplace_back(pi, e);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first.key() < b.first.key(); });
  return out;
}

std::vector<std::pair<Int, int>> factor_integer(Int n) {
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

}  // namespace

// --- ResidueSystem ----------------------------------------------------------

ResidueSystem::ResidueSystem(const AlgInt& q) : q_(q) {
  if (q.is_zero() || q.norm() < 2)
    throw Error(ErrorCode::zero_or_unit_modulus, "modulus " + q.to_string() + " must have norm >= 2");
  lattice_ = ideal_lattice(q);
  prime_divisors_ = factor_by_trial_division(q);
  coprime_.assign(static_cast<std::size_t>(norm()), 1);
  for (std::size_t idx = 0; idx < coprime_.size(); ++idx) {
    const AlgInt r = representative(idx);
    for (const auto& [pi, e] : prime_divisors_)
      if (divides(pi, r)) {
        coprime_[idx] = 0;
        break;
      }
  }
  phi_ = std::count(coprime_.begin(), coprime_.end(), std::uint8_t{1});
}

AlgInt ResidueSystem::representative(std::size_t idx) const {
  const auto c = static_cast<std::size_t>(lattice_.c);
  return ring().element(static_cast<Int>(idx / c), static_cast<Int>(idx % c));
}

// --- Modulus ----------------------------------------------------------------

Modulus::Modulus(const AlgInt& q) : residues_(q) {
  for (std::size_t i = 0; i < static_cast<std::size_t>(norm()); ++i)
    if (residues_.coprime(i)) unit_residues_.push_back(i);
  decompose_unit_group();
  build_divisors();
}

std::size_t Modulus::multiply(std::size_t i, std::size_t j) const {
  return residues_.index(residues_.representative(i) * residues_.representative(j));
}

std::span<const Int> Modulus::dlog(std::size_t idx) const {
  const std::size_t rank = orders_.size();
  if (!residues_.coprime(idx)) return {};
  return std::span<const Int>(dlog_).subspan(idx * rank, rank);
}

void Modulus::decompose_unit_group() {
  const std::size_t size = static_cast<std::size_t>(norm());
  const std::size_t one = residues_.one_index();
  auto power = [&](std::size_t x, Int k) {
    std::size_t result = one;
    std::size_t b = x;
    while (k > 0) {
      if (k & 1) result = multiply(result, b);
      k >>= 1;
      if (k) b = multiply(b, b);
    }
    return result;
  };

  // Basis of each Sylow p-subgroup: repeatedly take x of maximal order
  // p^m modulo the subgroup H built so far, then correct x by an element
  // of H so that x^(p^m) = 1 and <H, x> = H x <x>.
  const Int phi = residues_.phi();
  for (const auto& [p, a] : factor_integer(phi)) {
    Int pa = 1;
    for (int i = 0; i < a; ++i) pa *= p;
    const Int cofactor = phi / pa;

    std::vector<std::uint8_t> in_sylow(size, 0);
    std::vector<std::size_t> sylow;
    for (std::size_t u : unit_residues_) {
      const std::size_t s = power(u, cofactor);
      if (!in_sylow[s]) {
        in_sylow[s] = 1;
        sylow.push_back(s);
      }
    }

    std::vector<std::size_t> basis;
    std::vector<Int> basis_orders;
    std::vector<std::int64_t> position(size, -1);
    std::vector<std::vector<Int>> coords{{}};
    std::vector<std::size_t> members{one};
    position[one] = 0;

    while (members.size() < sylow.size()) {
      std::size_t best = one;
      Int best_order = 1;
      for (std::size_t x : sylow) {
        Int order = 1;
        std::size_t y = x;
        while (position[y] < 0) {
          y = power(y, p);
          order *= p;
        }
        if (order > best_order) {
          best = x;
          best_order = order;
        }
      }
      const std::vector<Int>& c = coords[static_cast<std::size_t>(position[power(best, best_order)])];
      std::size_t corrected = best;
      for (std::size_t i = 0; i < basis.size(); ++i) {
        if (c[i] % best_order != 0) throw Error(ErrorCode::invalid_argument, "unit group decomposition failed");
        const Int shift = floor_mod(-(c[i] / best_order), basis_orders[i]);
        corrected = multiply(corrected, power(basis[i], shift));
      }
      basis.push_back(corrected);
      basis_orders.push_back(best_order);

      std::vector<std::size_t> grown;
      std::vector<std::vector<Int>> grown_coords;
      for (std::size_t m = 0; m < members.size(); ++m) {
        std::size_t e = members[m];
        for (Int j = 0; j < best_order; ++j) {
          auto v = coords[m];
          v.push_back(j);
          grown.push_back(e);
          grown_coords.push_back(std::move(v));
          e = multiply(e, corrected);
        }
      }
      std::fill(position.begin(), position.end(), -1);
      for (std::size_t m = 0; m < grown.size(); ++m) position[grown[m]] = static_cast<std::int64_t>(m);
      members = std::move(grown);
      coords = std::move(grown_coords);
    }
    generators_.insert(generators_.end(), basis.begin(), basis.end());
    orders_.insert(orders_.end(), basis_orders.begin(), basis_orders.end());
  }

  // Global discrete-log table from the full product decomposition.
  const std::size_t rank = orders_.size();
  dlog_.assign(size * rank, -1);
  std::vector<std::size_t> members{one};
  std::vector<std::vector<Int>> coords{{}};
  for (std::size_t i = 0; i < rank; ++i) {
    std::vector<std::size_t> grown;
    std::vector<std::vector<Int>> grown_coords;
    for (std::size_t m = 0; m < members.size(); ++m) {
      std::size_t e = members[m];
      for (Int j = 0; j < orders_[i]; ++j) {
        auto v = coords[m];
        v.push_back(j);
        grown.push_back(e);
        grown_coords.push_back(std::move(v));
        e = multiply(e, generators_[i]);
      }
    }
    members = std::move(grown);
    coords = std::move(grown_coords);
  }
  if (static_cast<Int>(members.size()) != phi)
    throw Error(ErrorCode::invalid_argument, "unit group decomposition does not cover the group");
  for (std::size_t m = 0; m < members.size(); ++m)
    std::copy(coords[m].begin(), coords[m].end(), dlog_.begin() + static_cast<std::ptrdiff_t>(members[m] * rank));

  exponent_ = 1;
  for (Int n : orders_) exponent_ = std::lcm(exponent_, n);
  roots_.resize(static_cast<std::size_t>(exponent_));
  for (Int k = 0; k < exponent_; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(exponent_);
    roots_[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
  }
  // Exact values at the quarter points keep principal sums integral.
  for (Int k = 0; k < 4; ++k)
    if ((k * exponent_) % 4 == 0) {
      static constexpr std::complex<double> quarter[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      roots_[static_cast<std::size_t>(k * exponent_ / 4)] = quarter[k];
    }
}

void Modulus::build_divisors() {
  const RingDescriptor& ring = this->ring();
  std::vector<AlgInt> gens{ring.one()};
  for (const auto& [pi, e] : residues_.prime_divisors()) {
    std::vector<AlgInt> next;
    for (const AlgInt& g : gens) {
      AlgInt acc = g;
      for (int k = 0; k <= e; ++k) {
        next.push_back(canonical_associate(acc));
        acc = acc * pi;
      }
    }
    gens = std::move(next);
  }
  std::sort(gens.begin(), gens.end(), [](const AlgInt& a, const AlgInt& b) { return a.key() < b.key(); });

  for (const AlgInt& f : gens) {
    Divisor div{f, {}};
    for (std::size_t u : unit_residues_) {
      const AlgInt shifted = residues_.representative(u) - ring.one();
      if (f.norm() == 1 || divides(f, shifted)) div.kernel.push_back(static_cast<std::uint32_t>(u));
    }
    divisors_.push_back(std::move(div));
  }
}

std::shared_ptr<const Modulus> make_modulus(const AlgInt& q, const ResidueLimits& limits) {
  if (q.is_zero() || q.norm() < 2)
    throw Error(ErrorCode::zero_or_unit_modulus, "modulus " + q.to_string() + " must have norm >= 2");
  if (q.norm() > limits.max_norm)
    throw Error(ErrorCode::bounds_too_large, "modulus norm exceeds " + std::to_string(limits.max_norm));
  return std::shared_ptr<const Modulus>(new Modulus(canonical_associate(q)));
}

// --- DirichletCharacter -----------------------------------------------------

DirichletCharacter::DirichletCharacter(std::shared_ptr<const Modulus> modulus, std::vector<Int> exponents)
    : modulus_(std::move(modulus)), exponents_(std::move(exponents)) {
  const auto orders = modulus_->orders();
  if (exponents_.size() != orders.size())
    throw Error(ErrorCode::invalid_argument, "exponent vector length does not match unit group rank");
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (exponents_[i] < 0 || exponents_[i] >= orders[i])
      throw Error(ErrorCode::invalid_argument, "character exponent out of range");
}

bool DirichletCharacter::is_principal() const {
  return std::all_of(exponents_.begin(), exponents_.end(), [](Int e) { return e == 0; });
}

std::optional<Int> DirichletCharacter::phase(std::size_t residue) const {
  const auto logs = modulus_->dlog(residue);
  if (logs.empty() && !modulus_->residues().coprime(residue)) return std::nullopt;
  const Int exponent = modulus_->exponent();
  const auto orders = modulus_->orders();
  Wide k = 0;
  for (std::size_t i = 0; i < logs.size(); ++i) k += Wide(exponents_[i]) * logs[i] * (exponent / orders[i]);
  return static_cast<Int>(k % exponent);
}

std::complex<double> DirichletCharacter::value(std::size_t residue) const {
  const auto k = phase(residue);
  return k ? modulus_->root(*k) : std::complex<double>{0.0, 0.0};
}

std::vector<Int> DirichletCharacter::phase_table() const {
  std::vector<Int> out(static_cast<std::size_t>(modulus_->norm()), -1);
  for (std::size_t u : modulus_->unit_residues()) out[u] = *phase(u);
  return out;
}

AlgInt DirichletCharacter::conductor() const {
  for (const auto& div : modulus_->divisors()) {
    const bool trivial = std::all_of(div.kernel.begin(), div.kernel.end(),
                                     [&](std::uint32_t u) { return *phase(u) == 0; });
    if (trivial) return div.generator;
  }
  return modulus_->generator();
}

bool DirichletCharacter::is_primitive() const { return conductor() == modulus_->generator(); }

std::vector<DirichletCharacter> characters(const std::shared_ptr<const Modulus>& m) {
  const auto orders = m->orders();
  std::vector<DirichletCharacter> out;
  out.reserve(static_cast<std::size_t>(m->phi()));
  std::vector<Int> e(orders.size(), 0);
  for (;;) {
    out.emplace_back(m, e);
    std::size_t i = e.size();
    while (i > 0) {
      --i;
      if (++e[i] < orders[i]) break;
      e[i] = 0;
      if (i == 0) return out;
    }
    if (e.empty()) return out;
  }
}

std::vector<DirichletCharacter> primitive_characters(const std::shared_ptr<const Modulus>& m) {
  std::vector<DirichletCharacter> out;
  for (auto& chi : characters(m))
    if (chi.is_primitive()) out.push_back(std::move(chi));
  return out;
}

}  // namespace quadlod
