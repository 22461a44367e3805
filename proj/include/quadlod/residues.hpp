#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "quadlod/ring.hpp"

namespace quadlod {

/// O_K/(q) as the fundamental box of the Hermite basis of qO_K: residue
/// index = x*c + y for reduced coordinates (x, y) in [0, a) x [0, c).
class ResidueSystem {
 public:
  /// Throws zero_or_unit_modulus when norm(q) < 2.
  explicit ResidueSystem(const AlgInt& q);

  const RingDescriptor& ring() const { return q_.ring(); }
  const AlgInt& generator() const { return q_; }
  Int norm() const { return lattice_.index(); }
  Int phi() const { return phi_; }
  const HermiteBasis& lattice() const { return lattice_; }

  std::size_t index(Int x, Int y) const {
    auto [rx, ry] = lattice_.reduce(x, y);
    return static_cast<std::size_t>(rx * lattice_.c + ry);
  }
  std::size_t index(const AlgInt& xi) const { return index(xi.x(), xi.y()); }
  AlgInt representative(std::size_t idx) const;
  bool coprime(std::size_t idx) const { return coprime_[idx] != 0; }
  std::size_t one_index() const { return index(1, 0); }

  /// Prime factorization of q: canonical primes with exponents, sorted by (norm, x, y).
  std::span<const std::pair<AlgInt, int>> prime_divisors() const { return prime_divisors_; }

 private:
  AlgInt q_;
  HermiteBasis lattice_;
  std::vector<std::pair<AlgInt, int>> prime_divisors_;
  std::vector<std::uint8_t> coprime_;
  Int phi_ = 0;
};

struct ResidueLimits {
  Int max_norm = 1'000'000;
};

/// Residue ring plus the unit-group decomposition
/// (O_K/q)^x = <g_1> x ... x <g_r> with prime-power orders n_i, the
/// discrete-log table, and the divisors of q with their congruence kernels.
class Modulus {
 public:
  struct Divisor {
    AlgInt generator;                    // canonical; 1 for the trivial divisor
    std::vector<std::uint32_t> kernel;   // unit residues congruent to 1 mod generator
  };

  const ResidueSystem& residues() const { return residues_; }
  const RingDescriptor& ring() const { return residues_.ring(); }
  const AlgInt& generator() const { return residues_.generator(); }
  Int norm() const { return residues_.norm(); }
  Int phi() const { return residues_.phi(); }

  std::span<const std::size_t> generators() const { return generators_; }
  std::span<const Int> orders() const { return orders_; }
  /// Exponent of the unit group (lcm of orders); character values are
  /// powers of exp(2*pi*i/exponent()).
  Int exponent() const { return exponent_; }
  std::complex<double> root(Int k) const { return roots_[static_cast<std::size_t>(floor_mod(k, exponent_))]; }

  /// Exponent vector of a unit residue; empty span for non-units.
  std::span<const Int> dlog(std::size_t idx) const;
  std::span<const std::size_t> unit_residues() const { return unit_residues_; }

  /// Divisors of q sorted by (norm, x, y); the first is 1, the last is q.
  std::span<const Divisor> divisors() const { return divisors_; }

  std::size_t multiply(std::size_t i, std::size_t j) const;

 private:
  friend std::shared_ptr<const Modulus> make_modulus(const AlgInt& q, const ResidueLimits& limits);
  explicit Modulus(const AlgInt& q);
  void decompose_unit_group();
  void build_divisors();

  ResidueSystem residues_;
  std::vector<std::size_t> generators_;
  std::vector<Int> orders_;
  Int exponent_ = 1;
  std::vector<std::complex<double>> roots_;
  std::vector<Int> dlog_;  // norm() x rank, -1 marks non-units
  std::vector<std::size_t> unit_residues_;
  std::vector<Divisor> divisors_;
};

/// q is replaced by its canonical associate.
std::shared_ptr<const Modulus> make_modulus(const AlgInt& q, const ResidueLimits& limits = {});

inline Int euler_phi(const Modulus& m) { return m.phi(); }

class DirichletCharacter {
 public:
  DirichletCharacter(std::shared_ptr<const Modulus> modulus, std::vector<Int> exponents);

  const Modulus& modulus() const { return *modulus_; }
  const std::shared_ptr<const Modulus>& modulus_ptr() const { return modulus_; }
  std::span<const Int> exponents() const { return exponents_; }
  bool is_principal() const;

  /// chi(residue) = root(phase); nullopt off the unit group.
  std::optional<Int> phase(std::size_t residue) const;
  std::complex<double> value(std::size_t residue) const;
  std::complex<double> operator()(const AlgInt& xi) const { return value(modulus_->residues().index(xi)); }

  /// Phase per residue index, -1 for residues not coprime to q.
  std::vector<Int> phase_table() const;

  /// Smallest-norm divisor f of q such that chi is trivial on units
  /// congruent to 1 mod f; returns its canonical generator (1 for principal chi).
  AlgInt conductor() const;
  bool is_primitive() const;

 private:
  std::shared_ptr<const Modulus> modulus_;
  std::vector<Int> exponents_;
};

/// All phi(q) characters; exponent vectors in mixed-radix order with the
/// last coordinate varying fastest, so characters()[0] is principal.
std::vector<DirichletCharacter> characters(const std::shared_ptr<const Modulus>& m);
std::vector<DirichletCharacter> primitive_characters(const std::shared_ptr<const Modulus>& m);

}  // namespace quadlod
