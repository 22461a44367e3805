#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "quadlod/error.hpp"

namespace quadlod {

using Int = std::int64_t;
using Wide = __int128;

/// Narrow a 128-bit intermediate back to Int, throwing on overflow.
Int narrow(Wide v);

class RingDescriptor;

/// Element x + y*omega of O_K. Coordinates are exact; every operation
/// checks for 64-bit overflow.
class AlgInt {
 public:
  AlgInt() = default;
  AlgInt(const RingDescriptor& ring, Int x, Int y) : ring_(&ring), x_(x), y_(y) {}

  const RingDescriptor& ring() const { return *ring_; }
  Int x() const { return x_; }
  Int y() const { return y_; }

  bool is_zero() const { return x_ == 0 && y_ == 0; }
  bool is_unit() const { return norm() == 1; }

  /// Field norm; equals |sigma(xi)|^2 for the complex embedding.
  Int norm() const;
  AlgInt conj() const;

  /// Ordering key used throughout: (norm, x, y) ascending.
  std::tuple<Int, Int, Int> key() const { return {norm(), x_, y_}; }

  friend AlgInt operator+(const AlgInt& a, const AlgInt& b);
  friend AlgInt operator-(const AlgInt& a, const AlgInt& b);
  friend AlgInt operator*(const AlgInt& a, const AlgInt& b);
  AlgInt operator-() const;

  friend bool operator==(const AlgInt& a, const AlgInt& b) {
    return a.ring_ == b.ring_ && a.x_ == b.x_ && a.y_ == b.y_;
  }

  std::string to_string() const;

 private:
  const RingDescriptor* ring_ = nullptr;
  Int x_ = 0;
  Int y_ = 0;
};

/// One of the nine imaginary quadratic rings of integers with class number
/// one. Instances are process-wide singletons obtained through make_ring,
/// so rings compare by address.
///
/// Basis {1, omega} with omega^2 = trace*omega + constant:
///   d = 2,3 mod 4: omega = sqrt(d),         trace 0, constant d
///   d = 1 mod 4:   omega = (1 + sqrt(d))/2, trace 1, constant (d-1)/4
class RingDescriptor {
 public:
  RingDescriptor(const RingDescriptor&) = delete;
  RingDescriptor& operator=(const RingDescriptor&) = delete;

  Int d() const { return d_; }
  Int disc() const { return disc_; }
  Int abs_disc() const { return -disc_; }
  Int trace() const { return trace_; }
  Int omega_sq_constant() const { return constant_; }
  int w_K() const { return static_cast<int>(units_.size()); }

  /// Units ordered as powers of zeta0: units()[j] = zeta0^j.
  std::span<const AlgInt> units() const { return units_; }
  const AlgInt& zeta0() const { return units_.size() > 1 ? units_[1] : units_[0]; }

  AlgInt element(Int x, Int y) const { return AlgInt(*this, x, y); }
  AlgInt one() const { return element(1, 0); }
  AlgInt omega() const { return element(0, 1); }

  /// Norm form x^2 + trace*x*y - constant*y^2 evaluated without narrowing.
  Wide norm_form(Wide x, Wide y) const { return x * x + trace_ * x * y - constant_ * y * y; }

  /// True when x + y*omega lies in the canonical argument sector [0, 2pi/w_K).
  bool in_canonical_sector(Int x, Int y) const {
    if (units_.size() == 2) return y > 0 || (y == 0 && x > 0);
    return x > 0 && y >= 0;
  }

  std::string name() const;

 private:
  friend const RingDescriptor& make_ring(Int d);
  explicit RingDescriptor(Int d);

  Int d_;
  Int disc_;
  Int trace_;
  Int constant_;
  std::vector<AlgInt> units_;
};

inline constexpr std::array<Int, 9> kSupportedD = {-1, -2, -3, -7, -11, -19, -43, -67, -163};

/// Throws ErrorCode::unsupported_ring unless d is one of kSupportedD.
const RingDescriptor& make_ring(Int d);

bool is_supported_d(Int d);

AlgInt canonical_associate(const AlgInt& xi);

/// Quotient a / b when b divides a exactly.
bool divides(const AlgInt& b, const AlgInt& a);
AlgInt exact_quotient(const AlgInt& a, const AlgInt& b);

/// Canonical generator of the ideal (a, b), found by reducing the ideal
/// lattice and taking a shortest vector under the norm form.
AlgInt gcd(const AlgInt& a, const AlgInt& b);

AlgInt pow(const AlgInt& base, unsigned exponent);

// --- rank-2 lattices in (x, y) coordinates ----------------------------------

/// Hermite basis {(a, b), (0, c)} with a > 0, c > 0, 0 <= b < c.
struct HermiteBasis {
  Int a = 0;
  Int b = 0;
  Int c = 0;

  Int index() const { return a * c; }

  /// Reduce (x, y) to the fundamental box [0, a) x [0, c).
  std::pair<Int, Int> reduce(Int x, Int y) const;
};

/// Row-style elimination of an integer generating set of a full-rank
/// sublattice of Z^2. Throws invalid_argument if the span is not rank 2.
HermiteBasis hermite_basis(std::span<const std::array<Int, 2>> generators);

/// The ideal xi*O_K as a lattice.
HermiteBasis ideal_lattice(const AlgInt& xi);

/// Lagrange-Gauss reduction under the ring's norm form; returns the reduced
/// pair with norm(first) <= norm(second) and first a shortest vector.
std::pair<std::array<Int, 2>, std::array<Int, 2>> gauss_reduce(const RingDescriptor& ring,
                                                                 std::array<Int, 2> u,
                                                                 std::array<Int, 2> v);

Int floor_div(Int a, Int b);
Int floor_mod(Int a, Int b);

/// floor(sqrt(n)) for n >= 0, exact.
Int isqrt(Wide n);

}  // namespace quadlod
