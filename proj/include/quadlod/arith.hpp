#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "quadlod/primes.hpp"
#include "quadlod/region.hpp"

namespace quadlod {

/// Canonical associates of norm <= norm_bound in (norm, x, y) order with
/// an O(1) coordinate lookup. Class i stands for the ideal generated by
/// classes()[i].
class ClassIndex {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  ClassIndex(const RingDescriptor& ring, Int norm_bound, const RegionLimits& limits = {});

  const RingDescriptor& ring() const { return *ring_; }
  Int norm_bound() const { return norm_bound_; }
  std::size_t size() const { return classes_.size(); }
  const LatticePoint& operator[](std::size_t i) const { return classes_[i]; }
  AlgInt element(std::size_t i) const { return ring_->element(classes_[i].x, classes_[i].y); }

  /// Class of the nonzero element x + y*omega (any associate); npos when
  /// its norm exceeds the bound.
  std::size_t class_of(Int x, Int y) const;
  std::size_t class_of(const AlgInt& xi) const { return class_of(xi.x(), xi.y()); }

  /// Number of classes with norm <= n.
  std::size_t prefix(Int n) const;

 private:
  std::size_t lookup_canonical(Int x, Int y) const;

  const RingDescriptor* ring_;
  Int norm_bound_;
  std::vector<LatticePoint> classes_;
  Int x_min_ = 0;
  Int x_max_ = 0;
  Int y_max_ = 0;
  std::vector<std::uint32_t> grid_;  // (x - x_min) * (y_max + 1) + y -> class + 1
};

/// Elements of A0(N) in (norm, x, y) order with the class of each.
struct ElementSet {
  const RingDescriptor* ring = nullptr;
  std::vector<LatticePoint> points;
  std::vector<std::uint32_t> classes;
};

/// Throws table_too_small when floor(N^2) exceeds the index bound.
ElementSet element_set(const ClassIndex& index, double n);

/// Unit-invariant arithmetic function, tabulated on canonical classes.
class ArithFn {
 public:
  ArithFn(std::shared_ptr<const ClassIndex> classes, std::vector<std::complex<double>> values, std::string name);

  const ClassIndex& classes() const { return *classes_; }
  const std::shared_ptr<const ClassIndex>& classes_ptr() const { return classes_; }
  const RingDescriptor& ring() const { return classes_->ring(); }
  Int norm_bound() const { return classes_->norm_bound(); }
  const std::string& name() const { return name_; }
  std::span<const std::complex<double>> values() const { return values_; }

  std::complex<double> operator[](std::size_t cls) const { return values_[cls]; }
  /// Value at the class of xi; table_too_small beyond the bound.
  std::complex<double> at(const AlgInt& xi) const;
  bool is_real() const;

 private:
  std::shared_ptr<const ClassIndex> classes_;
  std::vector<std::complex<double>> values_;
  std::string name_;
};

enum class Builtin { one, moebius, tau, log_norm, lambda, prime_indicator };

std::string_view to_string(Builtin b);
/// Accepts the builtin names plus the aliases "mu", "prime", "von_mangoldt".
Builtin parse_builtin(std::string_view name);

ArithFn tabulate(Builtin builtin, std::shared_ptr<const ClassIndex> classes, const PrimeTable& table);
ArithFn tabulate(std::function<std::complex<double>(const AlgInt&)> fn, std::shared_ptr<const ClassIndex> classes,
                 std::string name);

/// (f*g)(a) = sum over ideal divisors d | a of f(d) g(a/d). Divisors come
/// from the exponent lattice of each class's factorization; the result
/// lives on the smaller of the two index bounds.
ArithFn convolve(const ArithFn& f, const ArithFn& g, const PrimeTable& table);

/// sum over classes of norm <= trunc_norm of f(a) / norm(a)^s.
std::complex<double> dirichlet_series(const ArithFn& f, std::complex<double> s, Int trunc_norm);

/// sum over w in A0(N) of f(w) log^k(N^2/|w|), element by element.
std::complex<double> weighted_log_sum(const ArithFn& f, double n, int k);

struct UnitFold {
  std::complex<double> element_sum;
  std::complex<double> folded_class_sum;  // w_K * sum over classes
};

UnitFold unit_fold_check(const ArithFn& f, double n);

/// max over classes of |f(a)| / tau(a)^C; the S-W growth diagnostic.
double growth_ratio(const ArithFn& f, const ArithFn& tau, double c);

void write_csv(const ArithFn& f, std::ostream& os);
ArithFn read_csv(std::istream& is);

}  // namespace quadlod
