#include "quadlod/ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

namespace quadlod {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::unsupported_ring: return "UnsupportedRing";
    case ErrorCode::ring_mismatch: return "RingMismatch";
    case ErrorCode::zero_element: return "ZeroElement";
    case ErrorCode::both_zero: return "BothZero";
    case ErrorCode::bounds_too_large: return "BoundsTooLarge";
    case ErrorCode::zero_or_unit: return "ZeroOrUnit";
    case ErrorCode::table_too_small: return "TableTooSmall";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::format_version_mismatch: return "FormatVersionMismatch";
    case ErrorCode::zero_or_unit_modulus: return "ZeroOrUnitModulus";
    case ErrorCode::not_coprime: return "NotCoprime";
    case ErrorCode::principal_character: return "PrincipalCharacter";
    case ErrorCode::empty_modulus_range: return "EmptyModulusRange";
    case ErrorCode::unsupported_weight: return "UnsupportedWeight";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::overflow: return "Overflow";
  }
  return "Unknown";
}

Int narrow(Wide v) {
  if (v > std::numeric_limits<Int>::max() || v < std::numeric_limits<Int>::min())
    throw Error(ErrorCode::overflow, "coordinate exceeds 64-bit range");
  return static_cast<Int>(v);
}

Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int floor_mod(Int a, Int b) { return a - floor_div(a, b) * b; }

Int isqrt(Wide n) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "isqrt of negative value");
  auto r = static_cast<Wide>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return narrow(r);
}

// --- AlgInt -----------------------------------------------------------------

namespace {

void require_same_ring(const AlgInt& a, const AlgInt& b) {
  if (&a.ring() != &b.ring())
    throw Error(ErrorCode::ring_mismatch, "operands belong to different rings");
}

}  // namespace

Int AlgInt::norm() const { return narrow(ring_->norm_form(x_, y_)); }

AlgInt AlgInt::conj() const {
  // conj(omega) = trace - omega
  return AlgInt(*ring_, narrow(Wide(x_) + Wide(ring_->trace()) * y_), narrow(-Wide(y_)));
}

AlgInt operator+(const AlgInt& a, const AlgInt& b) {
  require_same_ring(a, b);
  return AlgInt(*a.ring_, narrow(Wide(a.x_) + b.x_), narrow(Wide(a.y_) + b.y_));
}

AlgInt operator-(const AlgInt& a, const AlgInt& b) {
  require_same_ring(a, b);
  return AlgInt(*a.ring_, narrow(Wide(a.x_) - b.x_), narrow(Wide(a.y_) - b.y_));
}

AlgInt operator*(const AlgInt& a, const AlgInt& b) {
  require_same_ring(a, b);
  const Wide ac = Wide(a.x_) * b.x_;
  const Wide bd = Wide(a.y_) * b.y_;
  const Wide cross = Wide(a.x_) * b.y_ + Wide(a.y_) * b.x_;
  const Int t = a.ring_->trace();
  const Int n = a.ring_->omega_sq_constant();
  return AlgInt(*a.ring_, narrow(ac + Wide(n) * bd), narrow(cross + Wide(t) * bd));
}

AlgInt AlgInt::operator-() const { return AlgInt(*ring_, narrow(-Wide(x_)), narrow(-Wide(y_))); }

std::string AlgInt::to_string() const {
  std::ostringstream os;
  os << x_ << (y_ < 0 ? "-" : "+") << (y_ < 0 ? -y_ : y_) << "w";
  return os.str();
}

AlgInt pow(const AlgInt& base, unsigned exponent) {
  AlgInt result = base.ring().one();
  AlgInt b = base;
  while (exponent) {
    if (exponent & 1u) result = result * b;
    exponent >>= 1u;
    if (exponent) b = b * b;
  }
  return result;
}

// --- RingDescriptor ---------------------------------------------------------

RingDescriptor::RingDescriptor(Int d) : d_(d) {
  const bool one_mod_four = floor_mod(d, 4) == 1;
  disc_ = one_mod_four ? d : 4 * d;
  trace_ = one_mod_four ? 1 : 0;
  constant_ = one_mod_four ? (d - 1) / 4 : d;

  // Norm-1 solutions have |2x + t*y| <= 2 and |y| <= 1 for every supported d.
  std::vector<AlgInt> found;
  for (Int y = -1; y <= 1; ++y)
    for (Int x = -2; x <= 2; ++x)
      if (norm_form(x, y) == 1) found.emplace_back(*this, x, y);

  AlgInt zeta = element(-1, 0);
  if (d == -1 || d == -3) zeta = element(0, 1);

  units_.push_back(one());
  for (AlgInt u = zeta; !(u == one()); u = u * zeta) units_.push_back(u);
  // Cross-check the power enumeration against the exhaustive search.
  if (units_.size() != found.size())
    throw Error(ErrorCode::invalid_argument, "unit group construction failed");
}

std::string RingDescriptor::name() const {
  std::ostringstream os;
  os << "Q(sqrt(" << d_ << "))";
  return os.str();
}

bool is_supported_d(Int d) {
  return std::find(kSupportedD.begin(), kSupportedD.end(), d) != kSupportedD.end();
}

const RingDescriptor& make_ring(Int d) {
  static const auto rings = [] {
    std::vector<std::unique_ptr<RingDescriptor>> v;
    for (Int s : kSupportedD) v.emplace_back(new RingDescriptor(s));
    return v;
  }();
  for (const auto& r : rings)
    if (r->d() == d) return *r;
  std::ostringstream os;
  os << "d = " << d << " is not supported; expected one of";
  for (Int s : kSupportedD) os << ' ' << s;
  throw Error(ErrorCode::unsupported_ring, os.str());
}

// --- associates, division, gcd ----------------------------------------------

AlgInt canonical_associate(const AlgInt& xi) {
  if (xi.is_zero()) throw Error(ErrorCode::zero_element, "canonical_associate of 0");
  const RingDescriptor& ring = xi.ring();
  for (const AlgInt& u : ring.units()) {
    AlgInt c = u * xi;
    if (ring.in_canonical_sector(c.x(), c.y())) return c;
  }
  throw Error(ErrorCode::invalid_argument, "no associate in canonical sector");
}

namespace {

// a * conj(b) as wide coordinates.
std::pair<Wide, Wide> mul_conj(const AlgInt& a, const AlgInt& b) {
  const RingDescriptor& ring = a.ring();
  const Wide bx = Wide(b.x()) + Wide(ring.trace()) * b.y();
  const Wide by = -Wide(b.y());
  const Wide bd = Wide(a.y()) * by;
  return {Wide(a.x()) * bx + Wide(ring.omega_sq_constant()) * bd,
          Wide(a.x()) * by + Wide(a.y()) * bx + Wide(ring.trace()) * bd};
}

}  // namespace

bool divides(const AlgInt& b, const AlgInt& a) {
  require_same_ring(a, b);
  if (b.is_zero()) return a.is_zero();
  const Int n = b.norm();
  auto [x, y] = mul_conj(a, b);
  return x % n == 0 && y % n == 0;
}

AlgInt exact_quotient(const AlgInt& a, const AlgInt& b) {
  require_same_ring(a, b);
  if (b.is_zero()) throw Error(ErrorCode::zero_element, "division by 0");
  const Int n = b.norm();
  auto [x, y] = mul_conj(a, b);
  if (x % n != 0 || y % n != 0)
    throw Error(ErrorCode::invalid_argument, b.to_string() + " does not divide " + a.to_string());
  return AlgInt(a.ring(), narrow(x / n), narrow(y / n));
}

std::pair<Int, Int> HermiteBasis::reduce(Int x, Int y) const {
  const Int k = floor_div(x, a);
  const Int rx = x - k * a;
  const Int ry = floor_mod(narrow(Wide(y) - Wide(k) * b), c);
  return {rx, ry};
}

HermiteBasis hermite_basis(std::span<const std::array<Int, 2>> generators) {
  std::vector<std::array<Int, 2>> v(generators.begin(), generators.end());
  std::erase_if(v, [](const auto& g) { return g[0] == 0 && g[1] == 0; });

  // Euclid on the first coordinate until a single pivot remains.
  std::array<Int, 2> pivot{0, 0};
  for (;;) {
    auto it = std::min_element(v.begin(), v.end(), [](const auto& p, const auto& q) {
      const Int ap = p[0] == 0 ? std::numeric_limits<Int>::max() : std::abs(p[0]);
      const Int aq = q[0] == 0 ? std::numeric_limits<Int>::max() : std::abs(q[0]);
      return ap < aq;
    });
    if (it == v.end() || (*it)[0] == 0) break;
    const auto p = *it;
    bool reduced = false;
    for (auto& g : v) {
      if (&g == &*it || g[0] == 0) continue;
      const Int k = floor_div(g[0], p[0]);
      g[0] -= k * p[0];
      g[1] = narrow(Wide(g[1]) - Wide(k) * p[1]);
      reduced = true;
    }
    if (!reduced) {
      pivot = p;
      v.erase(it);
      break;
    }
  }
  if (pivot[0] == 0) throw Error(ErrorCode::invalid_argument, "generating set has rank < 2");
  if (pivot[0] < 0) pivot = {-pivot[0], -pivot[1]};

  Int c = 0;
  for (const auto& g : v) c = std::gcd(c, std::abs(g[1]));
  if (c == 0) throw Error(ErrorCode::invalid_argument, "generating set has rank < 2");
  return HermiteBasis{pivot[0], floor_mod(pivot[1], c), c};
}

HermiteBasis ideal_lattice(const AlgInt& xi) {
  if (xi.is_zero()) throw Error(ErrorCode::zero_element, "ideal of 0");
  const AlgInt xo = xi * xi.ring().omega();
  const std::array<std::array<Int, 2>, 2> gens{{{xi.x(), xi.y()}, {xo.x(), xo.y()}}};
  return hermite_basis(gens);
}

namespace {

// Nearest integer to num/den (den > 0), halves rounded toward -inf.
Wide round_div(Wide num, Wide den) {
  Wide twice = 2 * num + den;
  Wide q = twice / (2 * den);
  if (twice % (2 * den) != 0 && twice < 0) --q;
  return q;
}

}  // namespace

std::pair<std::array<Int, 2>, std::array<Int, 2>> gauss_reduce(const RingDescriptor& ring,
                                                                 std::array<Int, 2> u,
                                                                 std::array<Int, 2> v) {
  const Wide t = ring.trace();
  const Wide n = ring.omega_sq_constant();
  auto q = [&](const std::array<Int, 2>& p) { return ring.norm_form(p[0], p[1]); };
  // Twice the polar form of the norm form.
  auto b2 = [&](const std::array<Int, 2>& p, const std::array<Int, 2>& r) {
    return 2 * Wide(p[0]) * r[0] + t * (Wide(p[0]) * r[1] + Wide(p[1]) * r[0]) -
           2 * n * Wide(p[1]) * r[1];
  };
  if (q(u) > q(v)) std::swap(u, v);
  for (;;) {
    const Wide qu = q(u);
    if (qu == 0) throw Error(ErrorCode::invalid_argument, "degenerate lattice basis");
    const Wide m = round_div(b2(u, v), 2 * qu);
    v = {narrow(v[0] - m * u[0]), narrow(v[1] - m * u[1])};
    if (q(v) >= qu) break;
    std::swap(u, v);
  }
  return {u, v};
}

AlgInt gcd(const AlgInt& a, const AlgInt& b) {
  require_same_ring(a, b);
  if (a.is_zero() && b.is_zero()) throw Error(ErrorCode::both_zero, "gcd(0, 0)");
  const RingDescriptor& ring = a.ring();
  std::vector<std::array<Int, 2>> gens;
  for (const AlgInt* e : {&a, &b}) {
    if (e->is_zero()) continue;
    const AlgInt eo = *e * ring.omega();
    gens.push_back({e->x(), e->y()});
    gens.push_back({eo.x(), eo.y()});
  }
  const HermiteBasis h = hermite_basis(gens);
  auto [shortest, other] = gauss_reduce(ring, {h.a, h.b}, {0, h.c});
  (void)other;
  return canonical_associate(ring.element(shortest[0], shortest[1]));
}

}  // namespace quadlod
