#include "quadlod/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "quadlod/summation.hpp"

namespace quadlod {

// --- ClassIndex -------------------------------------------------------------

ClassIndex::ClassIndex(const RingDescriptor& ring, Int norm_bound, const RegionLimits& limits)
    : ring_(&ring), norm_bound_(norm_bound) {
  if (norm_bound < 1) throw Error(ErrorCode::invalid_argument, "class index needs norm_bound >= 1");
  for (const AlgInt& c : canonical_classes(ring, 1, norm_bound, limits)) classes_.push_back({c.x(), c.y(), c.norm()});
  if (classes_.size() >= std::numeric_limits<std::uint32_t>::max())
    throw Error(ErrorCode::bounds_too_large, "too many classes");
  x_min_ = x_max_ = 0;
  for (const auto& p : classes_) {
    x_min_ = std::min(x_min_, p.x);
    x_max_ = std::max(x_max_, p.x);
    y_max_ = std::max(y_max_, p.y);
  }
  const auto width = static_cast<std::size_t>(y_max_ + 1);
  grid_.assign(static_cast<std::size_t>(x_max_ - x_min_ + 1) * width, 0);
  for (std::size_t i = 0; i < classes_.size(); ++i)
    grid_[static_cast<std::size_t>(classes_[i].x - x_min_) * width + static_cast<std::size_t>(classes_[i].y)] =
        static_cast<std::uint32_t>(i + 1);
}

std::size_t ClassIndex::lookup_canonical(Int x, Int y) const {
  if (x < x_min_ || x > x_max_ || y < 0 || y > y_max_) return npos;
  const std::uint32_t v =
      grid_[static_cast<std::size_t>(x - x_min_) * static_cast<std::size_t>(y_max_ + 1) + static_cast<std::size_t>(y)];
  return v == 0 ? npos : v - 1;
}

std::size_t ClassIndex::class_of(Int x, Int y) const {
  if (x == 0 && y == 0) throw Error(ErrorCode::zero_element, "class of 0");
  if (ring_->norm_form(x, y) > norm_bound_) return npos;
  const Int t = ring_->trace();
  const Int n = ring_->omega_sq_constant();
  for (const AlgInt& u : ring_->units()) {
    const Int cx = u.x() * x + n * u.y() * y;
    const Int cy = u.x() * y + u.y() * x + t * u.y() * y;
    if (ring_->in_canonical_sector(cx, cy)) return lookup_canonical(cx, cy);
  }
  return npos;
}

std::size_t ClassIndex::prefix(Int n) const {
  return static_cast<std::size_t>(
      std::upper_bound(classes_.begin(), classes_.end(), n, [](Int v, const LatticePoint& p) { return v < p.norm; }) -
      classes_.begin());
}

ElementSet element_set(const ClassIndex& index, double n) {
  const NormRegion region = NormRegion::a0(index.ring(), n);
  if (region.hi_sq > index.norm_bound())
    throw Error(ErrorCode::table_too_small, "N^2 = " + std::to_string(region.hi_sq) + " exceeds tabulation bound " +
                                                std::to_string(index.norm_bound()));
  ElementSet out;
  out.ring = &index.ring();
  out.points = enumerate_points(region);
  out.classes.resize(out.points.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < out.points.size(); ++i)
    out.classes[i] = static_cast<std::uint32_t>(index.class_of(out.points[i].x, out.points[i].y));
  return out;
}

// --- ArithFn ----------------------------------------------------------------

ArithFn::ArithFn(std::shared_ptr<const ClassIndex> classes, std::vector<std::complex<double>> values, std::string name)
    : classes_(std::move(classes)), values_(std::move(values)), name_(std::move(name)) {
  if (values_.size() != classes_->size())
    throw Error(ErrorCode::invalid_argument, "value table does not match class index");
}

std::complex<double> ArithFn::at(const AlgInt& xi) const {
  if (&xi.ring() != &ring()) throw Error(ErrorCode::ring_mismatch, "element from another ring");
  const std::size_t cls = classes_->class_of(xi);
  if (cls == ClassIndex::npos)
    throw Error(ErrorCode::table_too_small, "norm " + std::to_string(xi.norm()) + " beyond tabulation bound");
  return values_[cls];
}

bool ArithFn::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](const auto& v) { return v.imag() == 0.0; });
}

std::string_view to_string(Builtin b) {
  switch (b) {
    case Builtin::one: return "one";
    case Builtin::moebius: return "moebius";
    case Builtin::tau: return "tau";
    case Builtin::log_norm: return "log_norm";
    case Builtin::lambda: return "lambda";
    case Builtin::prime_indicator: return "prime_indicator";
  }
  return "?";
}

Builtin parse_builtin(std::string_view name) {
  if (name == "one") return Builtin::one;
  if (name == "moebius" || name == "mu") return Builtin::moebius;
  if (name == "tau") return Builtin::tau;
  if (name == "log_norm" || name == "log") return Builtin::log_norm;
  if (name == "lambda" || name == "von_mangoldt") return Builtin::lambda;
  if (name == "prime_indicator" || name == "prime") return Builtin::prime_indicator;
  throw Error(ErrorCode::invalid_argument,
              "unknown function '" + std::string(name) + "'; expected one, moebius, tau, log_norm, lambda, prime");
}

namespace {

void require_table(const ClassIndex& classes, const PrimeTable& table) {
  if (&classes.ring() != &table.ring()) throw Error(ErrorCode::ring_mismatch, "prime table for another ring");
  if (table.max_norm() < classes.norm_bound())
    throw Error(ErrorCode::table_too_small, "prime table bound " + std::to_string(table.max_norm()) +
                                                " below tabulation bound " + std::to_string(classes.norm_bound()));
}

double builtin_value(Builtin b, const FactorMap& fm, Int norm) {
  switch (b) {
    case Builtin::one: return 1.0;
    case Builtin::moebius: {
      for (const auto& [pi, e] : fm.factors)
        if (e > 1) return 0.0;
      return fm.factors.size() % 2 ? -1.0 : 1.0;
    }
    case Builtin::tau: {
      double t = 1.0;
      for (const auto& [pi, e] : fm.factors) t *= e + 1;
      return t;
    }
    case Builtin::log_norm: return std::log(static_cast<double>(norm));
    case Builtin::lambda:
      return fm.factors.size() == 1 ? std::log(static_cast<double>(fm.factors.front().first.norm())) : 0.0;
    case Builtin::prime_indicator:
      return fm.factors.size() == 1 && fm.factors.front().second == 1 ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

ArithFn tabulate(Builtin builtin, std::shared_ptr<const ClassIndex> classes, const PrimeTable& table) {
  require_table(*classes, table);
  std::vector<std::complex<double>> values(classes->size());
  const ClassIndex& idx = *classes;
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const FactorMap fm = builtin == Builtin::one || builtin == Builtin::log_norm ? FactorMap{} : factor(idx.element(i), table);
    values[i] = builtin_value(builtin, fm, idx[i].norm);
  }
  return ArithFn(std::move(classes), std::move(values), std::string(to_string(builtin)));
}

ArithFn tabulate(std::function<std::complex<double>(const AlgInt&)> fn, std::shared_ptr<const ClassIndex> classes,
                 std::string name) {
  std::vector<std::complex<double>> values(classes->size());
  for (std::size_t i = 0; i < classes->size(); ++i) values[i] = fn(classes->element(i));
  return ArithFn(std::move(classes), std::move(values), std::move(name));
}

ArithFn convolve(const ArithFn& f, const ArithFn& g, const PrimeTable& table) {
  if (&f.ring() != &g.ring()) throw Error(ErrorCode::ring_mismatch, "convolution of functions on different rings");
  const auto& classes_ptr = f.norm_bound() <= g.norm_bound() ? f.classes_ptr() : g.classes_ptr();
  const ClassIndex& idx = *classes_ptr;
  require_table(idx, table);

  std::vector<std::complex<double>> out(idx.size());
#pragma omp parallel
  {
    // Divisors are listed in mixed radix with the last prime varying fastest,
    // so the cofactor of divs[k] is divs[D - 1 - k] up to a unit.
    std::vector<AlgInt> divs;
    std::vector<std::size_t> cf, cg;
#pragma omp for schedule(dynamic, 512)
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const FactorMap fm = factor(idx.element(a), table);
      divs.assign(1, idx.ring().one());
      for (const auto& [pi, e] : fm.factors) {
        const std::size_t prev = divs.size();
        divs.resize(prev * static_cast<std::size_t>(e + 1), idx.ring().one());
        for (std::size_t m = prev; m-- > 0;) {
          AlgInt d = divs[m];
          for (int j = 0; j <= e; ++j) {
            divs[m * static_cast<std::size_t>(e + 1) + static_cast<std::size_t>(j)] = d;
            if (j < e) d = d * pi;
          }
        }
      }
      const std::size_t n = divs.size();
      cf.resize(n);
      cg.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        cf[k] = f.classes().class_of(divs[k]);
        cg[k] = g.classes().class_of(divs[k]);
      }
      ComplexSum acc;
      for (std::size_t k = 0; k < n; ++k) acc.add(f[cf[k]] * g[cg[n - 1 - k]]);
      out[a] = acc.value();
    }
  }
  return ArithFn(classes_ptr, std::move(out), "(" + f.name() + ")*(" + g.name() + ")");
}

std::complex<double> dirichlet_series(const ArithFn& f, std::complex<double> s, Int trunc_norm) {
  if (trunc_norm > f.norm_bound())
    throw Error(ErrorCode::table_too_small, "truncation beyond tabulation bound");
  const ClassIndex& idx = f.classes();
  ComplexSum sum;
  for (std::size_t i = 0, end = idx.prefix(trunc_norm); i < end; ++i)
    sum.add(f[i] * std::exp(-s * std::log(static_cast<double>(idx[i].norm))));
  return sum.value();
}

std::complex<double> weighted_log_sum(const ArithFn& f, double n, int k) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "log power k must be >= 1");
  const ElementSet set = element_set(f.classes(), n);
  const double n2 = n * n;
  ComplexSum sum;
  for (std::size_t i = 0; i < set.points.size(); ++i)
    sum.add(f[set.classes[i]] * std::pow(std::log(n2 / static_cast<double>(set.points[i].norm)), k));
  return sum.value();
}

UnitFold unit_fold_check(const ArithFn& f, double n) {
  const ElementSet set = element_set(f.classes(), n);
  ComplexSum elements;
  for (std::uint32_t c : set.classes) elements.add(f[c]);
  ComplexSum classes;
  const Int hi = NormRegion::a0(f.ring(), n).hi_sq;
  for (std::size_t i = 0, end = f.classes().prefix(hi); i < end; ++i) classes.add(f[i]);
  return {elements.value(), static_cast<double>(f.ring().w_K()) * classes.value()};
}

double growth_ratio(const ArithFn& f, const ArithFn& tau, double c) {
  if (f.classes_ptr() != tau.classes_ptr() && f.norm_bound() > tau.norm_bound())
    throw Error(ErrorCode::table_too_small, "tau table smaller than f");
  double worst = 0.0;
  for (std::size_t i = 0; i < f.classes().size(); ++i)
    worst = std::max(worst, std::abs(f[i]) / std::pow(tau[i].real(), c));
  return worst;
}

// --- CSV --------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const ArithFn& f, std::ostream& os) {
  os << "# quadlod-arithfn d=" << f.ring().d() << " norm_bound=" << f.norm_bound() << " name=" << f.name() << '\n';
  os << "x,y,norm,re,im\n";
  const ClassIndex& idx = f.classes();
  for (std::size_t i = 0; i < idx.size(); ++i)
    os << idx[i].x << ',' << idx[i].y << ',' << idx[i].norm << ',' << fmt_double(f[i].real()) << ','
       << fmt_double(f[i].imag()) << '\n';
}

ArithFn read_csv(std::istream& is) {
  std::string line;
  // CLI artifacts prepend a config comment; skip it.
  while (std::getline(is, line) && line.rfind("# quadlod config:", 0) == 0) {
  }
  if (!is || line.rfind("# quadlod-arithfn ", 0) != 0)
    throw Error(ErrorCode::format_version_mismatch, "missing arithfn header");
  Int d = 0;
  Int bound = 0;
  std::string name;
  {
    std::istringstream hs(line.substr(18));
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("d=", 0) == 0) d = std::stoll(tok.substr(2));
      else if (tok.rfind("norm_bound=", 0) == 0) bound = std::stoll(tok.substr(11));
      else if (tok.rfind("name=", 0) == 0) {
        name = tok.substr(5);
        std::string rest;
        std::getline(hs, rest);
        name += rest;
      }
    }
  }
  if (!std::getline(is, line) || line != "x,y,norm,re,im")
    throw Error(ErrorCode::format_version_mismatch, "unexpected column header");
  auto classes = std::make_shared<const ClassIndex>(make_ring(d), bound);
  std::vector<std::complex<double>> values(classes->size());
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Int x = 0, y = 0, norm = 0;
    double re = 0, im = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%ld,%lf,%lf", &x, &y, &norm, &re, &im) != 5)
      throw Error(ErrorCode::format_version_mismatch, "malformed row: " + line);
    const std::size_t cls = classes->class_of(x, y);
    if (cls == ClassIndex::npos || (*classes)[cls].x != x || (*classes)[cls].y != y)
      throw Error(ErrorCode::invalid_argument, "row is not a canonical class: " + line);
    values[cls] = {re, im};
    ++row;
  }
  if (row != classes->size()) throw Error(ErrorCode::format_version_mismatch, "row count does not match norm_bound");
  return ArithFn(std::move(classes), std::move(values), name);
}

}  // namespace quadlod
