#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <variant>

#include "quadlod/arith.hpp"
#include "quadlod/distribution.hpp"
#include "quadlod/primes.hpp"
#include "quadlod/region.hpp"
#include "quadlod/residues.hpp"

namespace quadlod::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kConfigVersion = 1;
constexpr const char* kConfigPrefix = "# quadlod config: ";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- tables -------------------------------------------------------------------

using Cell = std::variant<std::monostate, Int, double, std::string>;

struct Table {
  std::vector<std::string> preamble;  // extra comment lines after the config line (CSV only)
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json extra = json::object();  // JSON-only summary fields
  std::optional<std::string> scalar;  // bare stdout value for single-number commands
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, Int>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return fmt(v);
        else return v;
      },
      c);
}

json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else return v;
      },
      c);
}

// --- run configuration ----------------------------------------------------------

struct RunConfig {
  std::string command;
  std::string d = "";
  std::map<std::string, std::string> params;
  std::string seed = "1";
  std::string format = "csv";
  // Not embedded: they change where or how fast, never what.
  std::string out;
  std::string workers;
  std::string cache_dir;

  json embedded() const {
    json j;
    j["version"] = kConfigVersion;
    j["command"] = command;
    j["d"] = d;
    j["params"] = params;
    j["seed"] = seed;
    j["format"] = format;
    return j;
  }
};

// Typed views over the string-valued parameters, with usage errors that
// name the flag and its domain.
Int parse_int(const std::string& flag, const std::string& s, const char* domain = "an integer") {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--" + flag + ": expected " + domain + ", got '" + s + "'");
}

double parse_real(const std::string& flag, const std::string& s, const char* domain = "a real number") {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("--" + flag + ": expected " + domain + ", got '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

struct Params {
  const RunConfig& cfg;

  const std::string& raw(const std::string& k) const { return cfg.params.at(k); }
  Int integer(const std::string& k) const { return parse_int(k, raw(k)); }
  double real(const std::string& k) const { return parse_real(k, raw(k)); }

  double real_above(const std::string& k, double lo, const char* domain) const {
    const double v = parse_real(k, raw(k), domain);
    if (!(v > lo)) throw UsageError("--" + k + ": expected " + domain + ", got '" + raw(k) + "'");
    return v;
  }

  Int int_at_least(const std::string& k, Int lo, const char* domain) const {
    const Int v = parse_int(k, raw(k), domain);
    if (v < lo) throw UsageError("--" + k + ": expected " + domain + ", got '" + raw(k) + "'");
    return v;
  }

  std::vector<double> grid(const std::string& k) const {
    std::vector<double> out;
    for (const auto& tok : split(raw(k), ','))
      out.push_back(parse_real(k, tok, "a comma-separated increasing list of reals > 1"));
    if (out.empty()) throw UsageError("--" + k + ": expected a non-empty list");
    for (std::size_t i = 0; i < out.size(); ++i)
      if (!(out[i] > 1.0) || (i > 0 && !(out[i] > out[i - 1])))
        throw UsageError("--" + k + ": expected a comma-separated increasing list of reals > 1, got '" + raw(k) + "'");
    return out;
  }

  std::pair<Int, Int> pair(const std::string& k) const {
    const auto parts = split(raw(k), ',');
    if (parts.size() != 2) throw UsageError("--" + k + ": expected 'x,y', got '" + raw(k) + "'");
    return {parse_int(k, parts[0], "'x,y'"), parse_int(k, parts[1], "'x,y'")};
  }
};

std::string supported_list() {
  std::string s;
  for (Int d : kSupportedD) s += (s.empty() ? "" : ", ") + std::to_string(d);
  return s;
}

const RingDescriptor& ring_of(const RunConfig& cfg) {
  if (cfg.d.empty()) throw UsageError("--d is required; expected one of " + supported_list());
  const Int d = parse_int("d", cfg.d, "one of the supported d values");
  if (!is_supported_d(d))
    throw UsageError("--d: unsupported ring d=" + cfg.d + "; expected one of " + supported_list());
  return make_ring(d);
}

fs::path cache_dir(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) return cfg.cache_dir;
  if (const char* env = std::getenv("QLOD_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_DATA_HOME"); xdg && *xdg) return fs::path(xdg) / "quadlod";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".local/share/quadlod";
  return fs::current_path() / ".quadlod";
}

fs::path default_cache_file(const RunConfig& cfg, Int d, Int max_norm) {
  return cache_dir(cfg) / ("primes_d" + std::to_string(d) + "_n" + std::to_string(max_norm) + ".qlod");
}

// --- arithmetic function inputs ---------------------------------------------------

// Builtin name, or the path of an arithfn CSV.
ArithFn load_fn(const std::string& flag, const std::string& spec, const RingDescriptor& ring, Int bound,
                const std::shared_ptr<const ClassIndex>& idx, const PrimeTable& table) {
  if (fs::is_regular_file(spec)) {
    std::ifstream is(spec);
    ArithFn f = read_csv(is);
    if (&f.ring() != &ring) throw UsageError("--" + flag + ": file " + spec + " holds a function on another ring");
    if (f.norm_bound() < bound)
      throw Error(ErrorCode::table_too_small,
                  spec + " is tabulated to " + std::to_string(f.norm_bound()) + ", need " + std::to_string(bound));
    return f;
  }
  Builtin b;
  try {
    b = parse_builtin(spec);
  } catch (const Error&) {
    throw UsageError("--" + flag + ": expected one of one, moebius, tau, log_norm, lambda, prime_indicator "
                     "(aliases mu, log, von_mangoldt, prime) or an arithfn CSV path, got '" +
                     spec + "'");
  }
  return tabulate(b, idx, table);
}

Int tab_bound(double n) { return exact_floor_square(n); }

// --- commands ---------------------------------------------------------------------

Table cmd_ring_info(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  Table t;
  t.columns = {"key", "value"};
  std::string units;
  for (const auto& u : r.units()) units += (units.empty() ? "" : ";") + u.to_string();
  t.rows = {{std::string("d"), r.d()},
            {std::string("disc"), r.disc()},
            {std::string("omega"), r.trace() ? "(1+sqrt(" + std::to_string(r.d()) + "))/2"
                                             : "sqrt(" + std::to_string(r.d()) + ")"},
            {std::string("omega_squared"), r.trace() ? "omega " + std::string(r.omega_sq_constant() < 0 ? "- " : "+ ") +
                                                           std::to_string(std::abs(r.omega_sq_constant()))
                                                     : std::to_string(r.omega_sq_constant())},
            {std::string("w_K"), Int(r.w_K())},
            {std::string("zeta0"), r.zeta0().to_string()},
            {std::string("units"), units}};
  return t;
}

NormRegion region_of(const RunConfig& cfg, const RingDescriptor& r) {
  const Params p{cfg};
  const double n = p.real_above("N", 0.0, "a real N > 0");
  const double yp = p.real("Yprime");
  const double y = p.real("Y");
  const double b = p.real_above("b", 0.0, "a positive real b");
  if (y < 0) throw UsageError("--Y: expected a real >= 0, got '" + p.raw("Y") + "'");
  if (yp < 0) throw UsageError("--Yprime: expected a real >= 0, got '" + p.raw("Yprime") + "'");
  return NormRegion::annulus(r, yp, y, n, b);
}

Table cmd_enumerate(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const NormRegion region = region_of(cfg, r);
  Table t;
  t.preamble.push_back("# norm bounds: " + std::to_string(region.lo_sq) + " <= N(xi) <= " + std::to_string(region.hi_sq));
  t.columns = {"x", "y", "norm"};
  for (const auto& p : enumerate_points(region)) t.rows.push_back({p.x, p.y, p.norm});
  return t;
}

Table cmd_count(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const NormRegion region = region_of(cfg, r);
  const Int c = count_region(region);
  Table t;
  t.columns = {"lo_sq", "hi_sq", "count"};
  t.rows.push_back({region.lo_sq, region.hi_sq, c});
  t.scalar = std::to_string(c);
  return t;
}

Table cmd_density(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const double n = Params{cfg}.real_above("N", 1.0, "a real N > 1");
  const Int c = count_region(NormRegion::a0(r, n));
  const double model = 2.0 * M_PI * n * n / std::sqrt(double(r.abs_disc()));
  const double ratio = density_ratio(r, n);
  Table t;
  t.columns = {"N", "N2", "count", "model", "ratio"};
  t.rows.push_back({n, exact_floor_square(n), c, model, ratio});
  t.scalar = fmt(ratio);
  return t;
}

std::string split_name(SplitType s) {
  switch (s) {
    case SplitType::split: return "split";
    case SplitType::inert: return "inert";
    case SplitType::ramified: return "ramified";
  }
  return "?";
}

Table cmd_sieve(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Int m = Params{cfg}.int_at_least("max-norm", 2, "an integer >= 2");
  const PrimeTable table = sieve_primes(r, m);
  Table t;
  t.columns = {"x", "y", "norm", "split", "p"};
  for (const auto& e : table.primes())
    t.rows.push_back({e.prime.x(), e.prime.y(), e.prime.norm(), split_name(e.split), e.rational_prime});
  return t;
}

Table cmd_factor(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const auto [x, y] = Params{cfg}.pair("xi");
  const AlgInt xi = r.element(x, y);
  if (xi.is_zero()) throw UsageError("--xi: expected a nonzero element, got '0,0'");
  const PrimeTable table = sieve_primes(r, std::max<Int>(2, xi.norm()));
  const FactorMap f = factor(xi, table);
  Table t;
  t.columns = {"kind", "x", "y", "norm", "exponent"};
  t.rows.push_back({std::string("unit"), f.unit.x(), f.unit.y(), Int(1), Int(1)});
  for (const auto& [p, e] : f.factors) t.rows.push_back({std::string("prime"), p.x(), p.y(), p.norm(), Int(e)});
  return t;
}

std::string join(std::span<const Int> v) {
  std::string s;
  for (Int e : v) s += (s.empty() ? "" : ";") + std::to_string(e);
  return s;
}

std::shared_ptr<const Modulus> modulus_of(const RunConfig& cfg, const RingDescriptor& r) {
  const auto [x, y] = Params{cfg}.pair("q");
  const AlgInt q = r.element(x, y);
  if (q.norm() < 2) throw UsageError("--q: expected a modulus of norm >= 2, got '" + cfg.params.at("q") + "'");
  return make_modulus(q);
}

Table cmd_chars(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const auto m = modulus_of(cfg, r);
  Table t;
  t.preamble.push_back("# modulus " + m->generator().to_string() + " norm " + std::to_string(m->norm()) + " phi " +
                       std::to_string(m->phi()) + " orders " + join(m->orders()));
  t.columns = {"index", "exponents", "principal", "conductor_x", "conductor_y", "conductor_norm", "primitive"};
  Int i = 0;
  for (const auto& chi : characters(m)) {
    const AlgInt f = chi.conductor();
    t.rows.push_back({i++, join(chi.exponents()), Int(chi.is_principal()), f.x(), f.y(), f.norm(),
                      Int(chi.is_primitive())});
  }
  return t;
}

Table cmd_conductors(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Int q = Params{cfg}.int_at_least("Q", 2, "an integer >= 2");
  Table t;
  t.columns = {"q_x", "q_y", "q_norm", "phi", "orders", "characters", "primitive"};
  for (const AlgInt& g : canonical_classes(r, 2, q)) {
    const auto m = make_modulus(g);
    t.rows.push_back({g.x(), g.y(), g.norm(), m->phi(), join(m->orders()), m->phi(),
                      Int(primitive_characters(m).size())});
  }
  return t;
}

void fn_table(Table& t, const ArithFn& f) {
  t.preamble.push_back("# quadlod-arithfn d=" + std::to_string(f.ring().d()) +
                       " norm_bound=" + std::to_string(f.norm_bound()) + " name=" + f.name());
  t.columns = {"x", "y", "norm", "re", "im"};
  const ClassIndex& idx = f.classes();
  for (std::size_t i = 0; i < idx.size(); ++i)
    t.rows.push_back({idx[i].x, idx[i].y, idx[i].norm, f[i].real(), f[i].imag()});
}

Table cmd_tabulate(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Params p{cfg};
  const Int bound = tab_bound(p.real_above("N", 0.0, "a real N > 0"));
  const PrimeTable table = sieve_primes(r, std::max<Int>(bound, 2));
  const auto idx = std::make_shared<const ClassIndex>(r, bound);
  Table t;
  fn_table(t, load_fn("f", p.raw("f"), r, bound, idx, table));
  return t;
}

Table cmd_convolve(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Params p{cfg};
  const Int bound = tab_bound(p.real_above("N", 0.0, "a real N > 0"));
  const PrimeTable table = sieve_primes(r, std::max<Int>(bound, 2));
  const auto idx = std::make_shared<const ClassIndex>(r, bound);
  const ArithFn f = load_fn("f", p.raw("f"), r, bound, idx, table);
  const ArithFn g = load_fn("g", p.raw("g"), r, bound, idx, table);
  ArithFn h = convolve(f, g, table);
  Table t;
  fn_table(t, ArithFn(idx, std::vector(h.values().begin(), h.values().begin() + idx->size()),
                      f.name() + "*" + g.name()));
  return t;
}

LodScanConfig scan_config(const Params& p) {
  LodScanConfig c;
  c.theta = p.real_above("theta", 0.0, "a real in (0, 1]");
  if (c.theta > 1.0) throw UsageError("--theta: expected a real in (0, 1], got '" + p.raw("theta") + "'");
  c.B = p.real("B");
  if (c.B < 0.0) throw UsageError("--B: expected a real >= 0, got '" + p.raw("B") + "'");
  c.A = p.real("A");
  c.N_grid = p.grid("Ngrid");
  return c;
}

void scan_rows(Table& t, const std::vector<LodTable>& tables, std::ostream& err) {
  t.columns = {"N",     "Q",          "q_x",        "q_y",         "q_norm",   "phi",
               "max_eps_re", "max_eps_im", "max_eps_abs", "argmax_M", "argmax_gamma_x", "argmax_gamma_y"};
  for (const LodTable& lt : tables) {
    err << "# N=" << fmt(lt.N) << " N^2=" << exact_floor_square(lt.N) << " |A0(N)|=" << lt.count
        << " Q=" << fmt(lt.Q) << (lt.degenerate ? " (degenerate Q < 2)" : "") << '\n';
    for (const LodRecord& rec : lt.records) {
      const auto& s = rec.sweep;
      t.rows.push_back({lt.N, lt.Q, rec.q.x(), rec.q.y(), rec.q.norm(), rec.phi, s.max_eps.real(), s.max_eps.imag(),
                        s.max_abs, std::sqrt(double(s.argmax_norm)), s.argmax_gamma.x(), s.argmax_gamma.y()});
    }
    t.rows.push_back({lt.N, lt.Q, std::string("aggregate"), std::string(lt.degenerate ? "degenerate" : "ok"), lt.count,
                      Int(lt.records.size()), lt.normalized(), Cell{}, lt.E, Cell{}, Cell{}, Cell{}});
  }
}

Table cmd_lod_scan(const RunConfig& cfg, std::ostream& err) {
  const auto& r = ring_of(cfg);
  const Params p{cfg};
  const LodScanConfig sc = scan_config(p);
  const Int bound = tab_bound(sc.N_grid.back());
  const PrimeTable table = sieve_primes(r, std::max<Int>(bound, 2));
  const auto idx = std::make_shared<const ClassIndex>(r, bound);
  const ArithFn f = load_fn("f", p.raw("f"), r, bound, idx, table);
  Table t;
  scan_rows(t, lod_scan(f, sc), err);
  return t;
}

Table cmd_sw_check(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Params p{cfg};
  const double n = p.real_above("N", 1.0, "a real N > 1");
  const double D = p.real_above("D", 0.0, "a positive real D");
  const double C = p.real("C");
  std::optional<double> exponent;
  if (p.raw("exponent") != "auto") exponent = p.real("exponent");
  const Int bound = tab_bound(n);
  const PrimeTable table = sieve_primes(r, std::max<Int>(bound, 2));
  const auto idx = std::make_shared<const ClassIndex>(r, bound);
  const ArithFn f = load_fn("f", p.raw("f"), r, bound, idx, table);
  const SwReport rep = sw_check(f, n, D, exponent);
  const double growth = growth_ratio(f, tabulate(Builtin::tau, idx, table), C);
  Table t;
  t.columns = {"N",     "D",          "exponent",       "moduli",     "characters", "max_abs_sum",
               "normalized", "worst_q_x", "worst_q_y", "worst_exponents", "growth_C", "growth_ratio"};
  t.rows.push_back({n, D, rep.cancellation_exponent, rep.moduli, rep.characters, rep.max_abs_sum, rep.normalized,
                    rep.worst_q.x(), rep.worst_q.y(), join(rep.worst_exponents), C, growth});
  return t;
}

Table cmd_conv_experiment(const RunConfig& cfg, std::ostream& err) {
  const auto& r = ring_of(cfg);
  const Params p{cfg};
  const LodScanConfig sc = scan_config(p);
  const Int bound = tab_bound(sc.N_grid.back());
  const PrimeTable table = sieve_primes(r, std::max<Int>(bound, 2));
  const auto idx = std::make_shared<const ClassIndex>(r, bound);
  const ArithFn f = load_fn("f", p.raw("f"), r, bound, idx, table);
  const ArithFn g = load_fn("g", p.raw("g"), r, bound, idx, table);
  const ConvolutionReport rep = convolution_experiment(f, g, table, sc);
  Table t;
  t.columns = {"N", "E_f_norm", "E_g_norm", "E_conv_norm"};
  for (const auto& row : rep.rows) {
    err << "# N=" << fmt(row.N) << " N^2=" << exact_floor_square(row.N) << '\n';
    t.rows.push_back({row.N, row.E_f, row.E_g, row.E_conv});
  }
  err << "# strictly decreasing: f=" << rep.f_decays << " g=" << rep.g_decays << " f*g=" << rep.conv_decays << '\n';
  t.extra["decreasing"] = {{"f", rep.f_decays}, {"g", rep.g_decays}, {"conv", rep.conv_decays}};
  return t;
}

Table cmd_large_sieve(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Params p{cfg};
  const double n = p.real_above("N", 0.0, "a real N > 0");
  const double q1 = p.real_above("Q1", 0.0, "a positive real");
  const double q2 = p.real_above("Q2", q1, "a real > Q1");
  const Int trials = p.int_at_least("trials", 1, "an integer >= 1");
  const auto seed = static_cast<std::uint64_t>(parse_int("seed", cfg.seed));
  const NormRegion region = NormRegion::a0(r, n);
  const auto points = enumerate_region(region);
  std::mt19937_64 rng(seed);
  Table t;
  t.columns = {"trial", "lhs", "rhs", "ratio", "moduli", "primitive_characters"};
  double worst = 0.0;
  for (Int k = 0; k < trials; ++k) {
    std::vector<Coefficient> cs;
    cs.reserve(points.size());
    for (const AlgInt& a : points) cs.push_back({a, (rng() >> 63) ? 1.0 : -1.0});
    const LargeSieveResult res = large_sieve_ratio(cs, region, q1, q2);
    worst = std::max(worst, res.ratio);
    t.rows.push_back({k, res.lhs, res.rhs, res.ratio, res.moduli, res.primitive_characters});
  }
  t.extra["max_ratio"] = worst;
  return t;
}

Table cmd_mertens(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Int R = Params{cfg}.int_at_least("R", 2, "an integer >= 2");
  const MertensSums m = mertens_sums(r, R);
  Table t;
  t.columns = {"R", "ideal_sum", "prime_sum", "ideal_ratio", "prime_ratio"};
  t.rows.push_back({R, m.ideal_sum, m.prime_sum, m.ideal_ratio, m.prime_ratio});
  return t;
}

fs::path cache_file(const RunConfig& cfg, const RingDescriptor* ring) {
  const std::string& file = cfg.params.at("file");
  if (!file.empty()) return file;
  if (!ring) throw UsageError("--file or --d with --max-norm is required");
  const Int m = Params{cfg}.int_at_least("max-norm", 2, "an integer >= 2");
  return default_cache_file(cfg, ring->d(), m);
}

Table cache_summary(const fs::path& path, const CacheHeader& h) {
  Table t;
  t.columns = {"path", "version", "d", "max_norm", "count"};
  t.rows.push_back({path.string(), Int(h.version), h.d, Int(h.max_norm), Int(h.count)});
  return t;
}

Table cmd_cache_save(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const Int m = Params{cfg}.int_at_least("max-norm", 2, "an integer >= 2");
  const fs::path path = cache_file(cfg, &r);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  cache_save(sieve_primes(r, m), path);
  return cache_summary(path, cache_inspect(path));
}

Table cmd_cache_load(const RunConfig& cfg) {
  const auto& r = ring_of(cfg);
  const fs::path path = cache_file(cfg, &r);
  const PrimeTable t = cache_load(r, path);
  return cache_summary(path, {kCacheVersion, r.d(), std::uint64_t(t.max_norm()), std::uint64_t(t.primes().size())});
}

Table cmd_cache_inspect(const RunConfig& cfg) {
  const RingDescriptor* r = cfg.d.empty() ? nullptr : &ring_of(cfg);
  const fs::path path = cache_file(cfg, r);
  return cache_summary(path, cache_inspect(path));
}

// --- output -----------------------------------------------------------------------

void write_table(const Table& t, const RunConfig& cfg, std::ostream& os) {
  if (cfg.format == "json") {
    json j;
    j["config"] = cfg.embedded();
    j["columns"] = t.columns;
    json rows = json::array();
    for (const auto& row : t.rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(json_cell(c));
      rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    for (const auto& [k, v] : t.extra.items()) j[k] = v;
    os << j.dump(2) << '\n';
    return;
  }
  os << kConfigPrefix << cfg.embedded().dump() << '\n';
  for (const auto& line : t.preamble) os << line << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

// --- config replay ------------------------------------------------------------------

json read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("--config: cannot open '" + path + "'");
  std::string first;
  std::getline(is, first);
  json j;
  try {
    if (first.rfind(kConfigPrefix, 0) == 0) {
      j = json::parse(first.substr(std::string(kConfigPrefix).size()));
    } else {
      std::stringstream all;
      all << first << '\n' << is.rdbuf();
      j = json::parse(all.str());
      if (j.contains("config") && j["config"].is_object()) j = j["config"];
    }
  } catch (const json::exception& e) {
    throw UsageError("--config: '" + path + "' is neither a config JSON nor a quadlod artifact (" + e.what() + ")");
  }
  if (!j.is_object() || j.value("version", 0) != kConfigVersion || !j.contains("command"))
    throw UsageError("--config: expected a version " + std::to_string(kConfigVersion) + " config with a command");
  return j;
}

// Config fields become ordinary flags placed before any explicit ones, so
// the command line can still override them.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config: expected a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;
  const json j = read_config(*path);
  std::vector<std::string> out;
  for (const auto& word : split(j["command"].get<std::string>(), ' ')) out.push_back(word);
  auto str = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (j.contains("d") && !str(j["d"]).empty()) out.insert(out.end(), {"--d", str(j["d"])});
  if (j.contains("params"))
    for (const auto& [k, v] : j["params"].items()) out.insert(out.end(), {"--" + k, str(v)});
  if (j.contains("seed")) out.insert(out.end(), {"--seed", str(j["seed"])});
  if (j.contains("format")) out.insert(out.end(), {"--format", str(j["format"])});
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// --- command table ---------------------------------------------------------------------

struct Command {
  std::string name;
  std::string help;
  std::vector<std::pair<std::string, std::string>> params;  // flag, default
  std::function<Table(const RunConfig&, std::ostream&)> body;
};

std::vector<Command> commands() {
  auto plain = [](Table (*fn)(const RunConfig&)) {
    return [fn](const RunConfig& c, std::ostream&) { return fn(c); };
  };
  const std::vector<std::pair<std::string, std::string>> region = {
      {"N", "2"}, {"Yprime", "1"}, {"Y", "0"}, {"b", "1"}};
  const std::vector<std::pair<std::string, std::string>> scan = {
      {"f", "prime_indicator"}, {"theta", "0.4"}, {"B", "0"}, {"A", "1"}, {"Ngrid", "100,200,400"}};
  auto with = [](auto base, std::vector<std::pair<std::string, std::string>> more) {
    base.insert(base.end(), more.begin(), more.end());
    return base;
  };
  return {
      {"ring-info", "Describe the ring of integers", {}, plain(cmd_ring_info)},
      {"enumerate", "List elements with Yprime <= |sigma| <= Y + N^b", region, plain(cmd_enumerate)},
      {"count", "Count elements of the same region", region, plain(cmd_count)},
      {"density", "|A0(N)| against 2 pi N^2 / sqrt|D_K|", {{"N", "100"}}, plain(cmd_density)},
      {"sieve", "Prime elements up to a norm bound", {{"max-norm", "100"}}, plain(cmd_sieve)},
      {"factor", "Factor an element given as x,y", {{"xi", "1,0"}}, plain(cmd_factor)},
      {"chars", "Dirichlet characters mod q (x,y)", {{"q", "3,0"}}, plain(cmd_chars)},
      {"conductors", "Unit groups and primitive counts for moduli of norm <= Q", {{"Q", "50"}}, plain(cmd_conductors)},
      {"tabulate", "Tabulate an arithmetic function to norm N^2", {{"f", "one"}, {"N", "10"}}, plain(cmd_tabulate)},
      {"convolve", "Dirichlet convolution f*g to norm N^2", {{"f", "one"}, {"g", "moebius"}, {"N", "10"}},
       plain(cmd_convolve)},
      {"lod-scan", "Level-of-distribution scan", scan, cmd_lod_scan},
      {"sw-check", "Character-twisted sums over small moduli",
       {{"f", "prime_indicator"}, {"N", "100"}, {"D", "1"}, {"exponent", "auto"}, {"C", "2"}}, plain(cmd_sw_check)},
      {"conv-experiment", "Normalized errors of f, g and f*g", with(scan, {{"g", "prime_indicator"}}),
       cmd_conv_experiment},
      {"large-sieve", "Large sieve ratios for seeded random +-1 vectors on A0(N)",
       {{"N", "50"}, {"Q1", "10"}, {"Q2", "100"}, {"trials", "100"}}, plain(cmd_large_sieve)},
      {"mertens", "Sums of 1/N over ideals and prime ideals", {{"R", "1000"}}, plain(cmd_mertens)},
      {"cache save", "Sieve and write a prime cache", {{"max-norm", "10000"}, {"file", ""}}, plain(cmd_cache_save)},
      {"cache load", "Read a prime cache for a ring", {{"max-norm", "10000"}, {"file", ""}}, plain(cmd_cache_load)},
      {"cache inspect", "Print a cache header", {{"max-norm", "10000"}, {"file", ""}}, plain(cmd_cache_inspect)},
  };
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto table = commands();
  RunConfig cfg;
  const Command* chosen = nullptr;

  CLI::App app{"Arithmetic and distribution experiments in imaginary quadratic rings of class number one", "quadlod"};
  app.require_subcommand(1);
  app.add_option("--config", "Replay a config JSON or a quadlod artifact (CSV or JSON)");
  CLI::App* cache = nullptr;

  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : table) {
    CLI::App* parent = &app;
    std::string name = c.name;
    if (name.rfind("cache ", 0) == 0) {
      if (!cache) {
        cache = app.add_subcommand("cache", "Prime cache management");
        cache->require_subcommand(1);
      }
      parent = cache;
      name = name.substr(6);
    }
    CLI::App* sub = parent->add_subcommand(name, c.help);
    sub->add_option("--d", cfg.d, "Ring: one of " + supported_list())->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    for (const auto& [flag, def] : c.params) {
      cfg.params.emplace(c.name + "\x1f" + flag, def);
      sub->add_option("--" + flag, cfg.params[c.name + "\x1f" + flag])
          ->default_str(def)
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    sub->add_option("--seed", cfg.seed, "Seed for randomized commands")
        ->capture_default_str()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--format", cfg.format, "Artifact format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--out", cfg.out, "Artifact path (default: stdout)")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--workers", cfg.workers, "Thread count (default: available cores)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--cache-dir", cfg.cache_dir, "Cache directory (default: $QLOD_CACHE, then ~/.local/share/quadlod)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->callback([&chosen, &c] { chosen = &c; });
    subs.emplace_back(sub, &c);
  }

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  cfg.command = chosen->name;
  std::map<std::string, std::string> own;
  const std::string prefix = chosen->name + "\x1f";
  for (const auto& [k, v] : cfg.params)
    if (k.rfind(prefix, 0) == 0) own.emplace(k.substr(prefix.size()), v);
  cfg.params = std::move(own);

  try {
    parse_int("seed", cfg.seed, "a non-negative integer");
    if (!cfg.workers.empty()) {
      const Int w = parse_int("workers", cfg.workers, "a positive integer");
      if (w < 1) throw UsageError("--workers: expected a positive integer, got '" + cfg.workers + "'");
      omp_set_num_threads(static_cast<int>(w));
    } else {
      omp_set_num_threads(omp_get_num_procs());
    }
    const Table t = chosen->body(cfg, err);
    if (cfg.out.empty()) {
      if (t.scalar && cfg.format == "csv")
        out << *t.scalar << '\n';
      else
        write_table(t, cfg, out);
    } else {
      const fs::path p(cfg.out);
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      std::ofstream os(p, std::ios::binary);
      if (!os) throw Error(ErrorCode::io_error, "cannot write " + cfg.out);
      write_table(t, cfg, os);
      if (!os) throw Error(ErrorCode::io_error, "write failed for " + cfg.out);
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace quadlod::cli
