#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "quadlod/arith.hpp"
#include "quadlod/residues.hpp"

namespace quadlod {

// --- progressions -------------------------------------------------------------

/// epsilon(M; q, gamma; f): the element sum of f over A0(M) in the class
/// of gamma minus 1/phi(q) times the sum over elements coprime to q.
std::complex<double> epsilon(const ArithFn& f, double m, const ResidueSystem& q, const AlgInt& gamma);

struct SweepResult {
  double max_abs = 0.0;
  std::complex<double> max_eps{0.0, 0.0};
  Int argmax_norm = 0;  // M^2 at which the maximum is first reached; 0 if never nonzero
  AlgInt argmax_gamma;  // residue representative
};

/// Support of f on A0(N): elements with f != 0, sorted by (norm, x, y).
struct Support {
  const RingDescriptor* ring = nullptr;
  std::vector<LatticePoint> points;
  std::vector<std::complex<double>> values;
  bool real = true;
};

Support make_support(const ArithFn& f, double n);

/// Exact max over real M <= N and coprime gamma of |epsilon|. epsilon is a
/// step function of M, so the sweep evaluates it after each norm level of
/// the support (levels where f vanishes cannot change it).
SweepResult epsilon_sweep(const Support& support, const ResidueSystem& q);
SweepResult epsilon_sweep(const ArithFn& f, double n, const ResidueSystem& q);

// --- level of distribution scan -----------------------------------------------

struct LodScanConfig {
  double theta = 0.4;
  double B = 0.0;
  double A = 1.0;  // reporting only
  std::vector<double> N_grid;
};

struct LodRecord {
  AlgInt q;
  Int phi = 0;
  SweepResult sweep;
};

struct LodTable {
  double N = 0.0;
  double Q = 0.0;
  Int count = 0;  // |A0(N)|
  std::vector<LodRecord> records;
  double E = 0.0;
  bool degenerate = false;  // Q < 2

  double normalized() const { return count > 0 ? E / static_cast<double>(count) : 0.0; }
};

/// Q(N) = |A0(N)|^theta / (log N)^B.
double level_Q(Int count, double n, double theta, double b);

/// One table per N: moduli are canonical classes with 2 <= norm <= Q(N).
/// Moduli are swept in parallel; aggregation runs in modulus order.
std::vector<LodTable> lod_scan(const ArithFn& f, const LodScanConfig& cfg);

// --- Siegel-Walfisz -------------------------------------------------------------

std::complex<double> sw_sum(const ArithFn& f, double n, const DirichletCharacter& chi);

struct SwReport {
  double N = 0.0;
  double D = 0.0;
  double cancellation_exponent = 0.0;  // 3D unless overridden
  Int moduli = 0;
  Int characters = 0;
  double max_abs_sum = 0.0;
  double normalized = 0.0;  // max |sum| * (log N)^exponent / |A0(N)|
  AlgInt worst_q;
  std::vector<Int> worst_exponents;
};

/// Every modulus of norm in [2, (log N)^D] and every non-principal character.
SwReport sw_check(const ArithFn& f, double n, double D, std::optional<double> cancellation_exponent = std::nullopt);

/// Throws principal_character for a principal chi.
double sw_bound_ratio(const ArithFn& f, double n, const DirichletCharacter& chi, double cancellation_exponent);

// --- convolution experiment -----------------------------------------------------

struct ConvolutionRow {
  double N = 0.0;
  double E_f = 0.0;
  double E_g = 0.0;
  double E_conv = 0.0;
};

struct ConvolutionReport {
  std::vector<ConvolutionRow> rows;
  bool f_decays = false;
  bool g_decays = false;
  bool conv_decays = false;
};

/// Strictly decreasing across the grid.
bool strictly_decreasing(const std::vector<double>& v);

ConvolutionReport convolution_experiment(const ArithFn& f, const ArithFn& g, const PrimeTable& table,
                                         const LodScanConfig& cfg);

// --- large sieve ------------------------------------------------------------------

/// Weight x -> 1/x (the Lemma 2.3 specialisation).
struct InverseWeight {};

/// Piecewise-linear weight through (x_i, w_i); must be positive and
/// non-increasing with strictly increasing nodes.
struct TabulatedWeight {
  std::vector<double> x;
  std::vector<double> w;
};

using SieveWeight = std::variant<InverseWeight, TabulatedWeight>;

struct Coefficient {
  AlgInt xi;
  std::complex<double> c;
};

struct LargeSieveResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // 0 when rhs == 0
  Int moduli = 0;
  Int primitive_characters = 0;
};

/// lhs = sum_{Q1 < |q| <= Q2} w(|q|) |q|/phi(q) sum*_chi |sum c(xi) chi(xi)|^2,
/// rhs = (w(Q1)(Q1^2 + |A0(N)|) + int_{Q1}^{Q2} x w(x) dx) sum |c|^2 with N
/// taken from the region. For w = 1/x this is the (|A0(N)|/Q1 + Q2) form.
LargeSieveResult large_sieve_ratio(std::span<const Coefficient> coeffs, const NormRegion& region, double q1,
                                   double q2, const SieveWeight& weight = InverseWeight{});

// --- Mertens ----------------------------------------------------------------------

struct MertensSums {
  double ideal_sum = 0.0;
  double prime_sum = 0.0;
  double ideal_ratio = 0.0;  // ideal_sum / log R
  double prime_ratio = 0.0;  // prime_sum / log log R
};

MertensSums mertens_sums(const RingDescriptor& ring, Int r, Int max_r = 50'000'000);

}  // namespace quadlod
