// Wall-clock comparison of the parallel kernels against their serial
// references. Usage: bench_kernels [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>

#include "quadlod/arith.hpp"
#include "quadlod/distribution.hpp"
#include "quadlod/reference.hpp"

using namespace quadlod;

namespace {

int repeats = 3;
volatile double sink = 0;

double best_of(const std::function<double()>& body) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    sink = sink + body();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, const std::function<double()>& fast, const std::function<double()>& slow) {
  const double a = best_of(fast), b = best_of(slow);
  std::printf("%-28s %10.4f %10.4f %8.1fx\n", name, a, b, b / a);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));
  std::printf("threads: %d, best of %d\n", omp_get_max_threads(), repeats);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "kernel[s]", "ref[s]", "speedup");

  const auto& g = make_ring(-1);
  const NormRegion big = NormRegion::a0(g, 1000);
  row("count_region N=1000", [&] { return double(count_region(big)); },
      [&] { return double(reference::count_region(big)); });
  row("enumerate_region N=1000", [&] { return double(enumerate_region(big).size()); },
      [&] { return double(reference::enumerate_region(big).size()); });

  row("sieve_primes 2e4", [&] { return double(sieve_primes(g, 20'000).primes().size()); },
      [&] { return double(reference::primes_by_trial_division(g, 20'000).size()); });

  const PrimeTable table = sieve_primes(g, 20'000);
  const auto idx = std::make_shared<const ClassIndex>(g, 20'000);
  const ArithFn mu = tabulate(Builtin::moebius, idx, table);
  const ArithFn lg = tabulate(Builtin::log_norm, idx, table);
  row("convolve 2e4", [&] { return convolve(mu, lg, table)[1].real(); },
      [&] { return reference::convolve(mu, lg)[1].real(); });

  const auto small = std::make_shared<const ClassIndex>(g, 160'000);
  const PrimeTable t2 = sieve_primes(g, 160'000);
  const ArithFn pi = tabulate(Builtin::prime_indicator, small, t2);
  LodScanConfig cfg;
  cfg.N_grid = {100, 200, 400};
  row("lod_scan N=100,200,400", [&] { return lod_scan(pi, cfg).back().E; },
      [&] { return reference::lod_scan(pi, cfg).back().E; });
  return 0;
}
