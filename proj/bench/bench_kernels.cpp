// Wall-clock comparison of the serial reference kernels against their OpenMP
// counterparts. Results are also compared so a timing never hides a mismatch.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "ewb/closed_form.hpp"
#include "ewb/equivalence.hpp"
#include "ewb/sweep.hpp"

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-22s serial %9.4f s   openmp %9.4f s   speedup %5.2f   results %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "DIFFER");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  ewb::BundleSpec spec;

  {
    ewb::SweepConfig cfg;
    cfg.spec = spec;
    cfg.cells = 24;
    ewb::SweepResult a, b;
    const double ts = seconds([&] { a = ewb::sweep_serial(cfg); }, 1);
    const double tp = seconds([&] { b = ewb::sweep(cfg); }, 1);
    bool same = a.cells.size() == b.cells.size() && a.brackets.size() == b.brackets.size();
    for (std::size_t i = 0; same && i < a.cells.size(); ++i)
      same = (std::isnan(a.cells[i].residual) && std::isnan(b.cells[i].residual)) ||
             a.cells[i].residual == b.cells[i].residual;
    report("sweep 24x24", ts, tp, same);
  }

  {
    const ewb::AnalyticProfile prof = ewb::AnalyticProfile::random(7);
    const auto grid = ewb::make_grid(M_PI, 4096);
    const auto fn = prof.functions();
    const auto jet = ewb::sample_profile(grid, fn.f, fn.g);
    std::vector<ewb::EigenTriple> a, b;
    const double ts = seconds([&] { a = ewb::eigen_field_serial(jet, spec); }, 20);
    const double tp = seconds([&] { b = ewb::eigen_field(jet, spec); }, 20);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      same = a[i].lambda0 == b[i].lambda0 && a[i].lambda1 == b[i].lambda1 && a[i].lambda2 == b[i].lambda2;
    report("eigen_field 4096", ts, tp, same);
  }

  {
    ewb::EquivalenceOptions eo;
    eo.profiles = 2;
    eo.points = 8;
    ewb::EquivalenceReport a, b;
    const double ts = seconds([&] { a = ewb::oracle_equivalence_serial(spec, eo); }, 1);
    const double tp = seconds([&] { b = ewb::oracle_equivalence(spec, eo); }, 1);
    report("oracle_equivalence", ts, tp, a.max_rel_err == b.max_rel_err);
  }
  return 0;
}
