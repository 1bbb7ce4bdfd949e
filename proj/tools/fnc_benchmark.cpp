// Compares the serial reference implementations against the OpenMP kernels
// on a representative workload and verifies the outputs are bit-identical.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fnc/mc_verify.hpp"
#include "fnc/qc_tables.hpp"

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool rows_identical(const std::vector<fnc::TableRow>& a, const std::vector<fnc::TableRow>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto eq = [](const fnc::TailBounds& x, const fnc::TailBounds& y) {
            return std::memcmp(&x.expected, &y.expected, sizeof(double)) == 0 &&
                   std::memcmp(&x.lower, &y.lower, sizeof(double)) == 0 &&
                   std::memcmp(&x.upper, &y.upper, sizeof(double)) == 0;
        };
        if (a[i].mean != b[i].mean || a[i].sd != b[i].sd || !eq(a[i].lsl, b[i].lsl) ||
            !eq(a[i].usl, b[i].usl) || a[i].ok != b[i].ok) {
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
    const int hw = omp_get_max_threads();
#else
    const int hw = 1;
#endif
    std::printf("threads available: %d\n\n", hw);

    // Sweep kernel: a 21x24 slice of the published grid.
    fnc::GridSpec grid;
    grid.mean_start = 100.0;
    grid.mean_stop = 105.0;
    grid.mean_step = 0.25;
    grid.sd_start = 0.25;
    grid.sd_stop = 6.0;
    grid.sd_step = 0.25;
    grid.n = 20;
    grid.true_value = 100.0;
    grid.e_max = 0.10;
    grid.gamma = 0.95;

    double t0 = now_seconds();
    const auto serial_rows = fnc::sweep_serial(grid);
    const double t_sweep_serial = now_seconds() - t0;

    t0 = now_seconds();
    const auto parallel_rows = fnc::sweep(grid, 0);
    const double t_sweep_parallel = now_seconds() - t0;

    std::printf("sweep (%zu cells):   serial %.3fs   openmp %.3fs   speedup %.2fx   %s\n",
                serial_rows.size(), t_sweep_serial, t_sweep_parallel,
                t_sweep_serial / t_sweep_parallel,
                rows_identical(serial_rows, parallel_rows) ? "outputs identical"
                                                           : "OUTPUTS DIFFER");

    // Coverage kernel.
    fnc::CoverageConfig cfg;
    cfg.mu = 100.0;
    cfg.sigma = 4.0;
    cfg.n = 20;
    cfg.limit = 90.0;
    cfg.gamma = 0.95;
    cfg.trials = 4000;
    cfg.seed = 7;

    t0 = now_seconds();
    const auto serial_cov = fnc::simulate_coverage_serial(cfg, fnc::BoundKind::upper_lower_tail);
    const double t_cov_serial = now_seconds() - t0;

    t0 = now_seconds();
    const auto parallel_cov = fnc::simulate_coverage(cfg, fnc::BoundKind::upper_lower_tail, 0);
    const double t_cov_parallel = now_seconds() - t0;

    const bool cov_same = serial_cov.hits == parallel_cov.hits &&
                          serial_cov.solver_failures == parallel_cov.solver_failures;
    std::printf("coverage (%ld trials): serial %.3fs   openmp %.3fs   speedup %.2fx   %s\n",
                cfg.trials, t_cov_serial, t_cov_parallel, t_cov_serial / t_cov_parallel,
                cov_same ? "outputs identical" : "OUTPUTS DIFFER");

    const bool ok = rows_identical(serial_rows, parallel_rows) && cov_same;
    return ok ? 0 : 1;
}
