// Benchmark: OpenMP-parallel paths against their serial reference
// implementations — the scenario batch runner and the sliding-window
// excitation check. Both paths must also agree exactly; mismatches abort.

#include "netid/batch.hpp"
#include "netid/reference.hpp"
#include "netid/rng.hpp"
#include "netid/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace netid;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds_since(t0);
}

}  // namespace

int main(int argc, char** argv) {
    int batch_size = 8;
    double horizon = 100.0;
    if (argc > 1) batch_size = std::atoi(argv[1]);
    if (argc > 2) horizon = std::atof(argv[2]);

#ifdef _OPENMP
    std::printf("openmp: %d threads available\n", omp_get_max_threads());
#else
    std::printf("openmp: not compiled in, parallel paths run serially\n");
#endif

    // --- scenario batch ---------------------------------------------------
    std::vector<Scenario> scenarios;
    for (int i = 0; i < batch_size; ++i) {
        auto sc = scenario_baseline(static_cast<std::uint64_t>(i + 1));
        sc.horizon = horizon;
        scenarios.push_back(sc);
    }

    std::vector<BatchItem> serial_items, parallel_items;
    const double t_serial = timed([&] { serial_items = run_batch(scenarios, ExecPolicy::Serial); });
    const double t_parallel =
        timed([&] { parallel_items = run_batch(scenarios, ExecPolicy::Parallel); });

    for (std::size_t i = 0; i < serial_items.size(); ++i) {
        if (serial_items[i].failed || parallel_items[i].failed ||
            serial_items[i].report.final_topo_err != parallel_items[i].report.final_topo_err) {
            std::fprintf(stderr, "batch results disagree on scenario %zu\n", i);
            return 1;
        }
    }

    std::printf("\nscenario batch (%d x baseline, horizon %g)\n", batch_size, horizon);
    std::printf("  serial    %8.3f s\n", t_serial);
    std::printf("  parallel  %8.3f s   speedup %.2fx\n", t_parallel, t_serial / t_parallel);

    // --- PE window check ----------------------------------------------------
    RngStream rng(7);
    std::vector<double> times;
    std::vector<Vec> states;
    const int samples = 200000;
    for (int k = 0; k <= samples; ++k) {
        times.push_back(1e-3 * k);
        Vec x(8);
        for (int i = 0; i < 8; ++i) x(i) = std::sin((i + 1) * 1e-3 * k) + 0.1 * rng.gauss(0.0, 1.0);
        states.push_back(x);
    }

    PeResult pe_serial, pe_parallel;
    const double t_pe_serial =
        timed([&] { pe_serial = check_pe(times, states, 20.0, 0.1, ExecPolicy::Serial); });
    const double t_pe_parallel =
        timed([&] { pe_parallel = check_pe(times, states, 20.0, 0.1, ExecPolicy::Parallel); });

    if (pe_serial.min_eig_over_windows != pe_parallel.min_eig_over_windows) {
        std::fprintf(stderr, "pe results disagree\n");
        return 1;
    }

    std::printf("\nexcitation check (%d samples, %d windows)\n", samples,
                pe_serial.windows_checked);
    std::printf("  serial    %8.3f s\n", t_pe_serial);
    std::printf("  parallel  %8.3f s   speedup %.2fx\n", t_pe_parallel,
                t_pe_serial / t_pe_parallel);
    return 0;
}
