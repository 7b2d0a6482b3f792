// Compares the serial reference kernels against their OpenMP versions and
// checks they agree bit for bit.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "riskshare/catalogue.hpp"
#include "riskshare/oracles.hpp"
#include "riskshare/scenario.hpp"

using namespace riskshare;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double timed(F&& f) {
    const double t0 = now_s();
    f();
    return now_s() - t0;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel paths run serially\n");
#endif

    // payoff-table kernel on two-contract-menu families over a fine hull
    Scenario demo = parse_scenario(bundled_scenario_text("catalogue-demo"), "catalogue-demo");
    demo.catalogue.hull_step = 0.25;
    demo.catalogue.enumeration_cap = 2000000;
    CatalogueGrid grid(demo.space, demo.grid, demo.catalogue.basic1, demo.catalogue.cost1,
                       demo.catalogue.basic2, demo.catalogue.cost2, demo.catalogue.hull_step,
                       demo.catalogue.price_grid);
    const auto fam1 = enumerate_catalogues(grid, 0, demo.catalogue.enumeration_cap, 2);
    const auto fam2 = enumerate_catalogues(grid, 1, demo.catalogue.enumeration_cap, 2);
    std::printf("payoff table: %zu x %zu catalogues\n", fam1.size(), fam2.size());

    PayoffTable ts, tp;
    const double t_serial =
        timed([&] { ts = payoff_table(grid, fam1, fam2, TbrMode::Efficient, Exec::Serial); });
    const double t_par =
        timed([&] { tp = payoff_table(grid, fam1, fam2, TbrMode::Efficient, Exec::Parallel); });
    bool same = ts.pi1 == tp.pi1 && ts.pi2 == tp.pi2;
    std::printf("  serial   %8.3f s\n  parallel %8.3f s   speedup %.2fx   %s\n", t_serial,
                t_par, t_serial / t_par, same ? "identical" : "MISMATCH");

    // brute-force grid kernel
    Scenario tiny = parse_scenario(bundled_scenario_text("tiny-2x2"), "tiny-2x2");
    BruteForceResult bs, bp;
    const double b_serial =
        timed([&] { bs = tiny_brute_force_search(tiny, 21, 2.0, Exec::Serial); });
    const double b_par =
        timed([&] { bp = tiny_brute_force_search(tiny, 21, 2.0, Exec::Parallel); });
    const bool bsame = bs.best == bp.best && bs.s0 == bp.s0 && bs.K == bp.K;
    std::printf("brute force: 21^5 grid points\n");
    std::printf("  serial   %8.3f s\n  parallel %8.3f s   speedup %.2fx   %s\n", b_serial,
                b_par, b_serial / b_par, bsame ? "identical" : "MISMATCH");
    return same && bsame ? 0 : 1;
}
