// Benchmarks the replicate fan-out: the serial reference loop against the
// OpenMP work pool, verifying that both produce bit-identical metrics.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "CLI11.hpp"
#include "forage/harness.hpp"
#include "forage/params.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_outcomes(const forage::RowResult& a, const forage::RowResult& b) {
    if (a.replicates.size() != b.replicates.size()) return false;
    for (std::size_t i = 0; i < a.replicates.size(); ++i) {
        const auto& x = a.replicates[i];
        const auto& y = b.replicates[i];
        if (x.fault != y.fault || x.seed != y.seed ||
            x.targets_collected != y.targets_collected || x.collision_s != y.collision_s ||
            x.travel_s != y.travel_s || x.search_s != y.search_s) {
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel replicate execution benchmark"};
    int replicates = 16;
    int robots = 16;
    int targets = 256;
    double minutes = 10.0;
    int jobs = 0;
    std::uint64_t seed = 42;
    std::string mode = "mpfa";
    app.add_option("--replicates", replicates, "replicates per run");
    app.add_option("--robots", robots, "robots per world");
    app.add_option("--targets", targets, "targets per world");
    app.add_option("--minutes", minutes, "simulated minutes");
    app.add_option("--jobs", jobs, "parallel worker count (0 = auto)");
    app.add_option("--seed", seed, "plan seed");
    app.add_option("--mode", mode, "cpfa or mpfa");
    CLI11_PARSE(app, argc, argv);

    forage::PlanRow row{forage::mode_from_string(mode), robots, targets, minutes};
    forage::ParamSet params = forage::baseline_params();  // documented defaults

    std::printf("row: %s, %d robots, %d targets, %.1f min, %d replicates\n", mode.c_str(), robots,
                targets, minutes, replicates);

    auto t0 = std::chrono::steady_clock::now();
    forage::RowResult serial =
        forage::run_row(row, params, replicates, seed, forage::ExecPolicy{true, 0});
    const double t_serial = seconds_since(t0);
    std::printf("serial:   %7.2f s  (%.2f s/replicate)\n", t_serial, t_serial / replicates);

    t0 = std::chrono::steady_clock::now();
    forage::RowResult parallel =
        forage::run_row(row, params, replicates, seed, forage::ExecPolicy{false, jobs});
    const double t_parallel = seconds_since(t0);
    std::printf("parallel: %7.2f s  (%.2f s/replicate), speedup %.2fx\n", t_parallel,
                t_parallel / replicates, t_serial / t_parallel);

    if (!same_outcomes(serial, parallel)) {
        std::fprintf(stderr, "FAIL: serial and parallel runs disagree\n");
        return 1;
    }
    std::printf("serial and parallel outcomes are identical\n");
    return 0;
}
