// Serial vs OpenMP timings for the two parallel kernels.

#include "conslin/conslaw.hpp"
#include "conslin/probe.hpp"
#include "conslin/workspace.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>
#include <omp.h>

using namespace conslin;

namespace {

template <class F>
double best_of(int reps, F f)
{
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial, double parallel)
{
    std::cout << name << ": serial " << serial << " ms, parallel " << parallel << " ms, speedup "
              << serial / parallel << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"conslin kernel benchmark"};
    int points = 2000, reps = 3;
    int order = 1;
    std::string file = std::string(CONSLIN_SOURCE_DIR) + "/corpus/burgers.ws";
    app.add_option("--points", points, "probe points per batch");
    app.add_option("--reps", reps, "repetitions, best time reported");
    app.add_option("--order", order, "multiplier ansatz order for the determining system");
    app.add_option("--workspace", file, "workspace whose system is benchmarked");
    CLI11_PARSE(app, argc, argv);

    auto ws = load_workspace(file);
    std::cout << "threads: " << omp_get_max_threads() << ", workspace: " << file << "\n";

    Expr e = ws.system.equations[0];
    for (std::size_t i = 1; i < ws.system.size(); ++i) e = e * ws.system.equations[i] + e;
    std::vector<ProbeAssignment> pts;
    for (int s = 0; s < points; ++s) pts.push_back(random_assignment({e}, static_cast<std::uint64_t>(s)));
    row("probe_batch (" + std::to_string(points) + " points)", best_of(reps, [&] { probe_batch_serial(e, pts); }),
        best_of(reps, [&] { probe_batch(e, pts); }));

    MultiplierAnsatz a;
    a.order = order;
    row("determining_system (order " + std::to_string(order) + ")",
        best_of(reps, [&] { determining_system_serial(ws.system, a); }),
        best_of(reps, [&] { determining_system(ws.system, a); }));
}
