#include <benchmark/benchmark.h>

#include "softarm/actuation.hpp"
#include "softarm/bvp.hpp"
#include "softarm/tracking.hpp"

using namespace softarm;

namespace {

SweepProblem gravity_problem(const RodModel& rod)
{
    SweepProblem prob;
    prob.rod = &rod;
    prob.base.R = rot_y(0.6);
    prob.loads = uniform_load(gravity_load(rod.params(0)));
    return prob;
}

} // namespace

static void BM_Sweep(benchmark::State& state)
{
    const MaterialParams p;
    const RodModel rod({p, p}, static_cast<int>(state.range(0)));
    const SweepProblem prob = gravity_problem(rod);
    const BaseWrench guess{Vec3(0.0, 0.0, -25.0), Vec3(0.1, 0.0, 0.0)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep_rod(guess, prob));
    }
}
BENCHMARK(BM_Sweep)->Arg(10)->Arg(20)->Arg(40);

static void BM_ShootingColdStart(benchmark::State& state)
{
    const MaterialParams p;
    const RodModel rod({p, p}, 10);
    const SweepProblem prob = gravity_problem(rod);
    for (auto _ : state) {
        benchmark::DoNotOptimize(shooting_solve({}, prob));
    }
}
BENCHMARK(BM_ShootingColdStart);

static void BM_TrackingSecond(benchmark::State& state)
{
    ScenarioConfig cfg = ScenarioConfig::bending();
    cfg.duration = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_tracking(cfg));
    }
}
BENCHMARK(BM_TrackingSecond)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
