#include <benchmark/benchmark.h>

#include "geoamp/amplifier.hpp"
#include "geoamp/counting.hpp"
#include "geoamp/order_config.hpp"
#include "geoamp/oscillatory.hpp"
#include "geoamp/phase.hpp"
#include "geoamp/spherical.hpp"

using namespace geoamp;

namespace {

const OrderBasis& shipped_order() {
  static const OrderBasis R = parse_order_config(R"(
[algebra]
a = 2
b = -11
[order]
basis = [["1","0","0","0"], ["0","1","0","0"], ["1/2","0","1/2","0"], ["0","1/2","0","1/2"]]
q = 22
)");
  return R;
}

void BM_CosetReps(benchmark::State& st) {
  const auto& R = shipped_order();
  for (auto _ : st) benchmark::DoNotOptimize(coset_reps(R, st.range(0)));
}
BENCHMARK(BM_CosetReps)->Arg(7)->Arg(25)->Arg(49);

void BM_SphericalPhi(benchmark::State& st) {
  const double s = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(spherical_phi(s, 1.3));
}
BENCHMARK(BM_SphericalPhi)->Arg(20)->Arg(200)->Arg(2000);

void BM_KernelPoint(benchmark::State& st) {
  const auto w = two_sided_window(static_cast<double>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(synthesize_kernel(w, 2, 0.4));
}
BENCHMARK(BM_KernelPoint)->Arg(100)->Arg(400);

void BM_CriticalPoints(benchmark::State& st) {
  const PhaseContext ctx(mat_k(0.4) * mat_a(0.3) * mat_k(-1.1), 0.5);
  for (auto _ : st) benchmark::DoNotOptimize(find_critical_points(ctx));
}
BENCHMARK(BM_CriticalPoints);

void BM_RestrictionIntegral(benchmark::State& st) {
  const double s = static_cast<double>(st.range(0));
  const Mat2 g = centred_ultraparallel(1.2, 0.3);
  for (auto _ : st) benchmark::DoNotOptimize(restriction_integral(s, 0.3 * s, g, {}, {}));
}
BENCHMARK(BM_RestrictionIntegral)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_CountM(benchmark::State& st) {
  const GeodesicSegment l(GroupElement(mat_n(0.3) * mat_a(0.2) * mat_k(0.7)), 1.0);
  const double kappas[] = {0.05, 0.2, 1.0};
  for (auto _ : st) benchmark::DoNotOptimize(count_M_grid(l, st.range(0), kappas, shipped_order()));
}
BENCHMARK(BM_CountM)->Arg(101)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ExponentMain(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(optimize_exponents(preset_model("main")));
}
BENCHMARK(BM_ExponentMain);

}  // namespace

BENCHMARK_MAIN();
