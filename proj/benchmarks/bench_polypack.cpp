#include <benchmark/benchmark.h>

#include "polypack/codegen.hpp"
#include "polypack/counting.hpp"
#include "polypack/kernels.hpp"
#include "polypack/runtime.hpp"
#include "polypack/stur.hpp"

using namespace polypack;

namespace {

KernelPlan plan_for(const std::string& kernel, Compression c) {
  return compile_rule(parse_program(builtin_kernel(kernel).source), "A", c);
}

std::vector<std::vector<double>> filled_buffers(const KernelPlan& plan, const Binding& b) {
  std::vector<std::vector<double>> bufs;
  for (auto len : plan.buffer_lengths(b)) bufs.emplace_back(static_cast<std::size_t>(len), 1.0);
  return bufs;
}

// Args: n, compression level, workers. Timed on the wall clock so worker threads count.
void BM_Execute(benchmark::State& state, const char* kernel) {
  const auto level = static_cast<Compression>(state.range(1));
  const auto plan = plan_for(kernel, level);
  const Binding b = resolve_binding(plan.params, {{"n", state.range(0)}});
  auto bufs = filled_buffers(plan, b);
  ExecOptions opt;
  opt.workers = static_cast<int>(state.range(2));
  std::uint64_t iterations = 0;
  for (auto _ : state) {
    iterations = execute(plan, bufs, b, opt).iterations;
    benchmark::DoNotOptimize(bufs.front().data());
  }
  state.counters["iters/s"] = benchmark::Counter(static_cast<double>(iterations),
                                                 benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Compile(benchmark::State& state, const char* kernel) {
  const auto program = parse_program(builtin_kernel(kernel).source);
  for (auto _ : state) benchmark::DoNotOptimize(compile_rule(program, "A"));
}

void BM_CountTriangle(benchmark::State& state) {
  Polyhedron tri;
  tri.dims = {"i", "j"};
  tri.params = {"n"};
  auto v = [](const char* n) { return AffineExpr::var(n); };
  tri.constraints = {Constraint::ge(v("i")), Constraint::ge(v("n") - v("i") - Rational(1)), Constraint::ge(v("j")),
                     Constraint::ge(v("i") - v("j"))};
  for (auto _ : state) benchmark::DoNotOptimize(count_points(tri));
}

void BM_Reference(benchmark::State& state, const char* kernel) {
  const auto program = parse_program(builtin_kernel(kernel).source);
  const auto plan = compile_rule(program, "A");
  const Binding b = resolve_binding(plan.params, {{"n", state.range(0)}});
  const auto inputs = random_inputs<double>(plan, b, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference_execute(program, "A", inputs, b));
}

constexpr int kNone = static_cast<int>(Compression::None);
constexpr int kFull = static_cast<int>(Compression::InputOutput);

}  // namespace

BENCHMARK_CAPTURE(BM_Execute, SpMV_D, "SpMV_D")
    ->UseRealTime()
    ->Args({1 << 12, kNone, 1})
    ->Args({1 << 12, kFull, 1})
    ->Args({1 << 20, kFull, 1});
BENCHMARK_CAPTURE(BM_Execute, SpMV_UT, "SpMV_UT")
    ->UseRealTime()
    ->Args({1 << 11, kFull, 1})
    ->Args({1 << 11, kFull, 2})
    ->Args({1 << 11, kFull, 8});
BENCHMARK_CAPTURE(BM_Execute, TTM_UT, "TTM_UT")->UseRealTime()->Args({64, kNone, 1})->Args({64, kFull, 1});
BENCHMARK_CAPTURE(BM_Execute, MTT_D, "MTT_D")->UseRealTime()->Args({256, kNone, 1})->Args({256, kFull, 1});
BENCHMARK_CAPTURE(BM_Reference, SpMV_UT, "SpMV_UT")->Arg(256);
BENCHMARK_CAPTURE(BM_Compile, TTM_UT, "TTM_UT");
BENCHMARK_CAPTURE(BM_Compile, SpMV_L, "SpMV_L");
BENCHMARK(BM_CountTriangle);
BENCHMARK_MAIN();
