#include <benchmark/benchmark.h>

#include <random>

#include "boldg/hilbert.hpp"
#include "boldg/operators.hpp"
#include "boldg/projection.hpp"
#include "boldg/solutions.hpp"
#include "boldg/stability.hpp"
#include "boldg/time_integration.hpp"

using namespace boldg;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

OperatorSet make_ops(int n, int k) {
  const SpacePtr space = make_space(build_mesh(-150.0, 150.0, n), k);
  FluxConfig flux;
  return assemble_operators(space, flux, std::make_shared<const HilbertOperator>(assemble_hilbert(space, {})));
}

void BM_HilbertAssemble(benchmark::State& state) {
  const SpacePtr space = make_space(build_mesh(-150.0, 150.0, static_cast<int>(state.range(0))), 2);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_hilbert(space, {}));
}
BENCHMARK(BM_HilbertAssemble)->Arg(160)->Arg(640)->Unit(benchmark::kMillisecond);

void BM_HilbertApplyFft(benchmark::State& state) {
  const SpacePtr space = make_space(build_mesh(-150.0, 150.0, static_cast<int>(state.range(0))), 2);
  const HilbertOperator h = assemble_hilbert(space, {});
  const Eigen::VectorXd q = random_vector(space->dofs());
  for (auto _ : state) benchmark::DoNotOptimize(h.apply_moments(q));
}
BENCHMARK(BM_HilbertApplyFft)->RangeMultiplier(2)->Range(160, 2560)->Unit(benchmark::kMicrosecond);

void BM_HilbertApplyDense(benchmark::State& state) {
  const SpacePtr space = make_space(build_mesh(-150.0, 150.0, static_cast<int>(state.range(0))), 2);
  const Eigen::MatrixXd k = assemble_hilbert(space, {}).dense();
  const Eigen::VectorXd q = random_vector(space->dofs());
  Eigen::VectorXd out(q.size());
  for (auto _ : state) {
    out.noalias() = k * q;
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_HilbertApplyDense)->RangeMultiplier(2)->Range(160, 1280)->Unit(benchmark::kMicrosecond);

void BM_NonlinearRhs(benchmark::State& state) {
  const OperatorSet ops = make_ops(static_cast<int>(state.range(0)), 2);
  const TwoSoliton exact(0.3, 0.6, -30.0, -55.0);
  const Eigen::VectorXd u = radau_project([&](double x) { return exact(x, 0.0); }, ops.space_ptr()).coeffs();
  const FluxFunction f = FluxFunction::burgers();
  for (auto _ : state) benchmark::DoNotOptimize(nonlinear_rhs(u, ops, f));
}
BENCHMARK(BM_NonlinearRhs)->RangeMultiplier(2)->Range(160, 2560)->Unit(benchmark::kMicrosecond);

void BM_LserkStep(benchmark::State& state) {
  const OperatorSet ops = make_ops(static_cast<int>(state.range(0)), 2);
  const TwoSoliton exact(0.3, 0.6, -30.0, -55.0);
  const Eigen::VectorXd u = radau_project([&](double x) { return exact(x, 0.0); }, ops.space_ptr()).coeffs();
  const FluxFunction f = FluxFunction::burgers();
  const double tau = 1.5 / operator_norm(ops);
  const auto rhs = [&](const Eigen::VectorXd& v) { return nonlinear_rhs(v, ops, f); };
  for (auto _ : state) benchmark::DoNotOptimize(lserk54_step(u, tau, rhs));
}
BENCHMARK(BM_LserkStep)->Arg(640)->Arg(1280)->Unit(benchmark::kMicrosecond);

void BM_CrankNicolsonStep(benchmark::State& state) {
  const SpacePtr space = make_space(build_mesh(-15.0, 15.0, static_cast<int>(state.range(0))), 1);
  FluxConfig flux;
  flux.boundary = Boundary::periodic;
  HilbertOptions opt;
  opt.kernel = HilbertKernel::periodic;
  const OperatorSet ops(space, flux, std::make_shared<const HilbertOperator>(assemble_hilbert(space, opt)));
  const OneSoliton exact(0.25, 15.0);
  const Eigen::VectorXd u = radau_project([&](double x) { return exact(x, 0.0); }, space).coeffs();
  CrankNicolson cn(ops, FluxFunction::burgers(), TimeConfig{});
  const double tau = 0.5 * space->mesh().h();
  cn.step(u, tau);  // factor the preconditioner outside the timed loop
  for (auto _ : state) benchmark::DoNotOptimize(cn.step(u, tau));
}
BENCHMARK(BM_CrankNicolsonStep)->Arg(160)->Arg(640)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
