#include <gtest/gtest.h>

#include <vector>

#include "gpuport/dispatch/registry.hpp"
#include "gpuport/sparse/convert.hpp"
#include "gpuport/sparse/generate.hpp"

namespace gpuport::dispatch {
namespace {

TEST(ExecKind, NamesRoundTrip) {
  for (auto kind : all_exec_kinds) {
    EXPECT_EQ(parse_exec_kind(short_name(kind)), kind);
    EXPECT_EQ(parse_exec_kind(long_name(kind)), kind);
  }
  EXPECT_THROW(parse_exec_kind("warp16"), InvalidConfig);
}

TEST(Executor, WarpSizeComesFromConfig) {
  EXPECT_EQ(Executor::warp32().config().warp_size(), 32);
  EXPECT_EQ(Executor::warp64().config().warp_size(), 64);
  auto ref = Executor::reference();
  EXPECT_FALSE(ref.simulated());
  EXPECT_THROW(ref.config(), InvalidConfig);
  EXPECT_THROW(ref.simulator(), InvalidConfig);
}

TEST(Executor, ReportBeforeAnyLaunchIsZero) {
  for (auto kind : all_exec_kinds) {
    auto exec = Executor::create(kind);
    EXPECT_EQ(instrumentation_report(exec), simt::Counters{});
  }
}

TEST(Operation, UnboundBackendRaises) {
  using Op = Operation<int(int)>;
  Op twice("twice", [](Executor&, int v) { return 2 * v; });
  auto ref = Executor::reference();
  auto w64 = Executor::warp64();
  EXPECT_EQ(dispatch(twice, ref, 4), 8);
  EXPECT_FALSE(twice.implemented_for(ExecKind::sim_warp64));
  EXPECT_THROW(dispatch(twice, w64, 4), NotImplementedForBackend);
  twice.bind(ExecKind::sim_warp64, [](Executor& e, int v) { return e.config().warp_size() * v; });
  EXPECT_EQ(dispatch(twice, w64, 2), 128);
  EXPECT_THROW(Op("empty", {}), InvalidConfig);
}

TEST(Registry, EveryOperationOnEveryBackend) {
  const auto& reg = registry();
  EXPECT_EQ(reg.names(),
            (std::vector<std::string>{"spmv_coo", "spmv_csr", "spmv_sellp", "cg", "reduce"}));
  for (auto kind : all_exec_kinds) {
    EXPECT_TRUE(reg.spmv_coo.implemented_for(kind));
    EXPECT_TRUE(reg.spmv_csr.implemented_for(kind));
    EXPECT_TRUE(reg.spmv_sellp.implemented_for(kind));
    EXPECT_TRUE(reg.cg.implemented_for(kind));
    EXPECT_TRUE(reg.reduce.implemented_for(kind));
  }
}

TEST(Registry, BackendsAgreeOnIntegerSpmv) {
  const auto m = sparse::generate::random(90, 80, 0.2, 4, true);
  const auto x = sparse::generate::random_vector(80, 5, true);
  const auto csr = sparse::coo_to_csr(m);
  const auto sellp = sparse::coo_to_sellp(m);
  auto ref = Executor::reference();
  const auto expected = dispatch(registry().spmv_coo, ref, m, x);
  for (auto kind : all_exec_kinds) {
    auto exec = Executor::create(kind);
    EXPECT_EQ(dispatch(registry().spmv_coo, exec, m, x), expected);
    EXPECT_EQ(dispatch(registry().spmv_csr, exec, csr, x), expected);
    EXPECT_EQ(dispatch(registry().spmv_sellp, exec, sellp, x), expected);
    EXPECT_GT(instrumentation_report(exec).lane_steps, 0u);
  }
}

TEST(Registry, ReduceCountsOneShufflePerLevel) {
  const std::vector<double> input{1, 2, 3, 4};
  for (auto kind : {ExecKind::sim_warp32, ExecKind::sim_warp64}) {
    auto exec = Executor::create(kind);
    const auto r = dispatch(registry().reduce, exec, 4u, 1u, std::span<const double>(input));
    EXPECT_EQ(r.subwarp_results, (std::vector<double>{2.5}));
    EXPECT_EQ(r.shuffle_ops_per_lane, 2u);
    EXPECT_EQ(instrumentation_report(exec).shuffles, 2u);
    EXPECT_EQ(instrumentation_report(exec).atomics, 0u);
  }
  auto ref = Executor::reference();
  const auto r = dispatch(registry().reduce, ref, 4u, 1u, std::span<const double>(input));
  EXPECT_EQ(r.subwarp_results, (std::vector<double>{2.5}));
  EXPECT_EQ(instrumentation_report(ref).shuffles, 0u);
}

TEST(Registry, CountersResetPerOperationUnlessAccumulating) {
  const auto m = sparse::generate::tridiagonal(40);
  const sparse::DenseVector x(40, 1.0);
  auto exec = Executor::warp32();
  dispatch(registry().spmv_coo, exec, m, x);
  const auto once = instrumentation_report(exec);
  dispatch(registry().spmv_coo, exec, m, x);
  EXPECT_EQ(instrumentation_report(exec), once);
  exec.set_accumulate(true);
  dispatch(registry().spmv_coo, exec, m, x);
  EXPECT_EQ(instrumentation_report(exec).lane_steps, 2 * once.lane_steps);
}

TEST(Registry, CgAgreesAcrossBackends) {
  const auto a = sparse::coo_to_sellp(sparse::generate::poisson2d(10));
  const sparse::DenseVector b(100, 1.0);
  auto ref = Executor::reference();
  const auto expected = dispatch(registry().cg, ref, a, b, kernels::CgOptions{});
  EXPECT_TRUE(expected.converged);
  for (auto kind : {ExecKind::sim_warp32, ExecKind::sim_warp64}) {
    auto exec = Executor::create(kind);
    const auto r = dispatch(registry().cg, exec, a, b, kernels::CgOptions{});
    EXPECT_EQ(r.iterations, expected.iterations);
    EXPECT_EQ(r.x, expected.x);
    EXPECT_EQ(instrumentation_report(exec).atomics, 0u);
  }
  const auto rect = sparse::coo_to_sellp(sparse::generate::random(3, 4, 0.5, 1, true));
  EXPECT_THROW(dispatch(registry().cg, ref, rect, sparse::DenseVector(3, 1.0),
                        kernels::CgOptions{}),
               DimensionMismatch);
}

}  // namespace
}  // namespace gpuport::dispatch
