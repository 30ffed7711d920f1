#pragma once

// The closed table of operations and their per-backend kernels.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gpuport/dispatch/executor.hpp"
#include "gpuport/dispatch/operation.hpp"
#include "gpuport/kernels/cg.hpp"
#include "gpuport/kernels/reduce.hpp"
#include "gpuport/kernels/spmv.hpp"
#include "gpuport/sparse/matrix.hpp"
#include "gpuport/sparse/reference.hpp"

namespace gpuport::dispatch {

using sparse::DenseVector;

using SpmvCooOp = Operation<DenseVector(const sparse::CooMatrix&, const DenseVector&)>;
using SpmvCsrOp = Operation<DenseVector(const sparse::CsrMatrix&, const DenseVector&)>;
using SpmvSellpOp = Operation<DenseVector(const sparse::SellpMatrix&, const DenseVector&)>;
using CgOp = Operation<kernels::CgResult(const sparse::SellpMatrix&, const DenseVector&,
                                         const kernels::CgOptions&)>;
using ReduceOp = Operation<kernels::ReduceBenchResult(std::uint32_t, std::uint32_t,
                                                      std::span<const double>)>;

namespace detail {

template <class Matrix, class SimKernel>
auto spmv_operation(std::string name, SimKernel kernel) {
  using Op = Operation<DenseVector(const Matrix&, const DenseVector&)>;
  Op op(std::move(name), [](Executor& exec, const Matrix& m, const DenseVector& x) {
    auto y = sparse::dense_spmv_reference(m, x);
    exec.record_reference_steps(sparse::reference_spmv_steps(m));
    return y;
  });
  auto sim = [kernel](Executor& exec, const Matrix& m, const DenseVector& x) {
    return kernel(exec.simulator(), m, x);
  };
  op.bind(ExecKind::sim_warp32, sim);
  op.bind(ExecKind::sim_warp64, sim);
  return op;
}

inline void check_square(const sparse::SellpMatrix& m) {
  if (m.nrows() != m.ncols()) {
    throw DimensionMismatch("cg needs a square matrix, got " + std::to_string(m.nrows()) +
                            "x" + std::to_string(m.ncols()));
  }
}

inline CgOp cg_operation() {
  CgOp op("cg", [](Executor& exec, const sparse::SellpMatrix& m, const DenseVector& b,
                   const kernels::CgOptions& options) {
    check_square(m);
    return kernels::cg_solve(
        [&](const DenseVector& v) {
          exec.record_reference_steps(sparse::reference_spmv_steps(m));
          return sparse::dense_spmv_reference(m, v);
        },
        static_cast<std::size_t>(m.nrows()), b, options);
  });
  auto sim = [](Executor& exec, const sparse::SellpMatrix& m, const DenseVector& b,
                const kernels::CgOptions& options) {
    check_square(m);
    return kernels::cg_solve(
        [&](const DenseVector& v) { return kernels::spmv_sellp(exec.simulator(), m, v); },
        static_cast<std::size_t>(m.nrows()), b, options);
  };
  op.bind(ExecKind::sim_warp32, sim);
  op.bind(ExecKind::sim_warp64, sim);
  return op;
}

inline ReduceOp reduce_operation() {
  // Reference: each size-long chunk of the input averaged sequentially.
  ReduceOp op("reduce", [](Executor& exec, std::uint32_t size, std::uint32_t inner_loops,
                           std::span<const double> input) {
    if (size == 0 || !is_power_of_two(size)) {
      throw InvalidGroupSize("subwarp size must be a power of two");
    }
    if (input.size() % size != 0) {
      throw InvalidConfig("reduce input length is not a multiple of the subwarp size");
    }
    const std::uint32_t block = static_cast<std::uint32_t>(input.size());
    kernels::ReduceBenchResult result;
    result.subwarps = block / size;
    for (std::uint32_t s = 0; s < result.subwarps; ++s) {
      std::vector<double> values(input.begin() + s * size, input.begin() + (s + 1) * size);
      for (std::uint32_t i = 0; i < inner_loops; ++i) {
        double sum = 0.0;
        for (double v : values) sum += v;
        values.assign(size, sum / size);
      }
      result.subwarp_results.push_back(values[0]);
    }
    exec.record_reference_steps(std::uint64_t{inner_loops} * block);
    return result;
  });
  auto sim = [](Executor& exec, std::uint32_t size, std::uint32_t inner_loops,
                std::span<const double> input) {
    return kernels::reduce_microbench(exec.simulator(), size, inner_loops, input);
  };
  op.bind(ExecKind::sim_warp32, sim);
  op.bind(ExecKind::sim_warp64, sim);
  return op;
}

}  // namespace detail

struct Registry {
  SpmvCooOp spmv_coo = detail::spmv_operation<sparse::CooMatrix>(
      "spmv_coo", [](simt::Simulator& s, const sparse::CooMatrix& m, const DenseVector& x) {
        return kernels::spmv_coo(s, m, x);
      });
  SpmvCsrOp spmv_csr = detail::spmv_operation<sparse::CsrMatrix>(
      "spmv_csr", [](simt::Simulator& s, const sparse::CsrMatrix& m, const DenseVector& x) {
        return kernels::spmv_csr(s, m, x);
      });
  SpmvSellpOp spmv_sellp = detail::spmv_operation<sparse::SellpMatrix>(
      "spmv_sellp", [](simt::Simulator& s, const sparse::SellpMatrix& m, const DenseVector& x) {
        return kernels::spmv_sellp(s, m, x);
      });
  CgOp cg = detail::cg_operation();
  ReduceOp reduce = detail::reduce_operation();

  std::vector<std::string> names() const {
    return {spmv_coo.name(), spmv_csr.name(), spmv_sellp.name(), cg.name(), reduce.name()};
  }
};

/// Built once on first use and immutable afterwards.
inline const Registry& registry() {
  static const Registry instance;
  return instance;
}

}  // namespace gpuport::dispatch
