#include <cuda_runtime.h>

#include "cuda/components/atomic.cuh"

namespace gko {
namespace kernels {
namespace cuda {
namespace coo {

constexpr int warps_per_block = 4;

template <typename ValueType, typename IndexType>
__global__ void spmv(IndexType nnz, const ValueType* values, const IndexType* rows,
                     const IndexType* cols, const ValueType* b, ValueType* c)
{
    const auto idx = static_cast<IndexType>(blockIdx.x) * blockDim.x + threadIdx.x;
    if (idx < nnz) {
        atomicAdd(c + rows[idx], values[idx] * b[cols[idx]]);
    }
}

template <typename ValueType, typename IndexType>
void spmv(IndexType nnz, const ValueType* values, const IndexType* rows,
          const IndexType* cols, const ValueType* b, ValueType* c, cudaStream_t stream)
{
    const dim3 block(warps_per_block * 32);
    const dim3 grid((nnz + block.x - 1) / block.x);
    spmv<ValueType, IndexType><<<grid, block, 0, stream>>>(nnz, values, rows, cols, b, c);
    cudaStreamSynchronize(stream);
}

}  // namespace coo
}  // namespace cuda
}  // namespace kernels
}  // namespace gko
