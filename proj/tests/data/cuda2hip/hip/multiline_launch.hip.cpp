#include "hip/base/types.hpp"

template <typename ValueType>
__global__ void axpy(int n, ValueType alpha, const ValueType* x, ValueType* y);

void run(int n, double alpha, const double* x, double* y, hipStream_t stream)
{
    constexpr int block_size = 128;
    hipLaunchKernelGGL(HIP_KERNEL_NAME(axpy<double>), dim3((n + block_size - 1) / block_size), dim3(block_size), 0, stream, n, alpha,
        x, y);
}
