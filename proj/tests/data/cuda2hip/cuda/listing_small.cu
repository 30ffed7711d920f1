#include <cuda_runtime.h>

__global__ void my_kernel(float* a, const float* b)
{
    const int tid = blockIdx.x * blockDim.x + threadIdx.x;
    a[tid] += b[tid];
}

void run(float* a, const float* b, int n)
{
    dim3 grid(n / 256);
    dim3 block(256);
    my_kernel<<<grid, block>>>(a, b);
}
