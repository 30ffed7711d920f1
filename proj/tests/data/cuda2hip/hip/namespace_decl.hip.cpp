namespace gko {
namespace kernels {
namespace hip {

__global__ void kern();

}  // namespace cuda
}  // namespace kernels
}  // namespace gko

__global__ void global_kern();

namespace gk = gko::kernels::hip;

void run()
{
    using namespace gko::kernels::hip;
    int cuda = 3;
    hipLaunchKernelGGL(::global_kern, 1, cuda, 0, 0);
    hipLaunchKernelGGL(gk::kern, 1, 1, 0, 0);
}
