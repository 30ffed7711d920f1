#include <algorithm>
#include <vector>

// Plain host code: ported unchanged.
template <typename T>
T largest(const std::vector<T>& values)
{
    return *std::max_element(values.begin(), values.end());
}

int shifted(int a, int b) { return (a << b) >> 1; }

std::vector<std::vector<std::vector<int>>> nested;
