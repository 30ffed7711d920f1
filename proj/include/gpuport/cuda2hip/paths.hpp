#pragma once

// Target path naming: the last `cuda` directory becomes `hip`, and
// `.cu` / `.cuh` become `.hip.cpp` / `.hip.hpp`.

#include <string>
#include <string_view>
#include <vector>

namespace gpuport::cuda2hip {

inline bool is_cuda_source(std::string_view name) {
  return name.ends_with(".cu") || name.ends_with(".cuh");
}

inline std::string map_extension(std::string name) {
  if (name.ends_with(".cuh")) return name.substr(0, name.size() - 4) + ".hip.hpp";
  if (name.ends_with(".cu")) return name.substr(0, name.size() - 3) + ".hip.cpp";
  return name;
}

/// Maps a '/'-separated path. `found_root` reports whether a `cuda`
/// directory segment was present.
inline std::string map_cuda_path(std::string_view path, bool* found_root = nullptr) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto slash = path.find('/', start);
    parts.emplace_back(path.substr(start, slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  bool found = false;
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    if (parts[i] == "cuda") {
      parts[i] = "hip";
      found = true;
      break;
    }
  }
  if (found_root) *found_root = found;
  parts.back() = map_extension(parts.back());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '/';
    out += parts[i];
  }
  return out;
}

namespace detail {
inline std::string map_include_path(const std::string& path) { return map_cuda_path(path); }
}  // namespace detail

}  // namespace gpuport::cuda2hip
