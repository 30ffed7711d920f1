#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpuport/error.hpp"
#include "gpuport/simt/simulator.hpp"
#include "gpuport/simt/warp_config.hpp"

namespace gpuport::dispatch {

enum class ExecKind { reference, sim_warp32, sim_warp64 };

inline constexpr ExecKind all_exec_kinds[] = {ExecKind::reference, ExecKind::sim_warp32,
                                              ExecKind::sim_warp64};

/// Short name used on the command line and in result files.
inline std::string_view short_name(ExecKind kind) {
  switch (kind) {
    case ExecKind::reference: return "ref";
    case ExecKind::sim_warp32: return "warp32";
    case ExecKind::sim_warp64: return "warp64";
  }
  return "?";
}

inline std::string_view long_name(ExecKind kind) {
  switch (kind) {
    case ExecKind::reference: return "reference";
    case ExecKind::sim_warp32: return "sim-warp32";
    case ExecKind::sim_warp64: return "sim-warp64";
  }
  return "?";
}

inline ExecKind parse_exec_kind(std::string_view name) {
  for (auto kind : all_exec_kinds) {
    if (name == short_name(kind) || name == long_name(kind)) return kind;
  }
  throw InvalidConfig("unknown executor '" + std::string(name) +
                      "' (expected ref, warp32 or warp64)");
}

/// Handle selecting where an operation runs. Simulated executors own a
/// Simulator whose WarpConfig is the only source of the warp size.
class Executor {
 public:
  static Executor create(ExecKind kind, simt::LaunchOptions options = {}) {
    switch (kind) {
      case ExecKind::sim_warp32: return Executor(kind, simt::WarpConfig::warp32(), options);
      case ExecKind::sim_warp64: return Executor(kind, simt::WarpConfig::warp64(), options);
      case ExecKind::reference: break;
    }
    return Executor(ExecKind::reference, std::nullopt, options);
  }
  static Executor reference() { return create(ExecKind::reference); }
  static Executor warp32(simt::LaunchOptions options = {}) {
    return create(ExecKind::sim_warp32, options);
  }
  static Executor warp64(simt::LaunchOptions options = {}) {
    return create(ExecKind::sim_warp64, options);
  }

  ExecKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return short_name(kind_); }
  bool simulated() const noexcept { return simulator_.has_value(); }

  const simt::WarpConfig& config() const {
    if (!simulator_) throw InvalidConfig("the reference executor has no warp config");
    return simulator_->config();
  }
  simt::Simulator& simulator() {
    if (!simulator_) throw InvalidConfig("the reference executor has no simulator");
    return *simulator_;
  }

  /// When set, counters keep accumulating across operations.
  void set_accumulate(bool accumulate) noexcept { accumulate_ = accumulate; }

  /// Called by dispatch before running an operation.
  void begin_operation() {
    if (accumulate_) return;
    reference_counters_ = {};
    if (simulator_) simulator_->reset_counters();
  }

  /// Sequential work recorded by reference implementations.
  void record_reference_steps(std::uint64_t steps) {
    reference_counters_.launches += 1;
    reference_counters_.lane_steps += steps;
  }

  /// Counters of the last operation (or of all since accumulation began).
  simt::Counters instrumentation_report() const {
    return simulator_ ? simulator_->counters() : reference_counters_;
  }

 private:
  Executor(ExecKind kind, std::optional<simt::WarpConfig> config, simt::LaunchOptions options)
      : kind_(kind) {
    if (config) simulator_.emplace(*config, options);
  }

  ExecKind kind_;
  std::optional<simt::Simulator> simulator_;
  simt::Counters reference_counters_;
  bool accumulate_ = false;
};

inline simt::Counters instrumentation_report(const Executor& exec) {
  return exec.instrumentation_report();
}

}  // namespace gpuport::dispatch
