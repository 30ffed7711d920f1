#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gpuport {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;

  /// Short class name, used in reports.
  virtual const char* kind() const noexcept { return "Error"; }
};

#define GPUPORT_DECLARE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    const char* kind() const noexcept override { return #Name; }     \
  }

// simt / coop
GPUPORT_DECLARE_ERROR(InvalidConfig);
GPUPORT_DECLARE_ERROR(DivergentCollective);
GPUPORT_DECLARE_ERROR(InvalidGroupSize);
GPUPORT_DECLARE_ERROR(InvalidSourceRank);
GPUPORT_DECLARE_ERROR(InactiveSourceLane);

// sparse / kernels
GPUPORT_DECLARE_ERROR(ParseError);
GPUPORT_DECLARE_ERROR(UnsupportedFormat);
GPUPORT_DECLARE_ERROR(InvalidMatrix);
GPUPORT_DECLARE_ERROR(InvalidSliceSize);
GPUPORT_DECLARE_ERROR(DimensionMismatch);
GPUPORT_DECLARE_ERROR(BreakdownError);

// dispatch
GPUPORT_DECLARE_ERROR(NotImplementedForBackend);

// cuda2hip
GPUPORT_DECLARE_ERROR(MalformedLaunch);
GPUPORT_DECLARE_ERROR(UnterminatedString);
GPUPORT_DECLARE_ERROR(UnterminatedComment);
GPUPORT_DECLARE_ERROR(RuleFileError);

// io / bench
GPUPORT_DECLARE_ERROR(IoError);
GPUPORT_DECLARE_ERROR(MissingPair);

#undef GPUPORT_DECLARE_ERROR

/// Out-of-bounds access by a simulated lane; carries the offending thread and call site.
class LaneFault : public Error {
 public:
  LaneFault(std::uint32_t tid, std::string site, const std::string& what)
      : Error("lane fault (tid " + std::to_string(tid) + " at " + site +
              "): " + what),
        tid_(tid),
        site_(std::move(site)) {}

  const char* kind() const noexcept override { return "LaneFault"; }
  std::uint32_t tid() const noexcept { return tid_; }
  const std::string& site() const noexcept { return site_; }

 private:
  std::uint32_t tid_;
  std::string site_;
};

}  // namespace gpuport
