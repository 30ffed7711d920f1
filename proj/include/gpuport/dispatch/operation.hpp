#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>

#include "gpuport/dispatch/executor.hpp"
#include "gpuport/error.hpp"

namespace gpuport::dispatch {

template <class Signature>
class Operation;

/// An algorithm with one implementation per backend. The reference
/// implementation is mandatory; other backends may be left unbound, in which
/// case dispatching to them raises NotImplementedForBackend.
template <class R, class... Args>
class Operation<R(Args...)> {
 public:
  using Impl = std::function<R(Executor&, Args...)>;

  Operation(std::string name, Impl reference) : name_(std::move(name)) {
    if (!reference) throw InvalidConfig("operation " + name_ + " needs a reference kernel");
    impls_[index(ExecKind::reference)] = std::move(reference);
  }

  Operation& bind(ExecKind kind, Impl impl) {
    impls_[index(kind)] = std::move(impl);
    return *this;
  }

  const std::string& name() const noexcept { return name_; }
  bool implemented_for(ExecKind kind) const { return static_cast<bool>(impls_[index(kind)]); }

  R operator()(Executor& exec, Args... args) const {
    const auto& impl = impls_[index(exec.kind())];
    if (!impl) {
      throw NotImplementedForBackend("operation " + name_ + " is not implemented for " +
                                     std::string(long_name(exec.kind())));
    }
    exec.begin_operation();
    return impl(exec, std::forward<Args>(args)...);
  }

 private:
  static std::size_t index(ExecKind kind) { return static_cast<std::size_t>(kind); }

  std::string name_;
  std::array<Impl, 3> impls_;
};

/// Runs `op` on the backend selected by `exec`.
template <class R, class... Args, class... Actual>
R dispatch(const Operation<R(Args...)>& op, Executor& exec, Actual&&... args) {
  return op(exec, std::forward<Actual>(args)...);
}

}  // namespace gpuport::dispatch
