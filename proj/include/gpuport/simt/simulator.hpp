#pragma once

// Deterministic lockstep execution of one thread block at a time.
//
// Lanes are C++20 coroutines. A lane runs until it reaches a collective
// (co_await on a subwarp operation), yields, or returns. The simulator
// advances every runnable lane once per round, then resolves each subwarp
// whose lanes have all arrived at the same collective call site. Lanes of a
// subwarp reaching different call sites raise DivergentCollective.
//
// Warp intrinsics in the `_sync` family need no separate treatment here: the
// rendezvous is the synchronization those variants denote.

#include <algorithm>
#include <complex>
#include <coroutine>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numeric>
#include <optional>
#include <source_location>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "gpuport/error.hpp"
#include "gpuport/simt/warp_config.hpp"

namespace gpuport::simt {

/// Coroutine handle owning one lane's program.
class LaneTask {
 public:
  struct promise_type {
    std::exception_ptr error;

    LaneTask get_return_object() {
      return LaneTask(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() noexcept {}
    void unhandled_exception() noexcept { error = std::current_exception(); }
  };

  LaneTask() = default;
  LaneTask(LaneTask&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  LaneTask& operator=(LaneTask&& other) noexcept {
    if (this != &other) {
      reset();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  LaneTask(const LaneTask&) = delete;
  LaneTask& operator=(const LaneTask&) = delete;
  ~LaneTask() { reset(); }

  bool valid() const noexcept { return static_cast<bool>(handle_); }
  bool done() const noexcept { return handle_.done(); }
  void resume() { handle_.resume(); }
  std::coroutine_handle<> handle() const noexcept { return handle_; }
  std::exception_ptr error() const noexcept { return handle_.promise().error; }

 private:
  explicit LaneTask(std::coroutine_handle<promise_type> h) : handle_(h) {}
  void reset() noexcept {
    if (handle_) {
      handle_.destroy();
      handle_ = {};
    }
  }

  std::coroutine_handle<promise_type> handle_;
};

/// Awaitable lane subroutine. A collective reached inside a Task suspends the
/// whole lane; the scheduler resumes the innermost suspended frame.
template <class T>
class Task {
 public:
  struct promise_type {
    std::optional<T> value;
    std::exception_ptr error;
    std::coroutine_handle<> continuation;

    Task get_return_object() {
      return Task(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }

    struct FinalAwaiter {
      bool await_ready() const noexcept { return false; }
      std::coroutine_handle<> await_suspend(
          std::coroutine_handle<promise_type> h) const noexcept {
        return h.promise().continuation;
      }
      void await_resume() const noexcept {}
    };
    FinalAwaiter final_suspend() noexcept { return {}; }

    template <class U>
    void return_value(U&& v) {
      value.emplace(std::forward<U>(v));
    }
    void unhandled_exception() noexcept { error = std::current_exception(); }
  };

  Task(Task&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  Task& operator=(Task&&) = delete;
  ~Task() {
    if (handle_) handle_.destroy();
  }

  bool await_ready() const noexcept { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> caller) noexcept {
    handle_.promise().continuation = caller;
    return handle_;
  }
  T await_resume() {
    auto& p = handle_.promise();
    if (p.error) std::rethrow_exception(p.error);
    return std::move(*p.value);
  }

 private:
  explicit Task(std::coroutine_handle<promise_type> h) : handle_(h) {}
  std::coroutine_handle<promise_type> handle_;
};

enum class CollectiveKind : std::uint8_t { none, shfl, shfl_xor, ballot, yield };

inline const char* to_string(CollectiveKind kind) {
  switch (kind) {
    case CollectiveKind::none: return "none";
    case CollectiveKind::shfl: return "shfl";
    case CollectiveKind::shfl_xor: return "shfl_xor";
    case CollectiveKind::ballot: return "ballot";
    case CollectiveKind::yield: return "yield";
  }
  return "?";
}

struct CallSite {
  const char* file = "";
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  static CallSite from(const std::source_location& loc) {
    return {loc.file_name(), loc.line(), loc.column()};
  }
  friend bool operator==(const CallSite& a, const CallSite& b) {
    return a.line == b.line && a.column == b.column &&
           std::string_view(a.file) == std::string_view(b.file);
  }
  std::string str() const {
    return std::string(file) + ":" + std::to_string(line) + ":" +
           std::to_string(column);
  }
};

/// What a lane asks of its subwarp at a rendezvous. Group geometry is given
/// as lane offset and size within the lane's warp.
struct CollectiveRequest {
  CollectiveKind kind = CollectiveKind::none;
  std::uint32_t group_offset = 0;
  std::uint32_t group_size = 0;
  std::uint64_t payload = 0;
  std::uint64_t payload2 = 0;  // second element of a pair shuffle
  std::uint32_t words = 1;
  std::uint32_t arg = 0;
  bool predicate = false;
  CallSite site;
};

struct Counters {
  std::uint64_t launches = 0;
  std::uint64_t blocks = 0;
  std::uint64_t lanes = 0;
  std::uint64_t lane_steps = 0;
  std::uint64_t shuffles = 0;       // subwarp-level shuffle instructions
  std::uint64_t lane_shuffles = 0;  // lane participations in shuffles
  std::uint64_t ballots = 0;
  std::uint64_t lane_ballots = 0;
  std::uint64_t atomics = 0;

  Counters& operator+=(const Counters& o) {
    launches += o.launches;
    blocks += o.blocks;
    lanes += o.lanes;
    lane_steps += o.lane_steps;
    shuffles += o.shuffles;
    lane_shuffles += o.lane_shuffles;
    ballots += o.ballots;
    lane_ballots += o.lane_ballots;
    atomics += o.atomics;
    return *this;
  }
  friend bool operator==(const Counters&, const Counters&) = default;
};

enum class AtomicOrder {
  seeded,   // one (seed, tid)-keyed lane order per block
  scramble  // a fresh (seed, round)-keyed permutation every round
};

struct LaunchOptions {
  std::uint64_t seed = 42;
  AtomicOrder order = AtomicOrder::seeded;
  bool trace_atomics = false;
};

/// One applied atomic update. `component` is -1 for real scalars, 0/1 for
/// the real/imaginary half of a complex cell.
struct AtomicEvent {
  std::uint64_t sequence = 0;
  std::uint32_t block = 0;
  std::uint32_t tid = 0;
  std::size_t slot = 0;
  int component = -1;
  double delta = 0.0;
  double value_after = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class BlockRun;

/// Per-lane execution context handed to a lane program.
class Lane {
 public:
  std::uint32_t tid() const noexcept { return tid_; }
  std::uint32_t warp_id() const noexcept { return tid_ / warp_size_; }
  std::uint32_t lane_id() const noexcept { return tid_ % warp_size_; }
  std::uint32_t block_idx() const noexcept { return block_idx_; }
  std::uint32_t block_size() const noexcept { return block_size_; }
  std::uint64_t global_id() const noexcept {
    return std::uint64_t{block_idx_} * block_size_ + tid_;
  }
  std::uint32_t warp_size() const noexcept { return warp_size_; }
  bool active() const noexcept { return active_; }
  const WarpConfig& config() const noexcept { return *config_; }

  template <class T>
  std::remove_cv_t<T> load(std::span<T> buffer, std::size_t index,
                           std::source_location loc = std::source_location::current()) {
    check_bounds(buffer.size(), index, loc);
    count_step();
    return buffer[index];
  }

  template <class T>
  void store(std::span<T> buffer, std::size_t index, std::type_identity_t<T> value,
             std::source_location loc = std::source_location::current()) {
    check_bounds(buffer.size(), index, loc);
    count_step();
    buffer[index] = value;
  }

  /// Adds `delta` to `buffer[index]` and returns the previous value.
  double atomic_add(std::span<double> buffer, std::size_t index, double delta,
                    std::source_location loc = std::source_location::current());

  struct YieldAwaiter {
    Lane* lane;
    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) noexcept {
      lane->request_.kind = CollectiveKind::yield;
      lane->resume_point_ = h;
    }
    void await_resume() const noexcept {}
  };

  /// Gives other lanes a chance to run before this one continues.
  YieldAwaiter yield() { return YieldAwaiter{this}; }

  struct ComplexAtomicAwaiter {
    Lane* lane;
    std::span<std::complex<double>> buffer;
    std::size_t index;
    std::complex<double> delta;

    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) {
      lane->apply_complex_part(buffer, index, delta.real(), 0);
      lane->request_.kind = CollectiveKind::yield;
      lane->resume_point_ = h;
    }
    void await_resume() { lane->apply_complex_part(buffer, index, delta.imag(), 1); }
  };

  /// Component-wise atomic add: two independent real atomics on the real and
  /// imaginary parts, with a scheduling point between them. No atomicity is
  /// provided across the pair.
  ComplexAtomicAwaiter atomic_add_complex(
      std::span<std::complex<double>> buffer, std::size_t index,
      std::complex<double> delta,
      std::source_location loc = std::source_location::current()) {
    check_bounds(buffer.size(), index, loc);
    return ComplexAtomicAwaiter{this, buffer, index, delta};
  }

  struct CollectiveAwaiter {
    Lane* lane;
    CollectiveRequest request;

    bool await_ready() const noexcept { return false; }
    void await_suspend(std::coroutine_handle<> h) noexcept {
      lane->request_ = request;
      lane->resume_point_ = h;
    }
    std::uint64_t await_resume() const noexcept { return lane->result_; }
  };

  /// Suspends at a rendezvous with the subwarp described by `request`.
  CollectiveAwaiter collective(CollectiveRequest request) {
    return CollectiveAwaiter{this, request};
  }

  /// Second word delivered by the last pair shuffle.
  std::uint64_t collective_result2() const noexcept { return result2_; }

 private:
  friend class BlockRun;

  [[noreturn]] void fault(std::size_t size, std::size_t index,
                          const std::source_location& loc) const {
    throw LaneFault(tid_, CallSite::from(loc).str(),
                    "index " + std::to_string(index) + " out of bounds (size " +
                        std::to_string(size) + ")");
  }
  void check_bounds(std::size_t size, std::size_t index,
                    const std::source_location& loc) const {
    if (index >= size) fault(size, index, loc);
  }
  void count_step() noexcept;
  void apply_complex_part(std::span<std::complex<double>> buffer, std::size_t index,
                          double delta, int component);
  double apply_atomic(double& cell, double delta, std::size_t slot, int component);

  BlockRun* run_ = nullptr;
  const WarpConfig* config_ = nullptr;
  std::uint32_t tid_ = 0;
  std::uint32_t block_idx_ = 0;
  std::uint32_t block_size_ = 0;
  std::uint32_t warp_size_ = 32;
  bool active_ = true;
  CollectiveRequest request_;
  std::uint64_t result_ = 0;
  std::uint64_t result2_ = 0;
  std::coroutine_handle<> resume_point_;
};

/// State of one block launch: lanes, their coroutines and the scheduler.
class BlockRun {
 public:
  BlockRun(const WarpConfig& config, std::uint32_t block_size, std::uint32_t block_idx,
           const LaunchOptions& options, Counters& counters,
           std::vector<AtomicEvent>* trace, std::uint64_t& atomic_sequence)
      : config_(config),
        options_(options),
        counters_(counters),
        trace_(trace),
        atomic_sequence_(atomic_sequence),
        block_idx_(block_idx),
        lanes_(block_size),
        tasks_(block_size),
        state_(block_size, State::runnable) {
    const auto warp = static_cast<std::uint32_t>(config.warp_size());
    if (block_size == 0 || block_size % warp != 0) {
      throw InvalidConfig("block size " + std::to_string(block_size) +
                          " is not a positive multiple of the warp size " +
                          std::to_string(warp));
    }
    for (std::uint32_t tid = 0; tid < block_size; ++tid) {
      Lane& lane = lanes_[tid];
      lane.run_ = this;
      lane.config_ = &config_;
      lane.tid_ = tid;
      lane.block_idx_ = block_idx;
      lane.block_size_ = block_size;
      lane.warp_size_ = warp;
    }
  }

  template <class Program>
  void execute(Program& program) {
    const auto n = static_cast<std::uint32_t>(lanes_.size());
    for (std::uint32_t tid = 0; tid < n; ++tid) {
      tasks_[tid] = program(lanes_[tid]);
    }
    counters_.blocks += 1;
    counters_.lanes += n;

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    if (options_.order == AtomicOrder::seeded) {
      seeded_order(order);
    }

    std::uint64_t round = 0;
    std::uint32_t finished = 0;
    while (finished < n) {
      if (options_.order == AtomicOrder::scramble) {
        scramble_order(order, round);
      }
      bool progressed = false;
      for (std::uint32_t tid : order) {
        if (state_[tid] != State::runnable) continue;
        progressed = true;
        Lane& lane = lanes_[tid];
        lane.request_.kind = CollectiveKind::none;
        auto point = std::exchange(lane.resume_point_, {});
        (point ? point : tasks_[tid].handle()).resume();
        if (auto error = tasks_[tid].error()) std::rethrow_exception(error);
        if (tasks_[tid].done()) {
          state_[tid] = State::done;
          lane.active_ = false;
          ++finished;
        } else if (lane.request_.kind != CollectiveKind::yield) {
          state_[tid] = State::waiting;
        }
      }
      const bool resolved = resolve_collectives();
      if (!progressed && !resolved && finished < n) {
        throw DivergentCollective(stuck_message());
      }
      ++round;
    }
  }

 private:
  friend class Lane;

  enum class State : std::uint8_t { runnable, waiting, done };

  void seeded_order(std::vector<std::uint32_t>& order) const {
    std::vector<std::uint64_t> key(order.size());
    for (std::uint32_t tid = 0; tid < order.size(); ++tid) {
      key[tid] = splitmix64(options_.seed ^ (std::uint64_t{block_idx_} << 32) ^ tid);
    }
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return key[a] != key[b] ? key[a] < key[b] : a < b;
    });
  }

  void scramble_order(std::vector<std::uint32_t>& order, std::uint64_t round) const {
    std::iota(order.begin(), order.end(), 0u);
    std::uint64_t state = splitmix64(options_.seed ^ splitmix64(round) ^
                                     (std::uint64_t{block_idx_} << 40));
    for (std::size_t i = order.size(); i > 1; --i) {
      state = splitmix64(state);
      std::swap(order[i - 1], order[state % i]);
    }
  }

  std::string stuck_message() const {
    for (std::uint32_t tid = 0; tid < lanes_.size(); ++tid) {
      if (state_[tid] == State::waiting) {
        const auto& r = lanes_[tid].request_;
        return "lanes never converged: tid " + std::to_string(tid) + " waits at " +
               to_string(r.kind) + " (" + r.site.str() + ") for a subwarp of size " +
               std::to_string(r.group_size) + " at offset " +
               std::to_string(r.group_offset) +
               " whose other lanes are at an incompatible collective";
      }
    }
    return "lanes never converged";
  }

  // Resolves every subwarp whose lanes are all waiting (or finished).
  bool resolve_collectives() {
    const auto n = static_cast<std::uint32_t>(lanes_.size());
    const auto warp = static_cast<std::uint32_t>(config_.warp_size());
    bool resolved = false;
    for (std::uint32_t tid = 0; tid < n; ++tid) {
      if (state_[tid] != State::waiting) continue;
      const CollectiveRequest& head = lanes_[tid].request_;
      const std::uint32_t base = (tid / warp) * warp + head.group_offset;
      if (base > tid || tid >= base + head.group_size) continue;
      if (!group_complete(base, head)) continue;
      evaluate(base, head);
      resolved = true;
      tid = base + head.group_size - 1;
    }
    return resolved;
  }

  bool group_complete(std::uint32_t base, const CollectiveRequest& head) const {
    bool any_waiting = false;
    for (std::uint32_t t = base; t < base + head.group_size; ++t) {
      if (state_[t] == State::runnable) return false;
      if (state_[t] == State::done) continue;
      const CollectiveRequest& r = lanes_[t].request_;
      if (r.group_offset != head.group_offset || r.group_size != head.group_size) {
        return false;
      }
      any_waiting = true;
    }
    for (std::uint32_t t = base; t < base + head.group_size; ++t) {
      if (state_[t] != State::waiting) continue;
      const CollectiveRequest& r = lanes_[t].request_;
      if (r.kind != head.kind || !(r.site == head.site)) {
        throw DivergentCollective(
            "lanes of one subwarp reached different collectives: tid " +
            std::to_string(base) + ".." + std::to_string(base + head.group_size - 1) +
            " has " + to_string(head.kind) + " at " + head.site.str() + " and " +
            to_string(r.kind) + " at " + r.site.str() + " (tid " +
            std::to_string(t) + ")");
      }
    }
    return any_waiting;
  }

  void evaluate(std::uint32_t base, const CollectiveRequest& head) {
    const std::uint32_t size = head.group_size;
    const std::uint32_t warp = static_cast<std::uint32_t>(config_.warp_size());
    std::uint32_t participants = 0;
    if (head.kind == CollectiveKind::ballot) {
      std::uint64_t bits = 0;
      for (std::uint32_t t = base; t < base + size; ++t) {
        if (state_[t] == State::waiting && lanes_[t].request_.predicate) {
          bits |= std::uint64_t{1} << (t % warp);
        }
      }
      for (std::uint32_t t = base; t < base + size; ++t) {
        if (state_[t] != State::waiting) continue;
        lanes_[t].result_ = bits;
        ++participants;
      }
      counters_.ballots += 1;
      counters_.lane_ballots += participants;
    } else {
      for (std::uint32_t t = base; t < base + size; ++t) {
        if (state_[t] != State::waiting) continue;
        const CollectiveRequest& r = lanes_[t].request_;
        const std::uint32_t rank = t - base;
        const std::uint32_t src_rank =
            head.kind == CollectiveKind::shfl ? r.arg : (rank ^ r.arg);
        if (src_rank >= size) {
          throw InvalidSourceRank("shuffle source rank " + std::to_string(src_rank) +
                                  " outside subwarp of size " + std::to_string(size));
        }
        const std::uint32_t src = base + src_rank;
        if (state_[src] != State::waiting) {
          throw InactiveSourceLane("tid " + std::to_string(t) +
                                   " shuffles from exited lane tid " +
                                   std::to_string(src) + " at " + r.site.str());
        }
        lanes_[t].result_ = lanes_[src].request_.payload;
        lanes_[t].result2_ = lanes_[src].request_.payload2;
        ++participants;
      }
      counters_.shuffles += head.words;
      counters_.lane_shuffles += std::uint64_t{participants} * head.words;
    }
    counters_.lane_steps += participants;
    for (std::uint32_t t = base; t < base + size; ++t) {
      if (state_[t] == State::waiting) state_[t] = State::runnable;
    }
  }

  const WarpConfig& config_;
  const LaunchOptions& options_;
  Counters& counters_;
  std::vector<AtomicEvent>* trace_;
  std::uint64_t& atomic_sequence_;
  std::uint32_t block_idx_;
  std::vector<Lane> lanes_;
  std::vector<LaneTask> tasks_;
  std::vector<State> state_;
};

inline void Lane::count_step() noexcept { run_->counters_.lane_steps += 1; }

inline double Lane::apply_atomic(double& cell, double delta, std::size_t slot,
                                 int component) {
  const double previous = cell;
  cell = previous + delta;
  auto& c = run_->counters_;
  c.atomics += 1;
  c.lane_steps += 1;
  const std::uint64_t seq = run_->atomic_sequence_++;
  if (run_->trace_ != nullptr) {
    run_->trace_->push_back(
        AtomicEvent{seq, block_idx_, tid_, slot, component, delta, cell});
  }
  return previous;
}

inline double Lane::atomic_add(std::span<double> buffer, std::size_t index, double delta,
                               std::source_location loc) {
  check_bounds(buffer.size(), index, loc);
  return apply_atomic(buffer[index], delta, index, -1);
}

inline void Lane::apply_complex_part(std::span<std::complex<double>> buffer,
                                     std::size_t index, double delta, int component) {
  // std::complex<double> is layout-compatible with double[2].
  auto* parts = reinterpret_cast<double*>(buffer.data() + index);
  apply_atomic(parts[component], delta, index, component);
}

/// Runs lane programs for one warp size. Each launch simulates its blocks one
/// after another, each with a fresh block context; buffers written by the
/// program persist across blocks.
class Simulator {
 public:
  explicit Simulator(WarpConfig config, LaunchOptions options = {})
      : config_(config), options_(options) {}

  const WarpConfig& config() const noexcept { return config_; }
  const LaunchOptions& options() const noexcept { return options_; }
  void set_options(const LaunchOptions& options) { options_ = options; }

  const Counters& counters() const noexcept { return counters_; }
  void reset_counters() noexcept { counters_ = {}; }

  const std::vector<AtomicEvent>& atomic_trace() const noexcept { return trace_; }
  void clear_trace() noexcept { trace_.clear(); }

  /// `program` is invoked once per lane and must return a LaneTask.
  template <class Program>
  void launch(std::uint32_t num_blocks, std::uint32_t block_size, Program&& program) {
    counters_.launches += 1;
    for (std::uint32_t b = 0; b < num_blocks; ++b) {
      BlockRun run(config_, block_size, b, options_, counters_,
                   options_.trace_atomics ? &trace_ : nullptr, atomic_sequence_);
      run.execute(program);
    }
  }

  template <class Program>
  void launch_block(std::uint32_t block_size, Program&& program) {
    launch(1, block_size, program);
  }

 private:
  WarpConfig config_;
  LaunchOptions options_;
  Counters counters_;
  std::vector<AtomicEvent> trace_;
  std::uint64_t atomic_sequence_ = 0;
};

}  // namespace gpuport::simt
