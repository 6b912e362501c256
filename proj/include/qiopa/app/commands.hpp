#ifndef QIOPA_APP_COMMANDS_HPP
#define QIOPA_APP_COMMANDS_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qiopa/app/config.hpp"
#include "qiopa/io.hpp"

namespace qiopa::app {

/// Evaluates f(0) .. f(n-1) on worker threads; results keep index order.
template <class F>
auto parallel_map(std::size_t n, F f) -> std::vector<decltype(f(std::size_t{}))> {
  std::vector<decltype(f(std::size_t{}))> out(n);
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Result of a computing command: the table plus command-specific JSON fields.
struct Artifact {
  Table table;
  nlohmann::json extra = nlohmann::json::object();
};

/// The injected state over a basis at cfg.opa.cutoff, before amplification.
StateVector input_state(const RunConfig& cfg);

Artifact compute_amplify(const RunConfig& cfg);
Artifact compute_rates(const RunConfig& cfg);
Artifact compute_wigner_slice(const RunConfig& cfg);
Artifact compute_scan_x(const RunConfig& cfg);
Artifact compute_scan_z(const RunConfig& cfg);

/// Dispatches a computing command (not validate).
Artifact compute(const RunConfig& cfg);

/// Destination file for cfg.output, or "-" for stdout.
std::string output_path(const RunConfig& cfg);

/// Writes an artifact in cfg.format with the configuration header.
void write_artifact(std::ostream& os, const RunConfig& cfg, const Artifact& a);

/// Runs the command and writes its output. Returns the exit status; core
/// errors propagate as exceptions.
int run(const RunConfig& cfg);

/// Complete command-line entry point with error reporting and exit codes.
int main_entry(int argc, const char* const* argv);

}  // namespace qiopa::app

#endif  // QIOPA_APP_COMMANDS_HPP
