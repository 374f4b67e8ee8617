#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <initializer_list>
#include <limits>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace widthlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1/p with 1/inf == 0 exactly (IEEE division already guarantees this; the
/// helper names the intent at call sites).
inline double recip(double p) noexcept { return std::isinf(p) ? 0.0 : 1.0 / p; }

inline double pos_part(double x) noexcept { return x > 0.0 ? x : 0.0; }

/// floor() that snaps values within `tol` of an integer onto it, so that
/// log2(64) == 5.999999999 still lands on 6.
inline double snapped_floor(double x, double tol = 1e-9) noexcept {
  const double r = std::round(x);
  return std::abs(x - r) <= tol ? r : std::floor(x);
}

inline double snapped_ceil(double x, double tol = 1e-9) noexcept {
  const double r = std::round(x);
  return std::abs(x - r) <= tol ? r : std::ceil(x);
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named, order-independent random substream: the engine depends only on
/// the seed and the path, never on how many draws other streams made.
inline std::mt19937_64 substream(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return std::mt19937_64(h);
}

/// Thread cap from WIDTHLAB_THREADS (>= 1); defaults to hardware concurrency.
inline unsigned thread_budget() {
  if (const char* env = std::getenv("WIDTHLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Results must be written to per-index
/// slots; the first exception (lowest index) is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_budget(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace widthlab
