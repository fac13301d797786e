#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace helfrich {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;

enum class ErrorCode {
  InvalidInput,
  NonManifoldEdge,
  InconsistentOrientation,
  DegenerateFace,
  NumericalDegeneracy,
  NonPositiveScale,
  RhoBelowResolution,
  MismatchedFieldLength,
  TolOutOfRange,
  NonConvergent,
  NegativeVolume,
  PointOnBoundary,
  PositiveC0,
  NonNegativeC0,
  ZeroEnergy,
  IsoperimetricViolation,
  NeckTooLarge,
  Unreachable,
  ProjectionDiverged,
  MonitorAlarm,
  IoError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::NumericalDegeneracy: return "NumericalDegeneracy";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::RhoBelowResolution: return "RhoBelowResolution";
    case ErrorCode::MismatchedFieldLength: return "MismatchedFieldLength";
    case ErrorCode::TolOutOfRange: return "TolOutOfRange";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::NegativeVolume: return "NegativeVolume";
    case ErrorCode::PointOnBoundary: return "PointOnBoundary";
    case ErrorCode::PositiveC0: return "PositiveC0";
    case ErrorCode::NonNegativeC0: return "NonNegativeC0";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::IsoperimetricViolation: return "IsoperimetricViolation";
    case ErrorCode::NeckTooLarge: return "NeckTooLarge";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::ProjectionDiverged: return "ProjectionDiverged";
    case ErrorCode::MonitorAlarm: return "MonitorAlarm";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Summation order depends only on the input length, never on threading.
template <class T>
T pairwise_sum(const T* x, std::size_t n, T zero) {
  if (n == 0) return zero;
  if (n <= 8) {
    T s = x[0];
    for (std::size_t i = 1; i < n; ++i) s = s + x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h, zero) + pairwise_sum(x + h, n - h, zero);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size(), 0.0); }

inline Vec3 pairwise_sum(const std::vector<Vec3>& v) {
  return pairwise_sum<Vec3>(v.data(), v.size(), Vec3::Zero());
}

namespace parallel {

inline std::atomic<int>& thread_limit_ref() {
  static std::atomic<int> limit{0};
  return limit;
}

// n <= 0 restores the default (HELFRICH_THREADS, then hardware concurrency).
inline void set_thread_limit(int n) { thread_limit_ref().store(n); }

inline int thread_limit() {
  int n = thread_limit_ref().load();
  if (n > 0) return n;
  if (const char* env = std::getenv("HELFRICH_THREADS")) {
    int e = std::atoi(env);
    if (e > 0) return e;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// fn(i) for i in [0, n); each index is handled by exactly one thread.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  int t = std::min<std::size_t>(static_cast<std::size_t>(thread_limit()), n / 64 + 1);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(t);
  std::size_t chunk = (n + t - 1) / t;
  for (int k = 0; k < t; ++k) {
    std::size_t lo = k * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([&, k, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[k] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

template <class T, class Fn>
std::vector<T> map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  for_each_index(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace parallel

}  // namespace helfrich
