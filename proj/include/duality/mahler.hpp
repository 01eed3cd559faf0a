#pragma once

// Monte-Carlo volumes of balls given by weak membership oracles, and the
// Mahler volume vol(B) * vol(B*) with the dual ball built from the primal
// oracle.

#include "duality/normdual.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace duality {

struct VolumeEstimate {
  double mean = 0.0;
  double half_width_95 = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  [[nodiscard]] double relative_half_width() const { return mean > 0.0 ? half_width_95 / mean : kInf; }
  [[nodiscard]] bool covers(double v) const { return std::abs(v - mean) <= half_width_95; }
};

namespace detail {

inline constexpr std::uint64_t kChunk = 4096;

/// Worker count: DUALITY_THREADS if set to a positive integer, else the
/// hardware concurrency.
inline unsigned worker_count() {
  if (const char *env = std::getenv("DUALITY_THREADS")) {
    char *end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// Rejection sampling over [-box_radius, box_radius]^n. Samples are cut into
/// fixed chunks; chunk i draws from stream i of the seed, so the estimate does
/// not depend on the number of workers.
inline VolumeEstimate volume_mc(const WmemOracle &oracle, double box_radius, std::uint64_t samples,
                                std::uint64_t seed) {
  const int n = oracle.dim();
  if (n > 6) throw InvalidArgument("rejection sampling is desk-scale only");
  require(std::isfinite(box_radius) && box_radius > 0.0, "box radius must be positive");
  require(samples > 0, "samples must be positive");
  const double delta = box_radius * 1e-6;
  const std::uint64_t chunks = (samples + detail::kChunk - 1) / detail::kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    Vector x(n);
    for (;;) {
      const std::uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) return;
      try {
        CounterRng rng(seed, c);
        const std::uint64_t count = std::min(detail::kChunk, samples - c * detail::kChunk);
        std::uint64_t h = 0;
        for (std::uint64_t i = 0; i < count; ++i) {
          for (int j = 0; j < n; ++j) x[j] = rng.uniform(-box_radius, box_radius);
          if (oracle.query(x, delta) == WeakVerdict::InThickened) ++h;
        }
        hits[c] = h;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(detail::worker_count(), chunks));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(samples);
  const double box = std::pow(2.0 * box_radius, n);
  VolumeEstimate est;
  est.mean = p * box;
  est.half_width_95 = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) * box;
  est.samples = samples;
  est.seed = seed;
  return est;
}

struct MahlerReport {
  VolumeEstimate product;
  VolumeEstimate primal;
  VolumeEstimate dual;
  std::uint64_t primal_queries = 0;
  std::uint64_t dual_queries = 0;
};

/// vol(B_nu) on [-1/k, 1/k]^n times vol(B_nu*) on [-K, K]^n; relative 95%
/// half-widths combine in quadrature.
inline MahlerReport mahler_run(const WmemOracle &primal, const NormDescriptor &desc, std::uint64_t samples,
                               const ToleranceConfig &cfg) {
  require(primal.dim() == desc.n, "dimension mismatch between oracle and descriptor");
  if (desc.n > 6) throw InvalidArgument("rejection sampling is desk-scale only");
  const std::uint64_t before = primal.calls();
  MahlerReport rep;
  rep.primal = volume_mc(primal, 1.0 / desc.k_lo, samples, cfg.rng_seed);
  const WmemOracle dual = dual_ball_wmem(primal, desc, cfg);
  rep.dual = volume_mc(dual, desc.k_hi, samples, splitmix64(cfg.rng_seed));
  rep.primal_queries = primal.calls() - before;
  rep.dual_queries = dual.calls();
  rep.product.mean = rep.primal.mean * rep.dual.mean;
  rep.product.half_width_95 =
      rep.product.mean * std::hypot(rep.primal.relative_half_width(), rep.dual.relative_half_width());
  rep.product.samples = samples;
  rep.product.seed = cfg.rng_seed;
  return rep;
}

inline VolumeEstimate mahler_volume(const WmemOracle &primal, const NormDescriptor &desc, std::uint64_t samples,
                                    const ToleranceConfig &cfg) {
  return mahler_run(primal, desc, samples, cfg).product;
}

}  // namespace duality
