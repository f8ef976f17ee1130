#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace mrt::detail {

/// Per-chunk running means/variances of a fixed-width vector of per-draw values.
struct ChunkStats {
  std::uint64_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;  // sum of squared deviations
};

struct SampleSummary {
  std::uint64_t count = 0;
  std::vector<double> mean;
  std::vector<double> se;  // standard error of the mean
  std::vector<ChunkStats> chunks;
};

/// Evaluates per_draw(index, out) for index in [0, draws) and reduces the
/// `width` outputs. Chunks are fixed-size and merged in order, so the result is
/// bit-identical for any thread count.
SampleSummary summarize_draws(std::uint64_t draws, std::size_t width,
                              const std::function<void(std::uint64_t, double*)>& per_draw);

/// Standard error of a nonlinear statistic by batch means over the chunks.
/// `stat` maps a vector of chunk means to the statistic.
double batch_means_se(const SampleSummary& s,
                      const std::function<double(const std::vector<double>&)>& stat);

}  // namespace mrt::detail
