#include "sampling.hpp"

#include <algorithm>

#include "mrt/error.hpp"
#include "mrt/parallel.hpp"

namespace mrt::detail {

SampleSummary summarize_draws(std::uint64_t draws, std::size_t width,
                              const std::function<void(std::uint64_t, double*)>& per_draw) {
  if (draws == 0) throw ArgumentError("summarize_draws: need at least one draw");
  const std::size_t n_chunks = (draws + kReductionChunk - 1) / kReductionChunk;
  std::vector<ChunkStats> chunks(n_chunks);
  parallel_for(n_chunks, [&](std::size_t c) {
    ChunkStats& st = chunks[c];
    st.mean.assign(width, 0.0);
    st.m2.assign(width, 0.0);
    std::vector<double> x(width);
    const std::uint64_t lo = c * kReductionChunk;
    const std::uint64_t hi = std::min<std::uint64_t>(draws, lo + kReductionChunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      per_draw(i, x.data());
      ++st.count;
      const double inv = 1.0 / static_cast<double>(st.count);
      for (std::size_t j = 0; j < width; ++j) {
        const double d = x[j] - st.mean[j];
        st.mean[j] += d * inv;
        st.m2[j] += d * (x[j] - st.mean[j]);
      }
    }
  });

  SampleSummary out;
  out.mean.assign(width, 0.0);
  std::vector<double> m2(width, 0.0);
  for (const ChunkStats& st : chunks) {
    const double na = static_cast<double>(out.count);
    const double nb = static_cast<double>(st.count);
    const double n = na + nb;
    for (std::size_t j = 0; j < width; ++j) {
      const double d = st.mean[j] - out.mean[j];
      out.mean[j] += d * nb / n;
      m2[j] += st.m2[j] + d * d * na * nb / n;
    }
    out.count += st.count;
  }
  out.se.assign(width, 0.0);
  if (out.count > 1) {
    const double n = static_cast<double>(out.count);
    for (std::size_t j = 0; j < width; ++j) out.se[j] = std::sqrt(m2[j] / (n - 1.0) / n);
  }
  out.chunks = std::move(chunks);
  return out;
}

double batch_means_se(const SampleSummary& s,
                      const std::function<double(const std::vector<double>&)>& stat) {
  // Group chunks into at most 32 batches of equal chunk count.
  const std::size_t n_chunks = s.chunks.size();
  if (n_chunks < 2) return 0.0;
  const std::size_t batches = std::min<std::size_t>(32, n_chunks);
  const std::size_t width = s.mean.size();
  std::vector<double> values;
  values.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n_chunks / batches;
    const std::size_t hi = (b + 1) * n_chunks / batches;
    std::vector<double> mean(width, 0.0);
    double count = 0.0;
    for (std::size_t c = lo; c < hi; ++c) {
      const double w = static_cast<double>(s.chunks[c].count);
      for (std::size_t j = 0; j < width; ++j) mean[j] += w * s.chunks[c].mean[j];
      count += w;
    }
    for (double& m : mean) m /= count;
    values.push_back(stat(mean));
  }
  double avg = 0.0;
  for (double v : values) avg += v;
  avg /= static_cast<double>(batches);
  double ss = 0.0;
  for (double v : values) ss += (v - avg) * (v - avg);
  const double var_batch = ss / static_cast<double>(batches - 1);
  return std::sqrt(var_batch / static_cast<double>(batches));
}

}  // namespace mrt::detail
