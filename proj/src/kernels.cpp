#include "gane/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gane::kernels {

namespace {

inline std::size_t n_chunks(std::size_t n) { return (n + kChunk - 1) / kChunk; }

}  // namespace

namespace ref {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void scores_all(const EmbeddingMatrix& emb, std::span<const double> query,
                std::span<double> out) {
  for (std::size_t j = 0; j < emb.rows(); ++j)
    out[j] = dot(emb.row_span(j), query);
}

double sum(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

double max(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  return m;
}

void masked_softmax(std::span<double> logits, std::size_t masked) {
  if (masked < logits.size())
    logits[masked] = -std::numeric_limits<double>::infinity();
  const double m = max(logits);
  for (auto& x : logits) x = std::exp(x - m);
  const double z = sum(logits);
  for (auto& x : logits) x /= z;
}

void weighted_rowsum(const EmbeddingMatrix& emb, std::span<const double> w,
                     std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < emb.rows(); ++k) {
    const double* r = emb.row(k);
    for (std::size_t c = 0; c < emb.cols(); ++c) out[c] += w[k] * r[c];
  }
}

void covariance(const EmbeddingMatrix& x, std::vector<double>& mean,
                std::vector<double>& cov) {
  const std::size_t n = x.rows(), d = x.cols();
  mean.assign(d, 0.0);
  cov.assign(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) mean[c] += x.at(i, c);
  for (auto& m : mean) m /= static_cast<double>(n);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) row[c] = x.at(i, c) - mean[c];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov[a * d + b] += row[a] * row[b];
  }
  for (auto& c : cov) c /= static_cast<double>(n);
}

void assign_nearest(const EmbeddingMatrix& points,
                    const EmbeddingMatrix& centers,
                    std::span<std::uint32_t> assign, std::span<double> dist2) {
  for (std::size_t i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      double d2 = 0.0;
      const double* p = points.row(i);
      const double* q = centers.row(c);
      for (std::size_t k = 0; k < points.cols(); ++k) {
        const double diff = p[k] - q[k];
        d2 += diff * diff;
      }
      if (d2 < best) {
        best = d2;
        arg = static_cast<std::uint32_t>(c);
      }
    }
    assign[i] = arg;
    dist2[i] = best;
  }
}

}  // namespace ref

double dot(std::span<const double> a, std::span<const double> b) {
  // Too short to be worth threading; shared with the reference on purpose.
  return ref::dot(a, b);
}

void scores_all(const EmbeddingMatrix& emb, std::span<const double> query,
                std::span<double> out) {
  const std::int64_t n = static_cast<std::int64_t>(emb.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] =
        ref::dot(emb.row_span(static_cast<std::size_t>(j)), query);
}

double sum(std::span<const double> xs) {
  const std::size_t nc = n_chunks(xs.size());
  if (nc <= 1) return ref::sum(xs);
  std::vector<double> partial(nc, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(xs.size(), lo + kChunk);
    partial[static_cast<std::size_t>(c)] = ref::sum(xs.subspan(lo, hi - lo));
  }
  return ref::sum(partial);
}

double max(std::span<const double> xs) {
  const std::size_t nc = n_chunks(xs.size());
  if (nc <= 1) return ref::max(xs);
  std::vector<double> partial(nc, -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(xs.size(), lo + kChunk);
    partial[static_cast<std::size_t>(c)] = ref::max(xs.subspan(lo, hi - lo));
  }
  return ref::max(partial);
}

void masked_softmax(std::span<double> logits, std::size_t masked) {
  if (masked < logits.size())
    logits[masked] = -std::numeric_limits<double>::infinity();
  const double m = max(std::span<const double>(logits.data(), logits.size()));
  const std::int64_t n = static_cast<std::int64_t>(logits.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) logits[j] = std::exp(logits[j] - m);
  const double z = sum(std::span<const double>(logits.data(), logits.size()));
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) logits[j] /= z;
}

void weighted_rowsum(const EmbeddingMatrix& emb, std::span<const double> w,
                     std::span<double> out) {
  const std::size_t d = emb.cols();
  const std::size_t nc = n_chunks(emb.rows());
  if (nc <= 1) {
    ref::weighted_rowsum(emb, w, out);
    return;
  }
  std::vector<double> partial(nc * d, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(emb.rows(), lo + kChunk);
    double* acc = partial.data() + static_cast<std::size_t>(c) * d;
    for (std::size_t k = lo; k < hi; ++k) {
      const double* r = emb.row(k);
      for (std::size_t col = 0; col < d; ++col) acc[col] += w[k] * r[col];
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    const double* acc = partial.data() + c * d;
    for (std::size_t col = 0; col < d; ++col) out[col] += acc[col];
  }
}

void covariance(const EmbeddingMatrix& x, std::vector<double>& mean,
                std::vector<double>& cov) {
  const std::size_t n = x.rows(), d = x.cols();
  const std::size_t nc = n_chunks(n);
  if (nc <= 1) {
    ref::covariance(x, mean, cov);
    return;
  }
  // Column means via chunked sums.
  std::vector<double> partial_mean(nc * d, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    double* acc = partial_mean.data() + static_cast<std::size_t>(c) * d;
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t col = 0; col < d; ++col) acc[col] += x.at(i, col);
  }
  mean.assign(d, 0.0);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t col = 0; col < d; ++col)
      mean[col] += partial_mean[c * d + col];
  for (auto& m : mean) m /= static_cast<double>(n);

  std::vector<double> partial_cov(nc * d * d, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(nc); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    double* acc = partial_cov.data() + static_cast<std::size_t>(c) * d * d;
    std::vector<double> row(d);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t col = 0; col < d; ++col) row[col] = x.at(i, col) - mean[col];
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) acc[a * d + b] += row[a] * row[b];
    }
  }
  cov.assign(d * d, 0.0);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t k = 0; k < d * d; ++k) cov[k] += partial_cov[c * d * d + k];
  for (auto& v : cov) v /= static_cast<double>(n);
}

void assign_nearest(const EmbeddingMatrix& points,
                    const EmbeddingMatrix& centers,
                    std::span<std::uint32_t> assign, std::span<double> dist2) {
  const std::int64_t n = static_cast<std::int64_t>(points.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = 0;
    const double* p = points.row(static_cast<std::size_t>(i));
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      const double* q = centers.row(c);
      double d2 = 0.0;
      for (std::size_t k = 0; k < points.cols(); ++k) {
        const double diff = p[k] - q[k];
        d2 += diff * diff;
      }
      if (d2 < best) {
        best = d2;
        arg = static_cast<std::uint32_t>(c);
      }
    }
    assign[i] = arg;
    dist2[i] = best;
  }
}

}  // namespace gane::kernels
