#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gane/matrix.hpp"

// Data-parallel inner loops used by the model, trainer and evaluation
// code. Each kernel has a plain serial reference in kernels::ref and an
// OpenMP production version in kernels::. The production reductions
// accumulate over fixed-size chunks merged in chunk order, so results are
// bit-identical across runs and thread counts (they may differ from the
// serial reference by float rounding only). tools/gane_bench compares the
// two implementations for speed.
namespace gane::kernels {

// Chunk width for deterministic reductions. Fixed, never derived from the
// thread count.
inline constexpr std::size_t kChunk = 2048;

namespace ref {

double dot(std::span<const double> a, std::span<const double> b);

// out[j] = emb.row(j) . query for every row j.
void scores_all(const EmbeddingMatrix& emb, std::span<const double> query,
                std::span<double> out);

double sum(std::span<const double> xs);
double max(std::span<const double> xs);

// In-place softmax with one optionally masked index (masked entry gets
// probability 0; pass size() or more to disable masking).
void masked_softmax(std::span<double> logits, std::size_t masked);

// out = sum_k w[k] * emb.row(k)
void weighted_rowsum(const EmbeddingMatrix& emb, std::span<const double> w,
                     std::span<double> out);

// Column means and the d x d covariance (normalized by n) of the rows.
void covariance(const EmbeddingMatrix& x, std::vector<double>& mean,
                std::vector<double>& cov);

// Nearest center (squared euclidean) per point.
void assign_nearest(const EmbeddingMatrix& points,
                    const EmbeddingMatrix& centers,
                    std::span<std::uint32_t> assign, std::span<double> dist2);

}  // namespace ref

double dot(std::span<const double> a, std::span<const double> b);
void scores_all(const EmbeddingMatrix& emb, std::span<const double> query,
                std::span<double> out);
double sum(std::span<const double> xs);
double max(std::span<const double> xs);
void masked_softmax(std::span<double> logits, std::size_t masked);
void weighted_rowsum(const EmbeddingMatrix& emb, std::span<const double> w,
                     std::span<double> out);
void covariance(const EmbeddingMatrix& x, std::vector<double>& mean,
                std::vector<double>& cov);
void assign_nearest(const EmbeddingMatrix& points,
                    const EmbeddingMatrix& centers,
                    std::span<std::uint32_t> assign, std::span<double> dist2);

}  // namespace gane::kernels
