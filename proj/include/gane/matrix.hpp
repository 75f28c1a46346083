#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "gane/errors.hpp"
#include "gane/rng.hpp"

namespace gane {

using VertexId = std::uint32_t;

// Dense row-major matrix of embedding vectors; row i is the vector of
// vertex i. Also reused for classifier weights and PCA outputs.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  // Entries uniform in [-0.5/cols, 0.5/cols], the usual skip-gram range.
  static EmbeddingMatrix random_init(std::size_t rows, std::size_t cols,
                                     SplitRng& rng) {
    EmbeddingMatrix m(rows, cols);
    const double scale = 1.0 / static_cast<double>(cols);
    for (auto& x : m.data_) x = (rng.next_double() - 0.5) * scale;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::span<double> row_span(std::size_t i) { return {row(i), cols_}; }
  std::span<const double> row_span(std::size_t i) const {
    return {row(i), cols_};
  }

  double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool operator==(const EmbeddingMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Gradient over a subset of matrix rows. Rows are stored in first-touch
// order, which is deterministic because all accumulation happens in a
// fixed batch order. A dense variant (slot == vertex id) backs the
// generator gradient, which touches every row through the softmax
// normalizer.
class SparseGrad {
 public:
  explicit SparseGrad(std::size_t dim) : dim_(dim) {}

  static SparseGrad dense(std::size_t n_rows, std::size_t dim) {
    SparseGrad g(dim);
    g.dense_ = true;
    g.verts_.resize(n_rows);
    for (std::size_t v = 0; v < n_rows; ++v)
      g.verts_[v] = static_cast<VertexId>(v);
    g.vals_.assign(n_rows * dim, 0.0);
    return g;
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return verts_.size(); }
  bool is_dense() const { return dense_; }

  // Row for vertex v, inserted (zero-filled) if absent.
  double* row_for(VertexId v) {
    if (dense_) return vals_.data() + static_cast<std::size_t>(v) * dim_;
    auto it = slot_.find(v);
    std::size_t s;
    if (it == slot_.end()) {
      s = verts_.size();
      slot_.emplace(v, s);
      verts_.push_back(v);
      vals_.resize(vals_.size() + dim_, 0.0);
    } else {
      s = it->second;
    }
    return vals_.data() + s * dim_;
  }

  // row_for(v) += a * x
  void axpy(VertexId v, double a, std::span<const double> x) {
    double* r = row_for(v);
    for (std::size_t k = 0; k < dim_; ++k) r[k] += a * x[k];
  }

  bool contains(VertexId v) const {
    if (dense_) return v < verts_.size();
    return slot_.count(v) > 0;
  }

  VertexId vertex_at(std::size_t slot) const { return verts_[slot]; }
  std::span<const double> row_at(std::size_t slot) const {
    return {vals_.data() + slot * dim_, dim_};
  }
  std::span<double> row_at(std::size_t slot) {
    return {vals_.data() + slot * dim_, dim_};
  }

  std::span<const double> row_of(VertexId v) const {
    if (dense_) return row_at(v);
    auto it = slot_.find(v);
    if (it == slot_.end()) throw ContractError("gradient has no such row");
    return row_at(it->second);
  }

  void scale(double a) {
    for (auto& x : vals_) x *= a;
  }

  bool all_finite() const {
    for (double x : vals_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  std::vector<double>& values() { return vals_; }
  const std::vector<double>& values() const { return vals_; }

 private:
  std::size_t dim_;
  bool dense_ = false;
  std::vector<VertexId> verts_;
  std::vector<double> vals_;
  std::unordered_map<VertexId, std::size_t> slot_;
};

}  // namespace gane
