#pragma once

#include <iosfwd>
#include <vector>

#include "gane/matrix.hpp"

namespace gane {

struct RmsPropConfig {
  double lr = 5e-4;
  double decay = 0.9;
  double eps = 1e-8;
};

// RMSProp over an embedding matrix with sparse per-batch gradients. Only
// touched rows update their mean-square accumulators, so an update costs
// O(batch) regardless of |V|.
class RmsProp {
 public:
  RmsProp(std::size_t rows, std::size_t cols, RmsPropConfig cfg = {});

  // Rejects non-finite gradients before mutating anything.
  void step(EmbeddingMatrix& params, const SparseGrad& grad);

  const RmsPropConfig& config() const { return cfg_; }
  const std::vector<double>& accum() const { return accum_; }

  void save(std::ostream& out) const;
  static RmsProp load(std::istream& in);

 private:
  RmsProp() = default;
  RmsPropConfig cfg_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> accum_;
};

// Clamp every entry into [-c, c]. Idempotent.
void clip_params(EmbeddingMatrix& params, double c);

}  // namespace gane
