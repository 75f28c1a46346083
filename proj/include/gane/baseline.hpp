#pragma once

#include <span>
#include <string>
#include <vector>

#include "gane/graph.hpp"
#include "gane/matrix.hpp"

namespace gane {

// LINE reference trainers. O1 optimizes first-order proximity directly on
// the vertex vectors; O2 optimizes second-order proximity against a
// separate context matrix (skip-gram style); O1PlusO2 trains both and
// concatenates the outputs (2 * dim columns).
enum class LineVariant { O1, O2, O1PlusO2 };

LineVariant line_variant_from_string(const std::string& s);
std::string to_string(LineVariant v);

struct LineConfig {
  int dim = 128;            // per part for O1PlusO2
  int neg_k = 5;
  double lr0 = 0.025;       // linearly decayed, floored at lr0 * 1e-4
  long long samples = 1'000'000;
  std::uint64_t seed = 1;
  long long trace_every = 10'000;  // running-mean loss recording interval

  void validate() const;
};

struct LineResult {
  EmbeddingMatrix embedding;       // exported vertex vectors
  std::vector<double> loss_trace;  // mean sample loss per trace block
};

LineResult line_train(const Network& net, const LineConfig& cfg,
                      LineVariant variant);

// One training sample's loss and gradient, exposed for gradient checks:
// -log sigma(u_i . t_j) - sum_n log sigma(-u_i . t_n), where t comes from
// `targets` (the vertex matrix itself for O1, the context matrix for O2).
double line_sample_loss(const EmbeddingMatrix& vertices,
                        const EmbeddingMatrix& targets, VertexId i, VertexId j,
                        std::span<const VertexId> negs);

// Accumulates d loss / d rows into grad_vertices / grad_targets. Pass the
// same SparseGrad object for both when vertices and targets are the same
// matrix (O1).
void line_sample_grad(const EmbeddingMatrix& vertices,
                      const EmbeddingMatrix& targets, VertexId i, VertexId j,
                      std::span<const VertexId> negs, SparseGrad& grad_vertices,
                      SparseGrad& grad_targets);

}  // namespace gane
