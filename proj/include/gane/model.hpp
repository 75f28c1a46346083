#pragma once

#include <span>
#include <string>
#include <vector>

#include "gane/graph.hpp"
#include "gane/matrix.hpp"

namespace gane {

// Discriminator scoring family. Gane scores an edge by cosine similarity;
// GaneO1 by the weighted log-sigmoid of the inner product (first-order
// proximity); GaneO2 adds K negative-sample terms drawn from the noise
// distribution (second-order proximity). With shared noise draws and
// matched weights the O2 batch loss reduces exactly to O1.
enum class ModelVariant { Gane, GaneO1, GaneO2 };

std::string to_string(ModelVariant v);

// An edge proposed by the generator: target j sampled from p_theta(.|i).
// logp is the log-probability of the draw; weight is the effective edge
// weight used by the weighted discriminator variants (the graph weight if
// (i, j) is observed, otherwise a configured constant, 1.0 by default).
struct GeneratedEdge {
  VertexId i;
  VertexId j;
  double logp;
  double weight = 1.0;
};

// sigma(x), numerically stable for all finite x.
double sigmoid(double x);

// log sigma(x), clamped below at -30 so saturated pairs cannot produce
// -inf. dlog_sigmoid is the matching derivative (0 inside the clamp).
double log_sigmoid(double x);
double dlog_sigmoid(double x);

// Cosine similarity of rows i and j. Throws ContractError if either row
// has zero norm (the score is undefined there).
double score_cosine(const EmbeddingMatrix& phi, VertexId i, VertexId j);

// First-order joint probability sigma(u_i . u_j).
double score_p1(const EmbeddingMatrix& phi, VertexId i, VertexId j);

// K noise-vertex draws per batch item, flattened (item k occupies
// [k*K, (k+1)*K)).
std::vector<VertexId> draw_noise(const AliasTable& noise, std::size_t count,
                                 SplitRng& rng);

// Trust score D(e) of a single (i, j) pair under a variant. noise must
// hold the K draws for this item when the variant is GaneO2.
double disc_score(ModelVariant variant, const EmbeddingMatrix& phi,
                  VertexId i, VertexId j, double w,
                  std::span<const VertexId> noise = {});

// Monte Carlo discriminator loss: mean over fake of D(e') minus mean over
// real of D(e). For GaneO2, real_noise/fake_noise carry neg_k draws per
// batch item (shared draws make the O1 identity testable); both spans are
// ignored by the other variants.
double disc_loss(ModelVariant variant, const EmbeddingMatrix& phi,
                 std::span<const Edge> real,
                 std::span<const GeneratedEdge> fake,
                 std::span<const VertexId> real_noise = {},
                 std::span<const VertexId> fake_noise = {}, int neg_k = 0);

// Analytic gradient of disc_loss over the touched phi rows.
SparseGrad disc_grad(ModelVariant variant, const EmbeddingMatrix& phi,
                     std::span<const Edge> real,
                     std::span<const GeneratedEdge> fake,
                     std::span<const VertexId> real_noise = {},
                     std::span<const VertexId> fake_noise = {},
                     int neg_k = 0);

// Generator conditional p_theta(. | i): softmax of theta_j . theta_i over
// all vertices, with the self-transition masked to 0 and renormalized.
std::vector<double> gen_distribution(const EmbeddingMatrix& theta, VertexId i);

// log p_theta(j | i); -inf when j == i.
double gen_log_prob(const EmbeddingMatrix& theta, VertexId i, VertexId j);

// M i.i.d. draws from gen_distribution(theta, i), each carrying its logp.
// Weights are left at 1.0; callers that need graph weights assign them.
std::vector<GeneratedEdge> gen_sample(const EmbeddingMatrix& theta, VertexId i,
                                      std::size_t m, SplitRng& rng);

// Reward fed back to the generator for one proposed edge: D_phi(e'). For
// GaneO2 the reduced first-order form is used; the negative-sampling
// terms depend only on the source vertex, so they add zero to the policy
// gradient in expectation.
double disc_reward(ModelVariant variant, const EmbeddingMatrix& phi,
                   const GeneratedEdge& e);

// Generator loss -mean over the batch of D_phi(e').
double gen_loss(std::span<const GeneratedEdge> fake,
                const EmbeddingMatrix& phi, ModelVariant variant);

// REINFORCE estimator -(1/M) sum_k grad_theta log p_theta(e'_k) * reward_k.
// The log-softmax gradient touches every theta row through the partition
// function, so the result is dense over theta.
SparseGrad gen_policy_grad(const EmbeddingMatrix& theta,
                           std::span<const GeneratedEdge> fake,
                           std::span<const double> rewards);

}  // namespace gane
