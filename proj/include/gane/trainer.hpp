#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gane/graph.hpp"
#include "gane/model.hpp"
#include "gane/optimizer.hpp"

namespace gane {

// All hyperparameters of one adversarial training run. Defaults follow
// the usual WGAN settings where the method itself leaves them open.
struct TrainConfig {
  ModelVariant variant = ModelVariant::Gane;
  int dim = 128;
  double lr = 5e-4;           // RMSProp learning rate (both players)
  double clip = 0.01;         // discriminator clipping bound c
  int batch = 64;             // m, edges per discriminator step
  int fanout = 5;             // M, generated edges per source vertex
  int disc_steps = 5;         // T, discriminator updates per iteration
  int neg_k = 5;              // K, negative samples (GaneO2 only)
  int max_iters = 10000;
  std::uint64_t seed = 1;
  int eval_every = 0;         // 0 = never run the metric hook
  int convergence_window = 50;
  double convergence_tol = 1e-3;
  // Edge batches are drawn proportionally to edge weight by default; the
  // method leaves the choice open, so uniform sampling stays available.
  bool weight_proportional_edges = true;
  // Weight assigned to a generated edge whose pair is not observed in the
  // graph (observed pairs take the graph weight).
  double unobserved_weight = 1.0;

  void validate() const;  // throws ContractError
  std::string canonical_string() const;
};

struct TraceRow {
  int iter = 0;
  double disc_loss = 0.0;
  double gen_loss = 0.0;
  double elapsed_ms = 0.0;
  std::optional<double> metric;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  std::string metric_name;  // CSV column header for the optional metric

  void to_csv(std::ostream& out) const;
};

// Training aborted because a loss went non-finite; the partial trace is
// attached for post-mortem.
struct DivergenceError : Error {
  DivergenceError(const std::string& msg, TrainTrace t)
      : Error(msg), trace(std::move(t)) {}
  TrainTrace trace;
};

// Optional instrumentation. on_disc_update fires after each clip,
// on_gen_update after each generator step; metric (with eval_every > 0)
// is recorded into the trace.
struct TrainHooks {
  std::function<void(std::span<const Edge>)> on_real_batch;
  std::function<void(const EmbeddingMatrix& phi, double loss)> on_disc_update;
  std::function<void(const EmbeddingMatrix& theta, double loss)> on_gen_update;
  std::function<double(const EmbeddingMatrix& theta,
                       const EmbeddingMatrix& phi)>
      metric;
};

struct TrainResult {
  EmbeddingMatrix theta;  // generator parameters
  EmbeddingMatrix phi;    // discriminator parameters (default export)
  TrainTrace trace;
  bool converged = false;
  int iterations = 0;
  long long disc_updates = 0;
  long long gen_updates = 0;
  long long clips = 0;
};

// Adversarial training loop: per iteration, disc_steps discriminator
// updates (each followed by a clip of phi) and one policy-gradient
// generator update. Runs until the discriminator loss trace converges or
// max_iters is reached. Deterministic for fixed (net, cfg).
TrainResult train(const Network& net, const TrainConfig& cfg,
                  const TrainHooks& hooks = {});

// True iff the last `window` loss values all lie within a relative band
// of tol around their mean (with an absolute floor of 1 on the scale, so
// near-zero adversarial losses still converge).
bool check_convergence(std::span<const double> losses, int window, double tol);

// key = value config file (# comments). Unknown keys are an error;
// returns cfg with the listed keys overridden.
TrainConfig parse_train_config(std::istream& in, TrainConfig base = {});
void apply_config_kv(TrainConfig& cfg, const std::string& key,
                     const std::string& value);

ModelVariant variant_from_string(const std::string& s);

}  // namespace gane
