#include "gane/trainer.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace gane {

void TrainConfig::validate() const {
  if (dim < 1) throw ContractError("dim must be >= 1");
  if (!(lr > 0.0)) throw ContractError("lr must be > 0");
  if (!(clip > 0.0)) throw ContractError("clip must be > 0");
  if (batch < 1) throw ContractError("batch must be >= 1");
  if (fanout < 1) throw ContractError("fanout must be >= 1");
  if (disc_steps < 1) throw ContractError("disc_steps must be >= 1");
  if (variant == ModelVariant::GaneO2 && neg_k < 1)
    throw ContractError("neg_k must be >= 1 for gane-o2");
  if (max_iters < 1) throw ContractError("max_iters must be >= 1");
  if (eval_every < 0) throw ContractError("eval_every must be >= 0");
  if (convergence_window < 2)
    throw ContractError("convergence_window must be >= 2");
  if (!(convergence_tol > 0.0))
    throw ContractError("convergence_tol must be > 0");
  if (!(unobserved_weight > 0.0))
    throw ContractError("unobserved_weight must be > 0");
}

std::string TrainConfig::canonical_string() const {
  std::ostringstream s;
  s << "variant=" << to_string(variant) << ";dim=" << dim << ";lr=" << lr
    << ";clip=" << clip << ";batch=" << batch << ";fanout=" << fanout
    << ";disc_steps=" << disc_steps << ";neg_k=" << neg_k
    << ";max_iters=" << max_iters << ";seed=" << seed
    << ";eval_every=" << eval_every << ";window=" << convergence_window
    << ";tol=" << convergence_tol
    << ";weight_proportional=" << (weight_proportional_edges ? 1 : 0)
    << ";unobserved_weight=" << unobserved_weight;
  return s.str();
}

void TrainTrace::to_csv(std::ostream& out) const {
  out << "iter,disc_loss,gen_loss,elapsed_ms";
  const bool with_metric = !metric_name.empty();
  if (with_metric) out << ',' << metric_name;
  out << '\n';
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.3f", r.iter, r.disc_loss,
                  r.gen_loss, r.elapsed_ms);
    out << buf;
    if (with_metric) {
      if (r.metric)
        std::snprintf(buf, sizeof buf, ",%.9g", *r.metric);
      else
        std::snprintf(buf, sizeof buf, ",");
      out << buf;
    }
    out << '\n';
  }
}

bool check_convergence(std::span<const double> losses, int window,
                       double tol) {
  if (window < 2) throw ContractError("convergence window must be >= 2");
  const auto w = static_cast<std::size_t>(window);
  if (losses.size() < w) return false;
  const auto tail = losses.subspan(losses.size() - w);
  double mean = 0.0;
  for (double x : tail) mean += x;
  mean /= static_cast<double>(w);
  double spread = 0.0;
  for (double x : tail) spread = std::max(spread, std::abs(x - mean));
  return spread < tol * std::max(std::abs(mean), 1.0);
}

namespace {

double effective_weight(const Network& net, VertexId i, VertexId j,
                        double unobserved) {
  const double w = net.weight_of(i, j);
  return w > 0.0 ? w : unobserved;
}

}  // namespace

TrainResult train(const Network& net, const TrainConfig& cfg,
                  const TrainHooks& hooks) {
  cfg.validate();
  if (net.n_vertices() < 2)
    throw ContractError("training needs at least two vertices");
  if (net.n_edges() < 1) throw ContractError("training needs at least one edge");

  const auto nv = net.n_vertices();
  const auto d = static_cast<std::size_t>(cfg.dim);
  const auto m = static_cast<std::size_t>(cfg.batch);

  SplitRng root(cfg.seed);
  SplitRng init_rng = root.split(1);
  SplitRng loop_rng = root.split(2);

  TrainResult res;
  res.theta = EmbeddingMatrix::random_init(nv, d, init_rng);
  res.phi = EmbeddingMatrix::random_init(nv, d, init_rng);
  clip_params(res.phi, cfg.clip);

  RmsPropConfig opt_cfg{cfg.lr, 0.9, 1e-8};
  RmsProp opt_phi(nv, d, opt_cfg);
  RmsProp opt_theta(nv, d, opt_cfg);

  AliasTable noise;
  const bool second_order = cfg.variant == ModelVariant::GaneO2;
  if (second_order) noise = noise_distribution(net);
  const auto k = second_order ? static_cast<std::size_t>(cfg.neg_k)
                              : std::size_t{0};

  std::vector<double> disc_losses;
  disc_losses.reserve(cfg.max_iters);
  const auto t0 = std::chrono::steady_clock::now();

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    double disc_loss_sum = 0.0;
    for (int t = 0; t < cfg.disc_steps; ++t) {
      const auto real =
          sample_edges(net, m, loop_rng, cfg.weight_proportional_edges);
      if (hooks.on_real_batch) hooks.on_real_batch(real);

      std::vector<GeneratedEdge> fake;
      fake.reserve(m);
      for (std::size_t b = 0; b < m; ++b) {
        const auto src = static_cast<VertexId>(loop_rng.next_below(nv));
        auto e = gen_sample(res.theta, src, 1, loop_rng)[0];
        e.weight = effective_weight(net, e.i, e.j, cfg.unobserved_weight);
        fake.push_back(e);
      }

      std::vector<VertexId> rn, fn;
      if (second_order) {
        rn = draw_noise(noise, m * k, loop_rng);
        fn = draw_noise(noise, m * k, loop_rng);
      }

      const double loss =
          disc_loss(cfg.variant, res.phi, real, fake, rn, fn, cfg.neg_k);
      if (!std::isfinite(loss)) {
        TrainTrace t2 = res.trace;
        throw DivergenceError("discriminator loss diverged at iteration " +
                                  std::to_string(iter),
                              std::move(t2));
      }
      const SparseGrad grad =
          disc_grad(cfg.variant, res.phi, real, fake, rn, fn, cfg.neg_k);
      opt_phi.step(res.phi, grad);
      clip_params(res.phi, cfg.clip);
      ++res.disc_updates;
      ++res.clips;
      if (hooks.on_disc_update) hooks.on_disc_update(res.phi, loss);
      disc_loss_sum += loss;
    }
    const double disc_avg = disc_loss_sum / cfg.disc_steps;

    // One generator step: m source vertices, fanout samples each.
    std::vector<GeneratedEdge> fake;
    fake.reserve(m * static_cast<std::size_t>(cfg.fanout));
    for (std::size_t b = 0; b < m; ++b) {
      const auto src = static_cast<VertexId>(loop_rng.next_below(nv));
      auto samples = gen_sample(res.theta, src,
                                static_cast<std::size_t>(cfg.fanout), loop_rng);
      for (auto& e : samples) {
        e.weight = effective_weight(net, e.i, e.j, cfg.unobserved_weight);
        fake.push_back(e);
      }
    }
    std::vector<double> rewards(fake.size());
    for (std::size_t b = 0; b < fake.size(); ++b)
      rewards[b] = disc_reward(cfg.variant, res.phi, fake[b]);
    const double g_loss = gen_loss(fake, res.phi, cfg.variant);
    if (!std::isfinite(g_loss)) {
      TrainTrace t2 = res.trace;
      throw DivergenceError(
          "generator loss diverged at iteration " + std::to_string(iter),
          std::move(t2));
    }
    const SparseGrad ggrad = gen_policy_grad(res.theta, fake, rewards);
    opt_theta.step(res.theta, ggrad);
    ++res.gen_updates;
    if (hooks.on_gen_update) hooks.on_gen_update(res.theta, g_loss);

    assert(res.phi.all_finite() && res.theta.all_finite());

    TraceRow row;
    row.iter = iter;
    row.disc_loss = disc_avg;
    row.gen_loss = g_loss;
    row.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    if (hooks.metric && cfg.eval_every > 0 && iter % cfg.eval_every == 0)
      row.metric = hooks.metric(res.theta, res.phi);
    res.trace.rows.push_back(row);

    disc_losses.push_back(disc_avg);
    res.iterations = iter;
    if (check_convergence(disc_losses, cfg.convergence_window,
                          cfg.convergence_tol)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

void apply_config_kv(TrainConfig& cfg, const std::string& key,
                     const std::string& value) {
  try {
    if (key == "variant" || key == "model")
      cfg.variant = variant_from_string(value);
    else if (key == "dim")
      cfg.dim = std::stoi(value);
    else if (key == "lr")
      cfg.lr = std::stod(value);
    else if (key == "clip")
      cfg.clip = std::stod(value);
    else if (key == "batch")
      cfg.batch = std::stoi(value);
    else if (key == "fanout")
      cfg.fanout = std::stoi(value);
    else if (key == "disc_steps")
      cfg.disc_steps = std::stoi(value);
    else if (key == "neg_k")
      cfg.neg_k = std::stoi(value);
    else if (key == "max_iters")
      cfg.max_iters = std::stoi(value);
    else if (key == "seed")
      cfg.seed = std::stoull(value);
    else if (key == "eval_every")
      cfg.eval_every = std::stoi(value);
    else if (key == "convergence_window")
      cfg.convergence_window = std::stoi(value);
    else if (key == "convergence_tol")
      cfg.convergence_tol = std::stod(value);
    else if (key == "weight_proportional_edges")
      cfg.weight_proportional_edges = value == "1" || value == "true";
    else if (key == "unobserved_weight")
      cfg.unobserved_weight = std::stod(value);
    else
      throw ContractError("unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw ParseError("bad value '" + value + "' for config key '" + key + "'");
  } catch (const std::out_of_range&) {
    throw ParseError("bad value '" + value + "' for config key '" + key + "'");
  }
}

TrainConfig parse_train_config(std::istream& in, TrainConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = true;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      if (blank) continue;
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    apply_config_kv(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ModelVariant variant_from_string(const std::string& s) {
  if (s == "gane") return ModelVariant::Gane;
  if (s == "gane-o1") return ModelVariant::GaneO1;
  if (s == "gane-o2") return ModelVariant::GaneO2;
  throw ContractError("unknown model variant '" + s + "'");
}

}  // namespace gane
