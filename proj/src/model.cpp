#include "gane/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gane/kernels.hpp"

namespace gane {

namespace {

constexpr double kLogSigmoidFloor = -30.0;

double dot_rows(const EmbeddingMatrix& m, VertexId i, VertexId j) {
  return kernels::dot(m.row_span(i), m.row_span(j));
}

}  // namespace

std::string to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Gane:
      return "gane";
    case ModelVariant::GaneO1:
      return "gane-o1";
    case ModelVariant::GaneO2:
      return "gane-o2";
  }
  return "?";
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  const double raw = x >= 0.0 ? -std::log1p(std::exp(-x))
                              : x - std::log1p(std::exp(x));
  return raw < kLogSigmoidFloor ? kLogSigmoidFloor : raw;
}

double dlog_sigmoid(double x) {
  const double raw = x >= 0.0 ? -std::log1p(std::exp(-x))
                              : x - std::log1p(std::exp(x));
  if (raw < kLogSigmoidFloor) return 0.0;
  return 1.0 - sigmoid(x);
}

double score_cosine(const EmbeddingMatrix& phi, VertexId i, VertexId j) {
  const double ni = std::sqrt(dot_rows(phi, i, i));
  const double nj = std::sqrt(dot_rows(phi, j, j));
  if (ni == 0.0 || nj == 0.0)
    throw ContractError("cosine score undefined: zero-norm embedding row " +
                        std::to_string(ni == 0.0 ? i : j));
  return dot_rows(phi, i, j) / (ni * nj);
}

double score_p1(const EmbeddingMatrix& phi, VertexId i, VertexId j) {
  return sigmoid(dot_rows(phi, i, j));
}

std::vector<VertexId> draw_noise(const AliasTable& noise, std::size_t count,
                                 SplitRng& rng) {
  std::vector<VertexId> out(count);
  for (auto& v : out) v = noise.sample(rng);
  return out;
}

double disc_score(ModelVariant variant, const EmbeddingMatrix& phi,
                  VertexId i, VertexId j, double w,
                  std::span<const VertexId> noise) {
  switch (variant) {
    case ModelVariant::Gane:
      return score_cosine(phi, i, j);
    case ModelVariant::GaneO1:
      return w * log_sigmoid(dot_rows(phi, i, j));
    case ModelVariant::GaneO2: {
      double s = log_sigmoid(dot_rows(phi, i, j));
      for (const VertexId n : noise)
        s += log_sigmoid(-dot_rows(phi, n, i));
      return w * s;
    }
  }
  return 0.0;
}

namespace {

void check_batches(std::span<const Edge> real,
                   std::span<const GeneratedEdge> fake,
                   std::span<const VertexId> real_noise,
                   std::span<const VertexId> fake_noise, ModelVariant variant,
                   int neg_k) {
  if (real.empty() || fake.empty())
    throw ContractError("discriminator batch must be nonempty");
  if (variant == ModelVariant::GaneO2) {
    if (neg_k < 1)
      throw ContractError("GaneO2 requires neg_k >= 1");
    const auto k = static_cast<std::size_t>(neg_k);
    if (real_noise.size() != real.size() * k ||
        fake_noise.size() != fake.size() * k)
      throw ContractError("noise draw count does not match batch size");
  }
}

}  // namespace

double disc_loss(ModelVariant variant, const EmbeddingMatrix& phi,
                 std::span<const Edge> real,
                 std::span<const GeneratedEdge> fake,
                 std::span<const VertexId> real_noise,
                 std::span<const VertexId> fake_noise, int neg_k) {
  check_batches(real, fake, real_noise, fake_noise, variant, neg_k);
  const auto k = variant == ModelVariant::GaneO2
                     ? static_cast<std::size_t>(neg_k)
                     : std::size_t{0};
  double fake_sum = 0.0;
  for (std::size_t n = 0; n < fake.size(); ++n)
    fake_sum += disc_score(variant, phi, fake[n].i, fake[n].j, fake[n].weight,
                           fake_noise.subspan(n * k, k));
  double real_sum = 0.0;
  for (std::size_t n = 0; n < real.size(); ++n)
    real_sum += disc_score(variant, phi, real[n].u, real[n].v, real[n].w,
                           real_noise.subspan(n * k, k));
  return fake_sum / static_cast<double>(fake.size()) -
         real_sum / static_cast<double>(real.size());
}

namespace {

// d D(e) / d phi rows for one scored pair, scaled by `sign` and
// accumulated into g.
void accumulate_score_grad(SparseGrad& g, ModelVariant variant,
                           const EmbeddingMatrix& phi, VertexId i, VertexId j,
                           double w, std::span<const VertexId> noise,
                           double sign) {
  switch (variant) {
    case ModelVariant::Gane: {
      const double ni = std::sqrt(dot_rows(phi, i, i));
      const double nj = std::sqrt(dot_rows(phi, j, j));
      if (ni == 0.0 || nj == 0.0)
        throw ContractError("cosine score undefined: zero-norm row");
      const double s = dot_rows(phi, i, j);
      const double c = s / (ni * nj);
      // d cos / d u_i = u_j / (|u_i||u_j|) - cos * u_i / |u_i|^2
      const double inv = 1.0 / (ni * nj);
      g.axpy(i, sign * inv, phi.row_span(j));
      g.axpy(i, -sign * c / (ni * ni), phi.row_span(i));
      g.axpy(j, sign * inv, phi.row_span(i));
      g.axpy(j, -sign * c / (nj * nj), phi.row_span(j));
      break;
    }
    case ModelVariant::GaneO1: {
      const double coef = w * dlog_sigmoid(dot_rows(phi, i, j));
      g.axpy(i, sign * coef, phi.row_span(j));
      g.axpy(j, sign * coef, phi.row_span(i));
      break;
    }
    case ModelVariant::GaneO2: {
      const double coef = w * dlog_sigmoid(dot_rows(phi, i, j));
      g.axpy(i, sign * coef, phi.row_span(j));
      g.axpy(j, sign * coef, phi.row_span(i));
      for (const VertexId n : noise) {
        // d/dt log sigma(-t) at t = u_n . u_i
        const double cn = -w * dlog_sigmoid(-dot_rows(phi, n, i));
        g.axpy(i, sign * cn, phi.row_span(n));
        g.axpy(n, sign * cn, phi.row_span(i));
      }
      break;
    }
  }
}

}  // namespace

SparseGrad disc_grad(ModelVariant variant, const EmbeddingMatrix& phi,
                     std::span<const Edge> real,
                     std::span<const GeneratedEdge> fake,
                     std::span<const VertexId> real_noise,
                     std::span<const VertexId> fake_noise, int neg_k) {
  check_batches(real, fake, real_noise, fake_noise, variant, neg_k);
  const auto k = variant == ModelVariant::GaneO2
                     ? static_cast<std::size_t>(neg_k)
                     : std::size_t{0};
  SparseGrad g(phi.cols());
  const double wf = 1.0 / static_cast<double>(fake.size());
  for (std::size_t n = 0; n < fake.size(); ++n)
    accumulate_score_grad(g, variant, phi, fake[n].i, fake[n].j,
                          fake[n].weight, fake_noise.subspan(n * k, k), wf);
  const double wr = -1.0 / static_cast<double>(real.size());
  for (std::size_t n = 0; n < real.size(); ++n)
    accumulate_score_grad(g, variant, phi, real[n].u, real[n].v, real[n].w,
                          real_noise.subspan(n * k, k), wr);
  return g;
}

std::vector<double> gen_distribution(const EmbeddingMatrix& theta,
                                     VertexId i) {
  if (theta.rows() < 2)
    throw ContractError("generator needs at least two vertices");
  std::vector<double> p(theta.rows());
  kernels::scores_all(theta, theta.row_span(i), p);
  kernels::masked_softmax(p, i);
  return p;
}

double gen_log_prob(const EmbeddingMatrix& theta, VertexId i, VertexId j) {
  const auto p = gen_distribution(theta, i);
  return std::log(p[j]);
}

std::vector<GeneratedEdge> gen_sample(const EmbeddingMatrix& theta, VertexId i,
                                      std::size_t m, SplitRng& rng) {
  const auto p = gen_distribution(theta, i);
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    acc += p[j];
    cdf[j] = acc;
  }
  std::vector<GeneratedEdge> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = rng.next_double() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto j = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    if (j >= p.size()) j = p.size() - 1;
    while (p[j] == 0.0 && j > 0) --j;  // land on a positive-mass entry
    out.push_back({i, static_cast<VertexId>(j), std::log(p[j]), 1.0});
  }
  return out;
}

double disc_reward(ModelVariant variant, const EmbeddingMatrix& phi,
                   const GeneratedEdge& e) {
  switch (variant) {
    case ModelVariant::Gane:
      return score_cosine(phi, e.i, e.j);
    case ModelVariant::GaneO1:
    case ModelVariant::GaneO2:
      return e.weight * log_sigmoid(dot_rows(phi, e.i, e.j));
  }
  return 0.0;
}

double gen_loss(std::span<const GeneratedEdge> fake,
                const EmbeddingMatrix& phi, ModelVariant variant) {
  if (fake.empty()) throw ContractError("generator batch must be nonempty");
  double s = 0.0;
  for (const auto& e : fake) s += disc_reward(variant, phi, e);
  return -s / static_cast<double>(fake.size());
}

SparseGrad gen_policy_grad(const EmbeddingMatrix& theta,
                           std::span<const GeneratedEdge> fake,
                           std::span<const double> rewards) {
  if (fake.empty()) throw ContractError("generator batch must be nonempty");
  if (rewards.size() != fake.size())
    throw ContractError("rewards count does not match batch size");

  struct Group {
    VertexId source;
    double reward_total = 0.0;
    std::vector<double> probs;                          // p_theta(. | source)
    std::vector<std::pair<VertexId, double>> target_r;  // j -> sum of rewards
    std::vector<double> special;  // d/d theta_source contribution
  };

  // Group samples by source in first-occurrence order.
  std::vector<Group> groups;
  std::unordered_map<VertexId, std::size_t> group_of;
  for (std::size_t k = 0; k < fake.size(); ++k) {
    auto [it, inserted] = group_of.emplace(fake[k].i, groups.size());
    if (inserted) groups.push_back({fake[k].i, 0.0, {}, {}, {}});
    Group& grp = groups[it->second];
    grp.reward_total += rewards[k];
    auto tr = std::find_if(grp.target_r.begin(), grp.target_r.end(),
                           [&](const auto& p) { return p.first == fake[k].j; });
    if (tr == grp.target_r.end())
      grp.target_r.emplace_back(fake[k].j, rewards[k]);
    else
      tr->second += rewards[k];
  }

  const std::size_t d = theta.cols();
  const std::size_t nv = theta.rows();
  for (auto& grp : groups) {
    grp.probs = gen_distribution(theta, grp.source);
    // d log p(j|i) / d theta_i = theta_j - sum_a p_a theta_a; summed over
    // the group's samples weighted by reward.
    std::vector<double> gbar(d);
    kernels::weighted_rowsum(theta, grp.probs, gbar);
    grp.special.assign(d, 0.0);
    for (const auto& [j, r] : grp.target_r)
      for (std::size_t c = 0; c < d; ++c)
        grp.special[c] += r * theta.at(j, c);
    for (std::size_t c = 0; c < d; ++c)
      grp.special[c] -= grp.reward_total * gbar[c];
  }

  SparseGrad g = SparseGrad::dense(nv, d);
  const double scale = -1.0 / static_cast<double>(fake.size());
  double* gv = g.values().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t a = 0; a < static_cast<std::int64_t>(nv); ++a) {
    double* row = gv + static_cast<std::size_t>(a) * d;
    for (const auto& grp : groups) {
      if (static_cast<VertexId>(a) == grp.source) {
        for (std::size_t c = 0; c < d; ++c) row[c] += scale * grp.special[c];
        continue;
      }
      // d log p(j|i) / d theta_a = (1{a=j} - p_a) theta_i for a != i.
      double coef = -grp.probs[static_cast<std::size_t>(a)] * grp.reward_total;
      for (const auto& [j, r] : grp.target_r)
        if (j == static_cast<VertexId>(a)) coef += r;
      if (coef == 0.0) continue;
      const double* src = theta.row(grp.source);
      for (std::size_t c = 0; c < d; ++c) row[c] += scale * coef * src[c];
    }
  }
  return g;
}

}  // namespace gane
