#include "gane/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gane {

// ---------------------------------------------------------------------------
// AliasTable

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw ContractError("alias table over empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ContractError("alias table weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw ContractError("alias table weights sum to zero");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  for (std::size_t k = 0; k < n; ++k)
    scaled[k] = weights[k] / total * static_cast<double>(n);

  std::vector<VertexId> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::size_t k = n; k-- > 0;) {
    if (scaled[k] < 1.0)
      small.push_back(static_cast<VertexId>(k));
    else
      large.push_back(static_cast<VertexId>(k));
  }
  while (!small.empty() && !large.empty()) {
    const VertexId s = small.back();
    small.pop_back();
    const VertexId l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = scaled[l] + scaled[s] - 1.0;
    if (scaled[l] < 1.0)
      small.push_back(l);
    else
      large.push_back(l);
  }
  while (!large.empty()) {
    prob_[large.back()] = 1.0;
    alias_[large.back()] = large.back();
    large.pop_back();
  }
  while (!small.empty()) {
    prob_[small.back()] = 1.0;
    alias_[small.back()] = small.back();
    small.pop_back();
  }
}

VertexId AliasTable::sample(SplitRng& rng) const {
  const std::size_t k = rng.next_below(prob_.size());
  return rng.next_double() < prob_[k] ? static_cast<VertexId>(k) : alias_[k];
}

std::vector<double> AliasTable::reconstructed_probabilities() const {
  const double n = static_cast<double>(prob_.size());
  std::vector<double> p(prob_.size(), 0.0);
  for (std::size_t k = 0; k < prob_.size(); ++k) {
    p[k] += prob_[k] / n;
    if (prob_[k] < 1.0) p[alias_[k]] += (1.0 - prob_[k]) / n;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Network

Network Network::build(std::vector<std::string> names, std::vector<Edge> edges,
                       std::vector<int> labels,
                       std::vector<std::string> label_names) {
  Network net;
  const std::size_t nv = names.size();
  if (!labels.empty() && labels.size() != nv)
    throw ValidationError("label vector size does not match vertex count");

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  for (auto& e : edges) {
    if (e.u >= nv || e.v >= nv)
      throw ValidationError("edge endpoint out of range");
    if (e.u == e.v)
      throw ValidationError("self-loop on vertex '" + names[e.u] + "'");
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw ValidationError("nonpositive weight on edge ('" + names[e.u] +
                            "', '" + names[e.v] + "')");
    if (e.u > e.v) std::swap(e.u, e.v);
    const std::uint64_t key =
        (static_cast<std::uint64_t>(e.u) << 32) | e.v;
    if (!seen.insert(key).second)
      throw ValidationError("duplicate edge ('" + names[e.u] + "', '" +
                            names[e.v] + "')");
  }

  net.names_ = std::move(names);
  net.edges_ = std::move(edges);
  net.labels_ = std::move(labels);
  net.label_names_ = std::move(label_names);
  net.adj_.assign(nv, {});
  net.vertex_weight_.assign(nv, 0.0);
  for (const auto& e : net.edges_) {
    net.adj_[e.u].emplace_back(e.v, e.w);
    net.adj_[e.v].emplace_back(e.u, e.w);
    net.vertex_weight_[e.u] += e.w;
    net.vertex_weight_[e.v] += e.w;
    net.total_weight_ += e.w;
  }
  for (auto& nbrs : net.adj_)
    std::sort(nbrs.begin(), nbrs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

  if (!net.edges_.empty()) {
    std::vector<double> ws(net.edges_.size());
    for (std::size_t k = 0; k < ws.size(); ++k) ws[k] = net.edges_[k].w;
    net.edge_alias_ = AliasTable(ws);
  }
  return net;
}

double Network::weight_of(VertexId a, VertexId b) const {
  if (a >= n_vertices() || b >= n_vertices()) return 0.0;
  const auto& nbrs = adj_[a];
  auto it = std::lower_bound(
      nbrs.begin(), nbrs.end(), b,
      [](const auto& p, VertexId x) { return p.first < x; });
  if (it != nbrs.end() && it->first == b) return it->second;
  return 0.0;
}

// ---------------------------------------------------------------------------
// Loading / dumping

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r')
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j + (j < line.size() ? 1 : 0);
  }
  return out;
}

bool parse_weight(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

Network load_edge_list(const std::string& path, const std::string& label_path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list '" + path + "'");

  std::vector<std::string> names;
  std::unordered_map<std::string, VertexId> id_of;
  auto intern = [&](const std::string& name) -> VertexId {
    auto it = id_of.find(name);
    if (it != id_of.end()) return it->second;
    const VertexId id = static_cast<VertexId>(names.size());
    id_of.emplace(name, id);
    names.push_back(name);
    return id;
  };

  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 2 || fields.size() > 3)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected `src dst [weight]`, got " +
                       std::to_string(fields.size()) + " fields");
    double w = 1.0;
    if (fields.size() == 3 && !parse_weight(fields[2], w))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": bad weight '" + fields[2] + "'");
    edges.push_back({intern(fields[0]), intern(fields[1]), w});
  }

  std::vector<int> labels;
  std::vector<std::string> label_names;
  if (!label_path.empty()) {
    std::ifstream lin(label_path);
    if (!lin) throw ParseError("cannot open label file '" + label_path + "'");
    labels.assign(names.size(), -1);
    std::unordered_map<std::string, int> label_id;
    std::size_t lno = 0;
    while (std::getline(lin, line)) {
      ++lno;
      if (line.empty() || line[0] == '#') continue;
      const auto fields = split_fields(line);
      if (fields.empty()) continue;
      if (fields.size() != 2)
        throw ParseError(label_path + ":" + std::to_string(lno) +
                         ": expected `vertex label`");
      auto it = id_of.find(fields[0]);
      if (it == id_of.end())
        throw ValidationError(label_path + ":" + std::to_string(lno) +
                              ": unknown vertex '" + fields[0] + "'");
      auto [lit, inserted] =
          label_id.emplace(fields[1], static_cast<int>(label_names.size()));
      if (inserted) label_names.push_back(fields[1]);
      labels[it->second] = lit->second;
    }
  }

  return Network::build(std::move(names), std::move(edges), std::move(labels),
                        std::move(label_names));
}

void dump_edge_list(const Network& net, std::ostream& out) {
  char buf[64];
  for (const auto& e : net.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.w);
    out << net.names()[e.u] << '\t' << net.names()[e.v] << '\t' << buf << '\n';
  }
}

void dump_edge_list(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  dump_edge_list(net, out);
}

void dump_labels(const Network& net, const std::string& path) {
  if (!net.has_labels()) throw ContractError("network has no labels");
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  for (std::size_t v = 0; v < net.n_vertices(); ++v) {
    if (net.labels()[v] < 0) continue;
    out << net.names()[v] << '\t' << net.label_names()[net.labels()[v]]
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sampling

AliasTable noise_distribution(const Network& net) {
  if (net.n_vertices() == 0) throw ContractError("empty network");
  std::vector<double> mass(net.n_vertices());
  for (std::size_t v = 0; v < net.n_vertices(); ++v)
    mass[v] = std::pow(net.vertex_weight(static_cast<VertexId>(v)), 0.75);
  return AliasTable(mass);
}

std::vector<Edge> sample_edges(const Network& net, std::size_t m,
                               SplitRng& rng, bool proportional) {
  if (net.n_edges() == 0 && m > 0)
    throw ContractError("cannot sample edges from an edgeless network");
  std::vector<Edge> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t idx =
        proportional ? net.edge_sampler().sample(rng)
                     : rng.next_below(net.n_edges());
    out.push_back(net.edges()[idx]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Train/test split

SplitResult split_train_test(const Network& net, double fraction,
                             SplitRng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ContractError("train fraction must lie in (0, 1)");
  const std::size_t n_edges = net.n_edges();
  const std::size_t n_vertices = net.n_vertices();
  for (VertexId v = 0; v < n_vertices; ++v)
    if (net.neighbors(v).empty())
      throw SplitError("vertex '" + net.names()[v] +
                       "' has no incident edges; coverage infeasible");

  const auto target = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n_edges) - 1e-9));

  // Edge index lookup for (u, v) pairs.
  std::unordered_map<std::uint64_t, std::size_t> edge_idx;
  edge_idx.reserve(n_edges * 2);
  for (std::size_t k = 0; k < n_edges; ++k) {
    const auto& e = net.edges()[k];
    edge_idx.emplace((static_cast<std::uint64_t>(e.u) << 32) | e.v, k);
  }
  auto index_of = [&](VertexId a, VertexId b) {
    if (a > b) std::swap(a, b);
    return edge_idx.at((static_cast<std::uint64_t>(a) << 32) | b);
  };

  std::vector<char> in_train(n_edges, 0);
  std::vector<char> covered(n_vertices, 0);
  std::size_t train_count = 0;

  // Cover every vertex with one random incident edge, visiting vertices
  // in random order.
  std::vector<VertexId> order(n_vertices);
  for (VertexId v = 0; v < n_vertices; ++v) order[v] = v;
  for (std::size_t i = n_vertices; i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);
  for (const VertexId v : order) {
    if (covered[v]) continue;
    const auto nbrs = net.neighbors(v);
    const auto& pick = nbrs[rng.next_below(nbrs.size())];
    const std::size_t k = index_of(v, pick.first);
    if (!in_train[k]) {
      in_train[k] = 1;
      ++train_count;
    }
    covered[v] = 1;
    covered[pick.first] = 1;
  }

  // Fill the remaining quota from the unassigned edges at random.
  if (train_count < target) {
    std::vector<std::size_t> rest;
    rest.reserve(n_edges - train_count);
    for (std::size_t k = 0; k < n_edges; ++k)
      if (!in_train[k]) rest.push_back(k);
    for (std::size_t i = rest.size(); i > 1; --i)
      std::swap(rest[i - 1], rest[rng.next_below(i)]);
    for (std::size_t i = 0; i < rest.size() && train_count < target; ++i) {
      in_train[rest[i]] = 1;
      ++train_count;
    }
  }

  SplitResult result;
  result.coverage_expanded = train_count > target;
  std::vector<Edge> train_edges;
  train_edges.reserve(train_count);
  for (std::size_t k = 0; k < n_edges; ++k) {
    if (in_train[k])
      train_edges.push_back(net.edges()[k]);
    else
      result.test.push_back(net.edges()[k]);
  }
  result.train = Network::build(net.names(), std::move(train_edges),
                                net.labels(), net.label_names());
  return result;
}

}  // namespace gane
