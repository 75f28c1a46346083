#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gane/errors.hpp"
#include "gane/matrix.hpp"
#include "gane/rng.hpp"

namespace gane {

// Undirected edge, stored once with u < v. Weight strictly positive.
struct Edge {
  VertexId u;
  VertexId v;
  double w;

  bool operator==(const Edge& o) const {
    return u == o.u && v == o.v && w == o.w;
  }
};

// O(1) sampler for an arbitrary finite discrete distribution (Vose's
// alias method). Read-only after construction; safe to share across
// threads with per-caller RNGs.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  VertexId sample(SplitRng& rng) const;
  std::size_t size() const { return prob_.size(); }

  // Exact per-item probabilities implied by the table, for verifying the
  // construction against the normalized input weights.
  std::vector<double> reconstructed_probabilities() const;

 private:
  std::vector<double> prob_;
  std::vector<VertexId> alias_;
};

// Immutable weighted undirected graph. Dense vertex ids 0..|V|-1; the
// original names are kept for export. Sampling tables are precomputed at
// construction, so a built Network is safe to share across threads.
class Network {
 public:
  std::size_t n_vertices() const { return names_.size(); }
  std::size_t n_edges() const { return edges_.size(); }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Neighbors of v as (neighbor, weight), sorted by neighbor id.
  std::span<const std::pair<VertexId, double>> neighbors(VertexId v) const {
    return adj_[v];
  }

  double vertex_weight(VertexId v) const { return vertex_weight_[v]; }
  const std::vector<double>& vertex_weights() const { return vertex_weight_; }
  double total_weight() const { return total_weight_; }

  bool has_edge(VertexId a, VertexId b) const { return weight_of(a, b) > 0.0; }
  double weight_of(VertexId a, VertexId b) const;  // 0 if not adjacent

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& label_names() const { return label_names_; }

  const AliasTable& edge_sampler() const { return edge_alias_; }

  // Validates and indexes a graph. Throws ValidationError on self-loops,
  // nonpositive weights, duplicate edges, or out-of-range ids. labels, if
  // given, must have one entry per vertex (values index label_names).
  static Network build(std::vector<std::string> names, std::vector<Edge> edges,
                       std::vector<int> labels = {},
                       std::vector<std::string> label_names = {});

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<VertexId, double>>> adj_;
  std::vector<double> vertex_weight_;
  double total_weight_ = 0.0;
  std::vector<int> labels_;
  std::vector<std::string> label_names_;
  AliasTable edge_alias_;
};

// Text loader. One edge per line: `src TAB dst [TAB weight]` (any
// whitespace accepted between fields, weight defaults to 1.0); lines
// starting with '#' are skipped. Optional label file: `vertex TAB label`.
Network load_edge_list(const std::string& path,
                       const std::string& label_path = "");

// Canonical text dump: `src\tdst\tweight` per line with full precision,
// in stored edge order. dump(load(dump(net))) == dump(net).
void dump_edge_list(const Network& net, std::ostream& out);
void dump_edge_list(const Network& net, const std::string& path);
void dump_labels(const Network& net, const std::string& path);

// Alias table over vertices with unnormalized mass W_v^(3/4).
AliasTable noise_distribution(const Network& net);

// m i.i.d. edge draws, by default with probability proportional to the
// edge weight; uniform over edges when proportional == false.
std::vector<Edge> sample_edges(const Network& net, std::size_t m,
                               SplitRng& rng, bool proportional = true);

struct SplitResult {
  Network train;
  std::vector<Edge> test;
  // True when vertex coverage forced more edges into train than the
  // requested fraction (callers should surface a warning).
  bool coverage_expanded = false;
};

// Splits edges into train/test with ceil(fraction * |E|) train edges,
// guaranteeing every vertex is incident to at least one train edge.
// Coverage is established by assigning one random incident edge per
// uncovered vertex, then filling the remainder at random. Throws
// SplitError if some vertex cannot be covered (no incident edges).
SplitResult split_train_test(const Network& net, double fraction,
                             SplitRng& rng);

}  // namespace gane
