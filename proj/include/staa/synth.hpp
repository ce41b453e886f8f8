#pragma once

// Noisy dynamic graph generator. A stochastic block model backbone is drawn
// once and persists through every snapshot. A subset of "active" nodes
// additionally receives transient noise edges (uniform partner, lifetime one
// snapshot) and churns some of its backbone edges, which are rewired to
// uniform partners for that snapshot only. The ground-truth next snapshot is
// the backbone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "staa/error.hpp"
#include "staa/graph.hpp"

namespace staa {

struct SynthSpec {
  NodeId n = 200;
  int communities = 4;
  int snapshots = 8;
  double p_in = 0.1;
  double p_out = 0.01;
  double active_fraction = 0.1;
  double noise_rate = 0.1;  // per (active node, partner) pair and snapshot
  double churn_rate = 0.0;  // per backbone edge of an active node and snapshot
  std::uint64_t seed = 0;

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (n < 1 || snapshots < 1 || communities < 1 || communities > n)
      throw DegenerateSpecError("need n >= 1, snapshots >= 1 and 1 <= communities <= n");
    if (!prob(p_in) || !prob(p_out) || !prob(active_fraction) || !prob(noise_rate) || !prob(churn_rate))
      throw DegenerateSpecError("probabilities must lie in [0, 1]");
  }

  int community_of(NodeId v) const { return static_cast<int>(v % communities); }

  /// Mean backbone degree over nodes.
  double expected_degree() const {
    double total = 0.0;
    for (int c = 0; c < communities; ++c) {
      const auto size = static_cast<double>(n / communities + (c < n % communities ? 1 : 0));
      total += size * (p_in * (size - 1.0) + p_out * (static_cast<double>(n) - size));
    }
    return total / static_cast<double>(n);
  }
};

enum class EdgeLabel { Persistent, Noise };

struct LabeledEdge {
  std::size_t t = 0;  // snapshot index
  NodeId u = 0;       // u < v
  NodeId v = 0;
  EdgeLabel label = EdgeLabel::Persistent;

  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

struct SynthResult {
  SnapshotSequence sequence;
  std::vector<LabeledEdge> labels;  // one per edge occurrence
  std::vector<NodeId> active_nodes;  // sorted
  Snapshot next_snapshot;

  friend bool operator==(const SynthResult&, const SynthResult&) = default;
};

inline SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  if (spec.expected_degree() < 1.0)
    throw DegenerateSpecError("expected backbone degree below 1; graph too sparse");
  std::mt19937_64 rng(spec.seed);
  const NodeId n = spec.n;

  using Pair = std::pair<NodeId, NodeId>;
  std::vector<Pair> backbone;
  std::bernoulli_distribution in_edge(spec.p_in), out_edge(spec.p_out);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) {
      const bool same = spec.community_of(u) == spec.community_of(v);
      if (same ? in_edge(rng) : out_edge(rng)) backbone.emplace_back(u, v);
    }
  const std::set<Pair> backbone_set(backbone.begin(), backbone.end());

  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto active_count = static_cast<std::size_t>(std::llround(spec.active_fraction * static_cast<double>(n)));
  std::vector<NodeId> active(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(active_count));
  std::sort(active.begin(), active.end());
  std::vector<bool> is_active(static_cast<std::size_t>(n), false);
  for (NodeId v : active) is_active[v] = true;

  std::bernoulli_distribution noise(spec.noise_rate), churn(spec.churn_rate);
  std::uniform_int_distribution<NodeId> any_node(0, n - 1);
  auto ordered = [](NodeId a, NodeId b) { return a < b ? Pair{a, b} : Pair{b, a}; };

  std::vector<Snapshot> snapshots;
  std::vector<LabeledEdge> labels;
  for (std::size_t t = 0; t < static_cast<std::size_t>(spec.snapshots); ++t) {
    std::set<Pair> persistent;
    std::set<Pair> transient;
    for (const auto& [u, v] : backbone) {
      const bool churnable = is_active[u] || is_active[v];
      if (churnable && n > 2 && churn(rng)) {
        const NodeId anchor = is_active[u] ? u : v;
        NodeId partner = any_node(rng);
        while (partner == anchor) partner = any_node(rng);
        const Pair rewired = ordered(anchor, partner);
        if (!backbone_set.contains(rewired)) transient.insert(rewired);
        continue;
      }
      persistent.emplace(u, v);
    }
    for (NodeId u : active)
      for (NodeId v = 0; v < n; ++v) {
        if (v == u) continue;
        const Pair p = ordered(u, v);
        // pairs between two active nodes get one draw, from the smaller id
        if (is_active[v] && v < u) continue;
        if (noise(rng) && !backbone_set.contains(p)) transient.insert(p);
      }

    std::vector<WeightedEdge> edges;
    for (const auto& [u, v] : persistent) {
      edges.push_back({u, v, 1.0});
      labels.push_back({t, u, v, EdgeLabel::Persistent});
    }
    for (const auto& [u, v] : transient) {
      edges.push_back({u, v, 1.0});
      labels.push_back({t, u, v, EdgeLabel::Noise});
    }
    snapshots.push_back(Snapshot::from_edges(n, edges, false));
  }

  std::vector<WeightedEdge> next_edges;
  for (const auto& [u, v] : backbone) next_edges.push_back({u, v, 1.0});
  return SynthResult{SnapshotSequence(std::move(snapshots)), std::move(labels), std::move(active),
                     Snapshot::from_edges(n, next_edges, false)};
}

}  // namespace staa
