#pragma once

// Decoder-free link prediction: augmented entries are used directly as edge
// scores, negatives are sampled uniformly among non-edges, and ranking
// quality is the exact Mann-Whitney AUC. The noise-suppression report
// compares augmented weight on labeled noise vs persistent edge slots.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "staa/diffusion.hpp"
#include "staa/error.hpp"
#include "staa/graph.hpp"
#include "staa/synth.hpp"

namespace staa {

struct NodePair {
  NodeId u = 0;
  NodeId v = 0;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

enum class PairLabel { Positive, Negative };

struct ScoredPair {
  NodePair pair;
  double score = 0.0;
  PairLabel label = PairLabel::Positive;
};

using ScoredPairs = std::vector<ScoredPair>;

/// score(u, v) = X[u, v] + X[v, u].
inline std::vector<double> score_edges(const AugmentedMatrix& x, std::span<const NodePair> pairs) {
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.u < 0 || p.v < 0 || p.u >= x.n() || p.v >= x.n())
      throw IndexError("pair (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ") outside the node range");
    scores.push_back(x.at(p.u, p.v) + x.at(p.v, p.u));
  }
  return scores;
}

/// Unordered pairs u < v with an edge in either direction.
inline std::vector<NodePair> undirected_edges(const Snapshot& s) {
  std::set<NodePair> pairs;
  for (const auto& e : s.entries())
    if (e.u != e.v && e.w != 0.0) pairs.insert(e.u < e.v ? NodePair{e.u, e.v} : NodePair{e.v, e.u});
  return {pairs.begin(), pairs.end()};
}

/// `count` distinct unordered non-edge pairs (u < v, no edge in either
/// direction), uniform without replacement.
inline std::vector<NodePair> sample_negatives(const Snapshot& next, std::size_t count, std::uint64_t seed) {
  const auto n = static_cast<std::uint64_t>(next.n());
  const std::uint64_t total = n * (n - 1) / 2;
  const std::uint64_t edges = undirected_edges(next).size();
  const std::uint64_t available = total - edges;
  if (count > available)
    throw ExhaustedError("requested " + std::to_string(count) + " negatives but only " + std::to_string(available) +
                         " non-edges exist");
  std::mt19937_64 rng(seed);
  auto is_edge = [&](NodeId u, NodeId v) { return next.has_edge(u, v) || next.has_edge(v, u); };

  if (count * 2 <= available) {
    std::uniform_int_distribution<NodeId> node(0, next.n() - 1);
    std::set<NodePair> seen;
    std::vector<NodePair> out;
    out.reserve(count);
    while (out.size() < count) {
      NodeId u = node(rng), v = node(rng);
      if (u == v) continue;
      if (v < u) std::swap(u, v);
      if (is_edge(u, v) || !seen.insert({u, v}).second) continue;
      out.push_back({u, v});
    }
    return out;
  }
  std::vector<NodePair> pool;
  pool.reserve(available);
  for (NodeId u = 0; u < next.n(); ++u)
    for (NodeId v = u + 1; v < next.n(); ++v)
      if (!is_edge(u, v)) pool.push_back({u, v});
  std::vector<NodePair> out;
  out.reserve(count);
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), static_cast<std::ptrdiff_t>(count), rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

/// P(score_pos > score_neg) + P(tie) / 2 via average ranks.
inline double auc(const ScoredPairs& scored) {
  std::vector<std::pair<double, bool>> ranked;
  ranked.reserve(scored.size());
  double positives = 0.0, negatives = 0.0;
  for (const auto& s : scored) {
    const bool pos = s.label == PairLabel::Positive;
    ranked.emplace_back(s.score, pos);
    (pos ? positives : negatives) += 1.0;
  }
  if (positives == 0.0 || negatives == 0.0) throw DegenerateError("AUC needs both positive and negative pairs");
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < ranked.size();) {
    std::size_t j = i;
    while (j < ranked.size() && ranked[j].first == ranked[i].first) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (ranked[k].second) positive_rank_sum += mean_rank;
    i = j;
  }
  const double u_stat = positive_rank_sum - positives * (positives + 1.0) / 2.0;
  return u_stat / (positives * negatives);
}

/// AUC of X at predicting the edges of `truth` against an equal number of
/// sampled non-edges.
inline double link_prediction_auc(const AugmentedMatrix& x, const Snapshot& truth, std::uint64_t seed) {
  const auto positives = undirected_edges(truth);
  const auto negatives = sample_negatives(truth, positives.size(), seed);
  const auto pos_scores = score_edges(x, positives);
  const auto neg_scores = score_edges(x, negatives);
  ScoredPairs scored;
  scored.reserve(positives.size() * 2);
  for (std::size_t i = 0; i < positives.size(); ++i) scored.push_back({positives[i], pos_scores[i], PairLabel::Positive});
  for (std::size_t i = 0; i < negatives.size(); ++i) scored.push_back({negatives[i], neg_scores[i], PairLabel::Negative});
  return auc(scored);
}

struct SuppressionRow {
  Timestamp t = 0;
  double noise_mean = std::numeric_limits<double>::quiet_NaN();
  double persistent_mean = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();  // noise_mean / persistent_mean
};

/// Mean augmented weight (X[u,v] + X[v,u]) / 2 over the labeled edge slots of
/// each snapshot. labels[].t indexes into `xs`.
inline std::vector<SuppressionRow> noise_suppression(std::span<const AugmentedMatrix> xs,
                                                     std::span<const LabeledEdge> labels) {
  std::vector<SuppressionRow> rows(xs.size());
  std::vector<double> noise_sum(xs.size(), 0.0), persistent_sum(xs.size(), 0.0);
  std::vector<std::size_t> noise_count(xs.size(), 0), persistent_count(xs.size(), 0);
  for (const auto& e : labels) {
    if (e.t >= xs.size()) throw IndexError("label timestep outside the augmented sequence");
    const auto& x = xs[e.t];
    if (e.u < 0 || e.v < 0 || e.u >= x.n() || e.v >= x.n()) throw IndexError("labeled edge outside the node range");
    const double w = 0.5 * (x.at(e.u, e.v) + x.at(e.v, e.u));
    if (e.label == EdgeLabel::Noise) {
      noise_sum[e.t] += w;
      ++noise_count[e.t];
    } else {
      persistent_sum[e.t] += w;
      ++persistent_count[e.t];
    }
  }
  for (std::size_t t = 0; t < xs.size(); ++t) {
    rows[t].t = xs[t].t;
    if (noise_count[t] > 0) rows[t].noise_mean = noise_sum[t] / static_cast<double>(noise_count[t]);
    if (persistent_count[t] > 0) rows[t].persistent_mean = persistent_sum[t] / static_cast<double>(persistent_count[t]);
    if (rows[t].persistent_mean > 0.0) rows[t].ratio = rows[t].noise_mean / rows[t].persistent_mean;
  }
  return rows;
}

/// Pooled ratio over all timesteps: mean noise weight / mean persistent weight.
inline double pooled_suppression_ratio(std::span<const AugmentedMatrix> xs, std::span<const LabeledEdge> labels) {
  double noise = 0.0, persistent = 0.0;
  std::size_t noise_count = 0, persistent_count = 0;
  for (const auto& e : labels) {
    const double w = 0.5 * (xs[e.t].at(e.u, e.v) + xs[e.t].at(e.v, e.u));
    if (e.label == EdgeLabel::Noise) {
      noise += w;
      ++noise_count;
    } else {
      persistent += w;
      ++persistent_count;
    }
  }
  if (noise_count == 0 || persistent_count == 0 || persistent == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (noise / static_cast<double>(noise_count)) / (persistent / static_cast<double>(persistent_count));
}

}  // namespace staa
