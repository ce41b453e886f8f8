#pragma once

// Reference augmenters: identity, running union, random edge dropping and
// per-snapshot personalized PageRank, plus STAA itself behind one interface.

#include <random>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "staa/diffusion.hpp"
#include "staa/graph.hpp"

namespace staa {

struct NoneAugmenter {};

struct MergeAugmenter {
  bool sum = false;  // elementwise sum instead of max
};

struct DropEdgeAugmenter {
  double rate = 0.0;  // [0, 1)
  std::uint64_t seed = 0;
};

struct PprAugmenter {
  double alpha = 0.2;  // (0, 1)
  double rho = 1e-4;
};

struct StaaAugmenter {
  StaaConfig cfg;
};

using AugmenterKind = std::variant<NoneAugmenter, MergeAugmenter, DropEdgeAugmenter, PprAugmenter, StaaAugmenter>;

inline std::string augmenter_name(const AugmenterKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NoneAugmenter>) return "none";
        if constexpr (std::is_same_v<K, MergeAugmenter>) return "merge";
        if constexpr (std::is_same_v<K, DropEdgeAugmenter>) return "dropedge";
        if constexpr (std::is_same_v<K, PprAugmenter>) return "ppr";
        if constexpr (std::is_same_v<K, StaaAugmenter>) return "staa";
      },
      kind);
}

inline AugmentedMatrix as_augmented(const Snapshot& s, Timestamp t) {
  AugmentedMatrix out{t, SparseColMatrix(s.to_eigen()), false};
  out.entries.makeCompressed();
  return out;
}

/// Each stored edge survives independently with probability 1 - rate; the
/// two directions of an undirected edge share one draw.
inline Snapshot drop_edges(const Snapshot& s, double rate, std::mt19937_64& rng) {
  std::bernoulli_distribution drop(rate);
  std::vector<WeightedEdge> kept;
  for (const auto& e : s.entries()) {
    if (!s.directed() && e.v < e.u) continue;
    if (drop(rng)) continue;
    kept.push_back(e);
  }
  return Snapshot::from_edges(s.n(), kept, s.directed());
}

inline std::vector<AugmentedMatrix> augment(const SnapshotSequence& seq, const AugmenterKind& kind) {
  std::vector<AugmentedMatrix> out;
  out.reserve(seq.size());
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NoneAugmenter>) {
          for (std::size_t t = 0; t < seq.size(); ++t) out.push_back(as_augmented(seq[t], seq.timestamp(t)));
        } else if constexpr (std::is_same_v<K, MergeAugmenter>) {
          SparseColMatrix running(seq.n(), seq.n());
          for (std::size_t t = 0; t < seq.size(); ++t) {
            const SparseColMatrix current(seq[t].to_eigen());
            if (k.sum)
              running = running + current;
            else
              running = running.binaryExpr(current, [](double a, double b) { return std::max(a, b); });
            running.makeCompressed();
            out.push_back({seq.timestamp(t), running, false});
          }
        } else if constexpr (std::is_same_v<K, DropEdgeAugmenter>) {
          if (!(k.rate >= 0.0 && k.rate < 1.0)) throw ConfigError("drop rate must lie in [0, 1)");
          std::mt19937_64 rng(k.seed);
          for (std::size_t t = 0; t < seq.size(); ++t)
            out.push_back(as_augmented(drop_edges(seq[t], k.rate, rng), seq.timestamp(t)));
        } else if constexpr (std::is_same_v<K, PprAugmenter>) {
          if (!(k.alpha > 0.0 && k.alpha < 1.0)) throw ConfigError("ppr alpha must lie in (0, 1)");
          const Eigen::VectorXd zero = Eigen::VectorXd::Zero(seq.n());
          const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(seq.n(), seq.n());
          for (std::size_t t = 0; t < seq.size(); ++t) {
            const WalkOperator op = assemble_walk(seq[t], zero, k.alpha);
            out.push_back(sparsify(solve_direct(op, identity), k.rho, seq.timestamp(t)));
          }
        } else if constexpr (std::is_same_v<K, StaaAugmenter>) {
          out = diffuse_sequence(seq, k.cfg).matrices;
        }
      },
      kind);
  return out;
}

}  // namespace staa
