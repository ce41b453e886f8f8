#pragma once

// Snapshot data model: compressed-row adjacency matrices over a shared node
// set, plus the matrix derivations (self-loops, degrees, row normalization,
// Laplacian) consumed by the spectral and diffusion stages.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "staa/error.hpp"

namespace staa {

using NodeId = Eigen::Index;
using Timestamp = std::int64_t;

struct WeightedEdge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
};

/// One graph snapshot: an n x n nonnegative sparse adjacency matrix in CSR
/// form. Column indices are sorted and unique within each row; undirected
/// snapshots are exactly symmetric.
class Snapshot {
 public:
  Snapshot() : Snapshot(1, false) {}

  /// Edgeless snapshot on n nodes.
  explicit Snapshot(NodeId n, bool directed = false)
      : n_(n), directed_(directed), row_ptr_(static_cast<std::size_t>(std::max<NodeId>(n, 0)) + 1, 0) {
    if (n < 1) throw InvalidGraphError("snapshot needs at least one node");
  }

  /// Builds from raw CSR arrays and checks every invariant.
  Snapshot(NodeId n, bool directed, std::vector<NodeId> row_ptr, std::vector<NodeId> col_idx,
           std::vector<double> values)
      : n_(n),
        directed_(directed),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds from an edge list. Duplicate (u, v) entries are summed. For an
  /// undirected snapshot each edge {u, v} is listed once and stored in both
  /// directions.
  static Snapshot from_edges(NodeId n, std::span<const WeightedEdge> edges, bool directed) {
    if (n < 1) throw InvalidGraphError("snapshot needs at least one node");
    std::vector<WeightedEdge> entries;
    entries.reserve(edges.size() * (directed ? 1 : 2));
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
        throw InvalidGraphError("edge endpoint out of range: (" + std::to_string(e.u) + ", " +
                                std::to_string(e.v) + ")");
      if (!(e.w >= 0.0) || !std::isfinite(e.w))
        throw InvalidGraphError("edge weights must be finite and nonnegative");
      entries.push_back(e);
      if (!directed && e.u != e.v) entries.push_back({e.v, e.u, e.w});
    }
    return from_entries(n, std::move(entries), directed);
  }

  NodeId n() const { return n_; }
  bool directed() const { return directed_; }
  std::size_t nnz() const { return col_idx_.size(); }

  std::span<const NodeId> row_ptr() const { return row_ptr_; }
  std::span<const NodeId> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const NodeId> neighbors(NodeId row) const {
    return {col_idx_.data() + row_ptr_[row], col_idx_.data() + row_ptr_[row + 1]};
  }
  std::span<const double> weights(NodeId row) const {
    return {values_.data() + row_ptr_[row], values_.data() + row_ptr_[row + 1]};
  }

  /// Stored weight of (u, v), 0 when absent.
  double weight(NodeId u, NodeId v) const {
    const auto cols = neighbors(u);
    const auto it = std::lower_bound(cols.begin(), cols.end(), v);
    if (it == cols.end() || *it != v) return 0.0;
    return values_[row_ptr_[u] + (it - cols.begin())];
  }

  bool has_edge(NodeId u, NodeId v) const {
    const auto cols = neighbors(u);
    return std::binary_search(cols.begin(), cols.end(), v);
  }

  /// All stored entries (row, col, weight) in row-major order.
  std::vector<WeightedEdge> entries() const {
    std::vector<WeightedEdge> out;
    out.reserve(nnz());
    for (NodeId r = 0; r < n_; ++r)
      for (NodeId k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_idx_[k], values_[k]});
    return out;
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> to_eigen() const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(nnz());
    for (NodeId r = 0; r < n_; ++r)
      for (NodeId k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) triplets.emplace_back(r, col_idx_[k], values_[k]);
    Eigen::SparseMatrix<double, Eigen::RowMajor> m(n_, n_);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (NodeId r = 0; r < n_; ++r)
      for (NodeId k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m(r, col_idx_[k]) = values_[k];
    return m;
  }

  friend bool operator==(const Snapshot&, const Snapshot&) = default;

  // Entries may be unsorted and contain duplicates; duplicates are folded
  // with `combine` (sum by default).
  template <typename Combine = std::plus<double>>
  static Snapshot from_entries(NodeId n, std::vector<WeightedEdge> entries, bool directed,
                               Combine combine = {}) {
    std::sort(entries.begin(), entries.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    std::vector<NodeId> row_ptr(static_cast<std::size_t>(n) + 1, 0);
    std::vector<NodeId> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    NodeId last_u = -1, last_v = -1;
    for (const auto& e : entries) {
      if (e.u == last_u && e.v == last_v) {
        vals.back() = combine(vals.back(), e.w);
        continue;
      }
      cols.push_back(e.v);
      vals.push_back(e.w);
      ++row_ptr[e.u + 1];
      last_u = e.u;
      last_v = e.v;
    }
    for (NodeId r = 0; r < n; ++r) row_ptr[r + 1] += row_ptr[r];
    return Snapshot(n, directed, std::move(row_ptr), std::move(cols), std::move(vals));
  }

 private:
  void validate() const {
    if (n_ < 1) throw InvalidGraphError("snapshot needs at least one node");
    if (row_ptr_.size() != static_cast<std::size_t>(n_) + 1 || row_ptr_.front() != 0 ||
        row_ptr_.back() != static_cast<NodeId>(col_idx_.size()) || col_idx_.size() != values_.size())
      throw InvalidGraphError("inconsistent CSR arrays");
    for (NodeId r = 0; r < n_; ++r) {
      if (row_ptr_[r] > row_ptr_[r + 1]) throw InvalidGraphError("row pointers must be nondecreasing");
      for (NodeId k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        if (col_idx_[k] < 0 || col_idx_[k] >= n_) throw InvalidGraphError("column index out of range");
        if (k > row_ptr_[r] && col_idx_[k] <= col_idx_[k - 1])
          throw InvalidGraphError("column indices must be sorted and unique within a row");
        if (!(values_[k] >= 0.0) || !std::isfinite(values_[k]))
          throw InvalidGraphError("edge weights must be finite and nonnegative");
      }
    }
    if (!directed_) {
      for (NodeId r = 0; r < n_; ++r)
        for (NodeId k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
          if (weight(col_idx_[k], r) != values_[k])
            throw InvalidGraphError("undirected snapshot is not symmetric");
    }
  }

  NodeId n_;
  bool directed_;
  std::vector<NodeId> row_ptr_;
  std::vector<NodeId> col_idx_;
  std::vector<double> values_;
};

/// Ordered snapshots over a shared node set with strictly increasing
/// integer timestamps.
class SnapshotSequence {
 public:
  SnapshotSequence(std::vector<Snapshot> snapshots, std::vector<Timestamp> timestamps)
      : snapshots_(std::move(snapshots)), timestamps_(std::move(timestamps)) {
    validate();
  }

  /// Timestamps 0..T-1.
  explicit SnapshotSequence(std::vector<Snapshot> snapshots)
      : snapshots_(std::move(snapshots)), timestamps_(default_timestamps(snapshots_.size())) {
    validate();
  }

  std::size_t size() const { return snapshots_.size(); }
  NodeId n() const { return snapshots_.front().n(); }
  const Snapshot& operator[](std::size_t t) const { return snapshots_[t]; }
  Timestamp timestamp(std::size_t t) const { return timestamps_[t]; }
  std::span<const Snapshot> snapshots() const { return snapshots_; }
  std::span<const Timestamp> timestamps() const { return timestamps_; }

  auto begin() const { return snapshots_.begin(); }
  auto end() const { return snapshots_.end(); }

  friend bool operator==(const SnapshotSequence&, const SnapshotSequence&) = default;

 private:
  void validate() const {
    if (snapshots_.empty()) throw InvalidGraphError("a sequence needs at least one snapshot");
    if (snapshots_.size() != timestamps_.size())
      throw InvalidGraphError("one timestamp per snapshot required");
    for (std::size_t t = 0; t < snapshots_.size(); ++t) {
      if (snapshots_[t].n() != snapshots_.front().n())
        throw InvalidGraphError("all snapshots must share the node count");
      if (t > 0 && timestamps_[t] <= timestamps_[t - 1])
        throw InvalidGraphError("timestamps must be strictly increasing");
    }
  }

  static std::vector<Timestamp> default_timestamps(std::size_t count) {
    std::vector<Timestamp> ts(count);
    for (std::size_t i = 0; i < count; ++i) ts[i] = static_cast<Timestamp>(i);
    return ts;
  }

  std::vector<Snapshot> snapshots_;
  std::vector<Timestamp> timestamps_;
};

/// Weighted out-degrees, the graph signal of the wavelet stage.
struct DegreeVector {
  Eigen::VectorXd values;
};

/// Every diagonal entry becomes max(existing, 1).
inline Snapshot with_self_loops(const Snapshot& s) {
  std::vector<WeightedEdge> entries = s.entries();
  for (auto& e : entries)
    if (e.u == e.v) e.w = std::max(e.w, 1.0);
  for (NodeId i = 0; i < s.n(); ++i)
    if (!s.has_edge(i, i)) entries.push_back({i, i, 1.0});
  return Snapshot::from_entries(s.n(), std::move(entries), s.directed());
}

inline Snapshot without_self_loops(const Snapshot& s) {
  std::vector<WeightedEdge> entries = s.entries();
  std::erase_if(entries, [](const WeightedEdge& e) { return e.u == e.v; });
  return Snapshot::from_entries(s.n(), std::move(entries), s.directed());
}

/// max(A, A^T); undirected input is returned unchanged.
inline Snapshot symmetrized(const Snapshot& s) {
  if (!s.directed()) return s;
  std::vector<WeightedEdge> entries = s.entries();
  const std::size_t stored = entries.size();
  for (std::size_t k = 0; k < stored; ++k)
    if (entries[k].u != entries[k].v) entries.push_back({entries[k].v, entries[k].u, entries[k].w});
  return Snapshot::from_entries(s.n(), std::move(entries), false,
                                [](double a, double b) { return std::max(a, b); });
}

/// Every stored weight set to 1.
inline Snapshot binarized(const Snapshot& s) {
  std::vector<WeightedEdge> entries = s.entries();
  std::erase_if(entries, [](const WeightedEdge& e) { return e.w == 0.0; });
  for (auto& e : entries) e.w = 1.0;
  return Snapshot::from_entries(s.n(), std::move(entries), s.directed());
}

inline DegreeVector degree_vector(const Snapshot& s) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(s.n());
  for (NodeId r = 0; r < s.n(); ++r)
    for (double w : s.weights(r)) d[r] += w;
  return {std::move(d)};
}

/// D^-1 A. Throws ZeroRowError when a row has no weight, which means the
/// caller forgot with_self_loops.
inline Snapshot row_normalize(const Snapshot& s) {
  const DegreeVector d = degree_vector(s);
  std::vector<double> vals(s.values().begin(), s.values().end());
  const auto row_ptr = s.row_ptr();
  for (NodeId r = 0; r < s.n(); ++r) {
    if (!(d.values[r] > 0.0)) throw ZeroRowError("row " + std::to_string(r) + " sums to zero");
    for (NodeId k = row_ptr[r]; k < row_ptr[r + 1]; ++k) vals[k] /= d.values[r];
  }
  return Snapshot(s.n(), true, {row_ptr.begin(), row_ptr.end()}, {s.col_idx().begin(), s.col_idx().end()},
                  std::move(vals));
}

/// Loop-free symmetric view used by the spectral stage.
inline Snapshot spectral_view(const Snapshot& s) { return without_self_loops(symmetrized(s)); }

/// Dense combinatorial Laplacian D - A of the loop-free symmetrized snapshot.
inline Eigen::MatrixXd laplacian(const Snapshot& s) {
  const Snapshot g = spectral_view(s);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.n(), g.n());
  for (NodeId r = 0; r < g.n(); ++r) {
    const auto cols = g.neighbors(r);
    const auto ws = g.weights(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      lap(r, cols[k]) -= ws[k];
      lap(r, r) += ws[k];
    }
  }
  return lap;
}

}  // namespace staa
