#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "staa/graph.hpp"

namespace staa {
namespace {

Snapshot single_edge() {
  const WeightedEdge e{0, 1, 1.0};
  return Snapshot::from_edges(2, std::span(&e, 1), false);
}

TEST(Snapshot, FromEdgesSumsDuplicatesAndSortsColumns) {
  const std::vector<WeightedEdge> edges{{2, 0, 1.0}, {0, 1, 1.0}, {0, 2, 0.5}, {1, 0, 2.0}};
  const Snapshot s = Snapshot::from_edges(3, edges, true);
  EXPECT_EQ(s.nnz(), 4u);
  EXPECT_DOUBLE_EQ(s.weight(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.weight(0, 2), 0.5);
  EXPECT_DOUBLE_EQ(s.weight(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.weight(2, 1), 0.0);

  const std::vector<WeightedEdge> dup{{0, 1, 1.0}, {0, 1, 2.5}};
  const Snapshot u = Snapshot::from_edges(2, dup, false);
  EXPECT_DOUBLE_EQ(u.weight(0, 1), 3.5);
  EXPECT_DOUBLE_EQ(u.weight(1, 0), 3.5);
}

TEST(Snapshot, RejectsInvalidInput) {
  const std::vector<WeightedEdge> out_of_range{{0, 3, 1.0}};
  EXPECT_THROW(Snapshot::from_edges(3, out_of_range, false), InvalidGraphError);
  const std::vector<WeightedEdge> negative{{0, 1, -1.0}};
  EXPECT_THROW(Snapshot::from_edges(3, negative, false), InvalidGraphError);
  EXPECT_THROW(Snapshot(0), InvalidGraphError);
  // asymmetric CSR flagged undirected
  EXPECT_THROW(Snapshot(2, false, {0, 1, 1}, {1}, {1.0}), InvalidGraphError);
  // unsorted columns
  EXPECT_THROW(Snapshot(2, true, {0, 2, 2}, {1, 0}, {1.0, 1.0}), InvalidGraphError);
}

TEST(SnapshotSequence, Invariants) {
  EXPECT_THROW(SnapshotSequence(std::vector<Snapshot>{}), InvalidGraphError);
  EXPECT_THROW(SnapshotSequence({Snapshot(2), Snapshot(3)}), InvalidGraphError);
  EXPECT_THROW(SnapshotSequence({Snapshot(2), Snapshot(2)}, {1, 1}), InvalidGraphError);
  const SnapshotSequence seq({Snapshot(2), Snapshot(2)});
  EXPECT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq.timestamp(1), 1);
}

TEST(WithSelfLoops, Examples) {
  const Snapshot s = with_self_loops(single_edge());
  EXPECT_DOUBLE_EQ(s.weight(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.weight(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(s.weight(0, 1), 1.0);

  const std::vector<WeightedEdge> looped{{0, 0, 1.0}, {0, 1, 1.0}};
  const Snapshot l = Snapshot::from_edges(2, looped, false);
  EXPECT_DOUBLE_EQ(with_self_loops(l).weight(0, 0), 1.0);

  const std::vector<WeightedEdge> heavy{{0, 0, 3.0}};
  EXPECT_DOUBLE_EQ(with_self_loops(Snapshot::from_edges(2, heavy, false)).weight(0, 0), 3.0);

  const Snapshot empty = with_self_loops(Snapshot(3));
  EXPECT_TRUE(empty.to_dense().isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST(DegreeVector, Examples) {
  EXPECT_EQ(degree_vector(oracle::path(3)).values, Eigen::Vector3d(1, 2, 1));
  EXPECT_EQ(degree_vector(Snapshot(2)).values, Eigen::Vector2d(0, 0));
  const std::vector<WeightedEdge> star{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}};
  EXPECT_EQ(degree_vector(Snapshot::from_edges(4, star, false)).values, Eigen::Vector4d(3, 1, 1, 1));
}

TEST(RowNormalize, Examples) {
  const Eigen::MatrixXd two = row_normalize(with_self_loops(single_edge())).to_dense();
  EXPECT_TRUE(two.isApprox(Eigen::MatrixXd::Constant(2, 2, 0.5)));

  EXPECT_TRUE(row_normalize(with_self_loops(Snapshot(4))).to_dense().isApprox(Eigen::MatrixXd::Identity(4, 4)));

  const std::vector<WeightedEdge> heavy{{0, 1, 2.0}, {0, 0, 2.0}, {1, 1, 1.0}};
  const Snapshot h = row_normalize(Snapshot::from_edges(2, heavy, true));
  EXPECT_DOUBLE_EQ(h.weight(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(h.weight(0, 1), 0.5);
}

TEST(RowNormalize, ZeroRowRaises) {
  const std::vector<WeightedEdge> edges{{0, 1, 1.0}};
  EXPECT_THROW(row_normalize(Snapshot::from_edges(3, edges, false)), ZeroRowError);
}

TEST(Laplacian, Examples) {
  Eigen::Matrix3d expected;
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  EXPECT_EQ(laplacian(oracle::path(3)), Eigen::MatrixXd(expected));
  EXPECT_EQ(laplacian(Snapshot(4)), Eigen::MatrixXd::Zero(4, 4));
  Eigen::Matrix3d k3;
  k3 << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_EQ(laplacian(oracle::complete(3)), Eigen::MatrixXd(k3));
}

TEST(Laplacian, DropsSelfLoopsAndSymmetrizesDirectedInput) {
  const std::vector<WeightedEdge> edges{{0, 1, 2.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 2, 5.0}};
  const Eigen::MatrixXd lap = laplacian(Snapshot::from_edges(3, edges, true));
  Eigen::Matrix3d expected;
  expected << 2, -2, 0, -2, 3, -1, 0, -1, 1;
  EXPECT_EQ(lap, Eigen::MatrixXd(expected));
}

TEST(GraphProperties, RandomSnapshots) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const bool directed = trial % 2 == 1;
    const Snapshot s = oracle::random_graph(2 + trial % 17, 0.3, rng, directed, true);

    const Snapshot looped = with_self_loops(s);
    EXPECT_EQ(with_self_loops(looped), looped);

    const Eigen::MatrixXd p = row_normalize(looped).to_dense();
    EXPECT_LE((p.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LE(p.maxCoeff(), 1.0);

    const Eigen::MatrixXd lap = laplacian(s);
    EXPECT_LE(lap.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(lap).eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(GraphProperties, RegularDegreeIsConstant) {
  for (NodeId n = 3; n <= 12; ++n) {
    EXPECT_TRUE((degree_vector(oracle::cycle(n)).values.array() == 2.0).all());
    EXPECT_TRUE((degree_vector(oracle::complete(n)).values.array() == static_cast<double>(n - 1)).all());
  }
}

TEST(Binarized, SetsWeightsToOne) {
  const std::vector<WeightedEdge> edges{{0, 1, 2.5}, {1, 2, 0.25}};
  const Snapshot b = binarized(Snapshot::from_edges(3, edges, false));
  EXPECT_DOUBLE_EQ(b.weight(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(b.weight(2, 1), 1.0);
}

}  // namespace
}  // namespace staa
