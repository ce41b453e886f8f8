#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "staa/spectral.hpp"

namespace staa {
namespace {

TEST(Kernel, KnotValues) {
  EXPECT_EQ(kernel_g(0.0), 0.0);
  EXPECT_DOUBLE_EQ(kernel_g(1.0), 1.0);
  EXPECT_DOUBLE_EQ(kernel_g(2.0), 1.0);
  EXPECT_DOUBLE_EQ(kernel_g(4.0), 0.25);
  // 1.5^3 - 6 * 1.5^2 + 11 * 1.5 - 5
  EXPECT_NEAR(kernel_g(1.5), 1.375, 1e-12);
}

TEST(Kernel, MatchesPiecewiseFormAndIsContinuous) {
  const WaveletKernel g;
  for (double x = 0.0; x <= 10.0; x += 0.01) EXPECT_NEAR(g(x), oracle::kernel_12(x), 1e-12) << x;
  for (double knot : {1.0, 2.0}) EXPECT_NEAR(g(knot - 1e-9), g(knot + 1e-9), 1e-8);
  EXPECT_LT(g(1e6), 1e-10);
}

TEST(Kernel, GeneralKnotsAreC1) {
  const WaveletKernel g(KernelKnots{0.5, 3.0});
  EXPECT_DOUBLE_EQ(g(0.5), 1.0);
  EXPECT_DOUBLE_EQ(g(3.0), 1.0);
  const double h = 1e-6;
  EXPECT_NEAR((g(0.5 + h) - g(0.5)) / h, 2.0 / 0.5, 1e-4);
  EXPECT_NEAR((g(3.0) - g(3.0 - h)) / h, -2.0 / 3.0, 1e-4);
  EXPECT_THROW(WaveletKernel(KernelKnots{2.0, 1.0}), ConfigError);
}

TEST(Eigendecompose, Examples) {
  // det(L - x I) of the P3 Laplacian is -x (x - 1)(x - 3)
  const SpectralBasis p3 = eigendecompose(laplacian(oracle::path(3)));
  EXPECT_NEAR(p3.eigenvalues[0], 0.0, 1e-12);
  EXPECT_NEAR(p3.eigenvalues[1], 1.0, 1e-12);
  EXPECT_NEAR(p3.eigenvalues[2], 3.0, 1e-12);

  const SpectralBasis zero = eigendecompose(Eigen::MatrixXd::Zero(4, 4));
  EXPECT_EQ(zero.eigenvalues, Eigen::VectorXd::Zero(4));
  EXPECT_TRUE((zero.eigenvectors.transpose() * zero.eigenvectors).isApprox(Eigen::MatrixXd::Identity(4, 4)));

  Eigen::Matrix2d k2;
  k2 << 1, -1, -1, 1;
  const SpectralBasis b = eigendecompose(k2);
  EXPECT_NEAR(b.eigenvalues[0], 0.0, 1e-12);
  EXPECT_NEAR(b.eigenvalues[1], 2.0, 1e-12);
}

TEST(Eigendecompose, RejectsAsymmetricInput) {
  Eigen::Matrix2d m;
  m << 1, 0.5, 0, 1;
  EXPECT_THROW(eigendecompose(m), InvalidGraphError);
}

TEST(Eigendecompose, BasisInvariantsOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd lap = laplacian(oracle::random_graph(5 + trial, 0.25, rng, false, true));
    const SpectralBasis basis = eigendecompose(lap);
    const auto n = lap.rows();
    EXPECT_LE(std::abs(basis.eigenvalues[0]), 1e-10);
    for (Eigen::Index i = 1; i < n; ++i) EXPECT_LE(basis.eigenvalues[i - 1], basis.eigenvalues[i]);
    EXPECT_LE((basis.eigenvectors.transpose() * basis.eigenvectors - Eigen::MatrixXd::Identity(n, n))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-8);
    const Eigen::MatrixXd residual =
        lap * basis.eigenvectors - basis.eigenvectors * basis.eigenvalues.asDiagonal();
    EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-8);
  }
}

SpectralBasis basis_from_values(std::vector<double> values) {
  SpectralBasis b;
  b.eigenvalues = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  b.eigenvectors = Eigen::MatrixXd::Identity(b.eigenvalues.size(), b.eigenvalues.size());
  return b;
}

TEST(ScaleLadder, Examples) {
  const ScaleLadder two = scale_ladder(basis_from_values({0, 1, 3}), 2);
  ASSERT_EQ(two.r(), 2u);
  EXPECT_DOUBLE_EQ(two.scales[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(two.scales[1], 2.0);

  const ScaleLadder flat = scale_ladder(basis_from_values({0, 2}), 3);
  for (double w : flat.scales) EXPECT_DOUBLE_EQ(w, 1.0);

  const ScaleLadder six = scale_ladder(basis_from_values({0, 1, 4}), 6);
  ASSERT_EQ(six.r(), 6u);
  EXPECT_DOUBLE_EQ(six.scales[0], 0.5);
  EXPECT_DOUBLE_EQ(six.scales[5], 2.0);
  for (std::size_t l = 1; l < 6; ++l) EXPECT_NEAR(six.scales[l] / six.scales[l - 1], std::pow(4.0, 0.2), 1e-12);
}

TEST(ScaleLadder, Errors) {
  EXPECT_THROW(scale_ladder(basis_from_values({0, 0, 0}), 6), NoSpectrumError);
  EXPECT_THROW(scale_ladder(basis_from_values({0, 1}), 1), ConfigError);
}

TEST(WaveletTransform, RegularGraphsVanish) {
  for (NodeId n = 3; n <= 30; ++n) {
    for (const Snapshot& s : {oracle::cycle(n), oracle::complete(n)}) {
      const WaveletCoefficients w = snapshot_wavelets(s, 6);
      EXPECT_LE(w.values.cwiseAbs().maxCoeff(), 1e-10) << "n=" << n;
    }
  }
}

TEST(WaveletTransform, PathCenterIsMinusTwiceLeaf) {
  const Snapshot p3 = oracle::path(3);
  const SpectralBasis basis = eigendecompose(laplacian(p3));
  const WaveletCoefficients w = wavelet_transform(basis, scale_ladder(basis, 6), degree_vector(p3));
  for (Eigen::Index l = 0; l < 6; ++l) {
    EXPECT_NEAR(w.values(l, 1), -2.0 * w.values(l, 0), 1e-12 * std::abs(w.values(l, 1)));
    EXPECT_NEAR(w.values(l, 0), w.values(l, 2), 1e-12 * std::abs(w.values(l, 0)));
  }
  // only the lambda = 3 mode carries the signal: f_hat = -2/sqrt(6), u = (1, -2, 1)/sqrt(6)
  const ScaleLadder ladder = scale_ladder(basis, 6);
  for (Eigen::Index l = 0; l < 6; ++l) {
    const double expected_leaf = kernel_g(3.0 * ladder.scales[l]) * (-2.0 / 6.0);
    EXPECT_NEAR(w.values(l, 0), expected_leaf, 1e-12);
  }
}

TEST(WaveletTransform, EmptyGraphIsZero) {
  const WaveletCoefficients w = snapshot_wavelets(Snapshot(5), 6);
  EXPECT_EQ(w.values.rows(), 6);
  EXPECT_EQ(w.values.cols(), 5);
  EXPECT_EQ(w.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(WaveletTransform, MatchesJacobiOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Snapshot s = oracle::random_graph(4 + trial % 27, 0.2, rng, false, trial % 2 == 0);
    const WaveletCoefficients w = snapshot_wavelets(s, 6);
    const Eigen::MatrixXd expected = oracle::wavelet_oracle(s.to_dense(), 6);
    EXPECT_LE((w.values - expected).cwiseAbs().maxCoeff(), 1e-10) << "trial " << trial;
  }
}

TEST(WaveletTransform, Linear) {
  std::mt19937_64 rng(5);
  const Snapshot s = oracle::random_graph(20, 0.2, rng);
  const SpectralBasis basis = eigendecompose(laplacian(s));
  const ScaleLadder ladder = scale_ladder(basis, 6);
  const DegreeVector f = degree_vector(s);
  const DegreeVector scaled{3.5 * f.values};
  const Eigen::MatrixXd a = wavelet_transform(basis, ladder, f).values;
  const Eigen::MatrixXd b = wavelet_transform(basis, ladder, scaled).values;
  EXPECT_LE((b - 3.5 * a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WaveletTransform, EditLeavesOtherComponentsUnchanged) {
  // three path components; the edit touches only the first. With the scale
  // ladder held fixed the transform is a block-diagonal matrix function, so
  // the other components keep their coefficients.
  std::vector<WeightedEdge> before{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {7, 8}, {8, 9},
                                   {10, 11}, {11, 12}, {12, 13}, {13, 14}};
  std::vector<WeightedEdge> after = before;
  after.push_back({0, 2, 1.0});
  const Snapshot s0 = Snapshot::from_edges(15, before, false);
  const Snapshot s1 = Snapshot::from_edges(15, after, false);
  const SpectralBasis b0 = eigendecompose(laplacian(s0));
  const SpectralBasis b1 = eigendecompose(laplacian(s1));
  const ScaleLadder ladder = scale_ladder(b0, 6);
  const Eigen::MatrixXd w0 = wavelet_transform(b0, ladder, degree_vector(s0)).values;
  const Eigen::MatrixXd w1 = wavelet_transform(b1, ladder, degree_vector(s1)).values;
  EXPECT_GT((w1 - w0).leftCols(5).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((w1 - w0).rightCols(10).cwiseAbs().maxCoeff(), 1e-10);
}

}  // namespace
}  // namespace staa
