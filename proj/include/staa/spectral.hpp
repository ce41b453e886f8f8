#pragma once

// Spectral graph wavelets of a snapshot: dense Laplacian eigenbasis, the
// cubic-spline band-pass kernel g, the geometric scale ladder and the
// per-node, per-scale wavelet coefficients of a node signal.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "staa/error.hpp"
#include "staa/graph.hpp"

namespace staa {

/// Eigenvalues at or below this are treated as the null space.
inline constexpr double kZeroEigenvalue = 1e-8;

struct SpectralBasis {
  Eigen::VectorXd eigenvalues;   // ascending, >= 0
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues[i]
};

/// Scales omega_0 < ... < omega_{r-1}. omega_0 targets the highest-frequency
/// band, omega_{r-1} the lowest.
struct ScaleLadder {
  std::vector<double> scales;
  std::size_t r() const { return scales.size(); }
};

/// values(l, j) is the coefficient of node j at scale l.
struct WaveletCoefficients {
  Eigen::MatrixXd values;
  std::size_t scales() const { return static_cast<std::size_t>(values.rows()); }
  NodeId nodes() const { return values.cols(); }
};

struct KernelKnots {
  double lower = 1.0;
  double upper = 2.0;
};

/// Band-pass kernel with quadratic rise below the lower knot, quadratic
/// decay (upper/x)^2 above the upper knot, and the C1 cubic spline between.
/// With knots (1, 2) the spline is x^3 - 6x^2 + 11x - 5.
class WaveletKernel {
 public:
  explicit WaveletKernel(KernelKnots knots = {}) : knots_(knots) {
    if (!(knots.lower > 0.0) || !(knots.upper > knots.lower))
      throw ConfigError("kernel knots must satisfy 0 < lower < upper");
    const double x1 = knots.lower, x2 = knots.upper;
    // s(x1) = 1, s(x2) = 1, s'(x1) = 2/x1, s'(x2) = -2/x2
    Eigen::Matrix4d m;
    m << 1, x1, x1 * x1, x1 * x1 * x1,  //
        1, x2, x2 * x2, x2 * x2 * x2,   //
        0, 1, 2 * x1, 3 * x1 * x1,      //
        0, 1, 2 * x2, 3 * x2 * x2;
    const Eigen::Vector4d rhs(1.0, 1.0, 2.0 / x1, -2.0 / x2);
    spline_ = m.fullPivLu().solve(rhs);
  }

  double operator()(double x) const {
    if (x <= knots_.lower) {
      const double q = x / knots_.lower;
      return q * q;
    }
    if (x >= knots_.upper) {
      const double q = knots_.upper / x;
      return q * q;
    }
    return spline_[0] + x * (spline_[1] + x * (spline_[2] + x * spline_[3]));
  }

  const KernelKnots& knots() const { return knots_; }

 private:
  KernelKnots knots_;
  Eigen::Vector4d spline_;
};

inline double kernel_g(double x, KernelKnots knots = {}) { return WaveletKernel(knots)(x); }

inline SpectralBasis eigendecompose(const Eigen::MatrixXd& lap) {
  if (lap.rows() != lap.cols()) throw InvalidGraphError("Laplacian must be square");
  if (lap.size() > 0 && (lap - lap.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidGraphError("Laplacian must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge");
  SpectralBasis basis{solver.eigenvalues(), solver.eigenvectors()};
  basis.eigenvalues = basis.eigenvalues.cwiseMax(0.0);
  return basis;
}

/// omega_0 = upper/lambda_max, omega_{r-1} = upper/lambda_min+, geometric in
/// between. lambda_min+ is the smallest eigenvalue above kZeroEigenvalue over
/// the whole spectrum.
inline ScaleLadder scale_ladder(const SpectralBasis& basis, std::size_t r, KernelKnots knots = {}) {
  if (r < 2) throw ConfigError("scale count r must be at least 2");
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  for (double lambda : basis.eigenvalues) {
    if (lambda <= kZeroEigenvalue) continue;
    if (lambda_min == 0.0 || lambda < lambda_min) lambda_min = lambda;
    lambda_max = std::max(lambda_max, lambda);
  }
  if (lambda_max == 0.0) throw NoSpectrumError("no strictly positive eigenvalue (edgeless graph)");
  const double first = knots.upper / lambda_max;
  const double last = knots.upper / lambda_min;
  ScaleLadder ladder;
  ladder.scales.resize(r);
  for (std::size_t l = 0; l < r; ++l)
    ladder.scales[l] = first * std::pow(last / first, static_cast<double>(l) / static_cast<double>(r - 1));
  ladder.scales.front() = first;
  ladder.scales.back() = last;
  return ladder;
}

/// W(l, j) = sum_i g(omega_l lambda_i) (u_i . f) u_i(j).
inline WaveletCoefficients wavelet_transform(const SpectralBasis& basis, const ScaleLadder& ladder,
                                             const DegreeVector& f, const WaveletKernel& kernel = WaveletKernel{}) {
  const Eigen::Index n = basis.eigenvectors.rows();
  if (f.values.size() != n || basis.eigenvalues.size() != n)
    throw InvalidGraphError("signal and basis dimensions disagree");
  const Eigen::VectorXd f_hat = basis.eigenvectors.transpose() * f.values;
  WaveletCoefficients out{Eigen::MatrixXd(static_cast<Eigen::Index>(ladder.r()), n)};
  Eigen::VectorXd filtered(n);
  for (std::size_t l = 0; l < ladder.r(); ++l) {
    for (Eigen::Index i = 0; i < n; ++i) filtered[i] = kernel(ladder.scales[l] * basis.eigenvalues[i]) * f_hat[i];
    out.values.row(static_cast<Eigen::Index>(l)) = (basis.eigenvectors * filtered).transpose();
  }
  // Entries at the rounding level of U g U^T f are zero; leaving them in
  // lets the per-snapshot z-scores blow roundoff up to unit scale.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) *
                       std::max(1.0, f.values.cwiseAbs().maxCoeff());
  out.values = (out.values.array().abs() <= floor).select(0.0, out.values);
  return out;
}

/// Coefficients of the degree signal of one snapshot, computed on its
/// loop-free symmetrized view. An edgeless snapshot has all-zero
/// coefficients.
inline WaveletCoefficients snapshot_wavelets(const Snapshot& s, std::size_t r, KernelKnots knots = {}) {
  const Snapshot view = spectral_view(s);
  const DegreeVector f = degree_vector(view);
  if (view.nnz() == 0) return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), s.n())};
  const SpectralBasis basis = eigendecompose(laplacian(view));
  try {
    const ScaleLadder ladder = scale_ladder(basis, r, knots);
    return wavelet_transform(basis, ladder, f, WaveletKernel(knots));
  } catch (const NoSpectrumError&) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), s.n())};
  }
}

}  // namespace staa
