#pragma once

// Activity-aware random walk with restart over stacked snapshots. At step t
// a walker at node u moves to a neighbour in snapshot t with probability
// 1 - alpha - beta_u, restarts at its seed with probability alpha, or jumps
// to node u of the previous diffusion state with probability beta_u. The
// stationary visit probabilities per seed (one column per seed) satisfy
//
//   L_t X_t = alpha I + diag(beta_t) X_{t-1},
//   L_t = I - A_t^T diag(1 - alpha - beta_t),   X_0 = I,
//
// where A_t is the row-normalized self-looped adjacency. X_t is thresholded
// at rho before emission.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <vector>

#include "staa/activity.hpp"
#include "staa/error.hpp"
#include "staa/graph.hpp"

namespace staa {

using SparseColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Augmented n x n matrix emitted for one timestep. For diffusion output,
/// entry (v, s) is the visit probability of v for seed s.
struct AugmentedMatrix {
  Timestamp t = 0;
  SparseColMatrix entries;
  bool rho_applied = false;

  Eigen::Index n() const { return entries.rows(); }
  double at(NodeId row, NodeId col) const { return entries.coeff(row, col); }
};

using DiffusionMatrix = AugmentedMatrix;

/// Transition data of one walk step.
struct WalkOperator {
  SparseColMatrix transition_t;  // (D^-1 A)^T, column-stochastic
  double alpha = 0.0;
  Eigen::VectorXd beta;

  Eigen::Index n() const { return transition_t.rows(); }

  /// A^T diag(1 - alpha - beta): the nonnegative part of the fixed point map.
  SparseColMatrix move_operator() const {
    SparseColMatrix m = transition_t;
    for (Eigen::Index col = 0; col < m.outerSize(); ++col)
      for (SparseColMatrix::InnerIterator it(m, col); it; ++it) it.valueRef() *= 1.0 - alpha - beta[col];
    return m;
  }

  /// L = I - A^T diag(1 - alpha - beta).
  SparseColMatrix system_matrix() const {
    SparseColMatrix identity(n(), n());
    identity.setIdentity();
    return identity - move_operator();
  }
};

inline WalkOperator assemble_walk(const Snapshot& snapshot, const Eigen::VectorXd& beta, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidBetaError("alpha must lie in (0, 1]");
  if (beta.size() != snapshot.n()) throw InvalidBetaError("beta length differs from node count");
  for (Eigen::Index u = 0; u < beta.size(); ++u) {
    if (!(beta[u] >= 0.0) || beta[u] > 1.0 - alpha + 1e-12)
      throw InvalidBetaError("beta[" + std::to_string(u) + "] = " + std::to_string(beta[u]) +
                             " outside [0, 1 - alpha]");
  }
  const Snapshot normalized = row_normalize(with_self_loops(snapshot));
  WalkOperator op;
  op.transition_t = SparseColMatrix(normalized.to_eigen().transpose());
  op.alpha = alpha;
  op.beta = beta.cwiseMin(1.0 - alpha);
  return op;
}

inline Eigen::MatrixXd walk_rhs(const WalkOperator& op, const Eigen::MatrixXd& prev) {
  if (prev.rows() != op.n() || prev.cols() != op.n()) throw SingularSystemError("previous state has wrong shape");
  Eigen::MatrixXd rhs = op.beta.asDiagonal() * prev;
  rhs.diagonal().array() += op.alpha;
  return rhs;
}

/// X_t = L_t^{-1} (alpha I + diag(beta) X_{t-1}) with one LU factorization
/// shared by all seeds.
inline Eigen::MatrixXd solve_direct(const WalkOperator& op, const Eigen::MatrixXd& prev) {
  const Eigen::MatrixXd rhs = walk_rhs(op, prev);
  const SparseColMatrix system = op.system_matrix();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(system)};
  Eigen::MatrixXd x = lu.solve(rhs);
  const double residual = (system * x - rhs).cwiseAbs().maxCoeff();
  if (!x.allFinite() || !(residual <= 1e-8))
    throw SingularSystemError("walk system residual " + std::to_string(residual) + " exceeds 1e-8");
  return x;
}

/// Fixed point iteration X <- M X + alpha I + diag(beta) X_{t-1}, started at
/// X = I, stopped once the max-norm change is at most tol. Contracts with
/// ratio at most 1 - alpha.
inline Eigen::MatrixXd solve_fixed_point(const WalkOperator& op, const Eigen::MatrixXd& prev, double tol,
                                         int max_iters) {
  const Eigen::MatrixXd rhs = walk_rhs(op, prev);
  const SparseColMatrix move = op.move_operator();
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(op.n(), op.n());
  Eigen::MatrixXd next(op.n(), op.n());
  for (int iter = 0; iter < max_iters; ++iter) {
    next.noalias() = move * x;
    next += rhs;
    const double change = (next - x).cwiseAbs().maxCoeff();
    x.swap(next);
    if (change <= tol) return x;
  }
  throw MaxItersError("fixed point did not reach tolerance in " + std::to_string(max_iters) + " iterations");
}

/// Drops entries below rho; kept entries are not renormalized.
inline AugmentedMatrix sparsify(const Eigen::MatrixXd& x, double rho, Timestamp t = 0) {
  std::vector<Eigen::Triplet<double>> kept;
  for (Eigen::Index col = 0; col < x.cols(); ++col)
    for (Eigen::Index row = 0; row < x.rows(); ++row)
      if (x(row, col) >= rho && x(row, col) != 0.0) kept.emplace_back(row, col, x(row, col));
  AugmentedMatrix out{t, SparseColMatrix(x.rows(), x.cols()), true};
  out.entries.setFromTriplets(kept.begin(), kept.end());
  return out;
}

inline AugmentedMatrix sparsify(const AugmentedMatrix& x, double rho) {
  AugmentedMatrix out = x;
  out.entries.prune([rho](Eigen::Index, Eigen::Index, double v) { return v >= rho && v != 0.0; });
  out.entries.makeCompressed();
  out.rho_applied = true;
  return out;
}

/// Elementwise max(X, X^T).
inline AugmentedMatrix symmetrize_max(const AugmentedMatrix& x) {
  const SparseColMatrix xt = x.entries.transpose();
  AugmentedMatrix out = x;
  out.entries = x.entries.binaryExpr(xt, [](double a, double b) { return std::max(a, b); });
  out.entries.makeCompressed();
  return out;
}

/// Wraps (as a nested exception) a module error raised while processing one
/// timestep of a sequence.
class TimestepError : public Error {
 public:
  TimestepError(Timestamp t, const std::string& what)
      : Error("timestep " + std::to_string(t) + ": " + what), timestep_(t) {}
  Timestamp timestep() const { return timestep_; }

 private:
  Timestamp timestep_;
};

struct DiffuseOptions {
  bool keep_dense = false;  // also return the un-sparsified X_t
};

struct DiffusionRun {
  std::vector<AugmentedMatrix> matrices;
  std::vector<Eigen::MatrixXd> dense;  // filled only with keep_dense
  ActivityTable activity;              // empty unless beta_mode is Activity
};

/// Beta used by the walk at step t under the configured mode.
inline Eigen::VectorXd resolve_beta(const StaaConfig& cfg, const ActivityTable& activity, std::size_t t, NodeId n) {
  switch (cfg.beta_mode) {
    case BetaMode::Zero:
      return Eigen::VectorXd::Zero(n);
    case BetaMode::Uniform:
      return Eigen::VectorXd::Constant(n, cfg.uniform_beta);
    case BetaMode::Activity:
      break;
  }
  return activity.steps.at(t).beta;
}

inline DiffusionRun diffuse_sequence(const SnapshotSequence& seq, const StaaConfig& cfg, DiffuseOptions options = {}) {
  cfg.validate();
  DiffusionRun run;
  if (cfg.beta_mode == BetaMode::Activity) run.activity = compute_activity(seq, cfg);
  const NodeId n = seq.n();
  Eigen::MatrixXd prev = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    try {
      const Snapshot s = cfg.binarize ? binarized(seq[t]) : seq[t];
      const WalkOperator op = assemble_walk(s, resolve_beta(cfg, run.activity, t, n), cfg.alpha);
      Eigen::MatrixXd x = cfg.solver == SolverKind::Direct ? solve_direct(op, prev)
                                                            : solve_fixed_point(op, prev, cfg.solver_tol, cfg.max_iters);
      AugmentedMatrix emitted = sparsify(x, cfg.rho, seq.timestamp(t));
      if (options.keep_dense) run.dense.push_back(x);
      if (cfg.carry_sparsified) x = Eigen::MatrixXd(emitted.entries);
      if (cfg.symmetrize_output) emitted = symmetrize_max(emitted);
      run.matrices.push_back(std::move(emitted));
      prev = std::move(x);
    } catch (const Error& e) {
      std::throw_with_nested(TimestepError(seq.timestamp(t), e.what()));
    }
  }
  return run;
}

}  // namespace staa
