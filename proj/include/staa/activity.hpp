#pragma once

// Node activity scoring. Wavelet coefficients of the degree signal are folded
// into a low-frequency aggregate a and a high-frequency aggregate b per node;
// the windowed change rate of a (temporal activity) and b (spatial activity)
// are z-scored, gated, z-scored again and squashed into the time-travel
// probability beta of the diffusion walk.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "staa/error.hpp"
#include "staa/format.hpp"
#include "staa/graph.hpp"
#include "staa/parallel.hpp"
#include "staa/spectral.hpp"

namespace staa {

enum class BetaMode {
  Activity,  // beta from the wavelet activity pipeline
  Zero,      // temporal term disabled: per-snapshot personalized PageRank
  Uniform,   // every node gets uniform_beta
};

enum class SolverKind { Direct, FixedPoint };

/// Every STAA hyperparameter. Ranges follow the published search ranges.
struct StaaConfig {
  double alpha = 0.2;      // restart probability, (0, 1)
  double delta = 1.0;      // beta scale, (0, 2]
  double gamma = 0.5;      // gate between change rate and high-frequency term, (0, 1)
  int window = 3;          // change-rate window W, [1, 10]
  double decay = 1.0;      // exponential decay across scales
  int scales = 6;          // r
  double epsilon = 1e-8;   // z-score guard
  double rho = 1e-4;       // sparsification threshold, [1e-4, 1e-2]
  KernelKnots knots{};
  bool binarize = false;
  SolverKind solver = SolverKind::Direct;
  double solver_tol = 1e-12;
  int max_iters = 100000;
  BetaMode beta_mode = BetaMode::Activity;
  double uniform_beta = 0.0;
  bool carry_sparsified = false;   // feed the thresholded X_{t-1} into step t
  bool symmetrize_output = false;  // emit max(X, X^T)

  void validate() const {
    auto require = [](bool ok, const std::string& what) {
      if (!ok) throw ConfigError(what);
    };
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(delta > 0.0 && delta <= 2.0, "delta must lie in (0, 2]");
    require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    require(window >= 1 && window <= 10, "window must lie in [1, 10]");
    require(decay > 0.0 && std::isfinite(decay), "decay must be positive");
    require(scales >= 2, "scales must be at least 2");
    require(epsilon > 0.0, "epsilon must be positive");
    require(rho >= 1e-4 && rho <= 1e-2, "rho must lie in [0.0001, 0.01]");
    require(knots.lower > 0.0 && knots.upper > knots.lower, "kernel knots must satisfy 0 < lower < upper");
    require(solver_tol > 0.0, "solver_tol must be positive");
    require(max_iters > 0, "max_iters must be positive");
    require(beta_mode != BetaMode::Uniform || (uniform_beta >= 0.0 && uniform_beta <= 1.0 - alpha),
            "uniform_beta must lie in [0, 1 - alpha]");
  }
};

/// Activity quantities of one snapshot, one entry per node.
struct ActivitySnapshot {
  Eigen::VectorXd a;             // low-frequency aggregate
  Eigen::VectorXd b;             // high-frequency aggregate
  Eigen::VectorXd delta_a;       // windowed mean |a_t - a_{t-1}|
  Eigen::VectorXd delta_a_norm;  // z-scored delta_a
  Eigen::VectorXd b_norm;        // z-scored b
  Eigen::VectorXd tau;
  Eigen::VectorXd tau_norm;
  Eigen::VectorXd beta;  // clamped to [0, 1 - alpha]
};

struct ActivityTable {
  std::vector<Timestamp> timestamps;
  std::vector<ActivitySnapshot> steps;
};

struct FrequencyBands {
  Eigen::VectorXd low;   // a
  Eigen::VectorXd high;  // b
};

/// a = sum_{l=floor(r/2)}^{r-1} e^{decay (l-r+1)} W_l,
/// b = sum_{l=0}^{floor(r/2)-1} e^{-decay l} W_l.
inline FrequencyBands frequency_split(const WaveletCoefficients& coeffs, double decay) {
  const auto r = static_cast<Eigen::Index>(coeffs.scales());
  if (r < 2) throw ConfigError("frequency split needs at least 2 scales");
  const Eigen::Index half = r / 2;
  FrequencyBands out{Eigen::VectorXd::Zero(coeffs.nodes()), Eigen::VectorXd::Zero(coeffs.nodes())};
  for (Eigen::Index l = half; l < r; ++l)
    out.low += std::exp(decay * static_cast<double>(l - r + 1)) * coeffs.values.row(l).transpose();
  for (Eigen::Index l = 0; l < half; ++l)
    out.high += std::exp(-decay * static_cast<double>(l)) * coeffs.values.row(l).transpose();
  return out;
}

inline FrequencyBands frequency_split(const WaveletCoefficients& coeffs, const StaaConfig& cfg) {
  if (coeffs.scales() != static_cast<std::size_t>(cfg.scales))
    throw ConfigError("coefficient scale count does not match config");
  return frequency_split(coeffs, cfg.decay);
}

/// Mean absolute successive difference over the last min(window, size)
/// entries of `history` (oldest first). Zero when fewer than two entries
/// are available.
inline Eigen::VectorXd change_rate(std::span<const Eigen::VectorXd> history, int window) {
  if (history.empty()) throw InvalidGraphError("change rate needs at least one snapshot");
  const std::size_t used = std::min<std::size_t>(history.size(), static_cast<std::size_t>(std::max(window, 1)));
  const auto tail = history.subspan(history.size() - used);
  Eigen::VectorXd rate = Eigen::VectorXd::Zero(history.back().size());
  if (used < 2) return rate;
  for (std::size_t i = 1; i < used; ++i) rate += (tail[i] - tail[i - 1]).cwiseAbs();
  return rate / static_cast<double>(used - 1);
}

/// z-score with population standard deviation and epsilon-guarded divisor.
inline Eigen::VectorXd normalize_snapshot(const Eigen::VectorXd& values, double epsilon) {
  if (values.size() == 0) throw InvalidGraphError("cannot normalize an empty vector");
  const double mean = values.mean();
  const Eigen::VectorXd centered = values.array() - mean;
  const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(values.size()));
  return centered / (sd + epsilon);
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct ActivityCoefficients {
  Eigen::VectorXd tau;
  Eigen::VectorXd tau_norm;
  Eigen::VectorXd beta;
};

inline ActivityCoefficients activity_coefficient(const Eigen::VectorXd& delta_a_norm, const Eigen::VectorXd& b_norm,
                                                 const StaaConfig& cfg) {
  if (delta_a_norm.size() != b_norm.size()) throw InvalidGraphError("activity inputs differ in length");
  ActivityCoefficients out;
  out.tau = cfg.gamma * delta_a_norm + (1.0 - cfg.gamma) * b_norm;
  out.tau_norm = normalize_snapshot(out.tau, cfg.epsilon);
  out.beta = out.tau_norm.unaryExpr([&](double x) { return std::clamp(cfg.delta * sigmoid(x), 0.0, 1.0 - cfg.alpha); });
  return out;
}

/// Sequential activity evaluation; keeps the a-history needed by the window.
class ActivityTracker {
 public:
  explicit ActivityTracker(StaaConfig cfg) : cfg_(cfg) {}

  ActivitySnapshot push(const WaveletCoefficients& coeffs) {
    FrequencyBands bands = frequency_split(coeffs, cfg_);
    history_.push_back(bands.low);
    while (history_.size() > static_cast<std::size_t>(cfg_.window)) history_.pop_front();
    const std::vector<Eigen::VectorXd> window(history_.begin(), history_.end());

    ActivitySnapshot step;
    step.a = std::move(bands.low);
    step.b = std::move(bands.high);
    step.delta_a = change_rate(window, cfg_.window);
    step.delta_a_norm = normalize_snapshot(step.delta_a, cfg_.epsilon);
    step.b_norm = normalize_snapshot(step.b, cfg_.epsilon);
    ActivityCoefficients coeff = activity_coefficient(step.delta_a_norm, step.b_norm, cfg_);
    step.tau = std::move(coeff.tau);
    step.tau_norm = std::move(coeff.tau_norm);
    step.beta = std::move(coeff.beta);
    return step;
  }

 private:
  StaaConfig cfg_;
  std::deque<Eigen::VectorXd> history_;
};

/// Wavelet coefficients of every snapshot (independent; run in parallel).
inline std::vector<WaveletCoefficients> sequence_wavelets(const SnapshotSequence& seq, const StaaConfig& cfg) {
  std::vector<WaveletCoefficients> out(seq.size());
  parallel_for(seq.size(), [&](std::size_t t) {
    const Snapshot s = cfg.binarize ? binarized(seq[t]) : seq[t];
    out[t] = snapshot_wavelets(s, static_cast<std::size_t>(cfg.scales), cfg.knots);
  });
  return out;
}

inline ActivityTable compute_activity(const SnapshotSequence& seq, const StaaConfig& cfg) {
  cfg.validate();
  const auto coeffs = sequence_wavelets(seq, cfg);
  ActivityTracker tracker(cfg);
  ActivityTable table;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    table.timestamps.push_back(seq.timestamp(t));
    table.steps.push_back(tracker.push(coeffs[t]));
  }
  return table;
}

inline void write_activity_csv(std::ostream& os, const ActivityTable& table) {
  os << "t,node,a,b,delta_a,delta_a_norm,b_norm,tau,tau_norm,beta\n";
  for (std::size_t t = 0; t < table.steps.size(); ++t) {
    const auto& s = table.steps[t];
    for (Eigen::Index j = 0; j < s.a.size(); ++j) {
      os << table.timestamps[t] << ',' << j << ',' << format_g12(s.a[j]) << ',' << format_g12(s.b[j]) << ','
         << format_g12(s.delta_a[j]) << ',' << format_g12(s.delta_a_norm[j]) << ',' << format_g12(s.b_norm[j]) << ','
         << format_g12(s.tau[j]) << ',' << format_g12(s.tau_norm[j]) << ',' << format_g12(s.beta[j]) << '\n';
    }
  }
}

}  // namespace staa
