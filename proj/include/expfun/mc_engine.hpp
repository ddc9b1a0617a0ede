#pragma once

// Euler-Maruyama simulation of the process, of the reversed-functional
// SDE, and exponential-functional sampling.  Jumps above the cutoff are
// compound-Poisson sampled; jumps below it are dropped and their compensator
// removed from the drift (optionally reinstated as extra Gaussian variance).
//
// Every random draw is addressed as (seed, path, step, channel, index):
//   channel 0   one block per step: Box-Muller pair + Poisson uniform
//   channel 1   jump sizes, one block per jump
// so batches are reproducible bit-for-bit regardless of scheduling, and any
// sub-batch can be regenerated in isolation.

#include "expfun/reversal.hpp"

namespace expfun {

struct McConfig {
  uint64_t seed = 1;
  Index n_paths = 100000;
  Real dt = 1e-3;
  Real eps_cutoff = 1e-3;
  bool variance_correction = false;  // fold ∫_{|x|<=eps} x^2 K into the Gaussian step
  int store_stride = 1;              // keep every k-th mesh point in the batch
};

enum class BatchKind { x_path, v_path, functional };

struct PathBatch {
  BatchKind kind = BatchKind::x_path;
  uint64_t seed = 0;
  Real dt = 0;      // internal integration step
  Array time_mesh;  // stored mesh (thinned by store_stride)
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;  // paths × mesh

  Index n_paths() const { return values.rows(); }
  // column of terminal values
  Array terminal() const { return values.col(values.cols() - 1).array(); }
};

// paths of X on [0, horizon]
PathBatch simulate_X(const ProcessModel& m, Real horizon, const McConfig& cfg);

// I = ∫ e^{-X} ds by trapezoid over the batch mesh -> functional batch
PathBatch exp_functional(const PathBatch& x_paths);

// fused simulate+integrate: same draws as simulate_X at stride 1, but paths
// are streamed so the full matrix never materializes
PathBatch simulate_exp_functional(const ProcessModel& m, Real horizon, const McConfig& cfg);

// V_s = e^{-Y_s} ∫_0^s e^{Y_u} du from paths of the reversed process Y;
// shares the law of I_s slice-by-slice for Lévy models and at s = t in general
PathBatch simulate_v_functional(const ReversedModel& rev, Real s, const McConfig& cfg);

struct VSdeResult {
  PathBatch batch;          // v_path
  Index n_clamped = 0;      // Euler undershoots clipped at 0
};

// Euler scheme for dV = (1 + a~ V) ds + V sqrt(c~) dW + V d(compensated jumps)
VSdeResult simulate_V_sde(const ReversedModel& rev, const McConfig& cfg);

struct DensityEstimate {
  Array y;          // evaluation grid
  Array p;          // kernel density estimate
  Real bandwidth;   // log-space bandwidth actually used
  bool degenerate;  // sample spread ~ 0 (point mass); p is a narrow spike
  Index n_used;     // positive samples that entered the estimate
};

// Gaussian KDE in log space on a geometric grid; bandwidth 0 = Silverman
DensityEstimate estimate_density(const Array& samples, const Array& grid, Real bandwidth = 0);

// geometric grid covering the sample range padded by a few bandwidths
Array grid_for_samples(const Array& samples, Index n, Real pad_bandwidths = 6);

struct KsResult {
  Real statistic = kNaN;
  Real p_value = kNaN;
};

KsResult ks_two_sample(Array a, Array b);

// asymptotic Kolmogorov tail probability P(K > z)
Real kolmogorov_prob(Real z);

}  // namespace expfun
