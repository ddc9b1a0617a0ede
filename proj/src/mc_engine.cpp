#include "expfun/mc_engine.hpp"

#include <algorithm>

namespace expfun {

namespace {

int poisson_from_u(Real u, Real lambda) {
  Real p = std::exp(-lambda), cum = p;
  int k = 0;
  while (u > cum && k < 100000) {
    ++k;
    p *= lambda / k;
    cum += p;
  }
  return k;
}

Array build_mesh(Real horizon, Real dt, Index& n_steps) {
  if (!(horizon > 0) || !(dt > 0)) throw std::invalid_argument("mc: horizon and dt must be > 0");
  n_steps = static_cast<Index>(std::ceil(horizon / dt - 1e-9));
  Array mesh(n_steps + 1);
  for (Index k = 0; k <= n_steps; ++k) mesh[k] = std::min(k * dt, horizon);
  mesh[n_steps] = horizon;
  return mesh;
}

// per-step coefficient tables for the X scheme
struct XCoeffs {
  Array h, drift, sigma, sigma_small, lambda;
  bool any_jumps = false;
};

XCoeffs x_coeffs(const ProcessModel& m, const Array& mesh, const McConfig& cfg) {
  const Index n = mesh.size() - 1;
  XCoeffs c;
  c.h.resize(n);
  c.drift.resize(n);
  c.sigma.resize(n);
  c.sigma_small = Array::Zero(n);
  c.lambda.resize(n);
  const bool levy = m.is_levy();
  for (Index k = 0; k < n; ++k) {
    const Real s = mesh[k], h = mesh[k + 1] - mesh[k];
    c.h[k] = h;
    const JumpMeasure& kk = m.jumps.at(levy ? 0.0 : s);
    const Real m_eps = kk.is_none() ? 0.0 : kk.mean_above(cfg.eps_cutoff);
    const Real lam = kk.is_none() ? 0.0 : kk.mass_above(cfg.eps_cutoff);
    c.drift[k] = (m.b(s) - m_eps) * h;
    Real var = m.c(s) * h;
    c.sigma[k] = std::sqrt(var);
    if (cfg.variance_correction && !kk.is_none())
      c.sigma_small[k] = std::sqrt(kk.var_below(cfg.eps_cutoff) * h);
    c.lambda[k] = lam * h;
    if (lam > 0) c.any_jumps = true;
    if (levy && k == 0) {  // constant coefficients: fill and stop probing
      for (Index j = 1; j < n; ++j) {
        const Real hj = mesh[j + 1] - mesh[j];
        c.h[j] = hj;
        c.drift[j] = c.drift[0] / h * hj;
        c.sigma[j] = std::sqrt(m.c(0) * hj);
        c.sigma_small[j] = cfg.variance_correction && !kk.is_none()
                               ? std::sqrt(kk.var_below(cfg.eps_cutoff) * hj)
                               : 0.0;
        c.lambda[j] = lam * hj;
      }
      break;
    }
  }
  return c;
}

// streams every mesh value of every X path through visit(path, step_index, x)
template <typename Visit>
void run_x_kernel(const ProcessModel& m, const Array& mesh, const McConfig& cfg, Visit&& visit) {
  const XCoeffs co = x_coeffs(m, mesh, cfg);
  const CounterRng rng(cfg.seed);
  const Index n = mesh.size() - 1;
  const bool levy = m.is_levy();
  const Real two_pi = 2 * M_PI;
  for (Index p = 0; p < cfg.n_paths; ++p) {
    Real x = 0;
    visit(p, 0, x);
    for (Index k = 0; k < n; ++k) {
      const auto blk = rng.block(static_cast<uint32_t>(p), static_cast<uint32_t>(k), 0, 0);
      const Real r = std::sqrt(-2.0 * std::log(u01(blk[0])));
      const Real th = two_pi * u01(blk[1]);
      Real dx = co.drift[k] + co.sigma[k] * (r * std::cos(th));
      if (co.sigma_small[k] != 0) dx += co.sigma_small[k] * (r * std::sin(th));
      if (co.any_jumps && co.lambda[k] > 0) {
        const int nj = poisson_from_u(u01(blk[2]), co.lambda[k]);
        if (nj > 0) {
          const JumpMeasure& kk = m.jumps.at(levy ? 0.0 : mesh[k]);
          for (int j = 0; j < nj; ++j)
            dx += kk.sample(rng, static_cast<uint32_t>(p), static_cast<uint32_t>(k), 1,
                            static_cast<uint32_t>(j), cfg.eps_cutoff);
        }
      }
      x += dx;
      visit(p, k + 1, x);
    }
  }
}

Index stored_count(Index n_mesh, int stride) {
  Index c = 0;
  for (Index k = 0; k < n_mesh; k += stride) ++c;
  if ((n_mesh - 1) % stride != 0) ++c;  // terminal point always kept
  return c;
}

}  // namespace

PathBatch simulate_X(const ProcessModel& m, Real horizon, const McConfig& cfg) {
  Index n_steps = 0;
  const Array mesh = build_mesh(horizon, cfg.dt, n_steps);
  const int stride = std::max(cfg.store_stride, 1);
  PathBatch b;
  b.kind = BatchKind::x_path;
  b.seed = cfg.seed;
  b.dt = cfg.dt;
  const Index n_store = stored_count(mesh.size(), stride);
  b.time_mesh.resize(n_store);
  {
    Index c = 0;
    for (Index k = 0; k < mesh.size(); k += stride) b.time_mesh[c++] = mesh[k];
    if (c < n_store) b.time_mesh[c] = mesh[mesh.size() - 1];
  }
  b.values.resize(cfg.n_paths, n_store);
  run_x_kernel(m, mesh, cfg, [&](Index p, Index k, Real x) {
    if (k % stride == 0)
      b.values(p, k / stride) = x;
    else if (k == mesh.size() - 1)
      b.values(p, n_store - 1) = x;
  });
  return b;
}

PathBatch exp_functional(const PathBatch& x_paths) {
  if (x_paths.kind != BatchKind::x_path)
    throw std::invalid_argument("exp_functional: batch must hold X paths");
  const Array& mesh = x_paths.time_mesh;
  PathBatch out;
  out.kind = BatchKind::functional;
  out.seed = x_paths.seed;
  out.dt = x_paths.dt;
  out.time_mesh.resize(1);
  out.time_mesh[0] = mesh[mesh.size() - 1];
  out.values.resize(x_paths.n_paths(), 1);
  for (Index p = 0; p < x_paths.n_paths(); ++p) {
    Real acc = 0, prev = std::exp(-x_paths.values(p, 0));
    for (Index k = 1; k < mesh.size(); ++k) {
      const Real cur = std::exp(-x_paths.values(p, k));
      acc += 0.5 * (mesh[k] - mesh[k - 1]) * (prev + cur);
      prev = cur;
    }
    out.values(p, 0) = acc;
  }
  return out;
}

PathBatch simulate_exp_functional(const ProcessModel& m, Real horizon, const McConfig& cfg) {
  Index n_steps = 0;
  const Array mesh = build_mesh(horizon, cfg.dt, n_steps);
  PathBatch out;
  out.kind = BatchKind::functional;
  out.seed = cfg.seed;
  out.dt = cfg.dt;
  out.time_mesh.resize(1);
  out.time_mesh[0] = horizon;
  out.values.resize(cfg.n_paths, 1);
  Real acc = 0, prev = 0;
  run_x_kernel(m, mesh, cfg, [&](Index p, Index k, Real x) {
    const Real cur = std::exp(-x);
    if (k == 0) {
      acc = 0;
    } else {
      acc += 0.5 * (mesh[k] - mesh[k - 1]) * (prev + cur);
    }
    prev = cur;
    if (k == mesh.size() - 1) out.values(p, 0) = acc;
  });
  return out;
}

PathBatch simulate_v_functional(const ReversedModel& rev, Real s, const McConfig& cfg) {
  if (!(s > 0 && s <= rev.t_fix() + 1e-12))
    throw std::invalid_argument("simulate_v_functional: need 0 < s <= t_fix");
  Index n_steps = 0;
  const Array mesh = build_mesh(s, cfg.dt, n_steps);
  PathBatch out;
  out.kind = BatchKind::functional;
  out.seed = cfg.seed;
  out.dt = cfg.dt;
  out.time_mesh.resize(1);
  out.time_mesh[0] = s;
  out.values.resize(cfg.n_paths, 1);
  // V_s = e^{-Y_s} * trapezoid of e^{Y};  Y simulated from the reversed triplet
  Real acc = 0, prev = 0;
  run_x_kernel(rev.model(), mesh, cfg, [&](Index p, Index k, Real y) {
    const Real cur = std::exp(y);
    if (k == 0) {
      acc = 0;
    } else {
      acc += 0.5 * (mesh[k] - mesh[k - 1]) * (prev + cur);
    }
    prev = cur;
    if (k == mesh.size() - 1) out.values(p, 0) = std::exp(-y) * acc;
  });
  return out;
}

VSdeResult simulate_V_sde(const ReversedModel& rev, const McConfig& cfg) {
  const Real t = rev.t_fix();
  Index n_steps = 0;
  const Array mesh = build_mesh(t, cfg.dt, n_steps);
  const int stride = std::max(cfg.store_stride, 1);
  const Index n_store = stored_count(mesh.size(), stride);

  VSdeResult res;
  PathBatch& b = res.batch;
  b.kind = BatchKind::v_path;
  b.seed = cfg.seed;
  b.dt = cfg.dt;
  b.time_mesh.resize(n_store);
  {
    Index c = 0;
    for (Index k = 0; k < mesh.size(); k += stride) b.time_mesh[c++] = mesh[k];
    if (c < n_store) b.time_mesh[c] = mesh[mesh.size() - 1];
  }
  b.values.resize(cfg.n_paths, n_store);

  // per-step coefficients of the V scheme (left endpoints, so the horizon
  // endpoint of the reversed triplet is never touched)
  const Index n = mesh.size() - 1;
  const bool levy = rev.is_levy();
  Array a_bar(n), sig(n), lam(n), mhat(n), sig_small(n);
  for (Index k = 0; k < n; ++k) {
    const Real u = mesh[k], h = mesh[k + 1] - mesh[k];
    if (levy && k > 0) {
      const Real h0 = mesh[1] - mesh[0];
      a_bar[k] = a_bar[0];
      sig[k] = sig[0] * std::sqrt(h / h0);
      lam[k] = lam[0] / h0 * h;
      mhat[k] = mhat[0] / h0 * h;
      sig_small[k] = sig_small[0] * std::sqrt(h / h0);
      continue;
    }
    a_bar[k] = rev.a_bar(u);
    sig[k] = std::sqrt(rev.c(u) * h);
    const JumpMeasure& kk = rev.jumps(u);
    if (kk.is_none()) {
      lam[k] = mhat[k] = sig_small[k] = 0;
    } else {
      lam[k] = kk.mass_above(cfg.eps_cutoff) * h;
      mhat[k] = kk.integrate([](Real x) { return em1(x); }, cfg.eps_cutoff).value * h;
      sig_small[k] = cfg.variance_correction ? std::sqrt(kk.var_below(cfg.eps_cutoff) * h) : 0.0;
    }
  }
  const bool any_jumps = (lam > 0).any();

  const CounterRng rng(cfg.seed);
  const Real two_pi = 2 * M_PI;
  for (Index p = 0; p < cfg.n_paths; ++p) {
    Real v = 0;
    Index c = 0;
    b.values(p, c++) = v;  // V_0 = 0
    for (Index k = 0; k < n; ++k) {
      const auto blk = rng.block(static_cast<uint32_t>(p), static_cast<uint32_t>(k), 0, 0);
      const Real r = std::sqrt(-2.0 * std::log(u01(blk[0])));
      const Real th = two_pi * u01(blk[1]);
      const Real h = mesh[k + 1] - mesh[k];
      Real dyhat = a_bar[k] * h + sig[k] * (r * std::cos(th)) - mhat[k];
      if (sig_small[k] != 0) dyhat += sig_small[k] * (r * std::sin(th));
      if (any_jumps && lam[k] > 0) {
        const int nj = poisson_from_u(u01(blk[2]), lam[k]);
        if (nj > 0) {
          const JumpMeasure& kk = rev.jumps(levy ? 0.0 : mesh[k]);
          for (int j = 0; j < nj; ++j) {
            const Real z = kk.sample(rng, static_cast<uint32_t>(p), static_cast<uint32_t>(k), 1,
                                     static_cast<uint32_t>(j), cfg.eps_cutoff);
            dyhat += em1(z);  // jump of the exponential martingale driver
          }
        }
      }
      v = v + v * dyhat + h;
      if (v < 0) {
        v = 0;
        ++res.n_clamped;
      }
      if ((k + 1) % stride == 0)
        b.values(p, c++) = v;
      else if (k + 1 == n)
        b.values(p, n_store - 1) = v;
    }
  }
  return res;
}

Array grid_for_samples(const Array& samples, Index n, Real pad_bandwidths) {
  std::vector<Real> logs;
  logs.reserve(samples.size());
  for (Index i = 0; i < samples.size(); ++i)
    if (samples[i] > 0) logs.push_back(std::log(samples[i]));
  if (logs.size() < 2) throw std::invalid_argument("grid_for_samples: too few positive samples");
  Real lmin = kInf, lmax = -kInf, mean = 0;
  for (Real l : logs) {
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
    mean += l;
  }
  mean /= logs.size();
  Real var = 0;
  for (Real l : logs) var += (l - mean) * (l - mean);
  const Real sd = std::sqrt(var / logs.size());
  const Real bw = std::max(0.9 * sd * std::pow(static_cast<Real>(logs.size()), -0.2), 1e-6);
  const Real pad = pad_bandwidths * bw;
  Array g(n);
  for (Index j = 0; j < n; ++j)
    g[j] = std::exp(lmin - pad + (lmax - lmin + 2 * pad) * j / (n - 1));
  return g;
}

DensityEstimate estimate_density(const Array& samples, const Array& grid, Real bandwidth) {
  if (grid.size() < 3) throw std::invalid_argument("estimate_density: grid too small");
  DensityEstimate out;
  out.y = grid;
  out.p = Array::Zero(grid.size());

  std::vector<Real> logs;
  logs.reserve(samples.size());
  for (Index i = 0; i < samples.size(); ++i)
    if (samples[i] > 0 && std::isfinite(samples[i])) logs.push_back(std::log(samples[i]));
  out.n_used = static_cast<Index>(logs.size());
  if (logs.empty()) {
    out.degenerate = true;
    out.bandwidth = 0;
    return out;
  }

  Real mean = 0;
  for (Real l : logs) mean += l;
  mean /= logs.size();
  Real var = 0;
  for (Real l : logs) var += (l - mean) * (l - mean);
  const Real sd = std::sqrt(var / logs.size());
  std::vector<Real> sorted(logs);
  std::sort(sorted.begin(), sorted.end());
  const Real iqr = sorted[static_cast<size_t>(0.75 * (sorted.size() - 1))] -
                   sorted[static_cast<size_t>(0.25 * (sorted.size() - 1))];
  Real spread = std::min(sd, iqr / 1.34);
  if (spread <= 0) spread = sd;
  out.degenerate = spread < 1e-12;
  Real bw = bandwidth > 0 ? bandwidth
                          : 0.9 * std::max(spread, 1e-12) *
                                std::pow(static_cast<Real>(logs.size()), -0.2);
  bw = std::max(bw, 1e-12);
  out.bandwidth = bw;

  // uniform log step required for the binned convolution
  const Index ng = grid.size();
  const Real l0 = std::log(grid[0]), l1 = std::log(grid[ng - 1]);
  const Real h = (l1 - l0) / (ng - 1);
  for (Index j = 1; j < ng; ++j)
    if (std::abs(std::log(grid[j]) - (l0 + j * h)) > 1e-7 * std::max(1.0, std::abs(l0)))
      throw std::invalid_argument("estimate_density: grid must be geometric");

  // linear binning of log-samples
  Array bins = Array::Zero(ng);
  for (Real l : logs) {
    Real fi = (l - l0) / h;
    if (fi <= 0) {
      bins[0] += 1;
    } else if (fi >= ng - 1) {
      bins[ng - 1] += 1;
    } else {
      const Index j = static_cast<Index>(fi);
      const Real th = fi - j;
      bins[j] += 1 - th;
      bins[j + 1] += th;
    }
  }

  // discrete Gaussian kernel, normalized so its trapezoid mass in log space
  // is exactly 1 (robust when bw ~ grid step)
  const Index L = std::min<Index>(ng - 1, static_cast<Index>(std::ceil(8 * bw / h)) + 1);
  Array ker(2 * L + 1);
  for (Index m = -L; m <= L; ++m) ker[m + L] = std::exp(-0.5 * (m * h / bw) * (m * h / bw));
  ker /= ker.sum() * h;
  for (Index j = 0; j < ng; ++j) {
    if (bins[j] == 0) continue;
    const Index lo = std::max<Index>(0, j - L), hi = std::min<Index>(ng - 1, j + L);
    for (Index i = lo; i <= hi; ++i) out.p[i] += bins[j] * ker[i - j + L];
  }
  out.p /= static_cast<Real>(logs.size());
  out.p /= grid;  // back from log-space density to density in y
  return out;
}

Real kolmogorov_prob(Real z) {
  // asymptotic Kolmogorov distribution, small-z Jacobi form below 0.755
  const Real fj[4] = {-2, -8, -18, -32};
  const Real w = 2.50662827;
  const Real c1 = -1.2337005501361697;
  const Real c2 = -11.103304951225528;
  const Real c3 = -30.842513753404244;
  const Real u = std::abs(z);
  if (u < 0.2) return 1;
  if (u < 0.755) {
    const Real v = 1.0 / (u * u);
    return 1 - w * (std::exp(c1 * v) + std::exp(c2 * v) + std::exp(c3 * v)) / u;
  }
  if (u < 6.8116) {
    Real r[4] = {0, 0, 0, 0};
    const Real v = u * u;
    const int maxj = std::max(1, static_cast<int>(std::lround(3.0 / u)));
    for (int j = 0; j < maxj; ++j) r[j] = std::exp(fj[j] * v);
    return 2 * (r[0] - r[1] + r[2] - r[3]);
  }
  return 0;
}

KsResult ks_two_sample(Array a, Array b) {
  KsResult res;
  const Index m = a.size(), n = b.size();
  if (m < 1 || n < 1) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.data(), a.data() + m);
  std::sort(b.data(), b.data() + n);
  Real d = 0, fa = 0, fb = 0;
  Index i = 0, j = 0;
  while (i < m && j < n) {
    const Real xa = a[i], xb = b[j];
    if (xa <= xb) fa = ++i / static_cast<Real>(m);
    if (xb <= xa) fb = ++j / static_cast<Real>(n);
    d = std::max(d, std::abs(fa - fb));
  }
  d = std::max(d, std::abs(1.0 - fb));
  d = std::max(d, std::abs(fa - 1.0));
  res.statistic = d;
  const Real en = std::sqrt(static_cast<Real>(m) * n / static_cast<Real>(m + n));
  res.p_value = kolmogorov_prob(d * en);
  return res;
}

}  // namespace expfun
