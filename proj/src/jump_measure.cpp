#include "expfun/jump_measure.hpp"

#include <vector>

#include "expfun/special.hpp"

namespace expfun {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// ∫_lo^hi x^k e^{-mu x} dx pieces (lo, hi >= 0)
Real exp_mass(Real mu, Real lo) { return std::exp(-mu * lo) / mu; }
Real exp_mean(Real mu, Real lo) { return std::exp(-mu * lo) * (lo / mu + 1 / (mu * mu)); }
Real exp_x2_below(Real mu, Real hi) {
  // ∫_0^hi x^2 e^{-mu x} dx
  const Real m2 = mu * mu;
  return (2 - std::exp(-mu * hi) * (m2 * hi * hi + 2 * mu * hi + 2)) / (mu * m2);
}

// Simpson on [a,b]; exact for cubic integrands (linear density times x^2)
template <typename F>
Real simpson(F&& f, Real a, Real b) {
  return (b - a) / 6.0 * (f(a) + 4 * f(0.5 * (a + b)) + f(b));
}

}  // namespace

JumpDist JumpDist::exponential(Real rate) {
  require(std::isfinite(rate) && rate > 0, "jump dist: exponential rate must be > 0");
  return {Kind::exponential, rate, 0};
}
JumpDist JumpDist::normal(Real mean, Real sd) {
  require(std::isfinite(mean) && std::isfinite(sd) && sd > 0, "jump dist: normal sd must be > 0");
  return {Kind::normal, mean, sd};
}
JumpDist JumpDist::uniform(Real lo, Real hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "jump dist: uniform needs hi > lo");
  return {Kind::uniform, lo, hi};
}

Real JumpDist::density(Real x) const {
  switch (kind) {
    case Kind::constant:
      throw std::domain_error("jump dist: point mass has no density");
    case Kind::exponential:
      return x > 0 ? p1 * std::exp(-p1 * x) : 0.0;
    case Kind::normal: {
      const Real z = (x - p1) / p2;
      return std::exp(-0.5 * z * z) / (p2 * std::sqrt(2 * M_PI));
    }
    case Kind::uniform:
      return (x >= p1 && x <= p2) ? 1.0 / (p2 - p1) : 0.0;
  }
  return 0;
}

Real JumpDist::cdf(Real x) const {
  switch (kind) {
    case Kind::constant:
      return x >= p1 ? 1.0 : 0.0;
    case Kind::exponential:
      return x > 0 ? -std::expm1(-p1 * x) : 0.0;
    case Kind::normal:
      return normal_cdf((x - p1) / p2);
    case Kind::uniform:
      return x <= p1 ? 0.0 : (x >= p2 ? 1.0 : (x - p1) / (p2 - p1));
  }
  return 0;
}

Real JumpDist::quantile(Real u) const {
  switch (kind) {
    case Kind::constant:
      return p1;
    case Kind::exponential:
      return -std::log1p(-u) / p1;
    case Kind::normal:
      return p1 + p2 * normal_quantile(u);
    case Kind::uniform:
      return p1 + u * (p2 - p1);
  }
  return 0;
}

Real JumpDist::mean() const {
  switch (kind) {
    case Kind::constant:
      return p1;
    case Kind::exponential:
      return 1 / p1;
    case Kind::normal:
      return p1;
    case Kind::uniform:
      return 0.5 * (p1 + p2);
  }
  return 0;
}

JumpMeasure JumpMeasure::exponential_positive(Real mu) {
  require(std::isfinite(mu) && mu > 0, "jump measure: exponential_positive mu must be > 0");
  JumpMeasure k;
  k.kind_ = Kind::exponential_positive;
  k.mu_plus_ = mu;
  return k;
}

JumpMeasure JumpMeasure::double_exponential(Real w_plus, Real mu_plus, Real mu_minus) {
  require(std::isfinite(w_plus) && w_plus >= 0 && w_plus <= 1,
          "jump measure: double_exponential weight must lie in [0,1]");
  require(std::isfinite(mu_plus) && mu_plus > 0 && std::isfinite(mu_minus) && mu_minus > 0,
          "jump measure: double_exponential rates must be > 0");
  JumpMeasure k;
  k.kind_ = Kind::double_exponential;
  k.w_plus_ = w_plus;
  k.mu_plus_ = mu_plus;
  k.mu_minus_ = mu_minus;
  return k;
}

JumpMeasure JumpMeasure::compound_poisson(Real intensity, JumpDist dist) {
  require(std::isfinite(intensity) && intensity >= 0,
          "jump measure: compound_poisson intensity must be >= 0");
  JumpMeasure k;
  k.kind_ = Kind::compound_poisson;
  k.intensity_ = intensity;
  k.dist_ = dist;
  return k;
}

JumpMeasure JumpMeasure::tabulated(Array nodes, Array densities) {
  require(nodes.size() == densities.size(), "jump measure: tabulated arrays differ in length");
  require(nodes.size() >= 2, "jump measure: tabulated needs at least two nodes");
  for (Index i = 0; i < nodes.size(); ++i) {
    require(std::isfinite(nodes[i]) && std::isfinite(densities[i]),
            "jump measure: tabulated entries must be finite");
    require(densities[i] >= 0, "jump measure: tabulated densities must be >= 0");
    if (i > 0) require(nodes[i] > nodes[i - 1], "jump measure: tabulated nodes must be increasing");
  }
  JumpMeasure k;
  k.kind_ = Kind::tabulated;
  k.nodes_ = std::move(nodes);
  k.dens_ = std::move(densities);
  const Index n = k.nodes_.size();
  k.seg_mass_.resize(n - 1);
  for (Index i = 0; i + 1 < n; ++i)
    k.seg_mass_[i] = 0.5 * (k.nodes_[i + 1] - k.nodes_[i]) * (k.dens_[i] + k.dens_[i + 1]);
  k.tab_total_ = k.seg_mass_.sum();
  return k;
}

bool JumpMeasure::has_density() const {
  if (kind_ == Kind::none) return false;
  if (kind_ == Kind::compound_poisson) return dist_.has_density();
  return true;
}

Real JumpMeasure::density(Real x) const {
  switch (kind_) {
    case Kind::none:
      return 0;
    case Kind::exponential_positive:
      return x > 0 ? std::exp(-mu_plus_ * x) : 0.0;
    case Kind::double_exponential:
      return x > 0   ? w_plus_ * std::exp(-mu_plus_ * x)
             : x < 0 ? (1 - w_plus_) * std::exp(mu_minus_ * x)
                     : 0.0;
    case Kind::compound_poisson:
      return intensity_ * dist_.density(x);
    case Kind::tabulated: {
      if (x <= nodes_[0] || x >= nodes_[nodes_.size() - 1]) {
        // endpoints included so density(node) round-trips
        if (x == nodes_[0]) return dens_[0];
        if (x == nodes_[nodes_.size() - 1]) return dens_[dens_.size() - 1];
        return 0;
      }
      return interp_linear(nodes_, dens_, x);
    }
  }
  return 0;
}

Real JumpMeasure::mass_above(Real eps) const {
  switch (kind_) {
    case Kind::none:
      return 0;
    case Kind::exponential_positive:
      return exp_mass(mu_plus_, eps);
    case Kind::double_exponential:
      return w_plus_ * exp_mass(mu_plus_, eps) + (1 - w_plus_) * exp_mass(mu_minus_, eps);
    case Kind::compound_poisson:
      if (dist_.kind == JumpDist::Kind::constant)
        return std::abs(dist_.p1) > eps ? intensity_ : 0.0;
      return intensity_ * (1 - (dist_.cdf(eps) - dist_.cdf(-eps)));
    case Kind::tabulated: {
      Real s = 0;
      for (Index i = 0; i + 1 < nodes_.size(); ++i) {
        const Real au = std::max(nodes_[i], eps), bu = nodes_[i + 1];
        if (au < bu) s += 0.5 * (bu - au) * (density(au) + density(bu));
        const Real al = nodes_[i], bl = std::min(nodes_[i + 1], -eps);
        if (al < bl) s += 0.5 * (bl - al) * (density(al) + density(bl));
      }
      return s;
    }
  }
  return 0;
}

Real JumpMeasure::mean_above(Real eps) const {
  switch (kind_) {
    case Kind::none:
      return 0;
    case Kind::exponential_positive:
      return exp_mean(mu_plus_, eps);
    case Kind::double_exponential:
      return w_plus_ * exp_mean(mu_plus_, eps) - (1 - w_plus_) * exp_mean(mu_minus_, eps);
    case Kind::compound_poisson:
      if (dist_.kind == JumpDist::Kind::constant)
        return std::abs(dist_.p1) > eps ? intensity_ * dist_.p1 : 0.0;
      return integrate([](Real x) { return x; }, eps).value;
    case Kind::tabulated:
      return integrate([](Real x) { return x; }, eps).value;
  }
  return 0;
}

Real JumpMeasure::var_below(Real eps) const {
  if (eps <= 0) return 0;
  switch (kind_) {
    case Kind::none:
      return 0;
    case Kind::exponential_positive:
      return exp_x2_below(mu_plus_, eps);
    case Kind::double_exponential:
      return w_plus_ * exp_x2_below(mu_plus_, eps) + (1 - w_plus_) * exp_x2_below(mu_minus_, eps);
    case Kind::compound_poisson: {
      if (dist_.kind == JumpDist::Kind::constant)
        return std::abs(dist_.p1) <= eps ? intensity_ * dist_.p1 * dist_.p1 : 0.0;
      auto f = [this](Real x) { return x * x * intensity_ * dist_.density(x); };
      return integrate_adaptive(f, -eps, eps);
    }
    case Kind::tabulated: {
      Real s = 0;
      for (Index i = 0; i + 1 < nodes_.size(); ++i) {
        const Real a = std::max(nodes_[i], -eps), b = std::min(nodes_[i + 1], eps);
        if (a >= b) continue;
        s += simpson([this](Real x) { return x * x * density(x); }, a, b);
      }
      return s;
    }
  }
  return 0;
}

// tail mass of the positive part from threshold x (x may be <= 0 internally;
// the public nu_plus guards the domain)
Real JumpMeasure::nu_plus_impl(const JumpMeasure& k, Real x) {
  switch (k.kind_) {
    case Kind::none:
      return 0;
    case Kind::exponential_positive:
      return exp_mass(k.mu_plus_, std::max(x, 0.0));
    case Kind::double_exponential:
      return k.w_plus_ * exp_mass(k.mu_plus_, std::max(x, 0.0));
    case Kind::compound_poisson:
      if (k.dist_.kind == JumpDist::Kind::constant)
        return k.dist_.p1 >= x ? k.intensity_ : 0.0;
      return k.intensity_ * (1 - k.dist_.cdf(x));
    case Kind::tabulated: {
      Real s = 0;
      for (Index i = 0; i + 1 < k.nodes_.size(); ++i) {
        const Real a = std::max(k.nodes_[i], x), b = k.nodes_[i + 1];
        if (a >= b) continue;
        s += 0.5 * (b - a) * (k.density(a) + k.density(b));
      }
      return s;
    }
  }
  return 0;
}

Real JumpMeasure::nu_plus(Real x) const {
  if (!(x > 0)) throw std::domain_error("nu_plus: threshold must be > 0");
  return nu_plus_impl(*this, x);
}

Real JumpMeasure::nu_minus(Real x) const {
  if (!(x > 0)) throw std::domain_error("nu_minus: threshold must be > 0");
  switch (kind_) {
    case Kind::none:
    case Kind::exponential_positive:
      return 0;
    case Kind::double_exponential:
      return (1 - w_plus_) * exp_mass(mu_minus_, x);
    case Kind::compound_poisson:
      if (dist_.kind == JumpDist::Kind::constant) return dist_.p1 <= -x ? intensity_ : 0.0;
      return intensity_ * dist_.cdf(-x);
    case Kind::tabulated: {
      Real s = 0;
      for (Index i = 0; i + 1 < nodes_.size(); ++i) {
        const Real a = nodes_[i], b = std::min(nodes_[i + 1], -x);
        if (a >= b) continue;
        s += 0.5 * (b - a) * (density(a) + density(b));
      }
      return s;
    }
  }
  return 0;
}

TailQuad JumpMeasure::integrate(const std::function<Real(Real)>& fn, Real eps) const {
  TailQuad out;
  const Real lo = std::max(eps, 1e-8);  // sub-1e-8 sliver is below double noise
  switch (kind_) {
    case Kind::none:
      return out;
    case Kind::exponential_positive: {
      const Real mu = mu_plus_;
      return integrate_tail([&](Real x) { return fn(x) * std::exp(-mu * x); }, lo);
    }
    case Kind::double_exponential: {
      const Real mup = mu_plus_, mum = mu_minus_, wp = w_plus_;
      TailQuad p = integrate_tail([&](Real x) { return wp * fn(x) * std::exp(-mup * x); }, lo);
      TailQuad m =
          integrate_tail([&](Real x) { return (1 - wp) * fn(-x) * std::exp(-mum * x); }, lo);
      out.value = p.value + m.value;
      out.diverged = p.diverged || m.diverged;
      out.radius = std::max(p.radius, m.radius);
      if (out.diverged) out.value = kInf;
      return out;
    }
    case Kind::compound_poisson: {
      if (intensity_ == 0) return out;
      if (dist_.kind == JumpDist::Kind::constant) {
        if (std::abs(dist_.p1) > eps) out.value = intensity_ * fn(dist_.p1);
        out.radius = std::abs(dist_.p1);
        return out;
      }
      if (dist_.kind == JumpDist::Kind::uniform) {
        Real s = 0;
        auto g = [&](Real x) { return fn(x) * intensity_ * dist_.density(x); };
        if (dist_.p1 < -lo) s += integrate_adaptive(g, dist_.p1, std::min(dist_.p2, -lo));
        if (dist_.p2 > lo) s += integrate_adaptive(g, std::max(dist_.p1, lo), dist_.p2);
        out.value = s;
        out.radius = std::max(std::abs(dist_.p1), std::abs(dist_.p2));
        return out;
      }
      auto g = [&](Real x) { return fn(x) * intensity_ * dist_.density(x); };
      TailQuad p = integrate_tail([&](Real x) { return g(x); }, lo);
      out = p;
      if (dist_.kind == JumpDist::Kind::normal) {
        TailQuad m = integrate_tail([&](Real x) { return g(-x); }, lo);
        out.value += m.value;
        out.diverged = out.diverged || m.diverged;
        out.radius = std::max(out.radius, m.radius);
        if (out.diverged) out.value = kInf;
      }
      return out;
    }
    case Kind::tabulated: {
      Real s = 0;
      for (Index i = 0; i + 1 < nodes_.size(); ++i) {
        auto g = [&](Real x) { return fn(x) * density(x); };
        Real a = nodes_[i], b = nodes_[i + 1];
        // clip the |x| <= eps window out of the segment
        if (b <= -eps || a >= eps) {
          s += integrate_gl(g, a, b, 32);
        } else {
          if (a < -eps) s += integrate_gl(g, a, -eps, 32);
          if (b > eps) s += integrate_gl(g, eps, b, 32);
        }
        out.radius = std::max({out.radius, std::abs(a), std::abs(b)});
      }
      out.value = s;
      return out;
    }
  }
  return out;
}

Real JumpMeasure::sample(const CounterRng& rng, uint32_t path, uint32_t step, uint32_t channel,
                         uint32_t index, Real eps) const {
  const auto blk = rng.block(path, step, channel, index);
  const Real u = u01(blk[0]);
  switch (kind_) {
    case Kind::none:
      throw std::logic_error("jump measure: sample() on empty measure");
    case Kind::exponential_positive:
      return eps - std::log(u) / mu_plus_;  // memoryless beyond the cutoff
    case Kind::double_exponential: {
      const Real mp = w_plus_ * exp_mass(mu_plus_, eps);
      const Real mm = (1 - w_plus_) * exp_mass(mu_minus_, eps);
      const Real v = u01(blk[1]);
      if (u * (mp + mm) < mp) return eps - std::log(v) / mu_plus_;
      return -(eps - std::log(v) / mu_minus_);
    }
    case Kind::compound_poisson: {
      if (dist_.kind == JumpDist::Kind::constant) return dist_.p1;
      // invert the cdf restricted to |x| > eps
      const Real fl = dist_.cdf(-eps), fr = dist_.cdf(eps);
      const Real m = 1 - (fr - fl);
      if (m <= 0) return dist_.quantile(u);  // cutoff swallows everything; caller guards
      const Real t = u * m;
      return dist_.quantile(t < fl ? t : t + (fr - fl));
    }
    case Kind::tabulated: {
      // walk segments, clipping |x| <= eps, then invert the linear density
      Real target = u;
      Real total = 0;
      struct Piece {
        Real a, b, mass;
      };
      std::vector<Piece> pieces;
      for (Index i = 0; i + 1 < nodes_.size(); ++i) {
        Real a = nodes_[i], b = nodes_[i + 1];
        auto push = [&](Real pa, Real pb) {
          if (pa >= pb) return;
          const Real mass = 0.5 * (pb - pa) * (density(pa) + density(pb));
          pieces.push_back({pa, pb, mass});
          total += mass;
        };
        if (b <= -eps || a >= eps) {
          push(a, b);
        } else {
          push(a, std::min(b, -eps));
          push(std::max(a, eps), b);
        }
      }
      if (total <= 0) throw std::logic_error("jump measure: no mass beyond cutoff");
      target *= total;
      for (const auto& pc : pieces) {
        if (target > pc.mass) {
          target -= pc.mass;
          continue;
        }
        const Real ka = density(pc.a), kb = density(pc.b);
        const Real h = pc.b - pc.a;
        const Real slope = (kb - ka) / h;
        if (std::abs(slope) < 1e-300) return pc.a + target / std::max(ka, 1e-300);
        // solve ka*t + slope*t^2/2 = target for t in [0,h]
        const Real disc = ka * ka + 2 * slope * target;
        const Real t = (-ka + std::sqrt(std::max(disc, 0.0))) / slope;
        return pc.a + std::clamp(t, 0.0, h);
      }
      return pieces.back().b;
    }
  }
  return 0;
}

std::vector<std::pair<Real, Real>> JumpMeasure::quad_nodes(Real eps, int n_per_sign) const {
  std::vector<std::pair<Real, Real>> out;
  const Real lo = std::max(eps, 1e-8);
  const int n_panels = std::max(1, n_per_sign / 32);
  // geometric panels on [lo, hi] with density folded into the weights
  auto add_side = [&](Real hi, Real sign) {
    if (hi <= lo) return;
    const Real ratio = std::pow(hi / lo, 1.0 / n_panels);
    Real a = lo;
    for (int p = 0; p < n_panels; ++p) {
      const Real b = (p + 1 == n_panels) ? hi : a * ratio;
      const GlRule& r = gauss_legendre(32);
      const Real mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (Index i = 0; i < 32; ++i) {
        const Real x = sign * (mid + half * r.nodes[i]);
        const Real w = half * r.weights[i] * density(x);
        if (w != 0) out.emplace_back(x, w);
      }
      a = b;
    }
  };
  switch (kind_) {
    case Kind::none:
      return out;
    case Kind::exponential_positive:
      add_side(lo + 34.0 / mu_plus_, +1);
      return out;
    case Kind::double_exponential:
      if (w_plus_ > 0) add_side(lo + 34.0 / mu_plus_, +1);
      if (w_plus_ < 1) add_side(lo + 34.0 / mu_minus_, -1);
      return out;
    case Kind::compound_poisson:
      if (intensity_ == 0) return out;
      switch (dist_.kind) {
        case JumpDist::Kind::constant:
          if (std::abs(dist_.p1) > eps) out.emplace_back(dist_.p1, intensity_);
          return out;
        case JumpDist::Kind::exponential:
          add_side(lo + 34.0 / dist_.p1, +1);
          return out;
        case JumpDist::Kind::normal: {
          const Real r = std::abs(dist_.p1) + 8.5 * dist_.p2;
          add_side(r, +1);
          add_side(r, -1);
          return out;
        }
        case JumpDist::Kind::uniform: {
          // uniform density is flat: plain composite Gauss on the support
          auto push_range = [&](Real a, Real b) {
            if (a >= b) return;
            const int panels = std::max(1, n_per_sign / 32);
            const Real h = (b - a) / panels;
            for (int p = 0; p < panels; ++p) {
              const GlRule& r = gauss_legendre(32);
              const Real pa = a + p * h, pb = pa + h;
              const Real mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
              for (Index i = 0; i < 32; ++i) {
                const Real x = mid + half * r.nodes[i];
                out.emplace_back(x, half * r.weights[i] * density(x));
              }
            }
          };
          push_range(dist_.p1, std::min(dist_.p2, -lo));
          push_range(std::max(dist_.p1, lo), dist_.p2);
          return out;
        }
      }
      return out;
    case Kind::tabulated: {
      for (Index s = 0; s + 1 < nodes_.size(); ++s) {
        Real a = nodes_[s], b = nodes_[s + 1];
        auto push_range = [&](Real pa, Real pb) {
          if (pa >= pb) return;
          const GlRule& r = gauss_legendre(16);
          const Real mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
          for (Index i = 0; i < 16; ++i) {
            const Real x = mid + half * r.nodes[i];
            out.emplace_back(x, half * r.weights[i] * density(x));
          }
        };
        if (b <= -lo || a >= lo) {
          push_range(a, b);
        } else {
          push_range(a, std::min(b, -lo));
          push_range(std::max(a, lo), b);
        }
      }
      return out;
    }
  }
  return out;
}

std::optional<Real> JumpMeasure::positive_support_bound() const {
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::exponential_positive:
      return std::nullopt;
    case Kind::double_exponential:
      return w_plus_ == 0 ? std::optional<Real>(0.0) : std::nullopt;
    case Kind::compound_poisson:
      switch (dist_.kind) {
        case JumpDist::Kind::constant:
          return std::max(dist_.p1, 0.0);
        case JumpDist::Kind::uniform:
          return std::max(dist_.p2, 0.0);
        default:
          return intensity_ == 0 ? std::optional<Real>(0.0) : std::nullopt;
      }
    case Kind::tabulated:
      return std::max(nodes_[nodes_.size() - 1], 0.0);
  }
  return std::nullopt;
}

bool JumpMeasure::negative_exp_moment_finite(Real p) const {
  switch (kind_) {
    case Kind::none:
    case Kind::exponential_positive:
      return true;
    case Kind::double_exponential:
      // ∫_{z<-1} e^{-pz} e^{mu- z} dz finite iff p < mu-
      return w_plus_ == 1 || p < mu_minus_;
    case Kind::compound_poisson:
      return true;  // point mass, gaussian, uniform, one-sided exponential
    case Kind::tabulated:
      return true;  // compact support
  }
  return true;
}

}  // namespace expfun
