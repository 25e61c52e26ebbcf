#pragma once
// Critical exponents, Orlicz gauges and Luxemburg norms, annulus-profile
// divergence/decay classification, and rescaling-invariance checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mongelab/field.hpp"
#include "mongelab/fit.hpp"
#include "mongelab/quadrature.hpp"

namespace mongelab {

struct Rational {
  long num = 0, den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct CriticalExponents {
  Field::Setting setting = Field::Setting::Real;
  int n = 0, k = 0;
  Rational p_crit;    // real: n(n-k)/(2k); complex: n(n-k)/k
  Rational holder_q;  // 2 - 2k/n in both settings
};

/// Dimension constraints: real needs 0 < k < n/2, complex needs 0 < k < n.
inline CriticalExponents critical_exponent(Field::Setting setting, int n, int k) {
  if (setting == Field::Setting::Real) {
    if (!(k > 0 && 2 * k < n))
      throw std::invalid_argument("critical_exponent: real setting needs 0 < k < n/2");
  } else {
    if (!(k > 0 && k < n))
      throw std::invalid_argument("critical_exponent: complex setting needs 0 < k < n");
  }
  CriticalExponents ce;
  ce.setting = setting;
  ce.n = n;
  ce.k = k;
  long nn = n, kk = k;
  ce.p_crit = (setting == Field::Setting::Real) ? Rational{nn * (nn - kk), 2 * kk}
                                                : Rational{nn * (nn - kk), kk};
  ce.holder_q = Rational{2 * (nn - kk), nn};
  return ce;
}

// ---------------------------------------------------------------------------
// Orlicz gauges.

/// Gauge F for Luxemburg norms: either the pure power t^m, or the power-log
/// gauge t^m (log t)^{-s} for t >= e continued below e by the tangent
/// parabola through the origin, clamped at zero (convex whenever m - s >= 1).
class OrliczGauge {
 public:
  static OrliczGauge power(double m) {
    OrliczGauge g;
    g.m_ = m;
    g.s_ = 0.0;
    g.pure_ = true;
    return g;
  }

  static OrliczGauge power_log(double m, double s) {
    OrliczGauge g;
    g.m_ = m;
    g.s_ = s;
    g.pure_ = false;
    g.a_ = std::exp(m - 2.0) * (m - s - 1.0);
    g.b_ = std::exp(m - 1.0) * (2.0 - m + s);
    return g;
  }

  double m() const { return m_; }
  double s() const { return s_; }
  bool pure_power() const { return pure_; }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (pure_) return std::pow(t, m_);
    if (t >= M_E) return std::pow(t, m_) * std::pow(std::log(t), -s_);
    return std::max(a_ * t * t + b_ * t, 0.0);
  }

  /// Analytic for pure powers; for power-log gauges the tangent-parabola
  /// continuation is convex iff m - s >= 1, then a sampled midpoint check
  /// confirms the t >= e branch.
  bool convexity_certified() const {
    if (pure_) return m_ >= 1.0;
    if (m_ - s_ < 1.0) return false;
    double prev = 0.0;
    const int grid = 400;
    std::vector<double> vals(grid + 1);
    for (int i = 0; i <= grid; ++i) {
      double t = i * std::exp(4.0) / grid;
      vals[i] = (*this)(t);
      if (i > 0 && vals[i] < prev - 1e-12) return false;  // must be nondecreasing
      prev = vals[i];
    }
    for (int i = 1; i < grid; ++i) {
      double mid = vals[i];
      double chord = 0.5 * (vals[i - 1] + vals[i + 1]);
      if (mid > chord + 1e-9 * (1.0 + std::abs(chord))) return false;
    }
    return true;
  }

 private:
  double m_ = 2.0, s_ = 0.0;
  double a_ = 0.0, b_ = 0.0;
  bool pure_ = true;
};

enum class OrliczVerdict { Diverges, Converges };

/// Divergence of the critical-tail integral of t^{-p_crit} F(t) dt/t for the
/// power-log family: diverges iff m > p_crit, or m = p_crit with s <= 1.
inline OrliczVerdict orlicz_divergence_test(const OrliczGauge& gauge, Field::Setting setting,
                                            int n, int k) {
  const double p = critical_exponent(setting, n, k).p_crit.value();
  const double m = gauge.m();
  const double eps = 1e-9 * (1.0 + std::abs(p));
  if (m > p + eps) return OrliczVerdict::Diverges;
  if (m < p - eps) return OrliczVerdict::Converges;
  double s = gauge.pure_power() ? 0.0 : gauge.s();
  return (s <= 1.0 + 1e-12) ? OrliczVerdict::Diverges : OrliczVerdict::Converges;
}

// ---------------------------------------------------------------------------
// Sample-cached Luxemburg norm.

namespace detail {

struct CachedSamples {
  std::vector<double> g;  // |g| at the sample points
  std::vector<double> w;  // quadrature weights (stratum volume / count)
};

inline CachedSamples cache_samples(const std::function<double(const Vector&)>& g,
                                   const Domain& dom, int budget, std::uint64_t seed,
                                   const std::string& label) {
  auto strata = build_strata(dom, budget / 16);
  double total_vol = 0.0;
  for (const auto& s : strata) total_vol += s.volume;
  CachedSamples cs;
  std::size_t rejected = 0, drawn = 0;
  for (std::size_t si = 0; si < strata.size(); ++si) {
    const auto& s = strata[si];
    std::size_t n = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::llround(budget * s.volume / total_vol)));
    Rng rng(stream_seed(seed, label, si));
    std::vector<double> vals;
    vals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Vector x = s.draw(rng);
      double v = g(x);
      if (!std::isfinite(v)) {
        ++rejected;
        continue;
      }
      vals.push_back(std::abs(v));
    }
    drawn += n;
    if (vals.size() < 2) throw QuadratureError("cache_samples: stratum starved");
    double w = s.volume / vals.size();
    for (double v : vals) {
      cs.g.push_back(v);
      cs.w.push_back(w);
    }
  }
  if (rejected > 0 && static_cast<double>(rejected) > 1e-4 * static_cast<double>(drawn))
    throw QuadratureError("cache_samples: non-finite samples beyond rejection allowance");
  return cs;
}

}  // namespace detail

/// Luxemburg norm inf{lambda > 0 : integral F(|g|/lambda) <= 1}, evaluated on
/// one cached stratified sample so the modular is exactly monotone in lambda
/// and bisection is safe.
inline double luxemburg_norm(const std::function<double(const Vector&)>& g, const Domain& dom,
                             const OrliczGauge& gauge, int budget, std::uint64_t seed,
                             double rel_tol = 1e-6, const std::string& label = "luxemburg") {
  detail::CachedSamples cs = detail::cache_samples(g, dom, budget, seed, label);
  auto modular = [&](double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < cs.g.size(); ++i) acc += cs.w[i] * gauge(cs.g[i] / lambda);
    return acc;
  };
  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (modular(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200)
      throw QuadratureError("luxemburg_norm: bracket failure growing lambda (reached " +
                            std::to_string(hi) + ")");
  }
  if (lo == 0.0) {
    lo = hi;
    int shrink = 0;
    while (modular(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (++shrink > 300) return 0.0;  // modular <= 1 for every lambda: norm 0
    }
  }
  while (hi - lo > rel_tol * hi) {
    double mid = 0.5 * (lo + hi);
    if (modular(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

/// L^p norm from the identical cached sampling (shares `label` with
/// luxemburg_norm so that pure-power gauges reproduce it exactly).
inline double sampled_lp_norm(const std::function<double(const Vector&)>& g, const Domain& dom,
                              double p, int budget, std::uint64_t seed,
                              const std::string& label = "luxemburg") {
  detail::CachedSamples cs = detail::cache_samples(g, dom, budget, seed, label);
  double acc = 0.0;
  for (std::size_t i = 0; i < cs.g.size(); ++i) acc += cs.w[i] * std::pow(cs.g[i], p);
  return std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Divergence / decay classification of annulus profiles.

struct LogFitReport {
  double slope = 0.0;         // cumulative mass per unit |log r|
  double stderr_ = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double mass_flatness = 0.0;  // max relative deviation of masses from their mean
  std::string verdict;         // "log-divergent" or "not-log-divergent"
};

/// Least-squares fit of cumulative mass against |log r_inner|; log-divergent
/// iff the slope clears 3 standard errors and the per-annulus masses are flat
/// within 10%.
inline LogFitReport log_divergence_fit(const AnnulusProfile& prof) {
  std::vector<double> xs, ys, masses;
  for (const auto& b : prof.bins) {
    if (b.dropped) continue;
    if (b.stderr_ > 0.05 * std::max(std::abs(b.mass), 1e-300))
      throw QuadratureError("log_divergence_fit: annulus " + std::to_string(b.j) +
                            " has relative stderr above 5%");
    xs.push_back(std::log(1.0 / b.r_inner));
    ys.push_back(b.cumulative);
    masses.push_back(b.mass);
  }
  if (xs.size() < 4)
    throw QuadratureError("log_divergence_fit: need >= 4 usable annuli, have " +
                          std::to_string(xs.size()));
  LineFit fit = fit_line(xs, ys);
  double mean = 0.0;
  for (double m : masses) mean += m;
  mean /= masses.size();
  double flat = 0.0;
  for (double m : masses) flat = std::max(flat, std::abs(m - mean) / std::max(mean, 1e-300));
  LogFitReport rep;
  rep.slope = fit.slope;
  rep.stderr_ = fit.slope_stderr;
  rep.intercept = fit.intercept;
  rep.r2 = fit.r2;
  rep.mass_flatness = flat;
  bool log_div = fit.slope > 3.0 * fit.slope_stderr && flat <= 0.10;
  rep.verdict = log_div ? "log-divergent" : "not-log-divergent";
  return rep;
}

enum class Membership { Finite, Divergent, Inconclusive };

inline std::string membership_name(Membership m) {
  switch (m) {
    case Membership::Finite: return "finite";
    case Membership::Divergent: return "divergent";
    case Membership::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct MembershipReport {
  Membership verdict = Membership::Inconclusive;
  double decay_exponent = 0.0;   // masses m_j ~ 2^{-decay * j}
  double decay_stderr = 0.0;
  double per_annulus_ratio = 1.0;  // 2^{-decay}
  LogFitReport log_fit;
  AnnulusProfile profile;
};

/// Decide finite vs divergent from per-annulus decay: decaying masses mean
/// the full integral converges; flat-with-growing-cumulative or growing
/// masses mean divergence; otherwise inconclusive.
inline MembershipReport classify_membership(const AnnulusProfile& prof) {
  MembershipReport rep;
  rep.profile = prof;
  std::vector<double> xs, ys;
  for (const auto& b : prof.bins) {
    if (b.dropped) continue;
    xs.push_back(static_cast<double>(b.j));
    ys.push_back(std::log2(std::max(b.mass, 1e-300)));
  }
  if (xs.size() < 4) throw QuadratureError("classify_membership: need >= 4 usable annuli");
  LineFit decay = fit_line(xs, ys);
  rep.decay_exponent = -decay.slope;  // positive = decaying
  rep.decay_stderr = decay.slope_stderr;
  rep.per_annulus_ratio = std::pow(2.0, decay.slope);
  rep.log_fit = log_divergence_fit(prof);
  if (rep.log_fit.verdict == "log-divergent")
    rep.verdict = Membership::Divergent;
  else if (rep.decay_exponent > 3.0 * rep.decay_stderr)
    rep.verdict = Membership::Finite;
  else if (rep.decay_exponent < -3.0 * rep.decay_stderr)
    rep.verdict = Membership::Divergent;  // masses grow toward the singular set
  else
    rep.verdict = Membership::Inconclusive;
  return rep;
}

// ---------------------------------------------------------------------------
// Rescaling invariance.

/// w_rho(x) = rho^{-q} w(rho x) with jets scaled accordingly.
inline Field rescale_field(const Field& w, double rho, double q) {
  double vscale = std::pow(rho, -q);
  double gscale = std::pow(rho, 1.0 - q);
  double hscale = std::pow(rho, 2.0 - q);
  auto value = [w, rho, vscale](const Vector& x) { return vscale * w.raw((rho * x).eval()); };
  Field::JetFn jetfn;
  if (w.has_analytic_jets()) {
    jetfn = [w, rho, vscale, gscale, hscale](const Vector& x) {
      Jet2 j = w.jet((rho * x).eval(), DerivativeMode::Analytic);
      Jet2 out;
      out.value = vscale * j.value;
      out.grad = gscale * j.grad;
      out.hess = hscale * j.hess;
      return out;
    };
  }
  Domain dom = Domain::ball(w.domain().dim(), w.domain().scale() / rho);
  Field out = jetfn ? Field::analytic(w.name() + "_rescaled", dom, value, jetfn)
                    : Field::numeric(w.name() + "_rescaled", dom, value);
  if (w.singular_set().present) out = out.with_singular_set(w.singular_set());
  return out;
}

/// u_r(z, w) = r^{-q} u(r z, w): rescales only the first factor (the first
/// `first_real_dim` real coordinates).
inline Field rescale_first_factor(const Field& u, double r, double q, int first_real_dim) {
  double vscale = std::pow(r, -q);
  double gscale = std::pow(r, 1.0 - q);
  double hscale = std::pow(r, 2.0 - q);
  int m = first_real_dim;
  auto map = [r, m](const Vector& x) {
    Vector y = x;
    y.head(m) *= r;
    return y;
  };
  auto value = [u, map, vscale](const Vector& x) { return vscale * u.raw(map(x)); };
  Field::JetFn jetfn;
  if (u.has_analytic_jets()) {
    jetfn = [u, map, m, vscale, gscale, hscale](const Vector& x) {
      Jet2 j = u.jet(map(x), DerivativeMode::Analytic);
      int d = static_cast<int>(x.size());
      Jet2 out;
      out.value = vscale * j.value;
      out.grad = j.grad;
      out.grad.head(m) *= gscale;
      out.grad.tail(d - m) *= vscale;
      out.hess = j.hess;
      out.hess.topLeftCorner(m, m) *= hscale;
      out.hess.topRightCorner(m, d - m) *= gscale;
      out.hess.bottomLeftCorner(d - m, m) *= gscale;
      out.hess.bottomRightCorner(d - m, d - m) *= vscale;
      return out;
    };
  }
  if (u.domain().kind() != Domain::Kind::Product)
    throw std::invalid_argument("rescale_first_factor: field needs a product domain");
  std::vector<Domain> factors = u.domain().factors();
  factors[0] = Domain::ball(factors[0].dim(), factors[0].radius() / r);
  Domain dom = Domain::product(std::move(factors));
  Field out = jetfn ? Field::analytic(u.name() + "_zrescaled", dom, value, jetfn)
                    : Field::numeric(u.name() + "_zrescaled", dom, value);
  if (u.singular_set().present) out = out.with_singular_set(u.singular_set());
  if (u.setting() == Field::Setting::Complex)
    out = out.with_complex_split(u.split_m(), u.split_k());
  else if (u.split_m() > 0)
    out = out.with_real_split(u.split_m(), u.split_k());
  return out;
}

struct ScalingCheck {
  std::vector<double> radii;
  std::vector<double> direct, rescaled;
  double max_rel_deviation = 0.0;
};

/// Real rescaling invariance: the annulus mass of (Delta w)^p over B_{2r} \ B_r
/// equals r^{d + p(q-2)} times the unit-annulus mass of the rescaled field w_r.
/// The change-of-variables factor is 1 exactly at the invariant exponent
/// p = d/(2-q); carrying it keeps the identity exact for every p.
inline ScalingCheck scaling_invariance_real(const Field& w, double q, double p,
                                            const std::vector<double>& radii, int budget,
                                            std::uint64_t seed) {
  ScalingCheck out;
  out.radii = radii;
  const int d = w.domain().dim();
  auto mass_of = [&](const Field& f, double inner, double outer) {
    auto g = [&f, p](const Vector& x) {
      return std::pow(std::abs(f.jet(x).laplacian()), p);
    };
    return integrate_region(g, Domain::annulus(d, inner, outer), budget, seed, "scalecheck").value;
  };
  for (double r : radii) {
    if (2.0 * r > w.domain().scale() + 1e-12)
      throw std::invalid_argument("scaling_invariance_real: domain too small for radius " +
                                  std::to_string(r));
    double direct = mass_of(w, r, 2.0 * r);
    double resc = std::pow(r, d + p * (q - 2.0)) * mass_of(rescale_field(w, r, q), 1.0, 2.0);
    out.direct.push_back(direct);
    out.rescaled.push_back(resc);
    out.max_rel_deviation = std::max(
        out.max_rel_deviation, std::abs(direct - resc) / std::max(std::abs(resc), 1e-300));
  }
  return out;
}

/// Complex rescaling invariance: annulus mass of |D_z^2 u|^{n(n-k)/k} over
/// {r < |z| < 2r} x {|w| < 1} vs the rescaled field u_r on the unit annulus.
inline ScalingCheck scaling_invariance_complex(const Field& u, int n, int k,
                                               const std::vector<double>& radii, int budget,
                                               std::uint64_t seed) {
  if (u.domain().kind() != Domain::Kind::Product)
    throw std::invalid_argument("scaling_invariance_complex: field needs a product domain");
  ScalingCheck out;
  out.radii = radii;
  const double q = critical_exponent(Field::Setting::Complex, n, k).holder_q.value();
  const double p = critical_exponent(Field::Setting::Complex, n, k).p_crit.value();
  const int zdim = 2 * (n - k);
  const Domain wball = u.domain().factors()[1];
  auto mass_of = [&](const Field& f, double inner, double outer) {
    auto g = [&f, p](const Vector& x) {
      return std::pow(f.complex_jet(x).z_block_frobenius(), p);
    };
    std::vector<Domain> factors;
    factors.push_back(Domain::annulus(zdim, inner, outer));
    factors.push_back(wball);
    return integrate_region(g, Domain::product(std::move(factors)), budget, seed, "scalecheck")
        .value;
  };
  for (double r : radii) {
    double direct = mass_of(u, r, 2.0 * r);
    double resc = mass_of(rescale_first_factor(u, r, q, zdim), 1.0, 2.0);
    out.direct.push_back(direct);
    out.rescaled.push_back(resc);
    out.max_rel_deviation = std::max(
        out.max_rel_deviation, std::abs(direct - resc) / std::max(std::abs(resc), 1e-300));
  }
  return out;
}

}  // namespace mongelab
