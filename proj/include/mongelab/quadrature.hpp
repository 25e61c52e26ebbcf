#pragma once
// Stratified Monte Carlo integration over balls, annuli, boxes, and products
// of radial factors.  Sampling is shape-then-scale: points are drawn in the
// unit-normalized factor and multiplied by the outer radius, so integrals over
// dyadically rescaled regions reuse bit-identical sample shapes (this makes
// exact rescaling identities cancel to rounding instead of Monte Carlo error).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mongelab/domain.hpp"
#include "mongelab/field.hpp"
#include "mongelab/rng.hpp"

namespace mongelab {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegralEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  double cutoff_radius = 0.0;  // inner cutoff actually used (annuli), else 0

  double relative_stderr() const {
    return stderr_ / std::max(std::abs(value), 1e-300);
  }
};

namespace detail {

// A stratum samples points as center + scale * shape, with shapes drawn in a
// normalized factor (outer radius 1) so that scaled regions are covariant.
struct Stratum {
  double volume = 0.0;
  std::function<Vector(Rng&)> draw;
};

inline void ball_strata(const Vector& center, double radius, int shells,
                        std::vector<Stratum>& out) {
  const int d = static_cast<int>(center.size());
  const double vol = unit_ball_volume(d) * std::pow(radius, d);
  for (int i = 0; i < shells; ++i) {
    // Equal-volume radial shells of the normalized unit ball.
    double a = std::pow(static_cast<double>(i) / shells, 1.0 / d);
    double b = std::pow(static_cast<double>(i + 1) / shells, 1.0 / d);
    Stratum s;
    s.volume = vol / shells;
    s.draw = [center, radius, d, a, b](Rng& rng) -> Vector {
      return center + radius * rng.shell_point(d, a, b);
    };
    out.push_back(std::move(s));
  }
}

inline void annulus_strata(const Vector& center, double inner, double outer, int shells,
                           std::vector<Stratum>& out) {
  const int d = static_cast<int>(center.size());
  const double ratio = inner / outer;  // exact for dyadic radii
  const double vol_unit = unit_ball_volume(d);
  for (int i = 0; i < shells; ++i) {
    // Equal-log-width shells of the normalized annulus {ratio <= |x| <= 1}.
    double a = ratio * std::pow(1.0 / ratio, static_cast<double>(i) / shells);
    double b = ratio * std::pow(1.0 / ratio, static_cast<double>(i + 1) / shells);
    Stratum s;
    s.volume = vol_unit * std::pow(outer, d) * (std::pow(b, d) - std::pow(a, d));
    s.draw = [center, outer, d, a, b](Rng& rng) -> Vector {
      return center + outer * rng.shell_point(d, a, b);
    };
    out.push_back(std::move(s));
  }
}

inline void box_stratum(const Vector& lo, const Vector& hi, std::vector<Stratum>& out) {
  Stratum s;
  s.volume = (hi - lo).prod();
  s.draw = [lo, hi](Rng& rng) -> Vector {
    Vector x(lo.size());
    for (int i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
    return x;
  };
  out.push_back(std::move(s));
}

inline std::vector<Stratum> build_strata(const Domain& dom, int max_strata) {
  std::vector<Stratum> out;
  max_strata = std::max(1, max_strata);
  switch (dom.kind()) {
    case Domain::Kind::Box:
      box_stratum(dom.lo(), dom.hi(), out);
      break;
    case Domain::Kind::Ball:
      ball_strata(dom.center(), dom.radius(), std::min(16, max_strata), out);
      break;
    case Domain::Kind::Annulus:
      annulus_strata(dom.center(), dom.inner_radius(), dom.radius(), std::min(8, max_strata),
                     out);
      break;
    case Domain::Kind::Product: {
      const auto& factors = dom.factors();
      int nf = static_cast<int>(factors.size());
      int per = std::max(1, static_cast<int>(std::floor(
                                std::pow(static_cast<double>(max_strata), 1.0 / nf))));
      std::vector<std::vector<Stratum>> parts(nf);
      for (int i = 0; i < nf; ++i) {
        if (factors[i].kind() == Domain::Kind::Ball)
          ball_strata(factors[i].center(), factors[i].radius(), std::min(8, per), parts[i]);
        else
          annulus_strata(factors[i].center(), factors[i].inner_radius(), factors[i].radius(),
                         std::min(8, per), parts[i]);
      }
      std::vector<int> dims(nf);
      for (int i = 0; i < nf; ++i) dims[i] = factors[i].dim();
      int total_dim = dom.dim();
      std::vector<std::size_t> idx(nf, 0);
      while (true) {
        Stratum s;
        s.volume = 1.0;
        std::vector<std::function<Vector(Rng&)>> draws(nf);
        for (int i = 0; i < nf; ++i) {
          s.volume *= parts[i][idx[i]].volume;
          draws[i] = parts[i][idx[i]].draw;
        }
        s.draw = [draws, dims, total_dim](Rng& rng) -> Vector {
          Vector x(total_dim);
          int off = 0;
          for (std::size_t i = 0; i < draws.size(); ++i) {
            x.segment(off, dims[i]) = draws[i](rng);
            off += dims[i];
          }
          return x;
        };
        out.push_back(std::move(s));
        int carry = nf - 1;
        while (carry >= 0 && ++idx[carry] == parts[carry].size()) {
          idx[carry] = 0;
          --carry;
        }
        if (carry < 0) break;
      }
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Stratified Monte Carlo estimate of the integral of `g` over `dom`.
/// Deterministic given (dom, budget, seed, label); single fixed-order
/// reduction.  Non-finite samples are dropped up to a 0.01% allowance.
inline IntegralEstimate integrate_region(const std::function<double(const Vector&)>& g,
                                         const Domain& dom, int budget, std::uint64_t seed,
                                         const std::string& label = "int") {
  if (budget < 16) throw QuadratureError("integrate_region: budget too small");
  auto strata = detail::build_strata(dom, budget / 16);
  double total_vol = 0.0;
  for (const auto& s : strata) total_vol += s.volume;
  if (!(total_vol > 0)) throw QuadratureError("integrate_region: empty region");

  IntegralEstimate est;
  est.cutoff_radius = (dom.kind() == Domain::Kind::Annulus) ? dom.inner_radius() : 0.0;
  double value = 0.0, variance = 0.0;
  std::size_t total_rejected = 0, total_drawn = 0;
  for (std::size_t si = 0; si < strata.size(); ++si) {
    const auto& s = strata[si];
    std::size_t n = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::llround(budget * s.volume / total_vol)));
    Rng rng(stream_seed(seed, label, si));
    // Welford accumulation: immune to the mean/second-moment cancellation that
    // would otherwise report a spurious spread for near-constant integrands.
    double mean = 0.0, m2 = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Vector x = s.draw(rng);
      double v = g(x);
      if (!std::isfinite(v)) {
        ++total_rejected;
        continue;
      }
      ++used;
      double delta = v - mean;
      mean += delta / used;
      m2 += delta * (v - mean);
    }
    total_drawn += n;
    if (used < 2) throw QuadratureError("integrate_region: stratum starved of finite samples");
    double var = m2 / (used - 1.0);
    value += s.volume * mean;
    variance += s.volume * s.volume * var / used;
    est.samples += used;
  }
  if (total_rejected > 0 &&
      static_cast<double>(total_rejected) > 1e-4 * static_cast<double>(total_drawn))
    throw QuadratureError("integrate_region: non-finite samples beyond rejection allowance");
  est.value = value;
  est.stderr_ = std::sqrt(variance);
  return est;
}

// ---------------------------------------------------------------------------
// Dyadic annulus profiles.

enum class DerivedQuantity { Laplacian, HessFrobenius, ZBlockHess };

inline std::string quantity_name(DerivedQuantity q) {
  switch (q) {
    case DerivedQuantity::Laplacian: return "laplacian";
    case DerivedQuantity::HessFrobenius: return "hess-frobenius";
    case DerivedQuantity::ZBlockHess: return "z-block-hessian";
  }
  return "?";
}

struct AnnulusScheme {
  double r_outer = 1.0;
  int annuli = 8;          // number of dyadic bins; radii r_outer * 2^{-j}
  int budget = 200000;     // samples per annulus
  std::uint64_t seed = 1;
};

struct AnnulusBin {
  int j = 0;
  double r_outer = 0.0, r_inner = 0.0;
  double mass = 0.0, stderr_ = 0.0;
  double cumulative = 0.0;
  bool dropped = false;  // annulus touched the excision tube
};

struct AnnulusProfile {
  std::string field_name, quantity;
  double power = 0.0;
  AnnulusScheme scheme;
  std::vector<AnnulusBin> bins;

  int usable() const {
    int c = 0;
    for (const auto& b : bins)
      if (!b.dropped) ++c;
    return c;
  }
};

/// Value of the derived quantity at a point (used as |quantity|^p integrand).
inline double derived_quantity(const Field& f, DerivedQuantity q, const Vector& x) {
  switch (q) {
    case DerivedQuantity::Laplacian: return f.jet(x).laplacian();
    case DerivedQuantity::HessFrobenius: return f.jet(x).hess_frobenius();
    case DerivedQuantity::ZBlockHess: return f.complex_jet(x).z_block_frobenius();
  }
  return 0.0;
}

/// Per-dyadic-annulus masses of |derived quantity|^p around the singular set
/// (or the origin).  For fields with a product split, the annuli live in the
/// first factor and the second factor is integrated in full.
inline AnnulusProfile dyadic_annulus_profile(const Field& f, DerivedQuantity q, double p,
                                             const AnnulusScheme& scheme) {
  if (scheme.annuli < 1) throw QuadratureError("dyadic_annulus_profile: need >= 1 annulus");
  AnnulusProfile prof;
  prof.field_name = f.name();
  prof.quantity = quantity_name(q);
  prof.power = p;
  prof.scheme = scheme;

  const bool product = f.domain().kind() == Domain::Kind::Product;
  const int first_dim = product ? f.domain().factors()[0].dim() : f.domain().dim();

  auto integrand = [&](const Vector& x) -> double {
    double v;
    try {
      v = derived_quantity(f, q, x);
    } catch (const ExcisionTubeError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return std::pow(std::abs(v), p);
  };
  // One label for the whole profile: bins at different scales then share
  // sample shapes, so homogeneous integrands give exactly flat masses.
  const std::string label = "annulus:" + prof.quantity;

  double cumulative = 0.0;
  for (int j = 0; j < scheme.annuli; ++j) {
    AnnulusBin bin;
    bin.j = j;
    bin.r_outer = scheme.r_outer * std::pow(2.0, -j);
    bin.r_inner = 0.5 * bin.r_outer;
    if (bin.r_inner < kExcisionRadius) {
      bin.dropped = true;
      prof.bins.push_back(bin);
      continue;
    }
    Domain region = [&]() {
      Domain ann = Domain::annulus(first_dim, bin.r_inner, bin.r_outer);
      if (!product) return ann;
      std::vector<Domain> factors;
      factors.push_back(ann);
      for (std::size_t i = 1; i < f.domain().factors().size(); ++i)
        factors.push_back(f.domain().factors()[i]);
      return Domain::product(std::move(factors));
    }();
    IntegralEstimate est = integrate_region(integrand, region, scheme.budget, scheme.seed, label);
    bin.mass = est.value;
    bin.stderr_ = est.stderr_;
    cumulative += est.value;
    bin.cumulative = cumulative;
    prof.bins.push_back(bin);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Sup over spheres.

struct SphereSup {
  double value = -std::numeric_limits<double>::infinity();
  Vector argmax;
};

/// Sup of `f` over the sphere |x_sub| = radius in the first `sub_dim`
/// coordinates with the remaining coordinates fixed at `complement`.  Uniform
/// sphere sampling followed by golden-section refinement along great circles.
inline SphereSup sphere_sup(const Field& f, double radius, int budget, int rounds,
                            std::uint64_t seed, int sub_dim = -1,
                            const Vector& complement = Vector()) {
  const int d = f.domain().dim();
  const int m = (sub_dim > 0) ? sub_dim : d;
  if (m < 1 || m > d) throw std::invalid_argument("sphere_sup: bad subspace dimension");
  if (m < d && complement.size() != d - m)
    throw std::invalid_argument("sphere_sup: complement size mismatch");

  auto assemble = [&](const Vector& xi) -> Vector {
    if (m == d) return radius * xi;
    Vector x(d);
    x.head(m) = radius * xi;
    x.tail(d - m) = complement;
    return x;
  };
  auto eval = [&](const Vector& xi) -> double { return f.raw(assemble(xi)); };

  Rng rng(stream_seed(seed, "sphere_sup:" + f.name(), 0));
  SphereSup best;
  Vector best_xi;
  if (m == 1) {
    // The 0-sphere has two points.
    for (double s : {1.0, -1.0}) {
      Vector xi(1);
      xi << s;
      double v = eval(xi);
      if (v > best.value) {
        best.value = v;
        best_xi = xi;
      }
    }
    best.argmax = assemble(best_xi);
    return best;
  }
  for (int i = 0; i < std::max(budget, 8); ++i) {
    Vector xi = rng.unit_vector(m);
    double v = eval(xi);
    if (v > best.value) {
      best.value = v;
      best_xi = xi;
    }
  }

  // Golden-section refinement along great circles through the incumbent.
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double window = M_PI / 4.0;
  for (int round = 0; round < rounds; ++round) {
    for (int axis = 0; axis < m; ++axis) {
      Vector t = Vector::Zero(m);
      t[axis] = 1.0;
      t -= t.dot(best_xi) * best_xi;
      double tn = t.norm();
      if (tn < 1e-12) continue;
      t /= tn;
      auto along = [&](double theta) {
        Vector xi = std::cos(theta) * best_xi + std::sin(theta) * t;
        return eval(xi);
      };
      double a = -window, b = window;
      double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
      double f1 = along(c1), f2 = along(c2);
      for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
          a = c1;
          c1 = c2;
          f1 = f2;
          c2 = a + gr * (b - a);
          f2 = along(c2);
        } else {
          b = c2;
          c2 = c1;
          f2 = f1;
          c1 = b - gr * (b - a);
          f1 = along(c1);
        }
      }
      double theta = 0.5 * (a + b);
      double v = along(theta);
      if (v > best.value) {
        best.value = v;
        best_xi = (std::cos(theta) * best_xi + std::sin(theta) * t).normalized();
      }
    }
    window *= 0.35;
  }
  best.argmax = assemble(best_xi);
  return best;
}

}  // namespace mongelab
