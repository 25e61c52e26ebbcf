#pragma once
// Convex-analysis engine: max-of-affine random convex functions with a
// log-sum-exp mollified variant, the annulus mass bound, supporting planes,
// sections of convex functions, sub-level growth, singularity growth fits,
// and minimum-volume enclosing ellipsoids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "mongelab/domain.hpp"
#include "mongelab/field.hpp"
#include "mongelab/fit.hpp"
#include "mongelab/quadrature.hpp"
#include "mongelab/rng.hpp"

namespace mongelab {

struct ConvexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Random convex samples.

/// w(x) = max(0, max_i (a_i . x + b_i)); the zero affine piece is implicit,
/// all offsets satisfy b_i <= 0 with equality for at least one piece, so
/// w >= 0, w(0) = 0, and one ridge passes through the origin.
struct ConvexSample {
  int d = 0;
  std::vector<Vector> slopes;
  std::vector<double> offsets;

  double value(const Vector& x) const {
    double best = 0.0;
    for (std::size_t i = 0; i < slopes.size(); ++i)
      best = std::max(best, slopes[i].dot(x) + offsets[i]);
    return best;
  }

  /// Subgradient from the active piece (first in scan order on ties).
  Vector subgradient(const Vector& x) const {
    double best = 0.0;
    Vector g = Vector::Zero(d);
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      double v = slopes[i].dot(x) + offsets[i];
      if (v > best) {
        best = v;
        g = slopes[i];
      }
    }
    return g;
  }

  double sup_on_unit_sphere() const {
    double best = 0.0;
    for (std::size_t i = 0; i < slopes.size(); ++i)
      best = std::max(best, slopes[i].norm() + offsets[i]);
    return best;
  }

  /// Piecewise-linear field (Hessian zero a.e.; the distributional Laplacian
  /// lives on the ridges, use mollified_field for mass computations).
  Field to_field(double radius = 2.0) const {
    ConvexSample s = *this;
    auto value_fn = [s](const Vector& x) { return s.value(x); };
    auto jet_fn = [s](const Vector& x) {
      Jet2 j;
      j.value = s.value(x);
      j.grad = s.subgradient(x);
      j.hess = Matrix::Zero(s.d, s.d);
      return j;
    };
    return Field::analytic("convex_sample", Domain::ball(d, radius), value_fn, jet_fn);
  }

  /// Log-sum-exp smoothing with temperature tau: convex, >= w, <= w + tau
  /// log(pieces+1), with closed-form jets.
  Field mollified_field(double tau = 1e-2, double radius = 2.0) const {
    ConvexSample s = *this;
    auto lse = [s, tau](const Vector& x, Vector* grad, Matrix* hess) -> double {
      const std::size_t np = s.slopes.size();
      std::vector<double> v(np);
      double vmax = 0.0;  // zero piece
      for (std::size_t i = 0; i < np; ++i) {
        v[i] = s.slopes[i].dot(x) + s.offsets[i];
        vmax = std::max(vmax, v[i]);
      }
      double z = std::exp(-vmax / tau);  // zero piece weight
      std::vector<double> e(np);
      for (std::size_t i = 0; i < np; ++i) {
        e[i] = std::exp((v[i] - vmax) / tau);
        z += e[i];
      }
      double val = vmax + tau * std::log(z);
      if (grad) {
        Vector g = Vector::Zero(s.d);
        for (std::size_t i = 0; i < np; ++i) g += (e[i] / z) * s.slopes[i];
        *grad = g;
        if (hess) {
          Matrix H = Matrix::Zero(s.d, s.d);
          for (std::size_t i = 0; i < np; ++i)
            H += (e[i] / z) * (s.slopes[i] * s.slopes[i].transpose());
          H -= g * g.transpose();
          *hess = H / tau;
        }
      }
      return val;
    };
    auto value_fn = [lse](const Vector& x) { return lse(x, nullptr, nullptr); };
    auto jet_fn = [lse](const Vector& x) {
      Jet2 j;
      j.grad.resize(0);
      j.hess.resize(0, 0);
      Vector g;
      Matrix H;
      j.value = lse(x, &g, &H);
      j.grad = g;
      j.hess = H;
      return j;
    };
    return Field::analytic("convex_sample_lse", Domain::ball(d, radius), value_fn, jet_fn);
  }

  static ConvexSample single_piece(const Vector& slope) {
    ConvexSample s;
    s.d = static_cast<int>(slope.size());
    s.slopes.push_back(slope);
    s.offsets.push_back(0.0);
    return s;
  }
};

/// Isotropic random max-of-affine sample, normalized so that w(0) = 0 and
/// sup_{|x|=1} w = 1 (exact, via sup(a.x + b) = |a| + b on the unit sphere).
inline ConvexSample random_convex(int d, int pieces, std::uint64_t seed) {
  if (pieces < d + 1) throw ConvexError("random_convex: need pieces >= d + 1");
  Rng rng(stream_seed(seed, "random_convex", 0));
  for (int attempt = 0; attempt < 10; ++attempt) {
    ConvexSample s;
    s.d = d;
    double max_b = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < pieces; ++i) {
      s.slopes.push_back(rng.normal_vector(d));
      s.offsets.push_back(-0.5 * rng.uniform());
      max_b = std::max(max_b, s.offsets.back());
    }
    for (double& b : s.offsets) b -= max_b;  // pin one piece through the origin
    double norm = 0.0;
    for (int i = 0; i < pieces; ++i)
      norm = std::max(norm, s.slopes[i].norm() + s.offsets[i]);
    if (!(norm > 1e-8)) continue;  // degenerate draw, retry
    for (int i = 0; i < pieces; ++i) {
      s.slopes[i] /= norm;
      s.offsets[i] /= norm;
    }
    return s;
  }
  throw ConvexError("random_convex: degenerate draws exhausted retries");
}

// ---------------------------------------------------------------------------
// Annulus mass bound.

struct MassBoundReport {
  double mass = 0.0;
  double mass_stderr = 0.0;
  double bound = 0.0;  // proof-extracted c(d) = cap area / 4
  double sup_unit_sphere = 1.0;
  bool pass = false;
};

/// Quarter of the area of the polar cap {x in bd B_2 : x . nu >= 1}; the
/// value is rotation-invariant so no explicit argmax rotation is needed.
inline double annulus_mass_proof_bound(int d) {
  if (d < 2) throw ConvexError("annulus_mass_proof_bound: needs d >= 2");
  // cap area = area(S^{d-2}) * 2^{d-1} * int_0^{pi/3} sin^{d-2}(theta) dtheta
  const int steps = 2000;
  const double hi = M_PI / 3.0;
  double integral = 0.0;
  for (int i = 0; i < steps; ++i) {  // Simpson on each subinterval
    double a = hi * i / steps, b = hi * (i + 1) / steps;
    auto f = [d](double th) { return std::pow(std::sin(th), d - 2); };
    integral += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  double cap = unit_sphere_area(d - 1) * std::pow(2.0, d - 1) * integral;
  return 0.25 * cap;
}

/// Mass of Delta w over B_2 \ B_1 against the proof bound; `w` must be the
/// normalized convex object (sup over |x| = 1 equal to 1 up to mollification).
inline MassBoundReport annulus_mass_bound_check(const Field& w, int budget, std::uint64_t seed) {
  const int d = w.domain().dim();
  MassBoundReport rep;
  rep.bound = annulus_mass_proof_bound(d);
  auto g = [&w](const Vector& x) { return w.jet(x).laplacian(); };
  IntegralEstimate est = integrate_region(g, Domain::annulus(d, 1.0, 2.0), budget, seed, "massbound");
  rep.mass = est.value;
  rep.mass_stderr = est.stderr_;
  rep.sup_unit_sphere = sphere_sup(w, 1.0, 512, 2, seed).value;
  rep.pass = rep.mass >= rep.bound;
  return rep;
}

inline MassBoundReport annulus_mass_bound_check(const ConvexSample& w, int budget,
                                                std::uint64_t seed, double tau = 1e-2) {
  MassBoundReport rep = annulus_mass_bound_check(w.mollified_field(tau), budget, seed);
  rep.sup_unit_sphere = w.sup_on_unit_sphere();  // exact, pre-mollification
  return rep;
}

// ---------------------------------------------------------------------------
// Supporting planes and sections.

struct SupportingPlane {
  Vector base;
  Vector slope;
  double offset = 0.0;  // l(y) = slope . y + offset
  double min_gap = 0.0;  // min over certificate samples of w - l
  std::size_t samples = 0;

  double at(const Vector& y) const { return slope.dot(y) + offset; }
};

/// Supporting plane at x: gradient slope where available, zero-slope fallback
/// at singular points; certified by sampling w - l over the domain.
inline SupportingPlane supporting_plane(const Field& u, const Vector& x, int samples = 10000,
                                        std::uint64_t seed = 7) {
  std::vector<Vector> candidates;
  try {
    candidates.push_back(u.jet(x).grad);
  } catch (const FieldError&) {
    // fall through to the zero-slope candidate
  }
  candidates.push_back(Vector::Zero(x.size()));

  auto strata = detail::build_strata(u.domain(), samples / 16);
  double total_vol = 0.0;
  for (const auto& s : strata) total_vol += s.volume;
  const double ux = u.raw(x);

  std::string err;
  for (const auto& g : candidates) {
    double offset = ux - g.dot(x);
    double min_gap = 0.0;  // the base point itself realizes gap 0
    std::size_t used = 0;
    for (std::size_t si = 0; si < strata.size(); ++si) {
      std::size_t n = std::max<std::size_t>(
          4, static_cast<std::size_t>(std::llround(samples * strata[si].volume / total_vol)));
      Rng rng(stream_seed(seed, "supporting_plane", si));
      for (std::size_t i = 0; i < n; ++i) {
        Vector y = strata[si].draw(rng);
        min_gap = std::min(min_gap, u.raw(y) - (g.dot(y) + offset));
        ++used;
      }
    }
    if (min_gap >= -1e-9) {
      SupportingPlane p;
      p.base = x;
      p.slope = g;
      p.offset = offset;
      p.min_gap = min_gap;
      p.samples = used;
      return p;
    }
    err = "min gap " + std::to_string(min_gap);
  }
  throw ConvexError("supporting_plane: convexity certificate failed at base point (" + err + ")");
}

struct Section {
  Vector base;
  SupportingPlane plane;
  double h = 0.0;
  std::vector<Vector> members;
  double volume = 0.0, volume_stderr = 0.0;
  double diameter = 0.0;
  bool compactly_contained = true;
  bool empty = false;
  std::vector<Vector> boundary_witnesses;  // members within margin of the boundary
};

namespace detail {

/// Near-boundary probe points: per-factor and per-axis extreme points at
/// half-margin depth, with the other coordinates at the center.  These catch
/// measure-thin sections (such as tangent sections of the ansatz families,
/// whose zero segment reaches the boundary) that rejection sampling misses.
inline std::vector<Vector> boundary_probes(const Domain& dom, double margin) {
  std::vector<Vector> probes;
  const int d = dom.dim();
  switch (dom.kind()) {
    case Domain::Kind::Ball: {
      for (int i = 0; i < d; ++i) {
        for (double s : {1.0, -1.0}) {
          Vector x = Vector::Zero(d);
          x[i] = s * (dom.radius() - 0.5 * margin);
          probes.push_back(dom.center() + x);
        }
      }
      break;
    }
    case Domain::Kind::Box: {
      for (int i = 0; i < d; ++i) {
        for (double s : {1.0, -1.0}) {
          Vector x = 0.5 * (dom.lo() + dom.hi());
          x[i] = (s > 0) ? dom.hi()[i] - 0.5 * margin : dom.lo()[i] + 0.5 * margin;
          probes.push_back(x);
        }
      }
      break;
    }
    case Domain::Kind::Annulus: {
      for (int i = 0; i < d; ++i) {
        for (double s : {1.0, -1.0}) {
          for (double r : {dom.inner_radius() + 0.5 * margin, dom.radius() - 0.5 * margin}) {
            Vector x = Vector::Zero(d);
            x[i] = s * r;
            probes.push_back(dom.center() + x);
          }
        }
      }
      break;
    }
    case Domain::Kind::Product: {
      int off = 0;
      for (const auto& f : dom.factors()) {
        for (const auto& sub : boundary_probes(f, margin)) {
          Vector x = Vector::Zero(d);
          x.segment(off, f.dim()) = sub;
          probes.push_back(x);
        }
        off += f.dim();
      }
      break;
    }
  }
  return probes;
}

}  // namespace detail

/// Extract the section {u < l + h} over the whole domain by rejection
/// sampling plus deterministic near-boundary probes.
inline Section section_extract(const Field& u, const Vector& x, double h, int budget = 100000,
                               std::uint64_t seed = 7) {
  Section sec;
  sec.base = x;
  sec.plane = supporting_plane(u, x, std::min(budget, 20000), seed);
  sec.h = h;
  const Domain& dom = u.domain();
  auto member = [&](const Vector& y) { return u.raw(y) < sec.plane.at(y) + h; };

  auto strata = detail::build_strata(dom, budget / 16);
  double total_vol = 0.0;
  for (const auto& s : strata) total_vol += s.volume;
  const double margin = 1e-3 * dom.scale();

  double vol = 0.0, var = 0.0;
  for (std::size_t si = 0; si < strata.size(); ++si) {
    std::size_t n = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::llround(budget * strata[si].volume / total_vol)));
    Rng rng(stream_seed(seed, "section", si));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Vector y = strata[si].draw(rng);
      if (!member(y)) continue;
      ++hits;
      if (sec.members.size() < 50000) sec.members.push_back(y);
      if (dom.boundary_distance(y) < margin) {
        sec.compactly_contained = false;
        if (sec.boundary_witnesses.size() < 16) sec.boundary_witnesses.push_back(y);
      }
    }
    double p = static_cast<double>(hits) / n;
    vol += strata[si].volume * p;
    var += strata[si].volume * strata[si].volume * p * (1.0 - p) / n;
  }
  sec.volume = vol;
  sec.volume_stderr = std::sqrt(var);
  sec.empty = sec.members.empty();

  for (const auto& probe : detail::boundary_probes(dom, margin)) {
    if (member(probe)) {
      sec.compactly_contained = false;
      if (sec.boundary_witnesses.size() < 16) sec.boundary_witnesses.push_back(probe);
    }
  }

  // Diameter: farthest-pair sweeps over the member cloud.
  if (sec.members.size() >= 2) {
    Vector p = sec.members.front();
    for (int sweep = 0; sweep < 4; ++sweep) {
      double best = -1.0;
      Vector q = p;
      for (const auto& m : sec.members) {
        double dist = (m - p).norm();
        if (dist > best) {
          best = dist;
          q = m;
        }
      }
      sec.diameter = std::max(sec.diameter, best);
      p = q;
    }
  }
  return sec;
}

// ---------------------------------------------------------------------------
// Sub-level growth.

struct GrowthCheck {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::vector<double> abscissae, values;
};

namespace detail {

/// Largest t with u(t * dir) < h along the ray (u convex, u(0) = 0).
inline double ray_extent(const Field& u, const Vector& dir, double h) {
  double t_dom = 0.0, t_hi = u.domain().scale();
  // find the largest multiple staying inside the domain
  double lo = 0.0, hi = 2.0 * t_hi + 1.0;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (u.domain().contains((mid * dir).eval()))
      lo = mid;
    else
      hi = mid;
  }
  t_dom = lo;
  if (u.raw((t_dom * dir).eval()) < h) return t_dom;
  lo = 0.0;
  hi = t_dom;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (u.raw((mid * dir).eval()) < h)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace detail

/// Fit log |{u < h}| against log h; volumes are estimated inside an
/// anisotropic bounding box built from per-axis ray extents, so the
/// acceptance fraction stays height-independent even for segment-like
/// sub-level sets.
inline GrowthCheck sublevel_growth_check(const Field& u, const std::vector<double>& heights,
                                         int budget = 100000, std::uint64_t seed = 11) {
  if (heights.size() < 4) throw ConvexError("sublevel_growth_check: need >= 4 heights");
  const int d = u.domain().dim();
  GrowthCheck out;
  out.bound = 0.5 * d;
  for (double h : heights) {
    Vector lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
      Vector dir = Vector::Zero(d);
      dir[i] = 1.0;
      hi[i] = 1.05 * detail::ray_extent(u, dir, h);
      dir[i] = -1.0;
      lo[i] = -1.05 * detail::ray_extent(u, dir, h);
      if (!(hi[i] - lo[i] > 0)) throw ConvexError("sublevel_growth_check: empty sub-level set");
    }
    Domain box = Domain::box(lo, hi);
    auto g = [&](const Vector& y) -> double {
      return (u.domain().contains(y) && u.raw(y) < h) ? 1.0 : 0.0;
    };
    double vol = integrate_region(g, box, budget, seed, "sublevel").value;
    out.abscissae.push_back(h);
    out.values.push_back(vol);
  }
  LineFit fit = fit_power_law(out.abscissae, out.values);
  out.exponent = fit.slope;
  out.exponent_stderr = fit.slope_stderr;
  out.pass = out.exponent >= out.bound - 0.05;
  return out;
}

/// inf over the y-grid of sup over {|x| = r} of u, fitted as a power of r;
/// checks the singularity growth exponent against 2 - 2k/n.
inline GrowthCheck growth_exponent_fit(const Field& u, double exponent_bound,
                                       const std::vector<double>& radii, int y_grid = 16,
                                       int sup_budget = 400, std::uint64_t seed = 13) {
  if (!u.singular_set().present || u.split_m() <= 0)
    throw ConvexError("growth_exponent_fit: field has no singular-set split");
  if (y_grid < 16) throw ConvexError("growth_exponent_fit: y-grid needs >= 16 points per axis");
  const int d = u.domain().dim();
  const int m = (u.setting() == Field::Setting::Complex) ? 2 * u.split_m() : u.split_m();
  const int ky = d - m;
  const Domain yfac = u.domain().factors().back();

  // Cartesian y-grid clipped to the factor ball.
  std::vector<Vector> ys;
  double ry = yfac.radius() * 0.999;
  std::vector<int> idx(ky, 0);
  while (true) {
    Vector y(ky);
    for (int a = 0; a < ky; ++a) y[a] = -ry + 2.0 * ry * idx[a] / (y_grid - 1);
    if (y.norm() <= ry) ys.push_back(y);
    int carry = ky - 1;
    while (carry >= 0 && ++idx[carry] == y_grid) {
      idx[carry] = 0;
      --carry;
    }
    if (carry < 0) break;
  }

  GrowthCheck out;
  out.bound = exponent_bound;
  for (double r : radii) {
    double inf_sup = std::numeric_limits<double>::infinity();
    for (const auto& y : ys)
      inf_sup = std::min(inf_sup, sphere_sup(u, r, sup_budget, 3, seed, m, y).value);
    out.abscissae.push_back(r);
    out.values.push_back(inf_sup);
  }
  LineFit fit = fit_power_law(out.abscissae, out.values);
  out.exponent = fit.slope;
  out.exponent_stderr = fit.slope_stderr;
  out.pass = out.exponent <= exponent_bound + 0.03;
  return out;
}

// ---------------------------------------------------------------------------
// Minimum-volume enclosing ellipsoid (Khachiyan iteration).

struct DegenerateCloudError : ConvexError {
  Vector deficient_direction;
  explicit DegenerateCloudError(Vector dir)
      : ConvexError("john_ellipsoid: degenerate (flat) point cloud"),
        deficient_direction(std::move(dir)) {}
};

struct EllipsoidApprox {
  Vector center;
  Matrix shape;            // {y : (y-c)^T shape (y-c) <= 1} encloses the cloud
  double enclose_factor = 1.0;
  double enclosed_factor = 0.0;  // shrinking by dim gives the contained John ellipsoid

  double axis_ratio() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(shape);
    return std::sqrt(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff());
  }
};

inline EllipsoidApprox john_ellipsoid(const std::vector<Vector>& cloud, double tol = 1e-4,
                                      int max_iter = 200000) {
  if (cloud.empty()) throw ConvexError("john_ellipsoid: empty cloud");
  const int d = static_cast<int>(cloud.front().size());
  const int N = static_cast<int>(cloud.size());
  if (N < d + 1) throw ConvexError("john_ellipsoid: need >= d + 1 points");

  // Degeneracy scan: the cloud must span all d directions.
  Vector mean = Vector::Zero(d);
  for (const auto& p : cloud) mean += p;
  mean /= N;
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& p : cloud) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.eigenvalues().minCoeff() < 1e-10 * std::max(es.eigenvalues().maxCoeff(), 1e-30))
    throw DegenerateCloudError(es.eigenvectors().col(0));

  const int D = d + 1;
  Matrix Q(D, N);
  for (int i = 0; i < N; ++i) {
    Q.col(i).head(d) = cloud[i];
    Q(d, i) = 1.0;
  }
  Eigen::VectorXd u = Eigen::VectorXd::Constant(N, 1.0 / N);
  Matrix M = Matrix::Zero(D, D);
  for (int i = 0; i < N; ++i) M += u[i] * (Q.col(i) * Q.col(i).transpose());
  Matrix Minv = M.inverse();
  Eigen::VectorXd kappa(N);
  auto recompute_kappa = [&]() {
    for (int i = 0; i < N; ++i) kappa[i] = Q.col(i).dot(Minv * Q.col(i));
  };
  recompute_kappa();

  for (int iter = 0; iter < max_iter; ++iter) {
    int star = 0;
    double kmax = kappa.maxCoeff(&star);
    if (kmax <= D * (1.0 + tol)) break;
    double gamma = (kmax - D) / (D * (kmax - 1.0));
    Vector v = Minv * Q.col(star);
    double denom = 1.0 - gamma + gamma * kmax;
    Minv = (Minv - (gamma / denom) * (v * v.transpose())) / (1.0 - gamma);
    Eigen::VectorXd s = Q.transpose() * v;
    for (int i = 0; i < N; ++i)
      kappa[i] = (kappa[i] - gamma * s[i] * s[i] / denom) / (1.0 - gamma);
    u *= (1.0 - gamma);
    u[star] += gamma;
    if ((iter + 1) % 4096 == 0) {
      M.setZero();
      for (int i = 0; i < N; ++i) M += u[i] * (Q.col(i) * Q.col(i).transpose());
      Minv = M.inverse();
      recompute_kappa();
    }
  }

  EllipsoidApprox ell;
  ell.center = Vector::Zero(d);
  for (int i = 0; i < N; ++i) ell.center += u[i] * cloud[i];
  Matrix S = Matrix::Zero(d, d);
  for (int i = 0; i < N; ++i) S += u[i] * (cloud[i] * cloud[i].transpose());
  S -= ell.center * ell.center.transpose();
  ell.shape = S.inverse() / d;
  double beta = 0.0;
  for (const auto& p : cloud)
    beta = std::max(beta, (p - ell.center).dot(ell.shape * (p - ell.center)));
  if (beta > 0) ell.shape /= beta;  // exact enclosure
  ell.enclose_factor = 1.0;
  ell.enclosed_factor = 1.0 / d;
  return ell;
}

}  // namespace mongelab
