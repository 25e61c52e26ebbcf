#pragma once
// Proof engines as runnable probes: the annulus dichotomy with corpus
// calibration, slice profiles with the mean-value mass bound, the complex
// growth scan and barrier comparison, rescaled-slice consistency, and the
// end-to-end sharpness experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mongelab/convex.hpp"
#include "mongelab/domain.hpp"
#include "mongelab/field.hpp"
#include "mongelab/fit.hpp"
#include "mongelab/norms.hpp"
#include "mongelab/pogorelov.hpp"
#include "mongelab/quadrature.hpp"
#include "mongelab/rng.hpp"

namespace mongelab {

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Annulus dichotomy.

struct DichotomyReport {
  std::string field_name;
  double p = 0.0, eps = 0.0;
  double sup_unit_sphere = 0.0;  // sup over |x| = 1
  double annulus_mass = 0.0, annulus_stderr = 0.0;  // |D^2 w|^p over B_2 \ B_eps
  double inner_mass = 0.0, inner_stderr = 0.0;      // |D^2 w|^p over B_{2 eps}
  double annulus_ratio = 0.0;  // (annulus mass)^{1/p} / sup
  double inner_ratio = 0.0;    // (inner mass)^{1/p} / (eps^{n/p-2} sup)
  int branch = 1;              // 1 if annulus_ratio >= delta_emp else 2
};

/// Both branch ratios of the dichotomy by quadrature; `delta_emp` is the
/// corpus-calibrated threshold used only to label the branch taken.
inline DichotomyReport dichotomy_probe(const Field& w, double p, double eps, int budget = 20000,
                                       std::uint64_t seed = 17, double delta_emp = 0.0) {
  const int d = w.domain().dim();
  if (!(p > 0.5 * d))
    throw SingularityError("dichotomy_probe: requires p > n/2 (p = " + std::to_string(p) +
                           ", n = " + std::to_string(d) + ")");
  if (!(eps > 0.0 && eps < 1.0)) throw SingularityError("dichotomy_probe: eps must be in (0,1)");
  DichotomyReport rep;
  rep.field_name = w.name();
  rep.p = p;
  rep.eps = eps;
  rep.sup_unit_sphere = sphere_sup(w, 1.0, 512, 2, seed).value;
  if (!(rep.sup_unit_sphere > 0.0))
    throw SingularityError("dichotomy_probe: sup estimate on the unit sphere is not positive");
  auto g = [&](const Vector& x) -> double {
    try {
      return std::pow(w.jet(x).hess_frobenius(), p);
    } catch (const ExcisionTubeError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  IntegralEstimate outer =
      integrate_region(g, Domain::annulus(d, eps, 2.0), budget, seed, "dicho:outer");
  IntegralEstimate inner = integrate_region(g, Domain::ball(d, 2.0 * eps), budget, seed, "dicho:inner");
  rep.annulus_mass = outer.value;
  rep.annulus_stderr = outer.stderr_;
  rep.inner_mass = inner.value;
  rep.inner_stderr = inner.stderr_;
  rep.annulus_ratio = std::pow(std::max(outer.value, 0.0), 1.0 / p) / rep.sup_unit_sphere;
  rep.inner_ratio = std::pow(std::max(inner.value, 0.0), 1.0 / p) /
                    (std::pow(eps, d / p - 2.0) * rep.sup_unit_sphere);
  rep.branch = (rep.annulus_ratio >= delta_emp) ? 1 : 2;
  return rep;
}

struct DichotomyCorpus {
  std::vector<DichotomyReport> reports;
  double delta_emp = 0.0;  // min annulus ratio over the corpus
  double c0_emp = 0.0;     // min inner ratio over the corpus
  double min_inner_sigma = 0.0;  // min of inner_mass / inner_stderr
  bool all_pass = false;  // every member satisfies a branch with the calibrated constants
};

/// Corpus of `count` fields (built-in references plus mollified random convex
/// samples); the dichotomy constants are defined as corpus minima, so the
/// assertable content is their strict positivity.
inline DichotomyCorpus dichotomy_corpus(int count, int d, double p,
                                        const std::vector<double>& eps_list, int budget = 20000,
                                        std::uint64_t seed = 31, int pieces = 8) {
  std::vector<Field> corpus;
  corpus.push_back(builtin::paraboloid(d));
  corpus.push_back(builtin::squared_norm(d));
  corpus.push_back(builtin::power_norm(d, 2.0 - 2.0 / d));
  corpus.push_back(builtin::cone(d));
  while (static_cast<int>(corpus.size()) < count) {
    auto idx = static_cast<std::uint64_t>(corpus.size());
    ConvexSample s = random_convex(d, pieces, stream_seed(seed, "corpus", idx));
    corpus.push_back(s.mollified_field().renamed("convex_" + std::to_string(idx)));
  }

  DichotomyCorpus out;
  out.delta_emp = std::numeric_limits<double>::infinity();
  out.c0_emp = std::numeric_limits<double>::infinity();
  out.min_inner_sigma = std::numeric_limits<double>::infinity();
  for (const auto& w : corpus) {
    for (double eps : eps_list) {
      DichotomyReport rep = dichotomy_probe(w, p, eps, budget, seed);
      out.delta_emp = std::min(out.delta_emp, rep.annulus_ratio);
      out.c0_emp = std::min(out.c0_emp, rep.inner_ratio);
      if (rep.inner_stderr > 0.0)
        out.min_inner_sigma = std::min(out.min_inner_sigma, rep.inner_mass / rep.inner_stderr);
      out.reports.push_back(std::move(rep));
    }
  }
  out.all_pass = out.delta_emp > 0.0 && out.c0_emp > 0.0;
  for (auto& rep : out.reports) {
    rep.branch = (rep.annulus_ratio >= out.delta_emp) ? 1 : 2;
    double cover = std::max(rep.annulus_ratio / out.delta_emp, rep.inner_ratio / out.c0_emp);
    if (!(cover >= 1.0 - 1e-12)) out.all_pass = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slice profiles and the mean-value mass bound.

struct SliceProfile {
  Vector z0;                    // base slice point with |z0| = 1 (empty for synthetic profiles)
  int w_dim = 0;                // real dimension of the w-disc
  std::vector<Vector> w_grid;   // grid over |w| < 1
  std::vector<double> values;   // M(w) on the grid
  double submean_violation = 0.0;  // max over probes of M(w) - ball average
  double mass = 0.0, mass_stderr = 0.0;  // integral of M over |w| < 1
  int index_w0 = -1;            // argmax of M over the |w| <= w0_radius sub-grid
  double m_w0 = 0.0;
  double w0_radius = 0.25;
};

/// Build a slice profile from a plain function M on the unit w-disc: grid
/// values, sub-mean spot checks over balls of radius 1/2, and the total mass.
inline SliceProfile slice_profile_from(const std::function<double(const Vector&)>& M, int w_dim,
                                       double w0_radius = 0.25, int grid_n = 9, int budget = 20000,
                                       std::uint64_t seed = 19) {
  if (grid_n < 3) throw SingularityError("slice_profile_from: grid needs >= 3 points per axis");
  SliceProfile prof;
  prof.w_dim = w_dim;
  prof.w0_radius = w0_radius;

  std::vector<int> idx(w_dim, 0);
  const double ry = 0.97;  // lattice extent; membership is against the open unit disc
  while (true) {
    Vector w(w_dim);
    for (int a = 0; a < w_dim; ++a) w[a] = -ry + 2.0 * ry * idx[a] / (grid_n - 1);
    if (w.norm() < 1.0) {
      prof.w_grid.push_back(w);
      prof.values.push_back(M(w));
    }
    int carry = w_dim - 1;
    while (carry >= 0 && ++idx[carry] == grid_n) {
      idx[carry] = 0;
      --carry;
    }
    if (carry < 0) break;
  }

  for (std::size_t i = 0; i < prof.w_grid.size(); ++i) {
    const Vector& w = prof.w_grid[i];
    if (w.norm() > w0_radius) continue;
    if (prof.values[i] > prof.m_w0 || prof.index_w0 < 0) {
      prof.m_w0 = prof.values[i];
      prof.index_w0 = static_cast<int>(i);
    }
    // Sub-mean check: M(w) against its average over B_{1/2}(w) (inside the disc).
    Rng rng(stream_seed(seed, "submean", i));
    const int nsub = 512;
    double avg = 0.0;
    for (int s = 0; s < nsub; ++s) avg += M((w + rng.ball_point(w_dim) * 0.5).eval());
    avg /= nsub;
    prof.submean_violation = std::max(prof.submean_violation, prof.values[i] - avg);
  }

  IntegralEstimate est = integrate_region(M, Domain::ball(w_dim, 1.0), budget, seed, "slicemass");
  prof.mass = est.value;
  prof.mass_stderr = est.stderr_;
  return prof;
}

/// Slice profile of a complex-split field at scale r: M(w) = u_r(z0, w) with
/// u_r the q-homogeneous rescaling and z0 the first coordinate direction.
inline SliceProfile slice_profile(const Field& u, double r, double q, int grid_n = 9,
                                  int budget = 20000, std::uint64_t seed = 19) {
  if (u.split_m() <= 0) throw SingularityError("slice_profile: field has no factor split");
  const int zdim = (u.setting() == Field::Setting::Complex) ? 2 * u.split_m() : u.split_m();
  const int wdim = u.domain().dim() - zdim;
  Field ur = rescale_first_factor(u, r, q, zdim);
  Vector z0 = Vector::Zero(zdim);
  z0[0] = 1.0;
  auto M = [ur, z0, zdim, wdim](const Vector& w) {
    Vector v(zdim + wdim);
    v.head(zdim) = z0;
    v.tail(wdim) = w;
    return ur.raw(v);
  };
  SliceProfile prof = slice_profile_from(M, wdim, 0.25, grid_n, budget, seed);
  prof.z0 = z0;
  return prof;
}

struct MviReport {
  bool pass = false;
  double mass = 0.0;
  double bound = 0.0;       // |B_{3/4}| * M(w0)
  double ball_volume = 0.0;  // |B_{3/4}| in w-dimensions
  double m_w0 = 0.0;
};

/// Mean-value mass bound: integral of M over |w| < 1 must dominate
/// |B_{3/4}| * M(w0) since B_{3/4}(w0) fits inside the disc for |w0| < 1/4.
inline MviReport mvi_mass_bound(const SliceProfile& prof, double submean_tol = -1.0) {
  if (prof.index_w0 < 0) throw SingularityError("mvi_mass_bound: no certified w0 on the grid");
  if (submean_tol < 0.0) {
    double peak = 0.0;
    for (double v : prof.values) peak = std::max(peak, std::abs(v));
    submean_tol = 0.05 * std::max(peak, 1e-12);
  }
  if (prof.submean_violation > submean_tol)
    throw SingularityError("mvi_mass_bound: sub-mean violation " +
                           std::to_string(prof.submean_violation) + " exceeds tolerance");
  MviReport rep;
  rep.ball_volume = unit_ball_volume(prof.w_dim) * std::pow(0.75, prof.w_dim);
  rep.m_w0 = prof.m_w0;
  rep.bound = rep.ball_volume * prof.m_w0;
  rep.mass = prof.mass;
  rep.pass = rep.mass >= rep.bound - 3.0 * prof.mass_stderr;
  return rep;
}

// ---------------------------------------------------------------------------
// Complex growth scan.

struct GrowthScan {
  double exponent = 0.0, exponent_stderr = 0.0;
  double bound = 0.0;   // 2 - 2k/n
  double c_fit = 0.0;   // min over radii of value / r^bound
  bool psh_ok = true, det_ok = true;
  bool pass = false;    // scan dominates c_fit * r^bound with positive c_fit
  std::vector<double> abscissae, values;
};

/// sup over the |w| < 1/4 grid of sup over |z| = r, fitted log-log; the pass
/// criterion is positivity of the fitted constant against r^{2-2k/n}.
inline GrowthScan complex_growth_scan(const Field& u, double bound, const std::vector<double>& radii,
                                      int w_grid = 16, int sup_budget = 400,
                                      std::uint64_t seed = 23) {
  if (u.setting() != Field::Setting::Complex || u.split_m() <= 0)
    throw SingularityError("complex_growth_scan: needs a complex field with a (z, w) split");
  if (w_grid < 16) throw SingularityError("complex_growth_scan: w-grid needs >= 16 points per axis");
  if (radii.size() < 3) throw SingularityError("complex_growth_scan: need >= 3 radii");
  const int zdim = 2 * u.split_m();
  const int wdim = u.domain().dim() - zdim;

  std::vector<Vector> ws;
  const double rw = 0.25 * 0.999;
  std::vector<int> idx(wdim, 0);
  while (true) {
    Vector w(wdim);
    for (int a = 0; a < wdim; ++a) w[a] = -rw + 2.0 * rw * idx[a] / (w_grid - 1);
    if (w.norm() <= rw) ws.push_back(w);
    int carry = wdim - 1;
    while (carry >= 0 && ++idx[carry] == w_grid) {
      idx[carry] = 0;
      --carry;
    }
    if (carry < 0) break;
  }

  GrowthScan out;
  out.bound = bound;

  // Pointwise certificates: PSH (complex Hessian PSD) and det >= 1 samples.
  Rng rng(stream_seed(seed, "scan_cert", 0));
  for (int i = 0; i < 64; ++i) {
    Vector x(zdim + wdim);
    x.head(zdim) = rng.unit_vector(zdim) * (0.05 + 0.5 * rng.uniform());
    x.tail(wdim) = rng.ball_point(wdim) * 0.24;
    ComplexJet cj = u.complex_jet(x);
    if (cj.min_eigenvalue() < -1e-7) out.psh_ok = false;
    if (cj.det() < 1.0 - 1e-6) out.det_ok = false;
  }

  for (double r : radii) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& w : ws)
      best = std::max(best, sphere_sup(u, r, sup_budget, 3, seed, zdim, w).value);
    out.abscissae.push_back(r);
    out.values.push_back(best);
  }
  LineFit fit = fit_power_law(out.abscissae, out.values);
  out.exponent = fit.slope;
  out.exponent_stderr = fit.slope_stderr;
  out.c_fit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.c_fit = std::min(out.c_fit, out.values[i] / std::pow(out.abscissae[i], bound));
  out.pass = out.c_fit > 0.0 && out.psh_ok && out.det_ok;
  return out;
}

// ---------------------------------------------------------------------------
// Rescaled-slice consistency.

struct SliceConsistency {
  double p = 0.0, eps = 0.0;
  std::vector<double> radii, masses;
  double min_mass = 0.0;
  double flatness = 0.0;  // max/min - 1 across radii
  bool pass = false;      // positive and flat within 10%
};

/// Annulus mass of |D_z^2 u_r|^p over {eps < |z| < 2} x {|w| < 1} across
/// rescaling radii; homogeneity predicts an r-independent value.
inline SliceConsistency rescaled_slice_consistency(const Field& u, double q, double p,
                                                   const std::vector<double>& radii, double eps,
                                                   int budget = 20000, std::uint64_t seed = 37) {
  if (u.split_m() <= 0) throw SingularityError("rescaled_slice_consistency: needs a factor split");
  const int zdim = (u.setting() == Field::Setting::Complex) ? 2 * u.split_m() : u.split_m();
  const int wdim = u.domain().dim() - zdim;
  SliceConsistency out;
  out.p = p;
  out.eps = eps;
  for (double r : radii) {
    Field ur = rescale_first_factor(u, r, q, zdim);
    Domain region = Domain::product({Domain::annulus(zdim, eps, 2.0), Domain::ball(wdim, 1.0)});
    auto g = [&](const Vector& x) -> double {
      try {
        return std::pow(ur.complex_jet(x).z_block_frobenius(), p);
      } catch (const ExcisionTubeError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    IntegralEstimate est = integrate_region(g, region, budget, seed, "sliceconsistency");
    out.radii.push_back(r);
    out.masses.push_back(est.value);
  }
  double lo = *std::min_element(out.masses.begin(), out.masses.end());
  double hi = *std::max_element(out.masses.begin(), out.masses.end());
  out.min_mass = lo;
  out.flatness = (lo > 0.0) ? hi / lo - 1.0 : std::numeric_limits<double>::infinity();
  out.pass = lo > 0.0 && out.flatness <= 0.10;
  return out;
}

// ---------------------------------------------------------------------------
// Barrier comparison.

struct BarrierSpec {
  double h = 0.0, c = 0.0;
  int n = 0, k = 0;
  double r0 = 0.0;
  double t = 0.0;

  double a() const { return std::pow(h / c, -static_cast<double>(n) / (n - k)); }

  void validate() const {
    if (!(h > 0.0 && c > 0.0 && r0 > 0.0))
      throw SingularityError("BarrierSpec: h, c, r0 must be positive");
    if (n < 2 || k < 1 || k >= n) throw SingularityError("BarrierSpec: need n >= 2, 1 <= k < n");
    if (!(a() > 0.0)) throw SingularityError("BarrierSpec: coefficient a must be positive");
  }

  /// Q_t(z, w) = 2h(16|w|^2 + a|z|^2) + t on the split vector (z | w).
  double value(const Vector& x) const {
    const int zdim = 2 * (n - k);
    double z2 = x.head(zdim).squaredNorm();
    double w2 = x.tail(x.size() - zdim).squaredNorm();
    return 2.0 * h * (16.0 * w2 + a() * z2) + t;
  }
};

struct BarrierError : SingularityError {
  double gap = 0.0;
  Vector witness;
  BarrierError(double g, Vector w)
      : SingularityError("barrier_touch_check: boundary gap " + std::to_string(g) +
                         " is not positive (barrier hypothesis fails)"),
        gap(g),
        witness(std::move(w)) {}
};

struct BarrierReport {
  double boundary_gap = 0.0;
  Vector gap_witness;
  double t_touch = 0.0;  // max over the region of u - Q_0
  Vector touch_point;
  bool interior = false;  // touch point strictly inside the region
};

namespace detail {

/// Coordinate-wise golden-section polish of a scalar function around x.
template <typename F>
inline void coordinate_refine(const F& f, Vector& x, double& best, const Vector& lo,
                              const Vector& hi, int rounds = 3) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int round = 0; round < rounds; ++round) {
    for (int axis = 0; axis < x.size(); ++axis) {
      double a = lo[axis], b = hi[axis];
      auto along = [&](double s) {
        Vector y = x;
        y[axis] = s;
        return f(y);
      };
      double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
      double f1 = along(c1), f2 = along(c2);
      for (int it = 0; it < 60; ++it) {
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
      double s = 0.5 * (a + b), fs = along(s);
      if (fs > best) {
        best = fs;
        x[axis] = s;
      }
    }
  }
}

}  // namespace detail

/// Verify Q_0 > u on the boundary of {|z| < r0} x {|w| < 1/4}, then find the
/// touching shift t* = max (u - Q_0) over the region and its argmax.
inline BarrierReport barrier_touch_check(const Field& u, const BarrierSpec& spec, int budget = 20000,
                                         std::uint64_t seed = 29) {
  spec.validate();
  const int zdim = 2 * (spec.n - spec.k);
  const int wdim = 2 * spec.k;
  const int d = zdim + wdim;
  BarrierSpec q0 = spec;
  q0.t = 0.0;
  auto gap_at = [&](const Vector& x) { return q0.value(x) - u.raw(x); };

  // Boundary: the face {|z| = r0} and the face {|w| = 1/4}, each sampled with
  // the complementary factor both at its center (exact probes) and random.
  BarrierReport rep;
  rep.boundary_gap = std::numeric_limits<double>::infinity();
  Rng rng(stream_seed(seed, "barrier_boundary", 0));
  const int nb = std::max(64, budget / 4);
  auto consider_boundary = [&](const Vector& x) {
    double g = gap_at(x);
    if (g < rep.boundary_gap) {
      rep.boundary_gap = g;
      rep.gap_witness = x;
    }
  };
  for (int i = 0; i < nb; ++i) {
    Vector x(d);
    x.head(zdim) = spec.r0 * rng.unit_vector(zdim);
    x.tail(wdim) = (i % 4 == 0) ? Vector::Zero(wdim).eval() : (0.25 * rng.ball_point(wdim)).eval();
    consider_boundary(x);
    Vector y(d);
    y.head(zdim) = (i % 4 == 0) ? Vector::Zero(zdim).eval() : (spec.r0 * rng.ball_point(zdim)).eval();
    y.tail(wdim) = 0.25 * rng.unit_vector(wdim);
    consider_boundary(y);
  }
  if (!(rep.boundary_gap > 0.0)) throw BarrierError(rep.boundary_gap, rep.gap_witness);

  // Interior: maximize u - Q_0; the origin is always probed, then the sampled
  // argmax is polished coordinate-wise.
  auto excess = [&](const Vector& x) { return u.raw(x) - q0.value(x); };
  Vector best_x = Vector::Zero(d);
  double best = excess(best_x);
  Rng irng(stream_seed(seed, "barrier_interior", 0));
  for (int i = 0; i < budget; ++i) {
    Vector x(d);
    x.head(zdim) = spec.r0 * irng.ball_point(zdim);
    x.tail(wdim) = 0.25 * irng.ball_point(wdim);
    double v = excess(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  Vector lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    double r = (i < zdim) ? spec.r0 : 0.25;
    lo[i] = -r;
    hi[i] = r;
  }
  detail::coordinate_refine(excess, best_x, best, lo, hi);
  rep.t_touch = best;
  rep.touch_point = best_x;
  double zr = best_x.head(zdim).norm(), wr = best_x.tail(wdim).norm();
  rep.interior = zr < spec.r0 * (1.0 - 1e-3) && wr < 0.25 * (1.0 - 1e-3);
  return rep;
}

// ---------------------------------------------------------------------------
// Real slices.

/// Restriction u(., y0) to the first factor, with jets cut to the leading
/// block; the singular-set excision carries over.
inline Field restrict_to_first_factor(const Field& u, const Vector& y0) {
  if (u.domain().kind() != Domain::Kind::Product)
    throw SingularityError("restrict_to_first_factor: needs a product domain");
  const Domain fac = u.domain().factors().front();
  const int m = fac.dim();
  const int d = u.domain().dim();
  if (y0.size() != d - m)
    throw SingularityError("restrict_to_first_factor: y0 has the wrong dimension");
  auto embed = [m, d, y0](const Vector& x) {
    Vector v(d);
    v.head(m) = x;
    v.tail(d - m) = y0;
    return v;
  };
  auto value_fn = [u, embed](const Vector& x) { return u.raw(embed(x)); };
  auto jet_fn = [u, embed, m](const Vector& x) {
    Jet2 full = u.jet(embed(x));
    Jet2 out;
    out.value = full.value;
    out.grad = full.grad.head(m);
    out.hess = full.hess.topLeftCorner(m, m);
    return out;
  };
  Field slice = Field::analytic(u.name() + "_slice", fac, value_fn, jet_fn);
  if (u.singular_set().present)
    slice = slice.with_singular_set({true, std::min(u.singular_set().codim, m)});
  return slice;
}

// ---------------------------------------------------------------------------
// Sharpness experiments.

struct SharpnessRow {
  double multiplier = 0.0, p = 0.0;
  Membership verdict = Membership::Inconclusive;
  Membership expected = Membership::Inconclusive;
  bool expected_ok = false;
  double per_annulus_ratio = 0.0;
  double ratio_expected = 0.0;
  MembershipReport report;
};

struct SharpnessReport {
  ExampleSpec spec;
  CriticalExponents exponents;
  bool zero_set_ok = false;
  double zero_set_max_on = 0.0;   // max |u| over singular-set probes
  double zero_set_min_off = 0.0;  // min u over off-set probes
  GrowthScan growth;
  std::vector<SharpnessRow> rows;
  std::vector<double> slice_masses;  // real setting: per-slice cumulative masses at p_crit
  bool pass = false;
};

/// End-to-end sharpness run: build the example, confirm the singular set,
/// classify membership at each multiple of the critical exponent, fit the
/// growth exponent, and (real setting) integrate the per-slice masses.
inline SharpnessReport sharpness_experiment(const ExampleSpec& spec,
                                            const std::vector<double>& multipliers,
                                            MembershipOptions opt = {}) {
  SharpnessReport rep;
  rep.spec = spec;
  Field u = build_example(spec);
  const bool complex_setting = spec.setting == Field::Setting::Complex;
  rep.exponents = critical_exponent(
      complex_setting ? Field::Setting::Complex : Field::Setting::Real, spec.n, spec.k);
  const double p_crit = rep.exponents.p_crit.value();
  const double q = 2.0 - 2.0 * spec.k / spec.n;
  const int xdim = u.domain().factors().front().dim();
  const int ydim = u.domain().dim() - xdim;
  const double rx = u.domain().factors().front().radius();
  const double ry = u.domain().factors().back().radius();

  // Zero-set scan: u vanishes on {x = 0} and is positive off it.
  Rng rng(stream_seed(opt.seed, "zeroset", 0));
  rep.zero_set_max_on = 0.0;
  rep.zero_set_min_off = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 64; ++i) {
    Vector on(u.domain().dim());
    on.head(xdim).setZero();
    on.tail(ydim) = 0.9 * ry * rng.ball_point(ydim);
    rep.zero_set_max_on = std::max(rep.zero_set_max_on, std::abs(u.raw(on)));
    Vector off(u.domain().dim());
    off.head(xdim) = rng.unit_vector(xdim) * rx * (0.3 + 0.6 * rng.uniform());
    off.tail(ydim) = 0.9 * ry * rng.ball_point(ydim);
    rep.zero_set_min_off = std::min(rep.zero_set_min_off, u.raw(off));
  }
  rep.zero_set_ok = rep.zero_set_max_on <= 1e-12 && rep.zero_set_min_off > 1e-12;

  for (double mult : multipliers) {
    SharpnessRow row;
    row.multiplier = mult;
    row.p = mult * p_crit;
    row.report = sobolev_membership(spec, row.p, opt);
    row.verdict = row.report.verdict;
    row.expected = (mult < 1.0) ? Membership::Finite : Membership::Divergent;
    row.expected_ok = row.verdict == row.expected;
    row.per_annulus_ratio = row.report.per_annulus_ratio;
    row.ratio_expected = std::pow(2.0, (2.0 - q) * row.p - xdim);
    rep.rows.push_back(std::move(row));
  }

  const std::vector<double> radii = {1.0 / 2, 1.0 / 4, 1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  if (complex_setting) {
    rep.growth = complex_growth_scan(u, q, radii, 16, 400, opt.seed);
  } else {
    GrowthCheck g = growth_exponent_fit(u, q, radii, 16, 400, opt.seed);
    rep.growth.exponent = g.exponent;
    rep.growth.exponent_stderr = g.exponent_stderr;
    rep.growth.bound = g.bound;
    rep.growth.abscissae = g.abscissae;
    rep.growth.values = g.values;
    rep.growth.c_fit = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.values.size(); ++i)
      rep.growth.c_fit = std::min(rep.growth.c_fit, g.values[i] / std::pow(g.abscissae[i], q));
    rep.growth.pass = g.pass && rep.growth.c_fit > 0.0;
  }

  if (!complex_setting) {
    // Per-slice critical masses: restrict to {y = y0} and integrate the
    // Laplacian power over dyadic x-annuli.
    AnnulusScheme scheme;
    scheme.r_outer = (spec.family == ExampleSpec::Family::OdeExact) ? 0.125 : 0.0625;
    scheme.annuli = 6;
    scheme.budget = std::max(2000, opt.budget / 4);
    scheme.seed = opt.seed;
    for (int i = 0; i < 5; ++i) {
      Vector y0 = Vector::Zero(ydim);
      y0[0] = 0.9 * ry * (-1.0 + 0.5 * i);
      Field slice = restrict_to_first_factor(u, y0);
      AnnulusProfile prof = dyadic_annulus_profile(slice, DerivedQuantity::Laplacian, p_crit, scheme);
      rep.slice_masses.push_back(prof.bins.empty() ? 0.0 : prof.bins.back().cumulative);
    }
  }

  rep.pass = rep.zero_set_ok && rep.growth.pass;
  for (const auto& row : rep.rows) rep.pass = rep.pass && row.expected_ok;
  return rep;
}

}  // namespace mongelab
