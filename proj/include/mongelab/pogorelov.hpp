#pragma once
// The singular example families.  The ansatz u = |x'|^alpha f(x_n) with
// alpha = 2 - 2/n reduces det D^2 u = 1 to the profile ODE
//
//     (alpha - 1) f f'' - alpha (f')^2 = alpha^{1-n} f^{2-n},
//
// derived by block-determinant expansion of the ansatz Hessian (the radial
// powers of |x'| cancel exactly at this alpha).  The derivation is certified
// numerically two ways: finite-difference stencils on the stored trajectory,
// and finite-difference Hessian determinants of the assembled field.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mongelab/field.hpp"
#include "mongelab/norms.hpp"
#include "mongelab/ode.hpp"
#include "mongelab/quadrature.hpp"

namespace mongelab {

struct ProfileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class PogorelovProfile {
 public:
  int n = 3;
  double alpha = 4.0 / 3.0;
  double f0 = 1.0, fp0 = 0.0;
  double rho = 0.6;           // requested validity radius
  double valid_radius = 0.0;  // certified dense-output radius
  bool truncated = false;     // lost positivity/convexity before rho
  double h = 1.0 / 128.0;     // node spacing
  std::vector<double> t, f, fp, fpp;
  double residual_ode = 0.0;          // FD certificate of the reduced ODE
  double residual_consistency = 0.0;  // FD certificate that (f)' = fp

  double t_min() const { return t.front(); }
  double t_max() const { return t.back(); }

  double eval_f(double s) const { return hermite(s, f, fp, fpp); }
  double eval_fp(double s) const { return hermite_d1(s); }
  double eval_fpp(double s) const { return hermite_d2(s); }

 private:
  int bracket(double s) const {
    if (s < t_min() - 1e-12 || s > t_max() + 1e-12)
      throw ProfileError("profile evaluation outside stored interval");
    int i = static_cast<int>(std::floor((s - t.front()) / h));
    return std::min(std::max(i, 0), static_cast<int>(t.size()) - 2);
  }

  // Two-point quintic Hermite matching (f, f', f'') at both interval ends.
  static void basis(double s, double* H) {
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    H[0] = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    H[1] = s - 6 * s3 + 8 * s4 - 3 * s5;
    H[2] = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    H[3] = 10 * s3 - 15 * s4 + 6 * s5;
    H[4] = -4 * s3 + 7 * s4 - 3 * s5;
    H[5] = 0.5 * s3 - s4 + 0.5 * s5;
  }
  static void basis_d1(double s, double* H) {
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    H[0] = -30 * s2 + 60 * s3 - 30 * s4;
    H[1] = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    H[2] = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
    H[3] = 30 * s2 - 60 * s3 + 30 * s4;
    H[4] = -12 * s2 + 28 * s3 - 15 * s4;
    H[5] = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  }
  static void basis_d2(double s, double* H) {
    double s2 = s * s, s3 = s2 * s;
    H[0] = -60 * s + 180 * s2 - 120 * s3;
    H[1] = -36 * s + 96 * s2 - 60 * s3;
    H[2] = 1 - 9 * s + 18 * s2 - 10 * s3;
    H[3] = 60 * s - 180 * s2 + 120 * s3;
    H[4] = -24 * s + 84 * s2 - 60 * s3;
    H[5] = 3 * s - 12 * s2 + 10 * s3;
  }

  double combine(int i, double s, void (*bs)(double, double*), double hpow) const {
    double H[6];
    bs(s, H);
    double acc = H[0] * f[i] + H[1] * h * fp[i] + H[2] * h * h * fpp[i] + H[3] * f[i + 1] +
                 H[4] * h * fp[i + 1] + H[5] * h * h * fpp[i + 1];
    return acc / hpow;
  }

  double hermite(double x, const std::vector<double>&, const std::vector<double>&,
                 const std::vector<double>&) const {
    int i = bracket(x);
    return combine(i, (x - t[i]) / h, &basis, 1.0);
  }
  double hermite_d1(double x) const {
    int i = bracket(x);
    return combine(i, (x - t[i]) / h, &basis_d1, h);
  }
  double hermite_d2(double x) const {
    int i = bracket(x);
    return combine(i, (x - t[i]) / h, &basis_d2, h * h);
  }
};

namespace detail {

// 7-point sixth-order first-derivative stencil, accumulated in long double so
// the certificate is not polluted by summation roundoff.
inline double stencil_d1(const std::vector<double>& g, int j, double h) {
  long double acc = -static_cast<long double>(g[j - 3]) + 9.0L * g[j - 2] - 45.0L * g[j - 1] +
                    45.0L * g[j + 1] - 9.0L * g[j + 2] + g[j + 3];
  return static_cast<double>(acc / (60.0L * h));
}

}  // namespace detail

/// Solve the reduced profile ODE with f(0) = f0, f'(0) = fp0 out to |t| = rho
/// (plus three stencil-pad nodes each side).  If positivity fails earlier the
/// profile is truncated and valid_radius reports the reach actually achieved.
inline PogorelovProfile solve_profile_ode(int n, double f0 = 1.0, double fp0 = 0.0,
                                          double rho = 0.6, double node_h = 1.0 / 2048.0,
                                          double tol = 1e-13) {
  if (n < 3) throw ProfileError("solve_profile_ode: needs n >= 3");
  if (!(f0 > 0)) throw ProfileError("solve_profile_ode: needs f(0) > 0");
  if (!(rho > 0)) throw ProfileError("solve_profile_ode: needs rho > 0");

  PogorelovProfile prof;
  prof.n = n;
  prof.alpha = 2.0 - 2.0 / n;
  prof.f0 = f0;
  prof.fp0 = fp0;
  prof.rho = rho;
  prof.h = node_h;

  const double alpha = prof.alpha;
  const double c_rhs = std::pow(alpha, 1.0 - n);
  auto rhs = [alpha, c_rhs, n](double, const Vector& y) {
    Vector dy(2);
    dy[0] = y[1];
    dy[1] = (alpha * y[1] * y[1] + c_rhs * std::pow(y[0], 2.0 - n)) / ((alpha - 1.0) * y[0]);
    return dy;
  };

  const int side_nodes = static_cast<int>(std::ceil(rho / node_h)) + 3;
  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = 0.1 * tol;
  opt.h_init = 0.5 * node_h;
  opt.h_max = 0.05;
  opt.guard = [](double, const Vector& y) { return y[0] > 1e-6; };

  Vector y0(2);
  y0 << f0, fp0;
  std::vector<double> fwd_times(side_nodes + 1), bwd_times(side_nodes + 1);
  for (int i = 0; i <= side_nodes; ++i) {
    fwd_times[i] = i * node_h;
    bwd_times[i] = -i * node_h;
  }
  OdeResult fwd = integrate_dopri5(rhs, y0, fwd_times, opt);
  OdeResult bwd = integrate_dopri5(rhs, y0, bwd_times, opt);
  prof.truncated = fwd.truncated || bwd.truncated;

  const int nb = static_cast<int>(bwd.t.size());
  const int nf = static_cast<int>(fwd.t.size());
  prof.t.resize(nb + nf - 1);
  prof.f.resize(nb + nf - 1);
  prof.fp.resize(nb + nf - 1);
  prof.fpp.resize(nb + nf - 1);
  for (int i = 0; i < nb; ++i) {
    int idx = nb - 1 - i;
    prof.t[idx] = bwd.t[i];
    prof.f[idx] = bwd.y[i][0];
    prof.fp[idx] = bwd.y[i][1];
    prof.fpp[idx] = bwd.dydt[i][1];
  }
  for (int i = 1; i < nf; ++i) {
    int idx = nb - 1 + i;
    prof.t[idx] = fwd.t[i];
    prof.f[idx] = fwd.y[i][0];
    prof.fp[idx] = fwd.y[i][1];
    prof.fpp[idx] = fwd.dydt[i][1];
  }
  double reach = std::min(-prof.t.front(), prof.t.back());
  prof.valid_radius = std::min(rho, reach - 3.0 * node_h);
  if (prof.valid_radius <= 0)
    throw ProfileError("solve_profile_ode: profile lost positivity before any usable radius");

  // Certify the trajectory with finite differences: d/dt of the stored f must
  // match fp, and the reduced ODE must hold with f'' taken from d/dt of fp.
  for (int j = 3; j + 3 < static_cast<int>(prof.t.size()); ++j) {
    double d1f = detail::stencil_d1(prof.f, j, node_h);
    double d1fp = detail::stencil_d1(prof.fp, j, node_h);
    double res_c = std::abs(d1f - prof.fp[j]);
    double res_o = std::abs((alpha - 1.0) * prof.f[j] * d1fp -
                            alpha * prof.fp[j] * prof.fp[j] -
                            c_rhs * std::pow(prof.f[j], 2.0 - n));
    prof.residual_consistency = std::max(prof.residual_consistency, res_c);
    prof.residual_ode = std::max(prof.residual_ode, res_o);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Example specifications and builders.

struct ExampleSpec {
  enum class Family { OdeExact, PowerTimesQuadratic };
  Field::Setting setting = Field::Setting::Real;
  int n = 3;
  int k = 1;
  Family family = Family::OdeExact;
  double f0 = 1.0, fp0 = 0.0, rho = 0.6;  // ode-exact initial data / radius

  void validate() const {
    if (setting == Field::Setting::Real) {
      if (!(k > 0 && 2 * k < n))
        throw ProfileError("real example needs 0 < k < n/2");
      if (family == Family::OdeExact && (k != 1 || n < 3))
        throw ProfileError("ode-exact family needs k = 1 and n >= 3");
    } else {
      if (!(k > 0 && k < n)) throw ProfileError("complex example needs 0 < k < n");
      if (family == Family::OdeExact)
        throw ProfileError("complex examples use the power-times-quadratic family");
    }
  }
};

/// u(x', x_n) = |x'|^alpha f(x_n) on B_1^{n-1} x (-rho, rho).
inline Field build_ode_exact_field(std::shared_ptr<const PogorelovProfile> prof) {
  const int n = prof->n;
  const int m = n - 1;
  const double alpha = prof->alpha;
  auto value = [prof, m, alpha](const Vector& x) {
    double r = x.head(m).norm();
    return std::pow(r, alpha) * prof->eval_f(x[m]);
  };
  auto jet = [prof, m, alpha](const Vector& x) {
    double r = x.head(m).norm();
    double s = x[m];
    double fv = prof->eval_f(s), fpv = prof->eval_fp(s), fppv = prof->eval_fpp(s);
    double ra = std::pow(r, alpha);
    double ra2 = std::pow(r, alpha - 2.0);
    double ra4 = std::pow(r, alpha - 4.0);
    int d = m + 1;
    Jet2 j;
    j.value = ra * fv;
    j.grad = Vector::Zero(d);
    j.grad.head(m) = alpha * ra2 * fv * x.head(m);
    j.grad[m] = ra * fpv;
    j.hess = Matrix::Zero(d, d);
    j.hess.topLeftCorner(m, m) =
        alpha * fv * (ra2 * Matrix::Identity(m, m) +
                      (alpha - 2.0) * ra4 * (x.head(m) * x.head(m).transpose()));
    j.hess.block(0, m, m, 1) = alpha * ra2 * fpv * x.head(m);
    j.hess.block(m, 0, 1, m) = (alpha * ra2 * fpv * x.head(m)).transpose();
    j.hess(m, m) = ra * fppv;
    return j;
  };
  Domain dom = Domain::product({Domain::ball(m, 1.0), Domain::ball(1, prof->valid_radius)});
  std::string name = "pogorelov_n" + std::to_string(n);
  return Field::analytic(name, dom, value, jet)
      .with_singular_set(SingularSet::subspace(m))
      .with_real_split(m, 1);
}

/// u(x, y) = scale * |x|^q (1 + |y|^2) with x in R^m, y in R^kk; shared by the
/// real and complex power-times-quadratic families (complex uses real
/// dimensions m = 2(n-k), kk = 2k and a determinant-normalizing scale).
inline Field build_power_quadratic_field(int m, int kk, double q, double scale, double x_radius,
                                         double y_radius, const std::string& name) {
  auto value = [m, q, scale](const Vector& x) {
    double r = x.head(m).norm();
    double s = 1.0 + x.tail(x.size() - m).squaredNorm();
    return scale * std::pow(r, q) * s;
  };
  auto jet = [m, q, scale](const Vector& xy) {
    int d = static_cast<int>(xy.size());
    int kk2 = d - m;
    auto x = xy.head(m);
    auto y = xy.tail(kk2);
    double r = x.norm();
    double s = 1.0 + y.squaredNorm();
    double rq = std::pow(r, q);
    double rq2 = std::pow(r, q - 2.0);
    double rq4 = std::pow(r, q - 4.0);
    Jet2 j;
    j.value = scale * rq * s;
    j.grad = Vector::Zero(d);
    j.grad.head(m) = scale * q * rq2 * s * x;
    j.grad.tail(kk2) = scale * 2.0 * rq * y;
    j.hess = Matrix::Zero(d, d);
    j.hess.topLeftCorner(m, m) =
        scale * q * s * (rq2 * Matrix::Identity(m, m) + (q - 2.0) * rq4 * (x * x.transpose()));
    j.hess.topRightCorner(m, kk2) = scale * 2.0 * q * rq2 * (x * y.transpose());
    j.hess.bottomLeftCorner(kk2, m) = j.hess.topRightCorner(m, kk2).transpose();
    j.hess.bottomRightCorner(kk2, kk2) = scale * 2.0 * rq * Matrix::Identity(kk2, kk2);
    return j;
  };
  Domain dom = Domain::product({Domain::ball(m, x_radius), Domain::ball(kk, y_radius)});
  return Field::analytic(name, dom, value, jet).with_singular_set(SingularSet::subspace(m));
}

inline Field build_real_example(const ExampleSpec& spec) {
  spec.validate();
  if (spec.setting != Field::Setting::Real)
    throw ProfileError("build_real_example: spec is complex");
  if (spec.family == ExampleSpec::Family::OdeExact) {
    auto prof = std::make_shared<PogorelovProfile>(
        solve_profile_ode(spec.n, spec.f0, spec.fp0, spec.rho));
    return build_ode_exact_field(std::move(prof));
  }
  const double q = 2.0 - 2.0 * spec.k / spec.n;
  // The x'x' curvature along x turns negative once |y|^2 > (q-1)/(q+1); keep
  // the y-ball at half that radius so the convexity certificate has margin.
  const double y_max = 0.5 * std::sqrt((q - 1.0) / (q + 1.0));
  std::string name = "ptq_real_n" + std::to_string(spec.n) + "k" + std::to_string(spec.k);
  return build_power_quadratic_field(spec.n - spec.k, spec.k, q, 1.0, 1.0, y_max, name)
      .with_real_split(spec.n - spec.k, spec.k);
}

inline Field build_complex_example(const ExampleSpec& spec) {
  spec.validate();
  if (spec.setting != Field::Setting::Complex)
    throw ProfileError("build_complex_example: spec is real");
  const int n = spec.n, k = spec.k;
  const double q = 2.0 - 2.0 * k / n;
  // Normalization making det of the complex Hessian equal (1+|w|^2)^{n-k-1},
  // hence >= 1 on the whole domain.
  const double scale = std::pow(2.0 / q, (n - k + 1.0) / n);
  std::string name = "blocki_n" + std::to_string(n) + "k" + std::to_string(k);
  return build_power_quadratic_field(2 * (n - k), 2 * k, q, scale, 1.0, 1.0, name)
      .with_complex_split(n - k, k);
}

inline Field build_example(const ExampleSpec& spec) {
  return (spec.setting == Field::Setting::Real) ? build_real_example(spec)
                                                : build_complex_example(spec);
}

// ---------------------------------------------------------------------------
// Sobolev membership.

struct MembershipOptions {
  double r_outer = -1.0;  // <= 0: per-family default
  int annuli = 8;
  int budget = 50000;
  std::uint64_t seed = 20260823;
};

/// Dyadic-annulus evidence for u in W^{2,p} near the singular set: integrates
/// (Delta u)^p (real) or |D_z^2 u|^p (complex) over dyadic annuli and
/// classifies decay vs log-divergence.
inline MembershipReport sobolev_membership(const ExampleSpec& spec, double p,
                                           MembershipOptions opt = {}) {
  spec.validate();
  Field u = build_example(spec);
  double r_outer = opt.r_outer;
  if (r_outer <= 0) {
    if (spec.setting == Field::Setting::Complex)
      r_outer = 0.5;
    else if (spec.family == ExampleSpec::Family::OdeExact)
      r_outer = 1.0 / 8.0;
    else
      r_outer = 1.0 / 16.0;  // quadratic factor pollutes flatness at larger radii
  }
  AnnulusScheme scheme;
  scheme.r_outer = r_outer;
  scheme.annuli = opt.annuli;
  scheme.budget = opt.budget;
  scheme.seed = opt.seed;
  DerivedQuantity quantity = (spec.setting == Field::Setting::Complex)
                                 ? DerivedQuantity::ZBlockHess
                                 : DerivedQuantity::Laplacian;
  AnnulusProfile prof = dyadic_annulus_profile(u, quantity, p, scheme);
  return classify_membership(prof);
}

}  // namespace mongelab
