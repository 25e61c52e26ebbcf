#pragma once
// Scalar fields with second-order jets.  A Field bundles an evaluator, a
// domain, an optional singular-set descriptor, and optional closed-form jets;
// finite-difference jets (with one Richardson level) are always available.
// Complex Hessians are assembled from the real Hessian in interleaved
// coordinates: z_j = x_{2j} + i*x_{2j+1}.

#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mongelab/domain.hpp"

namespace mongelab {

/// Radius of the tube around singular sets inside which jets are refused.
constexpr double kExcisionRadius = 1e-5;

struct FieldError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OutsideDomainError : FieldError {
  using FieldError::FieldError;
};
struct ExcisionTubeError : FieldError {
  using FieldError::FieldError;
};
struct NonFiniteError : FieldError {
  using FieldError::FieldError;
};

/// The singular (minimum) set {x_0 = ... = x_{codim-1} = 0}: the first
/// `codim` ambient coordinates vanish.  Fields without singularities carry an
/// empty descriptor.
struct SingularSet {
  bool present = false;
  int codim = 0;

  static SingularSet none() { return {}; }
  static SingularSet subspace(int codim) { return {true, codim}; }

  double distance(const Vector& x) const {
    if (!present) return std::numeric_limits<double>::infinity();
    return x.head(codim).norm();
  }
};

struct Jet2 {
  double value = 0.0;
  Vector grad;
  Matrix hess;

  double laplacian() const { return hess.trace(); }
  double hess_frobenius() const { return hess.norm(); }
  double symmetry_defect() const { return (hess - hess.transpose()).norm(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hess + hess.transpose()));
    return es.eigenvalues().minCoeff();
  }
};

struct ComplexJet {
  double value = 0.0;
  Eigen::MatrixXcd hermitian;  // u_{z_j zbar_k}, n x n
  Matrix z_block;              // real Hessian restricted to the z coordinates
  double hermitian_defect = 0.0;

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian);
    return es.eigenvalues().minCoeff();
  }
  double det() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian);
    return es.eigenvalues().prod();
  }
  double z_block_frobenius() const { return z_block.norm(); }
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// Plain central-difference jet at an explicit step (no domain checks; the
/// evaluator is expected to extend smoothly across the stencil).
inline Jet2 central_difference_jet(const std::function<double(const Vector&)>& f,
                                   const Vector& x, double h) {
  const int d = static_cast<int>(x.size());
  Jet2 jet;
  jet.value = f(x);
  jet.grad = Vector::Zero(d);
  jet.hess = Matrix::Zero(d, d);
  std::vector<double> fp(d), fm(d);
  Vector y = x;
  for (int i = 0; i < d; ++i) {
    y[i] = x[i] + h;
    fp[i] = f(y);
    y[i] = x[i] - h;
    fm[i] = f(y);
    y[i] = x[i];
    jet.grad[i] = (fp[i] - fm[i]) / (2.0 * h);
    jet.hess(i, i) = (fp[i] - 2.0 * jet.value + fm[i]) / (h * h);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      y = x;
      y[i] += h; y[j] += h;
      double fpp = f(y);
      y[j] -= 2.0 * h;
      double fpm = f(y);
      y[i] -= 2.0 * h;
      double fmm = f(y);
      y[j] += 2.0 * h;
      double fmp = f(y);
      double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      jet.hess(i, j) = v;
      jet.hess(j, i) = v;
    }
  }
  return jet;
}

/// Central differences with one Richardson level: (4 J(h/2) - J(h)) / 3.
inline Jet2 richardson_jet(const std::function<double(const Vector&)>& f,
                           const Vector& x, double h) {
  Jet2 coarse = central_difference_jet(f, x, h);
  Jet2 fine = central_difference_jet(f, x, 0.5 * h);
  Jet2 jet;
  jet.value = fine.value;
  jet.grad = (4.0 * fine.grad - coarse.grad) / 3.0;
  jet.hess = (4.0 * fine.hess - coarse.hess) / 3.0;
  return jet;
}

class Field {
 public:
  enum class Setting { Real, Complex };
  using ValueFn = std::function<double(const Vector&)>;
  using JetFn = std::function<Jet2(const Vector&)>;

  Field() = default;

  /// Field with closed-form jets; default derivative mode Analytic.
  static Field analytic(std::string name, Domain domain, ValueFn value, JetFn jet) {
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->domain = std::move(domain);
    impl->value = std::move(value);
    impl->jet = std::move(jet);
    impl->mode = DerivativeMode::Analytic;
    return Field(std::move(impl));
  }

  /// Field with only an evaluator; jets are finite-difference.
  static Field numeric(std::string name, Domain domain, ValueFn value) {
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->domain = std::move(domain);
    impl->value = std::move(value);
    impl->mode = DerivativeMode::FiniteDifference;
    return Field(std::move(impl));
  }

  Field with_singular_set(SingularSet s) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->singular = s;
    return Field(std::move(impl));
  }

  /// Mark as complex with split (m, k) in complex dimensions (ambient 2(m+k)).
  Field with_complex_split(int m, int k) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->setting = Setting::Complex;
    impl->split_m = m;
    impl->split_k = k;
    return Field(std::move(impl));
  }

  /// Real product split (m, k) in real dimensions (ambient m + k).
  Field with_real_split(int m, int k) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->setting = Setting::Real;
    impl->split_m = m;
    impl->split_k = k;
    return Field(std::move(impl));
  }

  Field with_derivative_mode(DerivativeMode mode) const {
    auto impl = std::make_shared<Impl>(*impl_);
    if (mode == DerivativeMode::Analytic && !impl->jet)
      throw FieldError("field '" + impl->name + "' has no closed-form jets");
    impl->mode = mode;
    return Field(std::move(impl));
  }

  Field renamed(std::string name) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->name = std::move(name);
    return Field(std::move(impl));
  }

  bool valid() const { return static_cast<bool>(impl_); }
  const std::string& name() const { return impl_->name; }
  const Domain& domain() const { return impl_->domain; }
  Setting setting() const { return impl_->setting; }
  int split_m() const { return impl_->split_m; }
  int split_k() const { return impl_->split_k; }
  const SingularSet& singular_set() const { return impl_->singular; }
  bool has_analytic_jets() const { return static_cast<bool>(impl_->jet); }
  DerivativeMode derivative_mode() const { return impl_->mode; }

  double singular_distance(const Vector& x) const { return impl_->singular.distance(x); }

  /// Raw evaluation without domain checks (used by stencils and samplers that
  /// know where they are).
  double raw(const Vector& x) const { return impl_->value(x); }

  double value(const Vector& x) const {
    if (!impl_->domain.contains(x, 1e-9 * (1.0 + impl_->domain.scale())))
      throw OutsideDomainError("point outside domain of field '" + impl_->name + "'");
    double v = impl_->value(x);
    if (!std::isfinite(v))
      throw NonFiniteError("non-finite value of field '" + impl_->name + "'");
    return v;
  }

  /// Step used by finite-difference jets: scales with the distance to the
  /// singular set because the example Hessians blow up approaching it.
  double fd_step(const Vector& x) const {
    if (!impl_->singular.present) return 1e-3;
    return std::max(1e-4, 1e-2 * impl_->singular.distance(x));
  }

  Jet2 jet(const Vector& x) const { return jet(x, impl_->mode); }

  Jet2 jet(const Vector& x, DerivativeMode mode) const {
    if (!impl_->domain.contains(x, 1e-9 * (1.0 + impl_->domain.scale())))
      throw OutsideDomainError("jet request outside domain of field '" + impl_->name + "'");
    if (impl_->singular.present && impl_->singular.distance(x) < kExcisionRadius)
      throw ExcisionTubeError("jet request inside excision tube of field '" + impl_->name + "'");
    Jet2 jet;
    if (mode == DerivativeMode::Analytic) {
      if (!impl_->jet)
        throw FieldError("field '" + impl_->name + "' has no closed-form jets");
      jet = impl_->jet(x);
    } else {
      jet = richardson_jet(impl_->value, x, fd_step(x));
    }
    if (!std::isfinite(jet.value) || !jet.grad.allFinite() || !jet.hess.allFinite())
      throw NonFiniteError("non-finite jet of field '" + impl_->name + "'");
    return jet;
  }

  /// Complex Hessian via u_{z_j zbar_k} = (1/4)[(u_{x_j x_k} + u_{y_j y_k})
  /// + i (u_{x_j y_k} - u_{y_j x_k})] in interleaved coordinates.
  ComplexJet complex_jet(const Vector& x) const { return complex_jet(x, impl_->mode); }

  ComplexJet complex_jet(const Vector& x, DerivativeMode mode) const {
    const int d = static_cast<int>(x.size());
    if (d % 2 != 0)
      throw FieldError("complex jet needs even ambient dimension, got " + std::to_string(d));
    Jet2 real_jet = jet(x, mode);
    const int n = d / 2;
    ComplexJet cj;
    cj.value = real_jet.value;
    cj.hermitian.resize(n, n);
    const Matrix& H = real_jet.hess;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double re = 0.25 * (H(2 * j, 2 * k) + H(2 * j + 1, 2 * k + 1));
        double im = 0.25 * (H(2 * j, 2 * k + 1) - H(2 * j + 1, 2 * k));
        cj.hermitian(j, k) = std::complex<double>(re, im);
      }
    }
    cj.hermitian_defect = (cj.hermitian - cj.hermitian.adjoint()).norm();
    cj.hermitian = 0.5 * (cj.hermitian + cj.hermitian.adjoint()).eval();
    int zr = (impl_->split_m > 0) ? 2 * impl_->split_m : d;
    cj.z_block = H.topLeftCorner(zr, zr);
    return cj;
  }

 private:
  struct Impl {
    std::string name;
    Domain domain = Domain::ball(1, 1.0);
    ValueFn value;
    JetFn jet;
    SingularSet singular;
    Setting setting = Setting::Real;
    int split_m = 0, split_k = 0;
    DerivativeMode mode = DerivativeMode::FiniteDifference;
  };
  explicit Field(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct DetCertificate {
  double det = 0.0;
  double min_eigenvalue = 0.0;
  bool certified = false;  // convex (real) / PSH (complex) within tolerance
  double tolerance = 0.0;
};

/// Determinant and spectral certificate of the (real or complex) Hessian.
inline DetCertificate determinant_check(const Field& field, const Vector& x,
                                        Field::Setting setting, DerivativeMode mode) {
  DetCertificate cert;
  cert.tolerance = (mode == DerivativeMode::Analytic) ? 1e-8 : 1e-3;
  if (setting == Field::Setting::Real) {
    Jet2 jet = field.jet(x, mode);
    Matrix H = 0.5 * (jet.hess + jet.hess.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    cert.det = es.eigenvalues().prod();
    cert.min_eigenvalue = es.eigenvalues().minCoeff();
  } else {
    ComplexJet cj = field.complex_jet(x, mode);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cj.hermitian);
    cert.det = es.eigenvalues().prod();
    cert.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  cert.certified = cert.min_eigenvalue >= -cert.tolerance;
  return cert;
}

inline DetCertificate determinant_check(const Field& field, const Vector& x) {
  return determinant_check(field, x, field.setting(), field.derivative_mode());
}

// ---------------------------------------------------------------------------
// Built-in families.

namespace builtin {

/// |x|^2 / 2 on the ball of radius `radius`.
inline Field paraboloid(int d, double radius = 2.0) {
  auto value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  auto jet = [](const Vector& x) {
    Jet2 j;
    j.value = 0.5 * x.squaredNorm();
    j.grad = x;
    j.hess = Matrix::Identity(x.size(), x.size());
    return j;
  };
  return Field::analytic("paraboloid", Domain::ball(d, radius), value, jet);
}

/// |x|^2.
inline Field squared_norm(int d, double radius = 2.0) {
  auto value = [](const Vector& x) { return x.squaredNorm(); };
  auto jet = [](const Vector& x) {
    Jet2 j;
    j.value = x.squaredNorm();
    j.grad = 2.0 * x;
    j.hess = 2.0 * Matrix::Identity(x.size(), x.size());
    return j;
  };
  return Field::analytic("squared_norm", Domain::ball(d, radius), value, jet);
}

/// |x|^q with closed-form jets away from the origin; the origin is declared
/// singular when q < 2 (second derivatives blow up there).
inline Field power_norm(int d, double q, double radius = 2.0) {
  auto value = [q](const Vector& x) { return std::pow(x.norm(), q); };
  auto jet = [q](const Vector& x) {
    double r = x.norm();
    Jet2 j;
    j.value = std::pow(r, q);
    double rq2 = std::pow(r, q - 2.0);
    j.grad = q * rq2 * x;
    j.hess = q * rq2 * Matrix::Identity(x.size(), x.size()) +
             q * (q - 2.0) * std::pow(r, q - 4.0) * (x * x.transpose());
    return j;
  };
  std::ostringstream name;
  name << "power_norm_q" << q;
  Field f = Field::analytic(name.str(), Domain::ball(d, radius), value, jet);
  if (q < 2.0) f = f.with_singular_set(SingularSet::subspace(d));
  return f;
}

inline Field cone(int d, double radius = 2.0) {
  return power_norm(d, 1.0, radius).renamed("cone");
}

/// x_1^2 - x_2^2 in d = 2 (non-convex test case).
inline Field saddle(double radius = 2.0) {
  auto value = [](const Vector& x) { return x[0] * x[0] - x[1] * x[1]; };
  auto jet = [](const Vector& x) {
    Jet2 j;
    j.value = x[0] * x[0] - x[1] * x[1];
    j.grad = Vector(2);
    j.grad << 2.0 * x[0], -2.0 * x[1];
    j.hess = Matrix(2, 2);
    j.hess << 2.0, 0.0, 0.0, -2.0;
    return j;
  };
  return Field::analytic("saddle", Domain::ball(2, radius), value, jet);
}

inline Field linear(const Vector& a, double b, double radius = 2.0) {
  auto value = [a, b](const Vector& x) { return a.dot(x) + b; };
  auto jet = [a, b](const Vector& x) {
    Jet2 j;
    j.value = a.dot(x) + b;
    j.grad = a;
    j.hess = Matrix::Zero(a.size(), a.size());
    return j;
  };
  return Field::analytic("linear", Domain::ball(static_cast<int>(a.size()), radius), value, jet);
}

/// |z|^2 on C^n (ambient dimension 2n), complex Hessian = identity.
inline Field abs_z_squared(int n, double radius = 2.0) {
  auto value = [](const Vector& x) { return x.squaredNorm(); };
  auto jet = [](const Vector& x) {
    Jet2 j;
    j.value = x.squaredNorm();
    j.grad = 2.0 * x;
    j.hess = 2.0 * Matrix::Identity(x.size(), x.size());
    return j;
  };
  return Field::analytic("abs_z_squared", Domain::ball(2 * n, radius), value, jet)
      .with_complex_split(n, 0);
}

/// Re(z_1^2) on C^n: pluriharmonic, complex Hessian = 0.
inline Field re_z1_squared(int n, double radius = 2.0) {
  auto value = [](const Vector& x) { return x[0] * x[0] - x[1] * x[1]; };
  auto jet = [](const Vector& x) {
    int d = static_cast<int>(x.size());
    Jet2 j;
    j.value = x[0] * x[0] - x[1] * x[1];
    j.grad = Vector::Zero(d);
    j.grad[0] = 2.0 * x[0];
    j.grad[1] = -2.0 * x[1];
    j.hess = Matrix::Zero(d, d);
    j.hess(0, 0) = 2.0;
    j.hess(1, 1) = -2.0;
    return j;
  };
  return Field::analytic("re_z1_squared", Domain::ball(2 * n, radius), value, jet)
      .with_complex_split(n, 0);
}

/// |z_1|^4 on C^n: u_{z_1 zbar_1} = 4 |z_1|^2.
inline Field abs_z1_fourth(int n, double radius = 2.0) {
  auto value = [](const Vector& x) {
    double s = x[0] * x[0] + x[1] * x[1];
    return s * s;
  };
  auto jet = [](const Vector& x) {
    int d = static_cast<int>(x.size());
    double s = x[0] * x[0] + x[1] * x[1];
    Jet2 j;
    j.value = s * s;
    j.grad = Vector::Zero(d);
    j.grad[0] = 4.0 * s * x[0];
    j.grad[1] = 4.0 * s * x[1];
    j.hess = Matrix::Zero(d, d);
    j.hess(0, 0) = 4.0 * s + 8.0 * x[0] * x[0];
    j.hess(1, 1) = 4.0 * s + 8.0 * x[1] * x[1];
    j.hess(0, 1) = j.hess(1, 0) = 8.0 * x[0] * x[1];
    return j;
  };
  return Field::analytic("abs_z1_fourth", Domain::ball(2 * n, radius), value, jet)
      .with_complex_split(n, 0);
}

}  // namespace builtin

// ---------------------------------------------------------------------------
// Grid fields: tensor-product nodes over a box, multilinear interpolation for
// values, node-value differencing for jets.

struct GridField {
  int dim = 0;
  std::vector<int> counts;
  Vector lo, hi;
  Field::Setting setting = Field::Setting::Real;
  int split_m = 0, split_k = 0;
  std::vector<double> values;  // row-major, last axis fastest

  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (counts[axis] - 1); }

  std::size_t flat_index(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * counts[a] + idx[a];
    return f;
  }

  double at(const std::vector<int>& idx) const { return values[flat_index(idx)]; }

  double interpolate(const Vector& x) const {
    std::vector<int> base(dim);
    std::vector<double> frac(dim);
    for (int a = 0; a < dim; ++a) {
      double t = (x[a] - lo[a]) / spacing(a);
      int i = static_cast<int>(std::floor(t));
      i = std::min(std::max(i, 0), counts[a] - 2);
      base[a] = i;
      frac[a] = std::min(std::max(t - i, 0.0), 1.0);
    }
    double acc = 0.0;
    std::vector<int> idx(dim);
    for (int corner = 0; corner < (1 << dim); ++corner) {
      double w = 1.0;
      for (int a = 0; a < dim; ++a) {
        int bit = (corner >> a) & 1;
        idx[a] = base[a] + bit;
        w *= bit ? frac[a] : (1.0 - frac[a]);
      }
      if (w != 0.0) acc += w * at(idx);
    }
    return acc;
  }

  /// Jet by centered differencing of node values at the node nearest to x
  /// (clamped one node away from the boundary).
  Jet2 node_jet(const Vector& x) const {
    std::vector<int> c(dim);
    for (int a = 0; a < dim; ++a) {
      int i = static_cast<int>(std::lround((x[a] - lo[a]) / spacing(a)));
      c[a] = std::min(std::max(i, 1), counts[a] - 2);
    }
    Jet2 j;
    j.value = at(c);
    j.grad = Vector::Zero(dim);
    j.hess = Matrix::Zero(dim, dim);
    std::vector<int> idx = c;
    for (int a = 0; a < dim; ++a) {
      double ha = spacing(a);
      idx[a] = c[a] + 1;
      double fp = at(idx);
      idx[a] = c[a] - 1;
      double fm = at(idx);
      idx[a] = c[a];
      j.grad[a] = (fp - fm) / (2.0 * ha);
      j.hess(a, a) = (fp - 2.0 * j.value + fm) / (ha * ha);
    }
    for (int a = 0; a < dim; ++a) {
      for (int b = a + 1; b < dim; ++b) {
        idx = c;
        idx[a] = c[a] + 1; idx[b] = c[b] + 1;
        double fpp = at(idx);
        idx[b] = c[b] - 1;
        double fpm = at(idx);
        idx[a] = c[a] - 1;
        double fmm = at(idx);
        idx[b] = c[b] + 1;
        double fmp = at(idx);
        double v = (fpp - fpm - fmp + fmm) / (4.0 * spacing(a) * spacing(b));
        j.hess(a, b) = v;
        j.hess(b, a) = v;
      }
    }
    return j;
  }

  /// Sample a field over the box [lo, hi] with the given node counts.
  static GridField sample(const Field& f, const std::vector<int>& counts,
                          const Vector& lo, const Vector& hi) {
    GridField g;
    g.dim = static_cast<int>(counts.size());
    g.counts = counts;
    g.lo = lo;
    g.hi = hi;
    g.setting = f.setting();
    g.split_m = f.split_m();
    g.split_k = f.split_k();
    std::size_t total = 1;
    for (int c : counts) total *= c;
    g.values.resize(total);
    std::vector<int> idx(g.dim, 0);
    Vector x(g.dim);
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      for (int a = g.dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(rem % counts[a]);
        rem /= counts[a];
      }
      for (int a = 0; a < g.dim; ++a) x[a] = lo[a] + idx[a] * g.spacing(a);
      g.values[flat] = f.raw(x);
    }
    return g;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FieldError("cannot open grid file for writing: " + path);
    out << "mongelab-grid 1\n";
    out << "dim " << dim << "\n";
    out << "setting " << (setting == Field::Setting::Complex ? "complex" : "real") << "\n";
    if (split_m > 0) out << "split " << split_m << " " << split_k << "\n";
    out << "counts";
    for (int c : counts) out << " " << c;
    out << "\n";
    out << std::setprecision(17);
    for (int a = 0; a < dim; ++a) out << "bounds " << a << " " << lo[a] << " " << hi[a] << "\n";
    out << "values " << values.size() << "\n";
    for (double v : values) out << v << "\n";
  }

  static GridField load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FieldError("cannot open grid file: " + path);
    GridField g;
    std::string line;
    if (!std::getline(in, line) || line.rfind("mongelab-grid", 0) != 0)
      throw FieldError("bad grid file magic in " + path);
    std::size_t expected = 0;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key == "dim") {
        ls >> g.dim;
      } else if (key == "setting") {
        std::string s;
        ls >> s;
        g.setting = (s == "complex") ? Field::Setting::Complex : Field::Setting::Real;
      } else if (key == "split") {
        ls >> g.split_m >> g.split_k;
      } else if (key == "counts") {
        int c;
        while (ls >> c) g.counts.push_back(c);
      } else if (key == "bounds") {
        if (g.lo.size() == 0) {
          g.lo = Vector::Zero(g.dim);
          g.hi = Vector::Zero(g.dim);
        }
        int a;
        double l, h;
        ls >> a >> l >> h;
        g.lo[a] = l;
        g.hi[a] = h;
      } else if (key == "values") {
        ls >> expected;
        break;
      } else {
        throw FieldError("unknown grid header key '" + key + "' in " + path);
      }
    }
    g.values.reserve(expected);
    double v;
    while (in >> v) g.values.push_back(v);
    if (g.dim <= 0 || g.counts.size() != static_cast<std::size_t>(g.dim))
      throw FieldError("inconsistent grid header in " + path);
    if (g.values.size() != expected)
      throw FieldError("grid value count mismatch in " + path);
    return g;
  }

  Field to_field(std::string name, SingularSet s = SingularSet::none()) const {
    auto data = std::make_shared<GridField>(*this);
    Vector blo = lo, bhi = hi;
    auto value = [data](const Vector& x) { return data->interpolate(x); };
    auto jet = [data](const Vector& x) { return data->node_jet(x); };
    Field f = Field::analytic(std::move(name), Domain::box(blo, bhi), value, jet);
    if (s.present) f = f.with_singular_set(s);
    if (setting == Field::Setting::Complex)
      f = f.with_complex_split(split_m, split_k);
    else if (split_m > 0)
      f = f.with_real_split(split_m, split_k);
    return f;
  }
};

}  // namespace mongelab
