#pragma once
// Geometric regions that fields live on: boxes, balls, annuli, and products
// of balls (the (x,y) / (z,w) split regions).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mongelab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

/// Surface area of the unit sphere S^{d-1} in R^d.
inline double unit_sphere_area(int d) {
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

class Domain {
 public:
  enum class Kind { Box, Ball, Annulus, Product };

  static Domain box(const Vector& lo, const Vector& hi) {
    if (lo.size() != hi.size() || lo.size() == 0)
      throw std::invalid_argument("Domain::box: bound size mismatch");
    for (int i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw std::invalid_argument("Domain::box: empty axis interval");
    Domain d;
    d.kind_ = Kind::Box;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
  }

  static Domain ball(const Vector& center, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("Domain::ball: radius must be positive");
    Domain d;
    d.kind_ = Kind::Ball;
    d.center_ = center;
    d.radius_ = radius;
    return d;
  }

  static Domain ball(int dim, double radius) { return ball(Vector::Zero(dim), radius); }

  static Domain annulus(const Vector& center, double inner, double outer) {
    if (!(inner > 0) || !(inner < outer))
      throw std::invalid_argument("Domain::annulus: need 0 < inner < outer");
    Domain d;
    d.kind_ = Kind::Annulus;
    d.center_ = center;
    d.inner_radius_ = inner;
    d.radius_ = outer;
    return d;
  }

  static Domain annulus(int dim, double inner, double outer) {
    return annulus(Vector::Zero(dim), inner, outer);
  }

  /// Product of ball/annulus factors, concatenated coordinates.
  static Domain product(std::vector<Domain> factors) {
    if (factors.size() < 2) throw std::invalid_argument("Domain::product: need >= 2 factors");
    for (const auto& f : factors)
      if (f.kind_ == Kind::Product || f.kind_ == Kind::Box)
        throw std::invalid_argument("Domain::product: factors must be balls or annuli");
    Domain d;
    d.kind_ = Kind::Product;
    d.factors_ = std::move(factors);
    return d;
  }

  /// Ball in R^m times ball in R^k, both centered at the origin.
  static Domain product_of_balls(int m, double rx, int k, double ry) {
    std::vector<Domain> f;
    f.push_back(ball(m, rx));
    f.push_back(ball(k, ry));
    return product(std::move(f));
  }

  Kind kind() const { return kind_; }

  int dim() const {
    switch (kind_) {
      case Kind::Box: return static_cast<int>(lo_.size());
      case Kind::Ball:
      case Kind::Annulus: return static_cast<int>(center_.size());
      case Kind::Product: {
        int d = 0;
        for (const auto& f : factors_) d += f.dim();
        return d;
      }
    }
    return 0;
  }

  double volume() const {
    switch (kind_) {
      case Kind::Box: return (hi_ - lo_).prod();
      case Kind::Ball: return unit_ball_volume(dim()) * std::pow(radius_, dim());
      case Kind::Annulus:
        return unit_ball_volume(dim()) *
               (std::pow(radius_, dim()) - std::pow(inner_radius_, dim()));
      case Kind::Product: {
        double v = 1.0;
        for (const auto& f : factors_) v *= f.volume();
        return v;
      }
    }
    return 0.0;
  }

  bool contains(const Vector& x, double slack = 1e-12) const {
    if (x.size() != dim()) return false;
    switch (kind_) {
      case Kind::Box:
        for (int i = 0; i < x.size(); ++i)
          if (x[i] < lo_[i] - slack || x[i] > hi_[i] + slack) return false;
        return true;
      case Kind::Ball: return (x - center_).norm() <= radius_ + slack;
      case Kind::Annulus: {
        double r = (x - center_).norm();
        return r >= inner_radius_ - slack && r <= radius_ + slack;
      }
      case Kind::Product: {
        int off = 0;
        for (const auto& f : factors_) {
          if (!f.contains(x.segment(off, f.dim()), slack)) return false;
          off += f.dim();
        }
        return true;
      }
    }
    return false;
  }

  /// Distance from an interior point to the boundary (non-negative inside).
  double boundary_distance(const Vector& x) const {
    switch (kind_) {
      case Kind::Box: {
        double d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < x.size(); ++i)
          d = std::min({d, x[i] - lo_[i], hi_[i] - x[i]});
        return d;
      }
      case Kind::Ball: return radius_ - (x - center_).norm();
      case Kind::Annulus: {
        double r = (x - center_).norm();
        return std::min(r - inner_radius_, radius_ - r);
      }
      case Kind::Product: {
        double d = std::numeric_limits<double>::infinity();
        int off = 0;
        for (const auto& f : factors_) {
          d = std::min(d, f.boundary_distance(x.segment(off, f.dim())));
          off += f.dim();
        }
        return d;
      }
    }
    return 0.0;
  }

  /// Characteristic radius (used for margins): ball radius, half the smallest
  /// box extent, or the smallest factor radius.
  double scale() const {
    switch (kind_) {
      case Kind::Box: return 0.5 * (hi_ - lo_).minCoeff();
      case Kind::Ball:
      case Kind::Annulus: return radius_;
      case Kind::Product: {
        double s = std::numeric_limits<double>::infinity();
        for (const auto& f : factors_) s = std::min(s, f.scale());
        return s;
      }
    }
    return 0.0;
  }

  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  double inner_radius() const { return inner_radius_; }
  const std::vector<Domain>& factors() const { return factors_; }

 private:
  Kind kind_ = Kind::Ball;
  Vector lo_, hi_;         // box
  Vector center_;          // ball / annulus
  double radius_ = 0.0;    // outer radius
  double inner_radius_ = 0.0;
  std::vector<Domain> factors_;
};

}  // namespace mongelab
