#pragma once
// Adaptive Dormand-Prince 5(4) initial-value solver.  Steps land exactly on
// requested output times; a guard predicate lets callers stop cleanly when the
// solution leaves its admissible region (used for profile blow-up detection).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mongelab/domain.hpp"

namespace mongelab {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-13;
  double h_max = 0.1;
  // Return false to reject the state as inadmissible (stops integration).
  std::function<bool(double, const Vector&)> guard;
};

struct OdeResult {
  std::vector<double> t;       // output times actually reached
  std::vector<Vector> y;       // states at those times
  std::vector<Vector> dydt;    // right-hand side at those times
  bool truncated = false;      // stopped before the last requested time
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Integrate dy/dt = rhs(t, y) from times.front() (where y = y0) through each
/// time in `times`, which must be strictly monotone.  Works in either time
/// direction.
template <typename Rhs>
OdeResult integrate_dopri5(Rhs&& rhs, const Vector& y0, const std::vector<double>& times,
                           const OdeOptions& opt = {}) {
  if (times.size() < 2) throw std::invalid_argument("integrate_dopri5: need >= 2 output times");
  const double dir = (times.back() > times.front()) ? 1.0 : -1.0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (dir * (times[i] - times[i - 1]) <= 0.0)
      throw std::invalid_argument("integrate_dopri5: output times not strictly monotone");

  // Dormand-Prince tableau.
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeResult res;
  double t = times.front();
  Vector y = y0;
  res.t.push_back(t);
  res.y.push_back(y);
  res.dydt.push_back(rhs(t, y));

  double h = dir * std::min(opt.h_init, opt.h_max);
  std::size_t target = 1;

  while (target < times.size()) {
    double remaining = times[target] - t;
    double h_free = h;  // step size the controller wanted, before output clamping
    if (std::abs(h) > std::abs(remaining)) h = remaining;

    Vector k1 = rhs(t, y);
    Vector k2 = rhs(t + h * a21, (y + h * (a21 * k1)).eval());
    Vector k3 = rhs(t + h * (3.0 / 10), (y + h * (a31 * k1 + a32 * k2)).eval());
    Vector k4 = rhs(t + h * (4.0 / 5), (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    Vector k5 = rhs(t + h * (8.0 / 9),
                    (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    Vector k6 =
        rhs(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    Vector ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vector k7 = rhs(t + h, ynew);
    Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double q = err[i] / sc;
      norm += q * q;
    }
    norm = std::sqrt(norm / y.size());

    bool finite = ynew.allFinite() && std::isfinite(norm);
    bool admissible = finite && (!opt.guard || opt.guard(t + h, ynew));

    if (finite && norm <= 1.0 && admissible) {
      t += h;
      y = ynew;
      ++res.steps;
      if (t == times[target] || std::abs(t - times[target]) < 1e-14 * (1.0 + std::abs(t))) {
        t = times[target];
        res.t.push_back(t);
        res.y.push_back(y);
        res.dydt.push_back(k7);
        ++target;
        h = h_free;  // do not let output clamping shrink subsequent steps
      }
      double factor = (norm > 0.0) ? 0.9 * std::pow(norm, -0.2) : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
    } else {
      ++res.rejected;
      if (!finite || !admissible) {
        h *= 0.5;
      } else {
        h *= std::clamp(0.9 * std::pow(norm, -0.2), 0.1, 1.0);
      }
    }
    if (std::abs(h) > opt.h_max) h = dir * opt.h_max;
    if (std::abs(h) < opt.h_min) {
      res.truncated = true;  // blow-up or inadmissible region ahead
      break;
    }
  }
  return res;
}

}  // namespace mongelab
