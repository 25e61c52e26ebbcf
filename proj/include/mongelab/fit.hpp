#pragma once
// Ordinary least-squares line fits and log-log power-law fits.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mongelab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r2 = 0.0;
  int n = 0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  if (n < 2 || ys.size() != xs.size())
    throw std::invalid_argument("fit_line: need >= 2 matched points");
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0)) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += r * r;
  }
  fit.r2 = (syy > 0) ? 1.0 - ssr / syy : 1.0;
  if (n > 2) {
    double sigma2 = ssr / (n - 2);
    fit.slope_stderr = std::sqrt(sigma2 / sxx);
    fit.intercept_stderr = std::sqrt(sigma2 * (1.0 / n + mx * mx / sxx));
  }
  return fit;
}

/// Fit y = C x^e by least squares in log-log coordinates; returns the fit of
/// log y vs log x (slope = exponent).
inline LineFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0))
      throw std::invalid_argument("fit_power_law: needs positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  return fit_line(lx, ly);
}

}  // namespace mongelab
