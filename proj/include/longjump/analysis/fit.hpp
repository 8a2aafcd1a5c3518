#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace longjump {

// Ordinary least squares summary for a scaling-exponent read-off.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  double residualMax = 0.0;
  std::size_t pointCount = 0;
};

inline FitResult fit_linear(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("fit inputs differ in length");
  if (x.size() < 3) throw std::invalid_argument("need at least three points");
  std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("x values are all equal");
  FitResult r;
  r.pointCount = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ssRes = 0.0, ssTot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double res = y[i] - (r.intercept + r.slope * x[i]);
    ssRes += res * res;
    ssTot += (y[i] - my) * (y[i] - my);
    r.residualMax = std::max(r.residualMax, std::abs(res));
  }
  r.r2 = ssTot > 0.0 ? 1.0 - ssRes / ssTot : 1.0;
  return r;
}

// least-squares line through (log x, log y); inputs must be positive
inline FitResult fit_loglog(const std::vector<double>& x,
                            const std::vector<double>& y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  if (x.size() != y.size())
    throw std::invalid_argument("fit inputs differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw std::invalid_argument("log-log fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_linear(lx, ly);
}

}  // namespace longjump
