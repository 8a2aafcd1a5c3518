#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "longjump/geometry/geometry.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/kernel/fft.hpp"
#include "longjump/measure/measure.hpp"
#include "longjump/util/checked.hpp"
#include "longjump/util/rng.hpp"

namespace longjump {

// Energy of a finitely supported function under the step law:
//   E(f) = 1/2 sum_{x,z} (f(z) - f(x))^2 mu(x^{-1} z),
// split into pairs inside the support plus the exact escape term for the
// mass leading outside it.
inline double dirichlet_form(const Group& G, const Measure& mu,
                             const std::vector<std::pair<Element, double>>& f) {
  double e = 0.0;
  for (const auto& [x, fx] : f) {
    double inSum = 0.0;
    for (const auto& [z, fz] : f) {
      double w = mu.pmf(G.mul(G.inv(x), z));
      inSum += w;
      e += 0.5 * (fz - fx) * (fz - fx) * w;
    }
    e += fx * fx * std::max(0.0, 1.0 - inSum);
  }
  return e;
}

// Bottom of the spectrum of I - P on a quasi-norm ball, where P is the step
// operator killed outside the ball.
struct DirichletEigenvalue {
  double lambda = 0.0;
  double residual = 0.0;
  u64 iterations = 0;
  bool converged = false;
  std::size_t ballSize = 0;
};

namespace detail {

// power iteration on A = (I + P)/2, whose spectrum sits in (0, 1) so the
// top eigenvalue is always the dominant one; reports lambda = 2 (1 - rho_A)
template <typename MatVec>
DirichletEigenvalue power_iterate(std::size_t L, MatVec&& apply, u64 maxIters,
                                  double tol) {
  std::vector<double> v(L, 1.0 / std::sqrt(static_cast<double>(L)));
  std::vector<double> u(L, 0.0);
  DirichletEigenvalue out;
  out.ballSize = L;
  double rho = 0.0;
  for (u64 it = 1; it <= maxIters; ++it) {
    apply(v, u);  // u = P v
    for (std::size_t i = 0; i < L; ++i) u[i] = 0.5 * (v[i] + u[i]);
    rho = 0.0;
    for (std::size_t i = 0; i < L; ++i) rho += v[i] * u[i];
    double res2 = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      double d = u[i] - rho * v[i];
      res2 += d * d;
    }
    double res = std::sqrt(res2);
    out.iterations = it;
    out.residual = 2.0 * res;  // error scale for lambda = 2 (1 - rho)
    if (res <= tol * std::max(1.0 - rho, 1e-15)) {
      out.converged = true;
      break;
    }
    double norm = 0.0;
    for (double w : u) norm += w * w;
    norm = std::sqrt(norm);
    if (norm <= 0.0) throw std::runtime_error("power iteration collapsed");
    for (std::size_t i = 0; i < L; ++i) v[i] = u[i] / norm;
  }
  out.lambda = 2.0 * (1.0 - rho);
  return out;
}

}  // namespace detail

// rawRadius is in the quasi-norm's own scale; callers working on a rescaled
// radius convert first.  The integer line uses a Toeplitz fast multiply;
// other groups build the dense kernel matrix.
inline DirichletEigenvalue dirichlet_eigenvalue(const Group& G,
                                                const Measure& mu,
                                                const AdaptedGeometry& geom,
                                                double rawRadius,
                                                u64 maxIters = 300000,
                                                double tol = 1e-6) {
  auto ball = geom.ball_elements(rawRadius);
  std::sort(ball.begin(), ball.end());
  std::size_t L = ball.size();
  if (L == 0) throw std::logic_error("empty ball");
  if (L == 1) {
    DirichletEigenvalue out;
    out.lambda = 1.0 - mu.pmf(G.identity());
    out.converged = true;
    out.ballSize = 1;
    return out;
  }

  bool line = G.kind() == GroupKind::ZK && G.coords() == 1;
  if (line && L > 256) {
    // offsets are contiguous [-B, B]; P v is a correlation with the even
    // one-step row, i.e. one circular convolution per iteration
    i64 B = ball.back()[0];
    if (static_cast<i64>(L) != 2 * B + 1)
      throw std::logic_error("line ball is not a contiguous range");
    std::size_t rowLen = static_cast<std::size_t>(4 * B + 1);
    std::vector<double> row(rowLen, 0.0);
    for (i64 d = -2 * B; d <= 2 * B; ++d)
      row[static_cast<std::size_t>(d + 2 * B)] = mu.pmf(make_element({d}));
    std::size_t need = rowLen + L - 1;
    std::size_t n = 1;
    while (n < need) n <<= 1;
    FftConvolver fft(n, 3);
    fft.load(0, row.data(), rowLen);
    fft.transform(0);
    auto apply = [&](const std::vector<double>& v, std::vector<double>& u) {
      fft.load(1, v.data(), v.size());
      fft.transform(1);
      fft.spec_mul(2, 0, 1, false);
      fft.inverse(2);
      const double* full = fft.real(2);
      std::size_t off = static_cast<std::size_t>(2 * B);
      for (std::size_t i = 0; i < v.size(); ++i) u[i] = full[off + i];
    };
    return detail::power_iterate(L, apply, maxIters, tol);
  }

  if (L > 4096)
    throw std::invalid_argument(
        "ball too large for the dense eigenvalue solver");
  std::vector<double> M(L * L, 0.0);
  for (std::size_t i = 0; i < L; ++i) {
    Element gi = G.inv(ball[i]);
    for (std::size_t j = 0; j < L; ++j)
      M[i * L + j] = mu.pmf(G.mul(gi, ball[j]));
  }
  auto apply = [&](const std::vector<double>& v, std::vector<double>& u) {
    for (std::size_t i = 0; i < L; ++i) {
      double s = 0.0;
      const double* rowi = &M[i * L];
      for (std::size_t j = 0; j < L; ++j) s += rowi[j] * v[j];
      u[i] = s;
    }
  };
  return detail::power_iterate(L, apply, maxIters, tol);
}

// Rayleigh quotient of the tent function (R - |x|_1)_+ built from the
// coarser rescaled norm; its support is the open radius-R ball in that
// scale.
struct RayleighQuotient {
  double quotient = 0.0;
  std::size_t support = 0;
  double radius = 0.0;
};

inline RayleighQuotient rayleigh_zeta(const Group& G, const Measure& mu,
                                      const AdaptedGeometry& geom, double R) {
  if (R <= 0.0) throw std::invalid_argument("radius must be positive");
  double raw = geom.norm1_radius_to_raw(R);
  auto ball = geom.ball_elements(raw);
  std::sort(ball.begin(), ball.end());
  std::vector<std::pair<Element, double>> f;
  for (const Element& g : ball) {
    double v = R - geom.norm_1(g);
    if (v > 0.0) f.emplace_back(g, v);
  }
  if (f.empty()) throw std::logic_error("tent function has empty support");
  double den = 0.0;
  for (const auto& e : f) den += e.second * e.second;
  RayleighQuotient out;
  out.quotient = dirichlet_form(G, mu, f) / den;
  out.support = f.size();
  out.radius = R;
  return out;
}

// Largest observed ratio  var_B(f) / (R^(1/w*) E(f))  over random trial
// functions on the radius-R ball (R in the squared scale).  Not an
// optimizer: a reproducible lower estimate of the best constant.
struct PoincareEstimate {
  double constant = 0.0;
  u64 trials = 0;
  double radius = 0.0;
  std::size_t ballSize = 0;
};

inline PoincareEstimate pseudo_poincare_constant(const Group& G,
                                                 const Measure& mu,
                                                 const AdaptedGeometry& geom,
                                                 double R, u64 trials,
                                                 u64 seed) {
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  double raw = geom.g2_radius_to_raw(R);
  auto ball = geom.ball_elements(raw);
  std::sort(ball.begin(), ball.end());
  std::size_t L = ball.size();
  double scale = std::pow(R, 1.0 / geom.w_star());
  PoincareEstimate out;
  out.trials = trials;
  out.radius = R;
  out.ballSize = L;
  std::vector<std::pair<Element, double>> f(ball.size());
  for (u64 trial = 0; trial < trials; ++trial) {
    Rng rng(rng_key(seed, trial, 0));
    double mean = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      double v = 2.0 * rng.next_double() - 1.0;
      f[i] = {ball[i], v};
      mean += v;
    }
    mean /= static_cast<double>(L);
    double var = 0.0;
    for (auto& e : f) var += (e.second - mean) * (e.second - mean);
    double energy = dirichlet_form(G, mu, f);
    if (energy <= 1e-300) continue;
    out.constant = std::max(out.constant, var / (scale * energy));
  }
  return out;
}

}  // namespace longjump
