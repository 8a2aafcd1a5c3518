#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "longjump/geometry/geometry.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/kernel/dense1d.hpp"
#include "longjump/kernel/kernel.hpp"
#include "longjump/util/checked.hpp"

namespace longjump {

// Return-probability rows along an increasing list of step counts, advancing
// one dense kernel by squarings (and a small corrective power when the next
// target is not a doubling).
inline std::vector<ReturnRow> dense_return_series(DenseEngine& eng,
                                                  std::vector<u64> targets) {
  std::sort(targets.begin(), targets.end());
  std::vector<ReturnRow> rows;
  DenseKernel cur;
  bool have = false;
  for (u64 n : targets) {
    if (n == 0) {
      rows.push_back(ReturnRow{0, 1.0, 1.0, 1.0});
      continue;
    }
    if (!have) {
      cur = eng.power(n);
      have = true;
    } else {
      while (cur.steps * 2 <= n) eng.square(cur);
      if (cur.steps < n) {
        DenseKernel fix = eng.power(n - cur.steps);
        eng.multiply(cur, fix);
      }
    }
    ReturnRow row;
    row.n = cur.steps;
    row.lower = cur.at(0, 0);
    row.upper = row.lower + std::max(0.0, cur.dropped);
    row.supNorm = cur.sup();
    rows.push_back(row);
  }
  return rows;
}

// Extremes of k(g) * volume(n) over the ball of quasi-norm radius eta*n.
struct NearDiagonalProfile {
  double minValue = 0.0;
  double maxValue = 0.0;
  double volumeAtN = 0.0;
  u64 ballPoints = 0;

  double spread() const { return minValue > 0.0 ? maxValue / minValue : 0.0; }
};

inline NearDiagonalProfile near_diagonal_profile(const DenseKernel& k,
                                                 const AdaptedGeometry& geom,
                                                 double eta) {
  if (k.steps == 0) throw std::invalid_argument("need at least one step");
  NearDiagonalProfile prof;
  prof.volumeAtN = geom.volume().eval(static_cast<double>(k.steps));
  if (std::max(0.0, k.dropped) * prof.volumeAtN > 0.5)
    throw std::runtime_error(
        "window deficit too large for a reliable near-diagonal profile");
  double R = eta * static_cast<double>(k.steps);
  auto ball = geom.ball_elements(R);
  bool first = true;
  for (const Element& g : ball) {
    if (g[0] < -k.W || g[0] > k.W)
      throw std::runtime_error("window too small for the requested ball");
    double v = k.value_at(g) * prof.volumeAtN;
    if (first) {
      prof.minValue = prof.maxValue = v;
      first = false;
    } else {
      prof.minValue = std::min(prof.minValue, v);
      prof.maxValue = std::max(prof.maxValue, v);
    }
  }
  prof.ballPoints = ball.size();
  return prof;
}

inline NearDiagonalProfile near_diagonal_profile(const SparseKernel& k,
                                                 const AdaptedGeometry& geom,
                                                 double eta) {
  if (k.steps == 0) throw std::invalid_argument("need at least one step");
  NearDiagonalProfile prof;
  prof.volumeAtN = geom.volume().eval(static_cast<double>(k.steps));
  if (std::max(0.0, k.dropped) * prof.volumeAtN > 0.5)
    throw std::runtime_error(
        "truncation deficit too large for a reliable near-diagonal profile");
  double R = eta * static_cast<double>(k.steps);
  auto ball = geom.ball_elements(R);
  bool first = true;
  for (const Element& g : ball) {
    double v = k.at(g) * prof.volumeAtN;
    if (first) {
      prof.minValue = prof.maxValue = v;
      first = false;
    } else {
      prof.minValue = std::min(prof.minValue, v);
      prof.maxValue = std::max(prof.maxValue, v);
    }
  }
  prof.ballPoints = ball.size();
  return prof;
}

// Smallest constant C such that, over the whole window and the given
// translations y,
//   |k_{n+m}(x y) - k_n(x)| <= C (m/n + |y|_2^{1/(2 w*)} / sqrt(n)) k_n(e)
// where |y|_2 is the squared-scale norm of y.
inline double regularity_ratio(const DenseKernel& kn, const DenseKernel& knm,
                               const Group& G, const AdaptedGeometry& geom,
                               const std::vector<Element>& ys) {
  if (kn.steps == 0 || knm.steps <= kn.steps)
    throw std::invalid_argument("need knm.steps > kn.steps >= 1");
  double n = static_cast<double>(kn.steps);
  double m = static_cast<double>(knm.steps - kn.steps);
  double ke = kn.at(0, 0);
  if (ke <= 0.0) throw std::runtime_error("kernel vanishes at the identity");
  double wStar = geom.w_star();
  int parities = kn.dihedral ? 2 : 1;
  double best = 0.0;
  for (const Element& y : ys) {
    double normY = geom.norm_g2(y);
    double factor =
        m / n + std::pow(normY, 1.0 / (2.0 * wStar)) / std::sqrt(n);
    double denom = factor * ke;
    for (int par = 0; par < parities; ++par) {
      for (i64 x = -kn.W; x <= kn.W; ++x) {
        Element xe = kn.dihedral ? make_element({x, par}) : make_element({x});
        Element xy = G.mul(xe, y);
        if (xy[0] < -kn.W || xy[0] > kn.W) continue;
        double diff = std::abs(knm.value_at(xy) - kn.at(x, par));
        if (diff > best * denom) best = diff / denom;
      }
    }
  }
  return best;
}

// sup_x |k(x y) - k(x)| over the window (translates leaving the window
// count as zero, which only lowers the supremum's inputs near the edge)
inline double sup_shift_difference(const DenseKernel& k, const Group& G,
                                   const Element& y) {
  int parities = k.dihedral ? 2 : 1;
  double best = 0.0;
  for (int par = 0; par < parities; ++par) {
    for (i64 x = -k.W; x <= k.W; ++x) {
      Element xe = k.dihedral ? make_element({x, par}) : make_element({x});
      double v2 = k.value_at(G.mul(xe, y));
      best = std::max(best, std::abs(v2 - k.at(x, par)));
    }
  }
  return best;
}

// Collision estimate of the return probability from one cohort of
// independent walkers observed at the same time: the fraction of coinciding
// pairs, with a U-statistic standard error.
struct CollisionEstimate {
  double pHat = 0.0;
  double stderrHat = 0.0;
  u64 samples = 0;
  u64 collisions = 0;
  bool degenerate = false;  // no collisions observed
  double upperIfDegenerate = 0.0;
};

inline CollisionEstimate collision_return_estimate(
    const std::vector<Element>& positions) {
  u64 m = positions.size();
  if (m < 2) throw std::invalid_argument("need at least two walkers");
  std::unordered_map<Element, u64, ElementHash> counts;
  counts.reserve(positions.size());
  for (const Element& g : positions) ++counts[g];
  long double s2 = 0.0L;   // coinciding pairs
  long double zeta1 = 0.0L;
  double md = static_cast<double>(m);
  for (const auto& e : counts) {
    long double c = static_cast<long double>(e.second);
    s2 += c * (c - 1.0L) / 2.0L;
    long double h1 = (c - 1.0L) / (md - 1.0);
    zeta1 += (c / md) * h1 * h1;
  }
  long double pairs = static_cast<long double>(m) * (m - 1) / 2.0L;
  CollisionEstimate est;
  est.samples = m;
  est.collisions = static_cast<u64>(s2);
  est.pHat = static_cast<double>(s2 / pairs);
  long double z1 = zeta1 - static_cast<long double>(est.pHat) * est.pHat;
  if (z1 < 0.0L) z1 = 0.0L;
  long double z2 = static_cast<long double>(est.pHat) * (1.0 - est.pHat);
  long double var = (4.0L * (md - 2.0) * z1 + 2.0L * z2) / (md * (md - 1.0));
  est.stderrHat = static_cast<double>(std::sqrt(static_cast<double>(
      var < 0.0L ? 0.0L : var)));
  if (est.collisions == 0) {
    est.degenerate = true;
    est.upperIfDegenerate = 3.0 / static_cast<double>(pairs);
  }
  return est;
}

}  // namespace longjump
