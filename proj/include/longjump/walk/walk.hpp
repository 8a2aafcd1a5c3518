#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "longjump/geometry/geometry.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/measure/sampler.hpp"
#include "longjump/util/checked.hpp"
#include "longjump/util/rng.hpp"
#include "longjump/util/threadpool.hpp"

namespace longjump {

// Monte-Carlo walk settings.  Every (walker, step) pair gets its own keyed
// random stream, so results are identical for any thread count.
struct WalkConfig {
  u64 seed = 1;
  u64 walkers = 2;
  u64 steps = 0;
  Element start;
  unsigned threads = 1;

  void validate() const {
    if (walkers < 2) throw std::invalid_argument("need at least two walkers");
  }
};

// final positions of all walkers after cfg.steps steps
inline std::vector<Element> simulate_positions(const Group& G,
                                               const StepSampler& sampler,
                                               const WalkConfig& cfg) {
  cfg.validate();
  Element start = cfg.start.n == 0 ? G.identity() : cfg.start;
  std::vector<Element> out(cfg.walkers, start);
  parallel_for_jobs(cfg.walkers, cfg.threads, [&](u64 w) {
    Element pos = start;
    for (u64 t = 1; t <= cfg.steps; ++t) {
      Rng rng(rng_key(cfg.seed, w, t));
      pos = G.mul(pos, sampler.sample(rng));
    }
    out[w] = pos;
  });
  return out;
}

// Positions of all walkers at each step count in nList (ascending); one
// pass over the steps, so later snapshots extend earlier ones.
inline std::vector<std::vector<Element>> simulate_snapshots(
    const Group& G, const StepSampler& sampler, const WalkConfig& cfg,
    const std::vector<u64>& nList) {
  cfg.validate();
  if (nList.empty()) return {};
  std::vector<u64> ns = nList;
  std::sort(ns.begin(), ns.end());
  Element start = cfg.start.n == 0 ? G.identity() : cfg.start;
  u64 last = ns.back();
  std::vector<std::vector<Element>> out(ns.size());
  for (auto& v : out) v.assign(cfg.walkers, start);
  parallel_for_jobs(cfg.walkers, cfg.threads, [&](u64 w) {
    Element pos = start;
    std::size_t slot = 0;
    while (slot < ns.size() && ns[slot] == 0) {
      out[slot][w] = pos;
      ++slot;
    }
    for (u64 t = 1; t <= last && slot < ns.size(); ++t) {
      Rng rng(rng_key(cfg.seed, w, t));
      pos = G.mul(pos, sampler.sample(rng));
      while (slot < ns.size() && ns[slot] == t) {
        out[slot][w] = pos;
        ++slot;
      }
    }
  });
  return out;
}

// First-exit summary for the ball of squared-scale radius r around the
// start point.  Walkers still inside after 64 * r^(1/w*) steps are censored
// at that cap; overshootCounts[i] counts exits landing at squared-scale
// norm >= sList[i].
struct ExitStats {
  double radius = 0.0;
  double cap = 0.0;
  u64 walkers = 0;
  u64 censored = 0;
  double meanTau = 0.0;  // censored walkers contribute the cap
  std::vector<double> sList;
  std::vector<u64> overshootCounts;

  u64 exits() const { return walkers - censored; }
  double overshoot_prob(std::size_t i) const {
    return exits() == 0 ? 0.0
                        : static_cast<double>(overshootCounts[i]) /
                              static_cast<double>(exits());
  }
};

inline ExitStats exit_time_stats(const Group& G, const StepSampler& sampler,
                                 const AdaptedGeometry& geom,
                                 const WalkConfig& cfg, double r,
                                 const std::vector<double>& sList = {}) {
  cfg.validate();
  if (r <= 0.0) throw std::invalid_argument("radius must be positive");
  Element start = cfg.start.n == 0 ? G.identity() : cfg.start;
  Element startInv = G.inv(start);
  double rawR = geom.g2_radius_to_raw(r);
  std::vector<double> rawS;
  for (double s : sList) {
    if (s < r) throw std::invalid_argument("overshoot level below radius");
    rawS.push_back(geom.g2_radius_to_raw(s));
  }
  double capD = 64.0 * std::pow(r, 1.0 / geom.w_star());
  u64 cap = static_cast<u64>(std::ceil(capD));
  if (cap < 1) cap = 1;

  std::vector<u64> tau(cfg.walkers, 0);  // 0 = censored
  std::vector<double> exitNorm(cfg.walkers, 0.0);
  parallel_for_jobs(cfg.walkers, cfg.threads, [&](u64 w) {
    Element pos = start;
    for (u64 t = 1; t <= cap; ++t) {
      Rng rng(rng_key(cfg.seed, w, t));
      pos = G.mul(pos, sampler.sample(rng));
      double raw = geom.closed_norm(G.mul(startInv, pos));
      if (raw > rawR) {
        tau[w] = t;
        exitNorm[w] = raw;
        break;
      }
    }
  });

  ExitStats st;
  st.radius = r;
  st.cap = static_cast<double>(cap);
  st.walkers = cfg.walkers;
  st.sList = sList;
  st.overshootCounts.assign(sList.size(), 0);
  double sum = 0.0;
  for (u64 w = 0; w < cfg.walkers; ++w) {
    if (tau[w] == 0) {
      ++st.censored;
      sum += static_cast<double>(cap);
      continue;
    }
    sum += static_cast<double>(tau[w]);
    for (std::size_t i = 0; i < rawS.size(); ++i)
      if (exitNorm[w] >= rawS[i]) ++st.overshootCounts[i];
  }
  st.meanTau = sum / static_cast<double>(cfg.walkers);
  return st;
}

// Median over walkers of the running maximum of the squared-scale norm,
// snapshotted at each step count in nList (ascending).
inline std::vector<double> max_displacement_medians(
    const Group& G, const StepSampler& sampler, const AdaptedGeometry& geom,
    const WalkConfig& cfg, const std::vector<u64>& nList) {
  cfg.validate();
  if (nList.empty()) return {};
  std::vector<u64> ns = nList;
  std::sort(ns.begin(), ns.end());
  Element start = cfg.start.n == 0 ? G.identity() : cfg.start;
  Element startInv = G.inv(start);
  u64 last = ns.back();

  std::vector<double> records(cfg.walkers * ns.size(), 0.0);
  parallel_for_jobs(cfg.walkers, cfg.threads, [&](u64 w) {
    Element pos = start;
    double runMax = 0.0;
    std::size_t slot = 0;
    for (u64 t = 1; t <= last && slot < ns.size(); ++t) {
      Rng rng(rng_key(cfg.seed, w, t));
      pos = G.mul(pos, sampler.sample(rng));
      double raw = geom.closed_norm(G.mul(startInv, pos));
      runMax = std::max(runMax, raw);
      while (slot < ns.size() && ns[slot] == t) {
        records[w * ns.size() + slot] = runMax;
        ++slot;
      }
    }
  });

  std::vector<double> medians;
  std::vector<double> col(cfg.walkers);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    for (u64 w = 0; w < cfg.walkers; ++w) col[w] = records[w * ns.size() + j];
    std::size_t mid = col.size() / 2;
    std::nth_element(col.begin(), col.begin() + mid, col.end());
    double rawMed = col[mid];
    // convert the raw norm back to the squared scale
    medians.push_back(std::pow(1.0 + rawMed, geom.w_star()) - 1.0);
  }
  return medians;
}

}  // namespace longjump
