#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/measure/measure.hpp"
#include "longjump/util/checked.hpp"
#include "longjump/util/csv.hpp"

namespace longjump {

// How convolution products are trimmed.  Threshold drops entries below
// epsPerStep and refuses to exceed maxSupport; TopK keeps the maxSupport
// heaviest entries instead.
struct TruncationPolicy {
  enum class Mode { Threshold, TopK };
  double epsPerStep = 1e-14;
  i64 maxSupport = i64{1} << 22;
  Mode mode = Mode::Threshold;
};

// Sparse distribution on group elements.  Entries are exact partial sums of
// the true n-step probabilities (never overestimates, apart from float
// rounding), and `dropped` is 1 - sum(entries) in a canonical summation
// order, so entry + dropped brackets the truth.
struct SparseKernel {
  std::unordered_map<Element, double, ElementHash> entries;
  double dropped = 0.0;
  u64 steps = 0;

  double at(const Element& g) const {
    auto it = entries.find(g);
    return it == entries.end() ? 0.0 : it->second;
  }

  std::vector<std::pair<Element, double>> sorted_entries() const {
    std::vector<std::pair<Element, double>> v(entries.begin(), entries.end());
    std::sort(v.begin(), v.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return v;
  }

  // compensated sum over entries in element order (deterministic)
  double mass() const {
    auto v = sorted_entries();
    double s = 0.0, c = 0.0;
    for (const auto& e : v) {
      double y = e.second - c;
      double t = s + y;
      c = (t - s) - y;
      s = t;
    }
    return s;
  }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.second);
    return m;
  }

  void restate_dropped() { dropped = 1.0 - mass(); }
};

namespace detail {

// keep the maxSupport heaviest entries (ties broken by element order)
inline void apply_top_k(SparseKernel& k, i64 maxSupport) {
  if (static_cast<i64>(k.entries.size()) <= maxSupport) return;
  std::vector<std::pair<Element, double>> v(k.entries.begin(),
                                            k.entries.end());
  std::nth_element(v.begin(), v.begin() + maxSupport, v.end(),
                   [](const auto& a, const auto& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  v.resize(static_cast<std::size_t>(maxSupport));
  k.entries.clear();
  k.entries.insert(v.begin(), v.end());
}

[[noreturn]] inline void support_overflow(std::size_t support, i64 maxSupport,
                                          double suggestedEps) {
  std::ostringstream os;
  os << "kernel support " << support << " exceeds maxSupport " << maxSupport
     << "; an epsPerStep of at least " << fmt_double(suggestedEps)
     << " would fit";
  throw std::runtime_error(os.str());
}

// threshold trim; on overflow report the cutoff that would have fit
inline void apply_threshold(SparseKernel& k, const TruncationPolicy& pol) {
  if (pol.epsPerStep > 0.0) {
    for (auto it = k.entries.begin(); it != k.entries.end();) {
      if (it->second < pol.epsPerStep)
        it = k.entries.erase(it);
      else
        ++it;
    }
  }
  if (static_cast<i64>(k.entries.size()) > pol.maxSupport) {
    std::vector<double> masses;
    masses.reserve(k.entries.size());
    for (const auto& e : k.entries) masses.push_back(e.second);
    std::nth_element(masses.begin(), masses.begin() + pol.maxSupport,
                     masses.end(), std::greater<double>());
    support_overflow(k.entries.size(), pol.maxSupport,
                     masses[static_cast<std::size_t>(pol.maxSupport)]);
  }
}

inline void truncate(SparseKernel& k, const TruncationPolicy& pol) {
  if (pol.mode == TruncationPolicy::Mode::TopK)
    apply_top_k(k, pol.maxSupport);
  else
    apply_threshold(k, pol);
  k.restate_dropped();
}

}  // namespace detail

// One-step kernel: every atom of the step law with mass at least epsPerStep.
// Infinite components are walked shell by shell until their per-atom mass
// falls below the cutoff, so epsPerStep = 0 requires a finitely supported
// law.
inline SparseKernel one_step_kernel(const Measure& meas,
                                    const TruncationPolicy& pol) {
  const WalkSpec& spec = meas.spec();
  SparseKernel k;
  k.steps = 1;
  if (spec.p0 > 0.0) {
    for (const auto& atom : meas.mu0_atoms())
      k.entries[atom.g] += spec.p0 * atom.mass;
  }
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const WalkComponent& comp = spec.components[i];
    if (comp.subgroup.kind() == SubgroupKind::Finite) {
      for (const Element& g : comp.subgroup.finite_elements())
        k.entries[g] += comp.p * meas.comp_pmf(i, g);
      continue;
    }
    if (pol.epsPerStep <= 0.0)
      throw std::invalid_argument(
          "epsPerStep = 0 requires a finitely supported step law");
    i64 perCompCap =
        pol.mode == TruncationPolicy::Mode::TopK ? pol.maxSupport : -1;
    i64 emitted = 0;
    for (i64 r = 0;; ++r) {
      double atomMass = comp.p * meas.density(i, r) / meas.comp_Z(i);
      if (atomMass < pol.epsPerStep) break;
      for (const Element& g : meas.shell_elements(i, r)) k.entries[g] += atomMass;
      emitted += static_cast<i64>(meas.shell_count_poly(i, r));
      if (perCompCap > 0 && emitted > perCompCap) break;
      if (perCompCap < 0 &&
          static_cast<i64>(k.entries.size()) > pol.maxSupport)
        detail::support_overflow(k.entries.size(), pol.maxSupport, atomMass);
    }
  }
  detail::truncate(k, pol);
  return k;
}

// Convolution with deterministic accumulation: both factors are walked in
// sorted element order, so every bucket receives its terms in a fixed order
// regardless of hash layout.
inline SparseKernel convolve(const Group& G, const SparseKernel& a,
                             const SparseKernel& b,
                             const TruncationPolicy& pol) {
  auto ea = a.sorted_entries();
  auto eb = b.sorted_entries();
  SparseKernel c;
  c.steps = a.steps + b.steps;
  c.entries.reserve(ea.size() + eb.size());
  for (const auto& x : ea) {
    for (const auto& y : eb) {
      c.entries[G.mul(x.first, y.first)] += x.second * y.second;
    }
  }
  detail::truncate(c, pol);
  return c;
}

// base^n by binary powering, most significant bit first; n = 0 is the point
// mass at the identity
inline SparseKernel kernel_power(const Group& G, const SparseKernel& base,
                                 u64 n, const TruncationPolicy& pol) {
  if (n == 0) {
    SparseKernel k;
    k.steps = 0;
    k.entries[G.identity()] = 1.0;
    return k;
  }
  int msb = 63;
  while (((n >> msb) & 1ULL) == 0ULL) --msb;
  SparseKernel acc = base;
  for (int bit = msb - 1; bit >= 0; --bit) {
    acc = convolve(G, acc, acc, pol);
    if ((n >> bit) & 1ULL) acc = convolve(G, acc, base, pol);
  }
  return acc;
}

// One row of a return-probability table: lower/upper bracket the n-step
// mass at the identity, supNorm is the largest computed entry.
struct ReturnRow {
  u64 n = 0;
  double lower = 0.0;
  double upper = 0.0;
  double supNorm = 0.0;
};

inline ReturnRow make_return_row(const SparseKernel& k, const Group& G) {
  ReturnRow row;
  row.n = k.steps;
  row.lower = k.at(G.identity());
  row.upper = row.lower + std::max(0.0, k.dropped);
  row.supNorm = k.sup_norm();
  return row;
}

// Return probabilities along an increasing list of step counts, reusing the
// previous power to advance.
inline std::vector<ReturnRow> return_series(const Group& G,
                                            const Measure& meas,
                                            const std::vector<u64>& nList,
                                            const TruncationPolicy& pol) {
  std::vector<u64> ns = nList;
  std::sort(ns.begin(), ns.end());
  std::vector<ReturnRow> rows;
  SparseKernel base;
  bool haveBase = false;
  SparseKernel cur;
  u64 at = 0;
  for (u64 n : ns) {
    if (n == 0) {
      rows.push_back(ReturnRow{0, 1.0, 1.0, 1.0});
      continue;
    }
    if (!haveBase) {
      base = one_step_kernel(meas, pol);
      haveBase = true;
    }
    if (at == 0) {
      cur = kernel_power(G, base, n, pol);
    } else if (n > at) {
      cur = convolve(G, cur, kernel_power(G, base, n - at, pol), pol);
    }
    at = n;
    rows.push_back(make_return_row(cur, G));
  }
  return rows;
}

// total-variation style distance between k1 and the y-translate of k2,
// with the unaccounted window mass reported separately
struct TvResult {
  double tv = 0.0;
  double slack = 0.0;
};

inline TvResult tv_difference(const Group& G, const SparseKernel& k1,
                              const SparseKernel& k2, const Element& y) {
  TvResult r;
  Element yInv = G.inv(y);
  for (const auto& e : k1.sorted_entries())
    r.tv += std::abs(e.second - k2.at(G.mul(e.first, y)));
  for (const auto& e : k2.sorted_entries()) {
    Element x = G.mul(e.first, yInv);
    if (k1.entries.find(x) == k1.entries.end()) r.tv += e.second;
  }
  r.slack = std::max(0.0, k1.dropped) + std::max(0.0, k2.dropped);
  return r;
}

// CSV dump: one comment line with the step count and unaccounted mass, then
// element,probability rows in element order
inline void write_kernel_csv(std::ostream& os, const SparseKernel& k) {
  os << "# n=" << k.steps << " droppedMass=" << fmt_double(k.dropped) << "\n";
  os << "element,prob\n";
  for (const auto& e : k.sorted_entries())
    os << e.first.to_string(';') << "," << fmt_double(e.second) << "\n";
}

}  // namespace longjump
