#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "longjump/measure/measure.hpp"
#include "longjump/util/rng.hpp"

namespace longjump {

// Draws one step of the walk.  The decomposition is exact: component by its
// selection probability, shell by the precomputed mass table (with an
// envelope-rejection branch beyond the table horizon), element uniformly
// within its shell by composition counting.
class StepSampler {
 public:
  explicit StepSampler(const Measure& m) : m_(&m) {
    const auto& spec = m.spec();
    double cum = spec.p0;
    compCum_.push_back(cum);
    for (const auto& c : spec.components) {
      cum += c.p;
      compCum_.push_back(cum);
    }
    for (std::size_t i = 0; i < spec.components.size(); ++i)
      envelopes_.push_back(make_envelope(i));
  }

  Element sample(Rng& rng) const {
    const auto& spec = m_->spec();
    double u = rng.next_double();
    if (u < compCum_[0]) return sample_mu0(rng);
    for (std::size_t i = 0; i < spec.components.size(); ++i)
      if (u < compCum_[i + 1]) return sample_component(i, rng);
    return sample_component(spec.components.size() - 1, rng);
  }

 private:
  struct TailEnvelope {
    bool active = false;
    double wTilde = 1.0;
    double x0 = 0.0;    // continuous tail start (M + 1/2)
    double bound = 0.0; // dominating constant for the acceptance ratio
  };

  const Measure* m_;
  std::vector<double> compCum_;
  std::vector<TailEnvelope> envelopes_;

  Element sample_mu0(Rng& rng) const {
    const auto& atoms = m_->mu0_atoms();
    double u = rng.next_double();
    double cum = 0.0;
    for (const auto& a : atoms) {
      cum += a.mass;
      if (u < cum) return a.g;
    }
    return atoms.back().g;
  }

  Element sample_component(std::size_t i, Rng& rng) const {
    const auto& c = m_->spec().components[i];
    if (c.subgroup.kind() == SubgroupKind::Finite) {
      double em = m_->e_mass(i);
      if (rng.next_double() < em) return m_->group().identity();
      const auto& els = c.subgroup.finite_elements();
      std::vector<const Element*> others;
      for (const auto& h : els)
        if (!(h == m_->group().identity())) others.push_back(&h);
      return *others[rng.next_below(static_cast<u64>(others.size()))];
    }
    i64 r = sample_shell(i, rng);
    return sample_in_shell(i, r, rng);
  }

  i64 sample_shell(std::size_t i, Rng& rng) const {
    const auto& cdf = m_->shell_cdf(i);
    double z = rng.next_double();
    if (z < cdf.back()) {
      auto it = std::upper_bound(cdf.begin(), cdf.end(), z);
      return static_cast<i64>(it - cdf.begin());
    }
    return sample_tail_shell(i, rng);
  }

  // Beyond the horizon: a discretized power envelope whose integer masses
  // telescope to 1, thinned against the exact shell-law mass.
  i64 sample_tail_shell(std::size_t i, Rng& rng) const {
    const auto& env = envelopes_[i];
    if (!env.active)
      throw std::logic_error("tail draw on a component without an envelope");
    for (int guard = 0; guard < 100000; ++guard) {
      double v = 1.0 - rng.next_double();  // (0, 1]
      double x = env.x0 * std::pow(v, -1.0 / env.wTilde);
      double rd = std::floor(x + 0.5);
      if (rd > 4.0e18) continue;  // absurd radius: mass ~ 0, reject
      i64 r = static_cast<i64>(rd);
      double pe = envelope_mass(env, r);
      double alpha = m_->shell_mass(i, r) / (env.bound * pe);
      if (alpha > 1.0 + 1e-9)
        throw std::logic_error("tail envelope fails to dominate");
      if (rng.next_double() < alpha) return r;
    }
    throw std::runtime_error("tail shell sampling failed to accept");
  }

  static double envelope_mass(const TailEnvelope& env, i64 r) {
    double lo = static_cast<double>(r) - 0.5;
    double hi = static_cast<double>(r) + 0.5;
    return std::pow(env.x0, env.wTilde) *
           (std::pow(lo, -env.wTilde) - std::pow(hi, -env.wTilde));
  }

  TailEnvelope make_envelope(std::size_t i) const {
    const auto& c = m_->spec().components[i];
    TailEnvelope env;
    if (c.subgroup.kind() == SubgroupKind::Finite) return env;
    env.active = true;
    double w = c.profile.alpha;
    double beta = c.profile.family == JumpProfile::Family::PowerLog
                      ? c.profile.beta
                      : 0.0;
    double delta =
        beta < 0.0 ? std::min(w / 2.0, std::max(0.1, -beta / 12.0)) : 0.0;
    env.wTilde = w - delta;
    i64 M = m_->shell_horizon(i);
    env.x0 = static_cast<double>(M) + 0.5;
    double first = m_->shell_mass(i, M + 1) / envelope_mass(env, M + 1);
    env.bound = 1.25 * first;
    return env;
  }

  Element sample_in_shell(std::size_t i, i64 r, Rng& rng) const {
    const auto& c = m_->spec().components[i];
    if (r == 0) return m_->group().identity();
    if (c.subgroup.kind() == SubgroupKind::DihedralType) {
      auto pair = c.subgroup.dihedral_shell(r);
      return pair[rng.next_below(2)];
    }
    int m = c.subgroup.rank();
    // number of nonzero coordinates, weighted by 2^k C(m,k) C(r-1,k-1)
    double weights[kMaxCoords];
    double total = 0.0;
    int kMax = static_cast<int>(std::min<i64>(m, r));
    for (int k = 1; k <= kMax; ++k) {
      double wk = std::pow(2.0, k) *
                  static_cast<double>(binom_u128(static_cast<u64>(m),
                                                 static_cast<unsigned>(k)));
      // C(r-1, k-1) as a running product (r may exceed 64-bit binomials)
      for (int j = 1; j <= k - 1; ++j)
        wk *= static_cast<double>(r - j) / static_cast<double>(j);
      weights[k - 1] = wk;
      total += wk;
    }
    double z = rng.next_double() * total;
    int k = kMax;
    double cum = 0.0;
    for (int kk = 1; kk <= kMax; ++kk) {
      cum += weights[kk - 1];
      if (z < cum) {
        k = kk;
        break;
      }
    }
    // choose which k coordinates are nonzero (partial Fisher-Yates)
    int idx[kMaxCoords];
    for (int j = 0; j < m; ++j) idx[j] = j;
    for (int j = 0; j < k; ++j) {
      int pick =
          j + static_cast<int>(rng.next_below(static_cast<u64>(m - j)));
      std::swap(idx[j], idx[pick]);
    }
    // composition of r into k positive parts: k-1 distinct cuts in {1..r-1}
    i64 cuts[kMaxCoords + 1];
    int nCuts = k - 1;
    {
      // Floyd's sampling over a possibly huge range
      i64 chosen[kMaxCoords];
      int cnt = 0;
      for (i64 top = r - 1 - nCuts + 1; top <= r - 1; ++top) {
        i64 t = 1 + static_cast<i64>(rng.next_below(static_cast<u64>(top)));
        bool dup = false;
        for (int j = 0; j < cnt; ++j)
          if (chosen[j] == t) dup = true;
        chosen[cnt++] = dup ? top : t;
      }
      std::sort(chosen, chosen + cnt);
      cuts[0] = 0;
      for (int j = 0; j < cnt; ++j) cuts[j + 1] = chosen[j];
      cuts[nCuts + 1] = r;
    }
    std::vector<i64> coords(static_cast<std::size_t>(m), 0);
    u64 signBits = rng.next_u64();
    for (int j = 0; j < k; ++j) {
      i64 part = cuts[j + 1] - cuts[j];
      if ((signBits >> j) & 1u) part = -part;
      coords[static_cast<std::size_t>(idx[j])] = part;
    }
    return c.subgroup.from_coordinates(coords);
  }
};

}  // namespace longjump
