#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "longjump/geometry/system.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/group/subgroup.hpp"
#include "longjump/util/num.hpp"

namespace longjump {

namespace detail {

// N(r) for a rank-m lattice shell, expanded as a polynomial in u = 1 + r:
// N(r) = sum_k 2^k C(m,k) C(r-1, k-1).  Valid for r >= 1.
inline std::vector<double> lattice_shell_poly(int m) {
  // poly arithmetic on small double-coefficient arrays (index = power of r)
  std::vector<double> total{0.0};
  for (int k = 1; k <= m; ++k) {
    // C(r-1, k-1) = prod_{i=1..k-1} (r - i) / (k-1)!
    std::vector<double> p{1.0};
    for (int i = 1; i <= k - 1; ++i) {
      std::vector<double> q(p.size() + 1, 0.0);
      for (std::size_t j = 0; j < p.size(); ++j) {
        q[j + 1] += p[j];
        q[j] -= p[j] * static_cast<double>(i);
      }
      p = std::move(q);
    }
    double fact = 1.0;
    for (int i = 2; i <= k - 1; ++i) fact *= static_cast<double>(i);
    double scale = std::pow(2.0, k) *
                   static_cast<double>(binom_u128(static_cast<u64>(m),
                                                  static_cast<unsigned>(k))) /
                   fact;
    if (total.size() < p.size()) total.resize(p.size(), 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) total[j] += scale * p[j];
  }
  // substitute r = u - 1 to get coefficients in u
  std::vector<double> inU(total.size(), 0.0);
  for (std::size_t j = 0; j < total.size(); ++j) {
    // (u-1)^j expanded
    double c = total[j];
    for (std::size_t i = 0; i <= j; ++i) {
      double term =
          c * static_cast<double>(binom_u128(static_cast<u64>(j),
                                             static_cast<unsigned>(i))) *
          ((j - i) % 2 == 0 ? 1.0 : -1.0);
      inU[i] += term;
    }
  }
  return inU;
}

}  // namespace detail

// Exact step distribution mu = p0 mu0 + sum_i p_i mu_i with component laws
// mu_i(h) = Z_i^{-1} [(1+|h|_i)^{d_i} phi_i(1+|h|_i)]^{-1} on unbounded
// subgroups and an (eMass, uniform) split on finite ones.
class Measure {
 public:
  explicit Measure(const WalkSpec& spec) : spec_(spec) {
    spec_.validate();
    mu0_ = spec_.effective_mu0();
    for (std::size_t i = 0; i < spec_.components.size(); ++i) build_component(i);
  }

  const WalkSpec& spec() const { return spec_; }
  const Group& group() const { return spec_.group; }
  std::size_t component_count() const { return spec_.components.size(); }

  // ---- exact pmf ----------------------------------------------------------

  double pmf(const Element& g) const {
    double p = spec_.p0 > 0.0 ? spec_.p0 * mu0_pmf(g) : 0.0;
    for (std::size_t i = 0; i < spec_.components.size(); ++i)
      p += spec_.components[i].p * comp_pmf(i, g);
    return p;
  }

  double mu0_pmf(const Element& g) const {
    for (const auto& a : mu0_)
      if (a.g == g) return a.mass;
    return 0.0;
  }

  // mu_i as a probability on the whole group (0 off the subgroup).
  double comp_pmf(std::size_t i, const Element& g) const {
    const auto& c = spec_.components[i];
    auto coords = c.subgroup.coordinates(g);
    if (!coords) return 0.0;
    if (c.subgroup.kind() == SubgroupKind::Finite) {
      double em = e_mass(i);
      if (g == group().identity()) return em;
      return (1.0 - em) /
             static_cast<double>(c.subgroup.finite_elements().size() - 1);
    }
    i64 r = c.subgroup.word_length(g);
    return density(i, r) / tables_[i].Z;
  }

  double e_mass(std::size_t i) const {
    const auto& c = spec_.components[i];
    if (c.eMass >= 0.0) return c.eMass;
    return 1.0 / static_cast<double>(c.subgroup.finite_elements().size());
  }

  // ---- shells ---------------------------------------------------------------

  i64 shell_horizon(std::size_t i) const { return tables_[i].M; }
  double comp_Z(std::size_t i) const { return tables_[i].Z; }

  // probability mass of the whole shell {|h|_i = r} under mu_i
  double shell_mass(std::size_t i, i64 r) const {
    const auto& t = tables_[i];
    if (r < 0) return 0.0;
    if (r <= t.M) return t.shellMass[static_cast<std::size_t>(r)];
    return shell_count_poly(i, r) * density(i, r) / t.Z;
  }

  // sum over shells 0..r (within the table horizon)
  double cumulative_shell_mass(std::size_t i, i64 r) const {
    const auto& t = tables_[i];
    if (r < 0) return 0.0;
    if (r > t.M) throw std::invalid_argument("cumulative mass beyond horizon");
    return t.cdf[static_cast<std::size_t>(r)];
  }

  // sum_{|h|_i >= r} mu_i(h)
  double tail_mass(std::size_t i, i64 r) const {
    const auto& c = spec_.components[i];
    if (r <= 0) return 1.0;
    if (c.subgroup.kind() == SubgroupKind::Finite) {
      // all non-identity elements share the word-length table
      double m = 0.0;
      const auto& els = c.subgroup.finite_elements();
      for (const auto& h : els) {
        if (c.subgroup.word_length(h) >= r)
          m += comp_pmf(i, h);
      }
      return m;
    }
    const auto& t = tables_[i];
    if (r <= t.M) return 1.0 - (r >= 1 ? t.cdf[static_cast<std::size_t>(r - 1)] : 0.0);
    return tail_integral(i, static_cast<double>(r) - 0.5) / t.Z;
  }

  // prefix sums of normalized shell masses, indexed by radius 0..M
  const std::vector<double>& shell_cdf(std::size_t i) const {
    if (tables_[i].cdf.empty())
      throw std::logic_error("finite components have no shell table");
    return tables_[i].cdf;
  }

  // shell elements (lattice shells enumerated; guarded by count)
  std::vector<Element> shell_elements(std::size_t i, i64 r,
                                      i64 cap = 4000000) const {
    const auto& c = spec_.components[i];
    std::vector<Element> out;
    if (c.subgroup.kind() == SubgroupKind::Finite)
      throw std::logic_error("finite components have no shell enumeration");
    if (c.subgroup.kind() == SubgroupKind::DihedralType) {
      for (const auto& h : c.subgroup.dihedral_shell(r)) out.push_back(h);
      return out;
    }
    if (r == 0) return {group().identity()};
    double cnt = shell_count_poly(i, r);
    if (cnt > static_cast<double>(cap))
      throw std::overflow_error("shell enumeration exceeds cap");
    int m = c.subgroup.rank();
    std::vector<i64> coords(static_cast<std::size_t>(m), 0);
    enumerate_shell(c, coords, 0, r, out);
    return out;
  }

  // exact shell count as double (polynomial evaluation for large r)
  double shell_count_poly(std::size_t i, i64 r) const {
    const auto& c = spec_.components[i];
    if (r == 0) return 1.0;
    if (c.subgroup.kind() == SubgroupKind::DihedralType) return 2.0;
    const auto& poly = tables_[i].shellPoly;
    double u = 1.0 + static_cast<double>(r);
    double v = 0.0;
    for (std::size_t j = poly.size(); j-- > 0;) v = v * u + poly[j];
    return v;
  }

  // ---- density helpers ------------------------------------------------------

  // unnormalized density rho(r) = [(1+r)^d phi(1+r)]^{-1}
  double density(std::size_t i, i64 r) const {
    const auto& c = spec_.components[i];
    double u = 1.0 + static_cast<double>(r);
    double d = static_cast<double>(c.subgroup.growth_degree());
    return 1.0 / (std::pow(u, d) * c.profile.pure_form(u));
  }

  // integral of the shell-law mass from x0 to infinity (unnormalized)
  double tail_integral(std::size_t i, double x0) const {
    return tail_integral_impl(spec_.components[i], tables_[i].shellPoly, x0);
  }

  const std::vector<Mu0Atom>& mu0_atoms() const { return mu0_; }

 private:
  static double tail_integral_impl(const WalkComponent& c,
                                   const std::vector<double>& poly,
                                   double x0) {
    double d = static_cast<double>(c.subgroup.growth_degree());
    double w = c.profile.alpha;
    double beta = c.profile.family == JumpProfile::Family::PowerLog
                      ? c.profile.beta
                      : 0.0;
    double u0 = 1.0 + x0;
    if (beta == 0.0 && c.profile.family != JumpProfile::Family::PowerLog) {
      double total = 0.0;
      for (std::size_t j = 0; j < poly.size(); ++j) {
        double expnt = d + w - static_cast<double>(j) - 1.0;
        if (!(expnt > 0.0))
          throw std::logic_error("tail integral diverges");
        total += poly[j] * std::pow(u0, -expnt) / expnt;
      }
      return total;
    }
    auto f = [&](double x) {
      double u = 1.0 + x;
      double nv = 0.0;
      for (std::size_t j = poly.size(); j-- > 0;) nv = nv * u + poly[j];
      return nv / (std::pow(u, d + w) *
                   std::pow(std::log(std::exp(1.0) + u), beta));
    };
    return improper_integral_geometric(f, x0, 1e-11);
  }

  struct CompTables {
    i64 M = 0;
    double Z = 0.0;
    std::vector<double> shellMass;  // normalized mass of shell r
    std::vector<double> cdf;        // prefix sums of shellMass
    std::vector<double> shellPoly;  // N(r) as polynomial in u = 1+r
  };

  WalkSpec spec_;
  std::vector<Mu0Atom> mu0_;
  std::vector<CompTables> tables_;

  void build_component(std::size_t i) {
    const auto& c = spec_.components[i];
    CompTables t;
    if (c.subgroup.kind() == SubgroupKind::Finite) {
      tables_.push_back(std::move(t));
      return;
    }
    t.M = spec_.shellCap;
    if (c.profile.family == JumpProfile::Family::PowerLog && t.M < (1 << 18))
      throw std::invalid_argument(
          "shellCap too small for log-corrected tails");
    if (c.subgroup.kind() == SubgroupKind::DihedralType)
      t.shellPoly = {2.0};
    else
      t.shellPoly = detail::lattice_shell_poly(c.subgroup.rank());

    std::size_t n = static_cast<std::size_t>(t.M) + 1;
    t.shellMass.resize(n);
    t.cdf.resize(n);
    // explicit shells with compensated summation; high ranks evaluate the
    // shell polynomial instead of the 128-bit exact count (identical values,
    // no overflow)
    bool exactCounts = c.subgroup.rank() <= 4 ||
                       c.subgroup.kind() == SubgroupKind::DihedralType;
    auto polyAt = [&](i64 r) {
      double u = 1.0 + static_cast<double>(r);
      double v = 0.0;
      for (std::size_t j = t.shellPoly.size(); j-- > 0;)
        v = v * u + t.shellPoly[j];
      return v;
    };
    double sum = 0.0, comp = 0.0;
    for (i64 r = 0; r <= t.M; ++r) {
      double nr =
          r == 0 ? 1.0
                 : (exactCounts
                        ? static_cast<double>(c.subgroup.shell_count_exact(r))
                        : polyAt(r));
      double term = nr * density(i, r);
      t.shellMass[static_cast<std::size_t>(r)] = term;
      double y = term - comp;
      double s2 = sum + y;
      comp = (s2 - sum) - y;
      sum = s2;
    }
    double tail = tail_integral_impl(c, t.shellPoly,
                                     static_cast<double>(t.M) + 0.5);
    t.Z = sum + tail;
    // Euler-Maclaurin midpoint error monitor at the matching point
    double h = 0.5;
    auto f = [&](double x) {
      double u = 1.0 + x;
      double nv = 0.0;
      for (std::size_t j = t.shellPoly.size(); j-- > 0;)
        nv = nv * u + t.shellPoly[j];
      double d = static_cast<double>(c.subgroup.growth_degree());
      return nv / (std::pow(u, d) * c.profile.pure_form(u));
    };
    double x0 = static_cast<double>(t.M) + 0.5;
    double fprime = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
    if (std::fabs(fprime) / 24.0 > 1e-9 * t.Z)
      throw std::invalid_argument(
          "shellCap too small: tail matching error above tolerance");
    // normalize
    for (i64 r = 0; r <= t.M; ++r) {
      std::size_t k = static_cast<std::size_t>(r);
      t.shellMass[k] /= t.Z;
      t.cdf[k] = (k == 0 ? 0.0 : t.cdf[k - 1]) + t.shellMass[k];
    }
    tables_.push_back(std::move(t));
  }

  void enumerate_shell(const WalkComponent& c, std::vector<i64>& coords,
                       std::size_t j, i64 remaining,
                       std::vector<Element>& out) const {
    if (j + 1 == coords.size()) {
      for (i64 v : {remaining, -remaining}) {
        coords[j] = v;
        out.push_back(c.subgroup.from_coordinates(coords));
        if (remaining == 0) break;
      }
      coords[j] = 0;
      return;
    }
    for (i64 a = -remaining; a <= remaining; ++a) {
      coords[j] = a;
      enumerate_shell(c, coords, j + 1, remaining - (a < 0 ? -a : a), out);
    }
    coords[j] = 0;
  }
};

}  // namespace longjump
