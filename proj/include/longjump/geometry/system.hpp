#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "longjump/geometry/phi.hpp"
#include "longjump/geometry/weight.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/group/subgroup.hpp"

namespace longjump {

// Radial tail profile of one jump component.
struct JumpProfile {
  enum class Family { Power, PowerLog, LinearSqrtCap };
  Family family = Family::Power;
  double alpha = 1.0;  // polynomial index (w for power_log)
  double beta = 0.0;   // log exponent (power_log only)

  static JumpProfile power(double a) { return {Family::Power, a, 0.0}; }
  static JumpProfile power_log(double w, double b) {
    return {Family::PowerLog, w, b};
  }
  static JumpProfile linear_sqrt_cap() {
    return {Family::LinearSqrtCap, 0.5, 0.0};
  }

  GrowthClass growth_class() const {
    return {alpha, family == Family::PowerLog ? beta : 0.0};
  }

  // The profile as a budget-style weight function.
  Weight weight() const {
    switch (family) {
      case Family::Power: return Weight::power(alpha);
      case Family::PowerLog: return Weight::power_log(alpha, beta);
      case Family::LinearSqrtCap: return Weight::power(0.5);
    }
    throw std::logic_error("unreachable");
  }

  // Raw density denominator factor phi(t) evaluated at t >= 1 (used by the
  // jump-law density, which works with t^w log^beta directly rather than the
  // shifted budget form).
  double pure_form(double t) const {
    switch (family) {
      case Family::Power: return std::pow(t, alpha);
      case Family::PowerLog:
        return std::pow(t, alpha) *
               std::pow(std::log(std::exp(1.0) + t), beta);
      case Family::LinearSqrtCap: return std::sqrt(t);
    }
    throw std::logic_error("unreachable");
  }

  PhiTransform transform() const {
    switch (family) {
      case Family::Power: return PhiTransform::power(alpha);
      case Family::PowerLog: return PhiTransform::power_log(alpha, beta);
      case Family::LinearSqrtCap: return PhiTransform::power(0.5);
    }
    throw std::logic_error("unreachable");
  }

  std::string describe() const {
    std::ostringstream os;
    switch (family) {
      case Family::Power: os << "power(" << alpha << ")"; break;
      case Family::PowerLog:
        os << "power_log(" << alpha << "," << beta << ")";
        break;
      case Family::LinearSqrtCap: os << "linear_sqrt_cap"; break;
    }
    return os.str();
  }
};

// One jump component: a subgroup carrying a radial law.
struct WalkComponent {
  Subgroup subgroup;
  JumpProfile profile;
  double p = 0.0;      // selection probability
  double eMass = -1.0; // finite subgroups: mass at e (default 1/|H|)

  WalkComponent(Subgroup sg, JumpProfile prof, double prob, double em = -1.0)
      : subgroup(std::move(sg)), profile(prof), p(prob), eMass(em) {}
};

// Explicit atom of the bounded base measure mu0.
struct Mu0Atom {
  Element g;
  double mass = 0.0;
};

// Full specification of the step distribution mu = p0*mu0 + sum p_i*mu_i.
struct WalkSpec {
  Group group;
  double p0 = 0.0;
  std::vector<WalkComponent> components;
  std::vector<Mu0Atom> mu0;          // empty => default lazy uniform atoms
  std::optional<double> wStarOverride;
  i64 shellCap = i64{1} << 20;       // shell table horizon per component

  explicit WalkSpec(const Group& g) : group(g) {}

  // Default mu0: uniform over {e} and the signed standard generators.
  std::vector<Mu0Atom> effective_mu0() const {
    if (!mu0.empty()) return mu0;
    std::vector<Mu0Atom> atoms;
    std::vector<Element> support{group.identity()};
    for (const auto& s : group.standard_generators()) {
      auto add = [&](const Element& g) {
        if (std::find(support.begin(), support.end(), g) == support.end())
          support.push_back(g);
      };
      add(s);
      add(group.inv(s));
    }
    double m = 1.0 / static_cast<double>(support.size());
    for (const auto& g : support) atoms.push_back({g, m});
    return atoms;
  }

  void validate() const {
    double total = p0;
    if (p0 < 0.0) throw std::invalid_argument("p0 must be nonnegative");
    for (std::size_t i = 0; i < components.size(); ++i) {
      const auto& c = components[i];
      if (!(c.p > 0.0))
        throw std::invalid_argument("component probabilities must be positive");
      if (!(c.subgroup.group() == group))
        throw std::invalid_argument("component subgroup on a different group");
      if (!(c.profile.alpha > 0.0))
        throw std::invalid_argument("profile index must be positive");
      if (c.subgroup.kind() == SubgroupKind::Finite) {
        double em = c.eMass >= 0.0
                        ? c.eMass
                        : 1.0 / static_cast<double>(
                                    c.subgroup.finite_elements().size());
        if (!(em > 0.0 && em < 1.0))
          throw std::invalid_argument("finite-component eMass must be in (0,1)");
      }
      total += c.p;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("component probabilities must sum to 1");
    if (!mu0.empty()) {
      double m0 = 0.0;
      bool hasE = false;
      for (const auto& a : mu0) {
        group.validate(a.g);
        if (a.mass < 0.0) throw std::invalid_argument("mu0 masses must be >= 0");
        if (a.g == group.identity() && a.mass > 0.0) hasE = true;
        m0 += a.mass;
        // symmetry: the inverse must carry the same mass
        double invMass = -1.0;
        Element gi = group.inv(a.g);
        for (const auto& b : mu0)
          if (b.g == gi) invMass = b.mass;
        if (std::fabs(invMass - a.mass) > 1e-15)
          throw std::invalid_argument("mu0 must be symmetric");
      }
      if (std::fabs(m0 - 1.0) > 1e-12)
        throw std::invalid_argument("mu0 masses must sum to 1");
      if (!hasE && p0 > 0.0)
        throw std::invalid_argument("mu0 must put positive mass at e");
    }
    if (wStarOverride && !(*wStarOverride > 0.0))
      throw std::invalid_argument("wStar must be positive");
    if (shellCap < 64) throw std::invalid_argument("shellCap too small");
    check_generation();
  }

 private:
  // The union of component generators, mu0 atoms, and base generators must
  // generate the group; for the built-ins it suffices that every standard
  // generator's coordinate direction is reachable.  We check by BFS closure
  // over the support atoms against each standard generator.
  void check_generation() const {
    std::vector<Element> atoms;
    if (p0 > 0.0)
      for (const auto& a : effective_mu0())
        if (a.mass > 0.0) atoms.push_back(a.g);
    for (const auto& c : components)
      for (const auto& s : c.subgroup.generators()) atoms.push_back(s);
    // BFS over words of bounded length in the atoms; every standard
    // generator must appear (word length <= 8 suffices for all built-ins).
    std::vector<Element> frontier{group.identity()};
    std::vector<Element> seen = frontier;
    auto contains = [&](const Element& g) {
      return std::find(seen.begin(), seen.end(), g) != seen.end();
    };
    std::vector<Element> targets = group.standard_generators();
    auto done = [&] {
      for (const auto& t : targets)
        if (!contains(t)) return false;
      return true;
    };
    for (int depth = 0; depth < 8 && !done(); ++depth) {
      std::vector<Element> next;
      for (const auto& g : frontier) {
        for (const auto& a : atoms) {
          for (const Element& step : {a, group.inv(a)}) {
            Element h = group.mul(g, step);
            if (!contains(h) && seen.size() < 4096) {
              seen.push_back(h);
              next.push_back(h);
            }
          }
        }
      }
      frontier = std::move(next);
      if (frontier.empty()) break;
    }
    if (!done())
      throw std::invalid_argument(
          "measure support does not generate the group");
  }
};

}  // namespace longjump
