#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "longjump/geometry/phi.hpp"
#include "longjump/geometry/system.hpp"
#include "longjump/geometry/weight.hpp"
#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/group/nilpotent.hpp"
#include "longjump/group/subgroup.hpp"
#include "longjump/util/num.hpp"

namespace longjump {

// A letter of a weighted generating system: a canonical representative of
// {g, g^{-1}} together with the merged budget weight and the component ids
// that contribute to it (0 denotes the bounded base measure).
struct SystemLetter {
  Element rep;
  Weight weight;
  std::vector<int> sources;
};

inline Element canonical_rep(const Group& G, const Element& g) {
  Element gi = G.inv(g);
  return gi < g ? gi : g;
}

class WeightSystem {
 public:
  WeightSystem() = default;

  void add(const Group& G, const Element& g, const Weight& w, int source) {
    Element rep = canonical_rep(G, g);
    for (auto& l : letters_) {
      if (l.rep == rep) {
        l.weight = Weight::merged({l.weight, w});
        if (std::find(l.sources.begin(), l.sources.end(), source) ==
            l.sources.end())
          l.sources.push_back(source);
        return;
      }
    }
    letters_.push_back({rep, w, {source}});
  }

  const std::vector<SystemLetter>& letters() const { return letters_; }

  const SystemLetter* find(const Group& G, const Element& g) const {
    Element rep = canonical_rep(G, g);
    for (const auto& l : letters_)
      if (l.rep == rep) return &l;
    return nullptr;
  }

  double min_index() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& l : letters_) m = std::min(m, l.weight.index());
    return m;
  }

  double max_index() const {
    double m = 0.0;
    for (const auto& l : letters_) m = std::max(m, l.weight.index());
    return m;
  }

  void sort_letters() {
    std::sort(letters_.begin(), letters_.end(),
              [](const SystemLetter& a, const SystemLetter& b) {
                return a.rep < b.rep;
              });
  }

 private:
  std::vector<SystemLetter> letters_;
};

// One factor of the volume function: a weight raised to an integer rank.
struct VolumeFactor {
  Weight fn;
  int rank = 1;
  std::string origin;
};

// V(R) = prod_j fn_j(R)^{rank_j}; the polynomial exponent and aggregate log
// power follow from the factors' growth classes.
class VolumeFunction {
 public:
  VolumeFunction() = default;
  explicit VolumeFunction(std::vector<VolumeFactor> f) : factors_(std::move(f)) {}

  const std::vector<VolumeFactor>& factors() const { return factors_; }

  double exponent() const {
    double d = 0.0;
    for (const auto& f : factors_) d += f.rank * f.fn.growth_class().index;
    return d;
  }

  double log_power() const {
    double b = 0.0;
    for (const auto& f : factors_) b += f.rank * f.fn.growth_class().logPower;
    return b;
  }

  double eval(double R) const {
    if (R <= 0.0) return 0.0;
    double v = 1.0;
    for (const auto& f : factors_)
      v *= std::pow(f.fn.eval(R), static_cast<double>(f.rank));
    return v;
  }

 private:
  std::vector<VolumeFactor> factors_;
};

// Result of pushing an element through the nilpotent normal form while
// accounting budget usage against the adapted weights.
struct BoundedDecomposition {
  std::vector<std::pair<Element, i64>> factors;  // (direction gen, exponent)
  Element cosetRep;                              // short connector
  double usageRatio = 0.0;  // max_j |x_j| / max(1, F_j(|g|))
};

// Returns the ordered jump-profile transform classes; throws if the
// components are not listed in nondecreasing class order.
inline std::vector<GrowthClass> validate_P_order(const WalkSpec& spec) {
  std::vector<GrowthClass> classes;
  for (const auto& c : spec.components) {
    GrowthClass in = c.profile.growth_class();
    classes.push_back(PhiTransform::transform_class(in.index, in.logPower));
  }
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (class_less(classes[i], classes[i - 1]))
      throw std::invalid_argument(
          "components must be ordered by increasing transform class");
  }
  return classes;
}

class AdaptedGeometry {
 public:
  AdaptedGeometry(const WalkSpec& spec, std::optional<double> wStarOverride)
      : group_(spec.group), nil_(spec.group) {
    build_systems(spec);
    build_direction_weights();
    build_volume();
    double minIdx = sysG_.min_index();
    double maxIdx = sysG_.max_index();
    if (wStarOverride) {
      if (!(*wStarOverride > 0.0 && *wStarOverride < minIdx))
        throw std::invalid_argument(
            "wStar override must lie strictly below the smallest letter index");
      wStar_ = *wStarOverride;
    } else {
      wStar_ = 0.5 * minIdx;
    }
    wUpper_ = 2.0 * maxIdx;
  }

  const Group& group() const { return group_; }
  const WeightSystem& system_g() const { return sysG_; }
  const WeightSystem& system_n() const { return sysN_; }
  const VolumeFunction& volume() const { return vol_; }
  const NilpotentApprox& nilpotent() const { return nil_; }
  double w_star() const { return wStar_; }
  double w_upper() const { return wUpper_; }
  const std::vector<double>& direction_weights() const { return dirW_; }

  // ---- norms ------------------------------------------------------------

  // Closed-form quasi-norm: the smallest R for which the coordinate box
  // {|x_j| <= R^{w_j}} (with the group's direction weights) captures g.
  double closed_norm(const Element& g) const {
    switch (group_.kind()) {
      case GroupKind::ZK: {
        double r = 0.0;
        for (int j = 0; j < group_.coords(); ++j)
          r = std::max(r, coord_radius(g[j], dirW_[j]));
        return r;
      }
      case GroupKind::Heisenberg3: {
        double r = coord_radius(g[0], dirW_[0]);
        r = std::max(r, coord_radius(g[1], dirW_[1]));
        r = std::max(r, coord_radius(g[2], dirW_[2]));
        return r;
      }
      case GroupKind::DihedralInf: {
        double q = dihedral_q(g);
        double word = q * q;
        if (!hasZLetter_) return word;
        double lat = coord_radius(g[0], wZ_);
        if (g[1] != 0) lat = std::max(lat, 1.0);
        return std::min(word, lat);
      }
      case GroupKind::DeltaGroup: {
        double r = 0.0;
        for (int j = 0; j < 3; ++j)
          r = std::max(r, coord_radius(g[j], dirW_[j]));
        if (g[3] != 0) r = std::max(r, 1.0);
        return r;
      }
      case GroupKind::SemidirectZRotZ2: {
        double r = 0.0;
        for (int j = 0; j < 3; ++j)
          r = std::max(r, coord_radius(g[j], dirW_[0]));
        return r;
      }
    }
    throw std::logic_error("unreachable");
  }

  double norm_g2(const Element& g) const {
    return std::pow(1.0 + closed_norm(g), wStar_) - 1.0;
  }

  double norm_1(const Element& g) const {
    return std::pow(1.0 + closed_norm(g), wUpper_) - 1.0;
  }

  // Radius conversions between the rescaled and raw norm scales.
  double g2_radius_to_raw(double r) const {
    return std::pow(1.0 + r, 1.0 / wStar_) - 1.0;
  }
  double norm1_radius_to_raw(double r) const {
    return std::pow(1.0 + r, 1.0 / wUpper_) - 1.0;
  }

  // ---- balls ------------------------------------------------------------

  // Exact number of elements with closed_norm <= R.
  i64 ball_count(double R, i64 cap = i64{1} << 60) const {
    if (R < 0.0) return 0;
    i64 count = 0;
    switch (group_.kind()) {
      case GroupKind::ZK: {
        count = 1;
        for (int j = 0; j < group_.coords(); ++j)
          count = mul_capped(count, 2 * box_extent(R, dirW_[j]) + 1, cap);
        break;
      }
      case GroupKind::Heisenberg3: {
        count = 1;
        for (int j = 0; j < 3; ++j)
          count = mul_capped(count, 2 * box_extent(R, dirW_[j]) + 1, cap);
        break;
      }
      case GroupKind::DihedralInf: {
        if (!hasZLetter_) {
          count = 1 + 4 * static_cast<i64>(floor_snapped(std::sqrt(R)));
        } else {
          i64 q = static_cast<i64>(floor_snapped(std::sqrt(R)));
          i64 L = box_extent(R, wZ_);
          // union of the word-metric ball and the lattice box
          i64 translations = 2 * std::max(q, L) + 1;
          i64 reflections = 0;
          if (R >= 1.0) {
            // (n,1) with word route: n in [-q, q-1]; lattice route: |n| <= L
            i64 lo = std::min<i64>(-q, -L), hi = std::max<i64>(q - 1, L);
            reflections = hi - lo + 1;
          } else if (q >= 1) {
            reflections = 2 * q;  // word route only
          }
          count = translations + reflections;
        }
        break;
      }
      case GroupKind::DeltaGroup: {
        count = 1;
        for (int j = 0; j < 3; ++j)
          count = mul_capped(count, 2 * box_extent(R, dirW_[j]) + 1, cap);
        if (R >= 1.0) count = mul_capped(count, 2, cap);
        break;
      }
      case GroupKind::SemidirectZRotZ2: {
        i64 side = 2 * box_extent(R, dirW_[0]) + 1;
        count = mul_capped(mul_capped(side, side, cap), side, cap);
        break;
      }
    }
    if (count > cap)
      throw std::overflow_error("ball count exceeds configured cap");
    return count;
  }

  // Enumerates the ball; throws if the count exceeds the cap.
  std::vector<Element> ball_elements(double R, i64 cap = 1 << 24) const {
    i64 n = ball_count(R, cap);
    std::vector<Element> out;
    out.reserve(static_cast<std::size_t>(n));
    switch (group_.kind()) {
      case GroupKind::ZK: {
        std::vector<i64> ext(group_.coords());
        for (int j = 0; j < group_.coords(); ++j)
          ext[j] = box_extent(R, dirW_[j]);
        Element cur = group_.identity();
        enumerate_box(ext, 0, cur, out);
        break;
      }
      case GroupKind::Heisenberg3: {
        std::vector<i64> ext(3);
        for (int j = 0; j < 3; ++j) ext[j] = box_extent(R, dirW_[j]);
        for (i64 a = -ext[0]; a <= ext[0]; ++a)
          for (i64 b = -ext[1]; b <= ext[1]; ++b)
            for (i64 c = -ext[2]; c <= ext[2]; ++c)
              out.push_back(make_element({a, b, c}));
        break;
      }
      case GroupKind::DihedralInf: {
        out.push_back(group_.identity());
        i64 q = static_cast<i64>(floor_snapped(std::sqrt(R)));
        i64 L = hasZLetter_ ? box_extent(R, wZ_) : 0;
        i64 T = std::max(q, L);
        for (i64 n2 = 1; n2 <= T; ++n2) {
          out.push_back(make_element({n2, 0}));
          out.push_back(make_element({-n2, 0}));
        }
        i64 lo = 0, hi = -1;
        if (R >= 1.0 && hasZLetter_) {
          lo = std::min<i64>(-q, -L);
          hi = std::max<i64>(q - 1, L);
        } else if (q >= 1) {
          lo = -q;
          hi = q - 1;
        }
        for (i64 n2 = lo; n2 <= hi; ++n2) out.push_back(make_element({n2, 1}));
        break;
      }
      case GroupKind::DeltaGroup: {
        std::vector<i64> ext(3);
        for (int j = 0; j < 3; ++j) ext[j] = box_extent(R, dirW_[j]);
        for (i64 a = -ext[0]; a <= ext[0]; ++a)
          for (i64 b = -ext[1]; b <= ext[1]; ++b)
            for (i64 c = -ext[2]; c <= ext[2]; ++c) {
              out.push_back(make_element({a, b, c, 0}));
              if (R >= 1.0) out.push_back(make_element({a, b, c, 1}));
            }
        break;
      }
      case GroupKind::SemidirectZRotZ2: {
        i64 ext = box_extent(R, dirW_[0]);
        for (i64 a = -ext; a <= ext; ++a)
          for (i64 b = -ext; b <= ext; ++b)
            for (i64 c = -ext; c <= ext; ++c)
              out.push_back(make_element({a, b, c}));
        break;
      }
    }
    if (static_cast<i64>(out.size()) != n)
      throw std::logic_error("ball enumeration disagrees with ball count");
    return out;
  }

  // ---- decomposition ----------------------------------------------------

  BoundedDecomposition decompose_bounded(const Element& g) const {
    Decomposition d = nil_.decompose(g);
    BoundedDecomposition out;
    out.cosetRep = d.cosetRep;
    double R = closed_norm(g);
    double ratio = 0.0;
    for (const auto& f : d.factors) {
      out.factors.emplace_back(f.base, f.exponent);
      const SystemLetter* l = sysN_.find(group_, f.base);
      if (l == nullptr)
        throw std::logic_error("decomposition direction has no letter");
      double budget = std::max(1.0, l->weight.eval(R));
      ratio = std::max(
          ratio, std::fabs(static_cast<double>(f.exponent)) / budget);
    }
    out.usageRatio = ratio;
    return out;
  }

  // ---- reporting ----------------------------------------------------------

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["group"] = group_.name();
    j["wStar"] = wStar_;
    j["wUpper"] = wUpper_;
    auto dumpSystem = [&](const WeightSystem& sys) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& l : sys.letters()) {
        nlohmann::ordered_json e;
        e["element"] = l.rep.to_string();
        e["weight"] = l.weight.describe();
        e["index"] = l.weight.index();
        e["logPower"] = l.weight.growth_class().logPower;
        e["sources"] = l.sources;
        arr.push_back(e);
      }
      return arr;
    };
    j["lettersG"] = dumpSystem(sysG_);
    j["lettersN"] = dumpSystem(sysN_);
    nlohmann::ordered_json dw = nlohmann::ordered_json::array();
    for (double w : dirW_) dw.push_back(w);
    j["directionWeights"] = dw;
    nlohmann::ordered_json vf = nlohmann::ordered_json::array();
    for (const auto& f : vol_.factors()) {
      nlohmann::ordered_json e;
      e["origin"] = f.origin;
      e["rank"] = f.rank;
      e["index"] = f.fn.growth_class().index;
      e["logPower"] = f.fn.growth_class().logPower;
      e["weight"] = f.fn.describe();
      vf.push_back(e);
    }
    j["volume"] = {{"exponent", vol_.exponent()},
                   {"logPower", vol_.log_power()},
                   {"factors", vf}};
    return j;
  }

 private:
  Group group_;
  NilpotentApprox nil_;
  WeightSystem sysG_, sysN_;
  VolumeFunction vol_;
  std::vector<double> dirW_;
  double wStar_ = 0.25, wUpper_ = 2.0;
  bool hasZLetter_ = false;
  double wZ_ = 1.0;

  static double coord_radius(i64 x, double w) {
    if (x == 0) return 0.0;
    return std::pow(std::fabs(static_cast<double>(x)), 1.0 / w);
  }

  i64 box_extent(double R, double w) const {
    if (R < 0.0) return 0;
    double e = std::pow(R, w);
    if (e >= 9.0e18) throw std::overflow_error("ball extent overflows");
    return floor_snapped(e);
  }

  static i64 mul_capped(i64 a, i64 b, i64 cap) {
    i64 r = chk_mul(a, b);
    if (r > 4 * cap) throw std::overflow_error("ball count exceeds cap");
    return r;
  }

  void enumerate_box(const std::vector<i64>& ext, int j, Element& cur,
                     std::vector<Element>& out) const {
    if (j == static_cast<int>(ext.size())) {
      out.push_back(cur);
      return;
    }
    for (i64 v = -ext[j]; v <= ext[j]; ++v) {
      cur[j] = v;
      enumerate_box(ext, j + 1, cur, out);
    }
    cur[j] = 0;
  }

  static double dihedral_q(const Element& g) {
    if (g[1] == 0) return std::fabs(static_cast<double>(g[0]));
    return g[0] >= 0 ? static_cast<double>(g[0]) + 1.0
                     : -static_cast<double>(g[0]);
  }

  void build_systems(const WalkSpec& spec) {
    validate_P_order(spec);
    // letters of the full system
    if (spec.p0 > 0.0) {
      Weight base = PhiTransform::base().inverse_weight();
      for (const auto& a : spec.effective_mu0()) {
        if (a.mass <= 0.0 || a.g == group_.identity()) continue;
        sysG_.add(group_, a.g, base, 0);
      }
    }
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
      const auto& c = spec.components[i];
      bool finite = c.subgroup.kind() == SubgroupKind::Finite;
      Weight w = finite ? PhiTransform::base().inverse_weight()
                        : c.profile.transform().inverse_weight();
      for (const auto& s : c.subgroup.generators())
        sysG_.add(group_, s, w, static_cast<int>(i + 1));
    }
    if (sysG_.letters().empty())
      throw std::invalid_argument("weight system has no letters");
    sysG_.sort_letters();

    // letters of the nilpotent system
    Weight base = PhiTransform::base().inverse_weight();
    for (const auto& s : nil_.nilpotent_generators())
      sysN_.add(group_, s, base, 0);
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
      const auto& c = spec.components[i];
      if (c.subgroup.kind() == SubgroupKind::Finite) continue;
      auto inner = c.subgroup.generators_in_nilpotent();
      if (inner.empty())
        throw std::invalid_argument(
            "unbounded component must meet the lattice approximation");
      Weight w = c.profile.transform().inverse_weight();
      for (const auto& u : nil_.coset_reps())
        for (const auto& s : inner)
          sysN_.add(group_, group_.mul(group_.mul(u, s), group_.inv(u)), w,
                    static_cast<int>(i + 1));
    }
    sysN_.sort_letters();
  }

  double letter_index(const WeightSystem& sys, const Element& g) const {
    const SystemLetter* l = sys.find(group_, g);
    if (l == nullptr) throw std::logic_error("expected letter is missing");
    return l->weight.index();
  }

  void build_direction_weights() {
    dirW_.clear();
    switch (group_.kind()) {
      case GroupKind::ZK: {
        for (const auto& s : group_.standard_generators())
          dirW_.push_back(letter_index(sysG_, s));
        break;
      }
      case GroupKind::Heisenberg3: {
        auto gens = group_.standard_generators();
        double w1 = letter_index(sysG_, gens[0]);
        double w2 = letter_index(sysG_, gens[1]);
        double w3 = letter_index(sysG_, gens[2]);
        dirW_ = {w1, w2, std::max(w3, w1 + w2)};
        break;
      }
      case GroupKind::DihedralInf: {
        // direction weight applies only when a lattice component exists
        const SystemLetter* z = sysG_.find(group_, make_element({1, 0}));
        hasZLetter_ = z != nullptr;
        wZ_ = hasZLetter_ ? z->weight.index() : 1.0;
        dirW_ = {hasZLetter_ ? wZ_ : 0.5};
        break;
      }
      case GroupKind::DeltaGroup: {
        // theta_i is a two-letter route; the tighter budget binds
        Element s = make_element({0, 0, 0, 1});
        Element sp = make_element({1, -1, 0, 1});
        Element t = make_element({0, -1, 0, 1});
        Element tp = make_element({0, 0, -1, 1});
        double ws = letter_index(sysG_, s), wsp = letter_index(sysG_, sp);
        double wt = letter_index(sysG_, t), wtp = letter_index(sysG_, tp);
        dirW_ = {std::min(wsp, wt), std::min(ws, wt), std::min(ws, wtp)};
        break;
      }
      case GroupKind::SemidirectZRotZ2: {
        // the rotation mixes all directions; the heaviest letter sets the pace
        double w = std::max(0.5, sysG_.max_index());
        dirW_ = {w, w, w};
        break;
      }
    }
  }

  void build_volume() {
    std::vector<VolumeFactor> factors;
    for (const auto& layer : nil_.layers()) {
      std::vector<std::pair<Weight, std::string>> candidates;
      for (const auto& gdir : layer.direct) {
        const SystemLetter* l = sysN_.find(group_, gdir);
        if (l == nullptr) throw std::logic_error("layer direction unlettered");
        candidates.push_back({l->weight, "letter " + l->rep.to_string()});
      }
      for (const auto& pr : layer.commutators) {
        const SystemLetter* a = sysN_.find(group_, pr.first);
        const SystemLetter* b = sysN_.find(group_, pr.second);
        if (a == nullptr || b == nullptr)
          throw std::logic_error("commutator pair unlettered");
        candidates.push_back(
            {weight_product(a->weight, b->weight),
             "pair " + a->rep.to_string() + " , " + b->rep.to_string()});
      }
      if (candidates.empty()) throw std::logic_error("empty volume layer");
      std::size_t best = 0;
      for (std::size_t i = 1; i < candidates.size(); ++i)
        if (class_less(candidates[best].first.growth_class(),
                       candidates[i].first.growth_class()))
          best = i;
      factors.push_back({candidates[best].first, 1, candidates[best].second});
    }
    vol_ = VolumeFunction(std::move(factors));
  }

  static Weight weight_product(const Weight& a, const Weight& b) {
    GrowthClass cls = class_product(a.growth_class(), b.growth_class());
    auto fa = a, fb = b;
    auto eval = [fa, fb](double t) { return fa.eval(t) * fb.eval(t); };
    auto inv = [eval](double y) {
      return monotone_inverse([&](double t) { return eval(t); }, y);
    };
    return Weight::from_callable(eval, inv, cls,
                                 a.describe() + "*" + b.describe());
  }
};

inline AdaptedGeometry build_adapted_geometry(const WalkSpec& spec) {
  spec.validate();
  return AdaptedGeometry(spec, spec.wStarOverride);
}

}  // namespace longjump
