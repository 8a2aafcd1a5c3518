#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"

namespace longjump {

// One layer of the volume filtration of the nilpotent subgroup N: a set of
// direct generators plus commutator pairs whose bracket also lands in the
// layer.  The filtration drives volume-exponent bookkeeping: each layer
// contributes one lattice direction whose reach combines the direct
// generators' weights with the products of the pairs' weights.
struct VolumeLayer {
  std::vector<Element> direct;
  std::vector<std::pair<Element, Element>> commutators;
};

// A power-of-generator factor in a normal-form decomposition.
struct PowerFactor {
  Element base;
  i64 exponent = 0;
};

// Normal form g = prod_j base_j^{exponent_j}; the factors multiply
// left-to-right and reproduce g exactly.
struct Decomposition {
  std::vector<PowerFactor> factors;
  Element cosetRep;  // trailing connector (identity when g is in N)
};

// Each built-in group G carries a finite-index nilpotent subgroup N together
// with coset representatives and an explicit normal form.  For the nilpotent
// groups themselves N = G with the single representative e.
class NilpotentApprox {
 public:
  explicit NilpotentApprox(const Group& group) : group_(group) {
    const auto S = group_.standard_generators();
    switch (group_.kind()) {
      case GroupKind::ZK:
        cosetReps_ = {group_.identity()};
        nGens_ = S;
        for (const auto& s : S) layers_.push_back({{s}, {}});
        break;
      case GroupKind::Heisenberg3:
        cosetReps_ = {group_.identity()};
        nGens_ = S;
        layers_.push_back({{S[0]}, {}});
        layers_.push_back({{S[1]}, {}});
        layers_.push_back({{S[2]}, {{S[0], S[1]}}});
        break;
      case GroupKind::DihedralInf: {
        // N = <z> (translations), index 2, reps {e, u}.
        cosetReps_ = {group_.identity(), make_element({0, 1})};
        nGens_ = {make_element({1, 0})};
        layers_.push_back({{nGens_[0]}, {}});
        break;
      }
      case GroupKind::DeltaGroup: {
        // N = Z^3 (eps = 0), index 2, reps {e, s}.
        cosetReps_ = {group_.identity(), make_element({0, 0, 0, 1})};
        for (int i = 0; i < 3; ++i) {
          Element theta = group_.identity();
          theta[i] = 1;
          nGens_.push_back(theta);
          layers_.push_back({{theta}, {}});
        }
        break;
      }
      case GroupKind::SemidirectZRotZ2: {
        // N = 4Z x Z^2 (rotation part trivial), index 4, reps {s^r}.
        for (i64 r = 0; r < 4; ++r) cosetReps_.push_back(make_element({r, 0, 0}));
        nGens_ = {make_element({4, 0, 0}), S[1], S[2]};
        for (const auto& g : nGens_) layers_.push_back({{g}, {}});
        break;
      }
    }
  }

  const Group& group() const { return group_; }

  // Coset representatives u_0 = e, u_1, ...; G = union of N * u_l.
  const std::vector<Element>& coset_reps() const { return cosetReps_; }

  // Standard generating tuple of N (the direct generators of the layers).
  const std::vector<Element>& nilpotent_generators() const { return nGens_; }

  const std::vector<VolumeLayer>& layers() const { return layers_; }

  bool in_nilpotent(const Element& g) const {
    switch (group_.kind()) {
      case GroupKind::ZK:
      case GroupKind::Heisenberg3:
        return true;
      case GroupKind::DihedralInf:
        return g[1] == 0;
      case GroupKind::DeltaGroup:
        return g[3] == 0;
      case GroupKind::SemidirectZRotZ2:
        return ((g[0] % 4) + 4) % 4 == 0;
    }
    return false;
  }

  // g = h * u_l with h in N; returns (h, l).
  std::pair<Element, std::size_t> coset_decompose(const Element& g) const {
    for (std::size_t l = 0; l < cosetReps_.size(); ++l) {
      Element h = group_.mul(g, group_.inv(cosetReps_[l]));
      if (in_nilpotent(h)) return {h, l};
    }
    throw std::logic_error("coset_decompose: no representative matched");
  }

  // Exact normal form of g as powers of the N-generators followed by a coset
  // representative.  Exponent sizes are comparable to the coordinates of g
  // (for Heisenberg the central exponent is c - ab, the correction from
  // stacking the two horizontal powers first).
  Decomposition decompose(const Element& g) const {
    group_.validate(g);
    Decomposition d;
    switch (group_.kind()) {
      case GroupKind::ZK: {
        for (int i = 0; i < group_.coords(); ++i)
          d.factors.push_back({nGens_[static_cast<std::size_t>(i)], g[i]});
        d.cosetRep = group_.identity();
        break;
      }
      case GroupKind::Heisenberg3: {
        i64 a = g[0], b = g[1], c = g[2];
        d.factors.push_back({nGens_[0], a});
        d.factors.push_back({nGens_[1], b});
        d.factors.push_back({nGens_[2], chk_sub(c, chk_mul(a, b))});
        d.cosetRep = group_.identity();
        break;
      }
      case GroupKind::DihedralInf: {
        d.factors.push_back({nGens_[0], g[0]});
        d.cosetRep = cosetReps_[static_cast<std::size_t>(g[1])];
        break;
      }
      case GroupKind::DeltaGroup: {
        for (std::size_t i = 0; i < 3; ++i)
          d.factors.push_back({nGens_[i], g[static_cast<int>(i)]});
        d.cosetRep = cosetReps_[static_cast<std::size_t>(g[3])];
        break;
      }
      case GroupKind::SemidirectZRotZ2: {
        i64 r = ((g[0] % 4) + 4) % 4;
        d.factors.push_back({nGens_[0], (g[0] - r) / 4});
        d.factors.push_back({nGens_[1], g[1]});
        d.factors.push_back({nGens_[2], g[2]});
        d.cosetRep = cosetReps_[static_cast<std::size_t>(r)];
        break;
      }
    }
    return d;
  }

  // Multiply a decomposition back out (for verification).
  Element evaluate(const Decomposition& d) const {
    Element acc = group_.identity();
    for (const auto& f : d.factors) {
      Element p = group_.identity();
      Element base = f.exponent >= 0 ? f.base : group_.inv(f.base);
      i64 reps = f.exponent >= 0 ? f.exponent : -f.exponent;
      for (i64 i = 0; i < reps; ++i) p = group_.mul(p, base);
      acc = group_.mul(acc, p);
    }
    return group_.mul(acc, d.cosetRep);
  }

 private:
  Group group_;
  std::vector<Element> cosetReps_;
  std::vector<Element> nGens_;
  std::vector<VolumeLayer> layers_;
};

}  // namespace longjump
