#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "longjump/group/element.hpp"
#include "longjump/util/checked.hpp"

namespace longjump {

// The built-in groups, each with a fixed normal form:
//
//   ZK(k)             x = (x1..xk), componentwise addition.
//   Heisenberg3       (x1,x2,x3): integer upper-unitriangular 3x3 matrices;
//                     (x1,x2,x3)*(y1,y2,y3) = (x1+y1, x2+y2, x3+y3+x1*y2).
//   DihedralInf       (n,eps) <-> (uv)^n u^eps over involutions u,v;
//                     z = uv satisfies u z u = z^{-1}.
//   DeltaGroup        (n1,n2,n3,eps) <-> theta^n * s^eps in Z^3 x| Z/2 where
//                     the flip acts by inversion; the four standard
//                     generators are involutions.
//   SemidirectZRotZ2  (k,n1,n2) in Z x| Z^2, s = +1 on the Z factor acting
//                     by the quarter-turn rho(n1,n2) = (-n2,n1), rho^4 = id.
enum class GroupKind { ZK, Heisenberg3, DihedralInf, DeltaGroup, SemidirectZRotZ2 };

namespace detail {
// rho^k applied to (a,b), k taken mod 4.
inline std::pair<i64, i64> rot(i64 k, i64 a, i64 b) {
  i64 r = ((k % 4) + 4) % 4;
  switch (r) {
    case 0: return {a, b};
    case 1: return {chk_neg(b), a};
    case 2: return {chk_neg(a), chk_neg(b)};
    default: return {b, chk_neg(a)};
  }
}
}  // namespace detail

class Group {
 public:
  static Group zk(int k) {
    if (k < 1 || k > kMaxCoords)
      throw std::invalid_argument("ZK arity must be in [1, " +
                                  std::to_string(kMaxCoords) + "]");
    return Group(GroupKind::ZK, k);
  }
  static Group heisenberg3() { return Group(GroupKind::Heisenberg3, 3); }
  static Group dihedral_inf() { return Group(GroupKind::DihedralInf, 2); }
  static Group delta() { return Group(GroupKind::DeltaGroup, 4); }
  static Group semidirect_zrot() { return Group(GroupKind::SemidirectZRotZ2, 3); }

  GroupKind kind() const { return kind_; }
  int coords() const { return coords_; }

  std::string name() const {
    switch (kind_) {
      case GroupKind::ZK: return "ZK(" + std::to_string(coords_) + ")";
      case GroupKind::Heisenberg3: return "Heisenberg3";
      case GroupKind::DihedralInf: return "DihedralInf";
      case GroupKind::DeltaGroup: return "DeltaGroup";
      case GroupKind::SemidirectZRotZ2: return "SemidirectZRotZ2";
    }
    return "?";
  }

  Element identity() const {
    Element e;
    e.n = static_cast<std::uint8_t>(coords_);
    return e;
  }

  // Arity plus coordinate-range validation (flip coordinates live in {0,1}).
  void validate(const Element& a) const {
    if (a.n != coords_)
      throw std::invalid_argument(name() + ": element has arity " +
                                  std::to_string(a.n) + ", expected " +
                                  std::to_string(coords_));
    if (kind_ == GroupKind::DihedralInf && (a[1] < 0 || a[1] > 1))
      throw std::invalid_argument("DihedralInf: flip coordinate must be 0 or 1");
    if (kind_ == GroupKind::DeltaGroup && (a[3] < 0 || a[3] > 1))
      throw std::invalid_argument("DeltaGroup: flip coordinate must be 0 or 1");
  }

  Element mul(const Element& a, const Element& b) const {
    validate(a);
    validate(b);
    Element r = identity();
    switch (kind_) {
      case GroupKind::ZK:
        for (int i = 0; i < coords_; ++i) r[i] = chk_add(a[i], b[i]);
        break;
      case GroupKind::Heisenberg3:
        r[0] = chk_add(a[0], b[0]);
        r[1] = chk_add(a[1], b[1]);
        r[2] = chk_add(chk_add(a[2], b[2]), chk_mul(a[0], b[1]));
        break;
      case GroupKind::DihedralInf:
        // (n,0)(m,h) = (n+m, h);  (n,1)(m,h) = (n-m, 1^h).
        r[0] = a[1] == 0 ? chk_add(a[0], b[0]) : chk_sub(a[0], b[0]);
        r[1] = a[1] ^ b[1];
        break;
      case GroupKind::DeltaGroup: {
        i64 sgn = a[3] == 0 ? 1 : -1;
        for (int i = 0; i < 3; ++i) r[i] = chk_add(a[i], chk_mul(sgn, b[i]));
        r[3] = a[3] ^ b[3];
        break;
      }
      case GroupKind::SemidirectZRotZ2: {
        auto [x, y] = detail::rot(a[0], b[1], b[2]);
        r[0] = chk_add(a[0], b[0]);
        r[1] = chk_add(a[1], x);
        r[2] = chk_add(a[2], y);
        break;
      }
    }
    return r;
  }

  Element inv(const Element& a) const {
    validate(a);
    Element r = identity();
    switch (kind_) {
      case GroupKind::ZK:
        for (int i = 0; i < coords_; ++i) r[i] = chk_neg(a[i]);
        break;
      case GroupKind::Heisenberg3:
        r[0] = chk_neg(a[0]);
        r[1] = chk_neg(a[1]);
        r[2] = chk_sub(chk_mul(a[0], a[1]), a[2]);
        break;
      case GroupKind::DihedralInf:
        // Reflections are involutions: (n,1)^{-1} = (n,1).
        r[0] = a[1] == 0 ? chk_neg(a[0]) : a[0];
        r[1] = a[1];
        break;
      case GroupKind::DeltaGroup:
        if (a[3] == 0) {
          for (int i = 0; i < 3; ++i) r[i] = chk_neg(a[i]);
        } else {
          r = a;  // flip elements are involutions
        }
        break;
      case GroupKind::SemidirectZRotZ2: {
        auto [x, y] = detail::rot(-a[0], chk_neg(a[1]), chk_neg(a[2]));
        r[0] = chk_neg(a[0]);
        r[1] = x;
        r[2] = y;
        break;
      }
    }
    return r;
  }

  // Standard generating tuple, one representative per {g, g^{-1}} pair.
  std::vector<Element> standard_generators() const {
    switch (kind_) {
      case GroupKind::ZK: {
        std::vector<Element> g;
        for (int i = 0; i < coords_; ++i) {
          Element e = identity();
          e[i] = 1;
          g.push_back(e);
        }
        return g;
      }
      case GroupKind::Heisenberg3:
        return {make_element({1, 0, 0}), make_element({0, 1, 0}),
                make_element({0, 0, 1})};
      case GroupKind::DihedralInf:
        // u = (0,1), v = u*z = (-1,1).
        return {make_element({0, 1}), make_element({-1, 1})};
      case GroupKind::DeltaGroup:
        // s, s', t, t' — all involutions; the lattice directions arise as
        // pairwise products: s't = theta1, st = theta2, st' = theta3.
        return {make_element({0, 0, 0, 1}), make_element({1, -1, 0, 1}),
                make_element({0, -1, 0, 1}), make_element({0, 0, -1, 1})};
      case GroupKind::SemidirectZRotZ2:
        return {make_element({1, 0, 0}), make_element({0, 1, 0}),
                make_element({0, 0, 1})};
    }
    return {};
  }

  // Left-to-right product of (generator index, +1/-1) letters over a
  // generating tuple; the empty word is the identity.
  Element evaluate_word(const std::vector<Element>& gens,
                        const std::vector<std::pair<int, int>>& letters) const {
    Element acc = identity();
    for (auto [idx, sgn] : letters) {
      if (idx < 0 || static_cast<std::size_t>(idx) >= gens.size())
        throw std::out_of_range("evaluate_word: unknown generator id " +
                                std::to_string(idx));
      const Element& g = gens[static_cast<std::size_t>(idx)];
      acc = mul(acc, sgn >= 0 ? g : inv(g));
    }
    return acc;
  }

  friend bool operator==(const Group& a, const Group& b) {
    return a.kind_ == b.kind_ && a.coords_ == b.coords_;
  }

 private:
  Group(GroupKind kind, int coords) : kind_(kind), coords_(coords) {}

  GroupKind kind_;
  int coords_;
};

}  // namespace longjump
