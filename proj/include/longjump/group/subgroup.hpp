#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/util/num.hpp"

namespace longjump {

// How a subgroup is identified with concrete coordinates:
//   Lattice       H ≅ Z^m, elements are integer combinations of a basis;
//                 |h| is the l1 norm of the coordinates.
//   DihedralType  H ≅ infinite dihedral (translations + reflections along
//                 one lattice axis); coordinates are (n, eps) and |h| is the
//                 word length over the two standard involutions.
//   Finite        explicit element list; |h| is the word length over the
//                 subgroup's generators (BFS table).
enum class SubgroupKind { Lattice, DihedralType, Finite };

// A named subgroup preset of a built-in group.  The preset string selects
// which subgroup; each built-in group documents its presets below.
class Subgroup {
 public:
  //   ZK(k):            "full", "span:1".."span:k"
  //   Heisenberg3:      "s1", "s2", "s3", "s1s3", "s2s3"
  //   DihedralInf:      "u", "v" (order-2), "z" (translations)
  //   DeltaGroup:       "H1" = <s',t>, "H2" = <s,t>, "H3" = <s,t'>
  //   SemidirectZRotZ2: "H1" = <s^4,v1>, "H2" = <s^4,v2>
  Subgroup(const Group& group, const std::string& preset, int id = 1)
      : group_(group), preset_(preset), id_(id) {
    build();
  }

  const Group& group() const { return group_; }
  const std::string& preset() const { return preset_; }
  int id() const { return id_; }
  SubgroupKind kind() const { return kind_; }
  int rank() const { return rank_; }

  // Polynomial growth degree d: lattice rank, 1 for dihedral type, 0 finite.
  int growth_degree() const {
    switch (kind_) {
      case SubgroupKind::Lattice: return rank_;
      case SubgroupKind::DihedralType: return 1;
      case SubgroupKind::Finite: return 0;
    }
    return 0;
  }

  // Generating tuple (one element per inverse pair).
  const std::vector<Element>& generators() const { return gens_; }

  // Generators of the intersection with the built-in nilpotent subgroup N
  // (empty when the intersection is trivial, e.g. finite reflection
  // subgroups).  For groups that are already nilpotent this is generators().
  const std::vector<Element>& generators_in_nilpotent() const { return gens_in_n_; }

  // Members of a Finite subgroup (identity first, then by word length).
  const std::vector<Element>& finite_elements() const { return finite_; }

  // Membership + coordinates in the subgroup's own chart, or nullopt.
  std::optional<std::vector<i64>> coordinates(const Element& g) const {
    group_.validate(g);
    switch (kind_) {
      case SubgroupKind::Lattice: return lattice_coordinates(g);
      case SubgroupKind::DihedralType: return dihedral_coordinates(g);
      case SubgroupKind::Finite: {
        for (std::size_t i = 0; i < finite_.size(); ++i)
          if (finite_[i] == g) return std::vector<i64>{static_cast<i64>(i)};
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  bool contains(const Element& g) const { return coordinates(g).has_value(); }

  // Inverse chart: coordinates -> group element.
  Element from_coordinates(const std::vector<i64>& c) const {
    switch (kind_) {
      case SubgroupKind::Lattice: {
        if (static_cast<int>(c.size()) != rank_)
          throw std::invalid_argument("from_coordinates: wrong rank");
        return lattice_element(c);
      }
      case SubgroupKind::DihedralType: {
        if (c.size() != 2 || c[1] < 0 || c[1] > 1)
          throw std::invalid_argument("from_coordinates: bad dihedral coords");
        return dihedral_element(c[0], static_cast<int>(c[1]));
      }
      case SubgroupKind::Finite: {
        if (c.size() != 1 || c[0] < 0 ||
            c[0] >= static_cast<i64>(finite_.size()))
          throw std::invalid_argument("from_coordinates: bad finite index");
        return finite_[static_cast<std::size_t>(c[0])];
      }
    }
    throw std::logic_error("unreachable");
  }

  // Intrinsic word length |h| over the declared generators.
  i64 word_length(const Element& h) const {
    auto c = coordinates(h);
    if (!c) throw std::invalid_argument("word_length: not a member of " + preset_);
    switch (kind_) {
      case SubgroupKind::Lattice: {
        i64 s = 0;
        for (i64 v : *c) s = chk_add(s, v < 0 ? -v : v);
        return s;
      }
      case SubgroupKind::DihedralType:
        return dihedral_word_length((*c)[0], static_cast<int>((*c)[1]));
      case SubgroupKind::Finite:
        return finite_wl_[static_cast<std::size_t>((*c)[0])];
    }
    return 0;
  }

  // Exact sphere cardinality #{h : |h| = r}.
  unsigned __int128 shell_count_exact(i64 r) const {
    if (r < 0) return 0;
    switch (kind_) {
      case SubgroupKind::Lattice: {
        if (r == 0) return 1;
        unsigned __int128 total = 0;
        int m = rank_;
        for (int k = 1; k <= m && k <= r; ++k) {
          unsigned __int128 ways =
              binom_u128(static_cast<u64>(m), static_cast<unsigned>(k)) *
              binom_u128(static_cast<u64>(r - 1), static_cast<unsigned>(k - 1));
          total += ways << k;  // 2^k sign patterns
        }
        return total;
      }
      case SubgroupKind::DihedralType:
        return r == 0 ? 1 : 2;
      case SubgroupKind::Finite: {
        unsigned __int128 cnt = 0;
        for (i64 wl : finite_wl_)
          if (wl == r) ++cnt;
        return cnt;
      }
    }
    return 0;
  }

  double shell_count(i64 r) const {
    return static_cast<double>(shell_count_exact(r));
  }

  // Elements of the radius-r sphere for the DihedralType chart (at most 2).
  std::vector<Element> dihedral_shell(i64 r) const {
    if (kind_ != SubgroupKind::DihedralType)
      throw std::logic_error("dihedral_shell: not a dihedral-type subgroup");
    if (r == 0) return {dihedral_element(0, 0)};
    if (r % 2 == 0) {
      i64 j = r / 2;
      return {dihedral_element(j, 0), dihedral_element(-j, 0)};
    }
    i64 j = (r - 1) / 2;
    return {dihedral_element(j, 1), dihedral_element(-(j + 1), 1)};
  }

 private:
  void build() {
    const auto S = group_.standard_generators();
    switch (group_.kind()) {
      case GroupKind::ZK: {
        int k = group_.coords();
        if (preset_ == "full") {
          kind_ = SubgroupKind::Lattice;
          rank_ = k;
          gens_ = S;
        } else if (preset_.rfind("span:", 0) == 0) {
          int j = std::stoi(preset_.substr(5));
          if (j < 1 || j > k) throw std::invalid_argument("span index out of range");
          kind_ = SubgroupKind::Lattice;
          rank_ = 1;
          axis_ = j - 1;
          gens_ = {S[static_cast<std::size_t>(axis_)]};
        } else {
          bad_preset();
        }
        gens_in_n_ = gens_;  // ZK is nilpotent: N = G
        break;
      }
      case GroupKind::Heisenberg3: {
        kind_ = SubgroupKind::Lattice;
        if (preset_ == "s1" || preset_ == "s2" || preset_ == "s3") {
          rank_ = 1;
          axis_ = preset_[1] - '1';
          gens_ = {S[static_cast<std::size_t>(axis_)]};
        } else if (preset_ == "s1s3") {
          rank_ = 2;
          gens_ = {S[0], S[2]};
        } else if (preset_ == "s2s3") {
          rank_ = 2;
          gens_ = {S[1], S[2]};
        } else {
          bad_preset();
        }
        gens_in_n_ = gens_;  // Heisenberg3 is nilpotent: N = G
        break;
      }
      case GroupKind::DihedralInf: {
        if (preset_ == "u" || preset_ == "v") {
          kind_ = SubgroupKind::Finite;
          Element g = preset_ == "u" ? S[0] : S[1];
          gens_ = {g};
          finite_ = {group_.identity(), g};
          finite_wl_ = {0, 1};
          gens_in_n_ = {};  // <u> ∩ <z> is trivial
        } else if (preset_ == "z") {
          kind_ = SubgroupKind::Lattice;
          rank_ = 1;
          gens_ = {make_element({1, 0})};
          gens_in_n_ = gens_;
        } else {
          bad_preset();
        }
        break;
      }
      case GroupKind::DeltaGroup: {
        kind_ = SubgroupKind::DihedralType;
        // H1 = <s',t> along theta1; H2 = <s,t> along theta2; H3 = <s,t'>.
        if (preset_ == "H1") {
          axis_ = 0;
          gens_ = {S[1], S[2]};
        } else if (preset_ == "H2") {
          axis_ = 1;
          gens_ = {S[0], S[2]};
        } else if (preset_ == "H3") {
          axis_ = 2;
          gens_ = {S[0], S[3]};
        } else {
          bad_preset();
        }
        Element theta = group_.identity();
        theta[axis_] = 1;
        gens_in_n_ = {theta};  // H ∩ Z^3 = <theta_axis>
        break;
      }
      case GroupKind::SemidirectZRotZ2: {
        kind_ = SubgroupKind::Lattice;
        rank_ = 2;
        Element s4 = make_element({4, 0, 0});
        if (preset_ == "H1") {
          axis_ = 1;
          gens_ = {s4, S[1]};
        } else if (preset_ == "H2") {
          axis_ = 2;
          gens_ = {s4, S[2]};
        } else {
          bad_preset();
        }
        gens_in_n_ = gens_;  // both presets already lie inside N = 4Z x Z^2
        break;
      }
    }
  }

  [[noreturn]] void bad_preset() const {
    throw std::invalid_argument(group_.name() + ": unknown subgroup preset '" +
                                preset_ + "'");
  }

  std::optional<std::vector<i64>> lattice_coordinates(const Element& g) const {
    switch (group_.kind()) {
      case GroupKind::ZK: {
        if (preset_ == "full") {
          std::vector<i64> c(static_cast<std::size_t>(group_.coords()));
          for (int i = 0; i < group_.coords(); ++i)
            c[static_cast<std::size_t>(i)] = g[i];
          return c;
        }
        for (int i = 0; i < group_.coords(); ++i)
          if (i != axis_ && g[i] != 0) return std::nullopt;
        return std::vector<i64>{g[axis_]};
      }
      case GroupKind::Heisenberg3: {
        if (rank_ == 1) {
          for (int i = 0; i < 3; ++i)
            if (i != axis_ && g[i] != 0) return std::nullopt;
          return std::vector<i64>{g[axis_]};
        }
        // s1s3: {(a,0,c)}, s2s3: {(0,b,c)} — both abelian planes.
        int zero_axis = preset_ == "s1s3" ? 1 : 0;
        if (g[zero_axis] != 0) return std::nullopt;
        return std::vector<i64>{g[zero_axis == 1 ? 0 : 1], g[2]};
      }
      case GroupKind::DihedralInf:
        if (g[1] != 0) return std::nullopt;
        return std::vector<i64>{g[0]};
      case GroupKind::SemidirectZRotZ2: {
        int other = axis_ == 1 ? 2 : 1;
        if (g[other] != 0 || g[0] % 4 != 0) return std::nullopt;
        return std::vector<i64>{g[0] / 4, g[axis_]};
      }
      default:
        return std::nullopt;
    }
  }

  Element lattice_element(const std::vector<i64>& c) const {
    Element e = group_.identity();
    switch (group_.kind()) {
      case GroupKind::ZK:
        if (preset_ == "full") {
          for (int i = 0; i < group_.coords(); ++i)
            e[i] = c[static_cast<std::size_t>(i)];
        } else {
          e[axis_] = c[0];
        }
        return e;
      case GroupKind::Heisenberg3:
        if (rank_ == 1) {
          e[axis_] = c[0];
        } else if (preset_ == "s1s3") {
          e[0] = c[0];
          e[2] = c[1];
        } else {
          e[1] = c[0];
          e[2] = c[1];
        }
        return e;
      case GroupKind::DihedralInf:
        e[0] = c[0];
        return e;
      case GroupKind::SemidirectZRotZ2:
        e[0] = chk_mul(4, c[0]);
        e[axis_] = c[1];
        return e;
      default:
        throw std::logic_error("unreachable");
    }
  }

  // Delta-group dihedral charts: H = { z^n, z^n * g0 } where z = theta_axis
  // and g0 is the first generator; (n, eps) are free-product normal-form
  // coordinates with respect to the two involutions.
  std::optional<std::vector<i64>> dihedral_coordinates(const Element& g) const {
    for (int i = 0; i < 3; ++i)
      if (i != axis_ && !(i == 1 && axis_ == 0) && g[i] != 0) return std::nullopt;
    if (axis_ == 0) {
      // H1: translations (n,0,0;0); reflections (n+1,-1,0;1).
      if (g[3] == 0) {
        if (g[1] != 0 || g[2] != 0) return std::nullopt;
        return std::vector<i64>{g[0], 0};
      }
      if (g[1] != -1 || g[2] != 0) return std::nullopt;
      return std::vector<i64>{chk_sub(g[0], 1), 1};
    }
    // H2/H3: translations and reflections along a single coordinate.
    return std::vector<i64>{g[axis_], g[3]};
  }

  Element dihedral_element(i64 n, int eps) const {
    Element e = group_.identity();
    if (axis_ == 0) {
      if (eps == 0) {
        e[0] = n;
      } else {
        e[0] = chk_add(n, 1);
        e[1] = -1;
        e[3] = 1;
      }
      return e;
    }
    e[axis_] = n;
    e[3] = eps;
    return e;
  }

  static i64 dihedral_word_length(i64 n, int eps) {
    if (eps == 0) return chk_mul(2, n < 0 ? -n : n);
    return n >= 0 ? chk_add(chk_mul(2, n), 1) : chk_sub(chk_mul(2, -n), 1);
  }

  Group group_;
  std::string preset_;
  int id_;
  SubgroupKind kind_ = SubgroupKind::Lattice;
  int rank_ = 0;
  int axis_ = 0;
  std::vector<Element> gens_;
  std::vector<Element> gens_in_n_;
  std::vector<Element> finite_;
  std::vector<i64> finite_wl_;
};

}  // namespace longjump
