#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include "longjump/util/checked.hpp"

namespace longjump {

// A group element in canonical normal-form coordinates.
//
// Fixed inline storage (no heap) keeps elements cheap to copy, hash and
// sort: walkers touch tens of millions per run.  Up to kMaxCoords integer
// coordinates; the active arity is set by the owning group.  Equality of
// elements is equality of coordinate tuples.
constexpr int kMaxCoords = 8;

struct Element {
  std::array<i64, kMaxCoords> c{};
  std::uint8_t n = 0;  // active coordinate count

  i64 operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  i64& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Element& a, const Element& b) {
    if (a.n != b.n) return false;
    for (int i = 0; i < a.n; ++i)
      if (a.c[static_cast<std::size_t>(i)] != b.c[static_cast<std::size_t>(i)])
        return false;
    return true;
  }
  friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

  // Lexicographic coordinate order: the canonical total order used for
  // deterministic iteration, truncation tie-breaks and CSV output.
  friend bool operator<(const Element& a, const Element& b) {
    if (a.n != b.n) return a.n < b.n;
    for (int i = 0; i < a.n; ++i) {
      i64 x = a.c[static_cast<std::size_t>(i)], y = b.c[static_cast<std::size_t>(i)];
      if (x != y) return x < y;
    }
    return false;
  }

  std::string to_string(char sep = ';') const {
    std::string s;
    for (int i = 0; i < n; ++i) {
      if (i) s.push_back(sep);
      s += std::to_string(c[static_cast<std::size_t>(i)]);
    }
    return s;
  }
};

inline Element make_element(std::initializer_list<i64> coords) {
  Element e;
  e.n = static_cast<std::uint8_t>(coords.size());
  int i = 0;
  for (i64 v : coords) e.c[static_cast<std::size_t>(i++)] = v;
  return e;
}

struct ElementHash {
  std::size_t operator()(const Element& e) const {
    // FNV-1a over the active coordinates.
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < e.n; ++i) {
      std::uint64_t v = static_cast<std::uint64_t>(e.c[static_cast<std::size_t>(i)]);
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xFF;
        h *= 1099511628211ull;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace longjump
