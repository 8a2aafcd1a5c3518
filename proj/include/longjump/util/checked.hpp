#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace longjump {

using i64 = std::int64_t;
using u64 = std::uint64_t;

// Overflow-checked 64-bit arithmetic for group coordinates.
//
// Coordinates are kept strictly inside (-2^62, 2^62); the headroom bit means
// a single unchecked +/- of two in-range values cannot wrap before the check
// fires.  Walks of ~2^25 heavy-tailed steps stay far below this bound (the
// largest products appearing in the built-in group laws are Heisenberg
// x1*x2' terms, ~2^44 at acceptance scales).

constexpr i64 kCoordLimit = i64{1} << 62;

[[noreturn]] inline void coord_overflow(const char* op) {
  throw std::overflow_error(std::string("coordinate overflow in ") + op);
}

inline i64 chk_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r) || r >= kCoordLimit || r <= -kCoordLimit)
    coord_overflow("add");
  return r;
}

inline i64 chk_sub(i64 a, i64 b) {
  i64 r;
  if (__builtin_sub_overflow(a, b, &r) || r >= kCoordLimit || r <= -kCoordLimit)
    coord_overflow("sub");
  return r;
}

inline i64 chk_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r) || r >= kCoordLimit || r <= -kCoordLimit)
    coord_overflow("mul");
  return r;
}

inline i64 chk_neg(i64 a) { return chk_sub(0, a); }

}  // namespace longjump
