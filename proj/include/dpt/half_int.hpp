#pragma once

#include <cmath>
#include <compare>
#include <cstdlib>

#include "dpt/errors.hpp"

namespace dpt {

// A half-integer stored as twice its value, so m-grids never drift.
struct HalfInt {
  int twice = 0;

  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int twice_value) : twice(twice_value) {}

  static constexpr HalfInt from_int(int v) { return HalfInt(2 * v); }
  static HalfInt from_double(double v) {
    const double t = 2.0 * v;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9) throw InvalidParameter("value is not a half-integer");
    return HalfInt(static_cast<int>(r));
  }

  constexpr double value() const { return 0.5 * twice; }
  constexpr bool is_integer() const { return twice % 2 == 0; }

  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice + o.twice); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice - o.twice); }
  constexpr HalfInt operator-() const { return HalfInt(-twice); }
  constexpr auto operator<=>(const HalfInt&) const = default;
};

constexpr HalfInt abs(HalfInt h) { return HalfInt(h.twice < 0 ? -h.twice : h.twice); }

}  // namespace dpt
