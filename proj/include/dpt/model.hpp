#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

namespace dpt {

// Model variants. XY variants use (vx, vy) = (V, -V); DRIVEN has vy = 0;
// GENERAL is H = vx/N Jx^2 + vy/N Jy^2 + omega Jx with collective decay.
enum class Model { IndependentXY, CollectiveXY, Driven, General };

std::string_view to_string(Model m);
Model model_from_string(std::string_view s);

struct ModelParams {
  Model model = Model::General;
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
  double gamma_i = 0.0;
  double gamma_c = 0.0;
  int n_atoms = 1;

  static ModelParams independent_xy(double v, double gamma_i, int n_atoms = 1);
  static ModelParams collective_xy(double v, double gamma_c, int n_atoms = 1);
  static ModelParams driven(double vx, double omega, double gamma_c, int n_atoms = 1);
  static ModelParams general(double vx, double vy, double omega, double gamma_c,
                             int n_atoms = 1);

  // Throws InvalidParameter on negative/non-finite rates or a broken variant mapping.
  void validate() const;

  // The XY coupling V of the two-axis model (vx for the XY variants).
  double v() const { return vx; }
  // gamma_i for IndependentXY, gamma_c otherwise.
  double decay_rate() const { return model == Model::IndependentXY ? gamma_i : gamma_c; }
  // True when the flow conserves X^2+Y^2+Z^2 (no independent decay).
  bool sphere_constrained() const { return model != Model::IndependentXY && gamma_i == 0.0; }
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  std::array<double, 3> as_array() const { return {x, y, z}; }
  static BlochVector from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

  BlochVector operator+(const BlochVector& o) const { return {x + o.x, y + o.y, z + o.z}; }
  BlochVector operator-(const BlochVector& o) const { return {x - o.x, y - o.y, z - o.z}; }
  BlochVector operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double max_abs_diff(const BlochVector& a, const BlochVector& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

}  // namespace dpt
