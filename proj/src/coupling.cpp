#include <algorithm>
#include <cmath>
#include <vector>

#include "dpt/collective_spin.hpp"

namespace dpt::spin {
namespace {

long double log_factorial(int n) {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(1025);
    t[0] = 0.0L;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<long double>(i));
    return t;
  }();
  if (n < static_cast<int>(table.size())) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

// Twice-values in, integer value out; caller guarantees evenness.
int half(int twice) { return twice / 2; }

}  // namespace

double coupling_coefficient(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  if (j1.twice < 0 || j2.twice < 0 || J.twice < 0) return 0.0;
  if (M.twice != m1.twice + m2.twice) return 0.0;
  if (std::abs(m1.twice) > j1.twice || std::abs(m2.twice) > j2.twice || std::abs(M.twice) > J.twice) {
    return 0.0;
  }
  if ((j1.twice - m1.twice) % 2 != 0 || (j2.twice - m2.twice) % 2 != 0 || (J.twice - M.twice) % 2 != 0) {
    return 0.0;
  }
  if ((j1.twice + j2.twice + J.twice) % 2 != 0) return 0.0;
  if (J.twice < std::abs(j1.twice - j2.twice) || J.twice > j1.twice + j2.twice) return 0.0;

  const int a = half(j1.twice + j2.twice - J.twice);   // j1+j2-J
  const int b = half(j1.twice - m1.twice);              // j1-m1
  const int c = half(j2.twice + m2.twice);              // j2+m2
  const int d = half(J.twice - j2.twice + m1.twice);    // J-j2+m1
  const int e = half(J.twice - j1.twice - m2.twice);    // J-j1-m2

  const long double log_pref =
      0.5L * (std::log(static_cast<long double>(J.twice + 1)) +
              log_factorial(half(J.twice + j1.twice - j2.twice)) +
              log_factorial(half(J.twice - j1.twice + j2.twice)) + log_factorial(a) -
              log_factorial(half(j1.twice + j2.twice + J.twice) + 1) +
              log_factorial(half(J.twice + M.twice)) + log_factorial(half(J.twice - M.twice)) +
              log_factorial(b) + log_factorial(half(j1.twice + m1.twice)) +
              log_factorial(half(j2.twice - m2.twice)) + log_factorial(c));

  const int k_min = std::max({0, -d, -e});
  const int k_max = std::min({a, b, c});
  if (k_min > k_max) return 0.0;

  // Terms are summed relative to the largest one to avoid overflow for large j.
  std::vector<long double> logs;
  logs.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  long double log_max = -INFINITY;
  for (int k = k_min; k <= k_max; ++k) {
    const long double l = -(log_factorial(k) + log_factorial(a - k) + log_factorial(b - k) +
                            log_factorial(c - k) + log_factorial(d + k) + log_factorial(e + k));
    logs.push_back(l);
    log_max = std::max(log_max, l);
  }
  long double sum = 0.0L;
  for (int k = k_min; k <= k_max; ++k) {
    const long double term = std::exp(logs[static_cast<std::size_t>(k - k_min)] - log_max);
    sum += (k % 2 == 0) ? term : -term;
  }
  return static_cast<double>(sum * std::exp(log_pref + log_max));
}

double coupling_coefficient(double j1, double m1, double j2, double m2, double J, double M) {
  return coupling_coefficient(HalfInt::from_double(j1), HalfInt::from_double(m1),
                              HalfInt::from_double(j2), HalfInt::from_double(m2),
                              HalfInt::from_double(J), HalfInt::from_double(M));
}

}  // namespace dpt::spin
