#pragma once

// Independent reference computations used only by the tests.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Plain bisection for a continuous function with f(lo), f(hi) of opposite sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

using Mat3 = std::array<std::array<long, 3>, 3>;

/// Upper unitriangular matrix [[1,a,c],[0,1,b],[0,0,1]].
inline Mat3 heis(long a, long b, long c) { return {{{1, a, c}, {0, 1, b}, {0, 0, 1}}}; }

inline Mat3 mul(const Mat3& x, const Mat3& y) {
  Mat3 z{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) z[i][j] += x[i][k] * y[k][j];
  return z;
}

/// Heisenberg generators in built-in order (a, a_inv, b, b_inv, c, c_inv).
inline std::vector<Mat3> heis_generators() {
  return {heis(1, 0, 0), heis(-1, 0, 0), heis(0, 1, 0), heis(0, -1, 0), heis(0, 0, 1), heis(0, 0, -1)};
}

/// Elements of D∞ as affine maps x -> eps*x + k of ℤ; a = translation, b = reflection.
struct Affine {
  long sign = 1;
  long shift = 0;
  bool operator==(const Affine&) const = default;
};
inline Affine compose(const Affine& f, const Affine& g) { return {f.sign * g.sign, f.sign * g.shift + f.shift}; }

}  // namespace oracle
