#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "warpcrit/errors.hpp"

namespace warpcrit {

/// Dormand-Prince 5(4) settings. Steps never cross an output node, so every
/// stored sample is an accepted step endpoint rather than an interpolant.
struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_min = 1e-14;
  long max_steps = 50'000'000;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

/// Integrates y' = f(s, y) from s0 through each node s0 + k*h (k = 1..count),
/// in the direction of sign(h). `on_node` receives (k, s, y) and may return
/// false to stop early. Returns the number of nodes reached.
template <std::size_t N, class Rhs, class OnNode>
std::size_t integrate_nodes(Rhs&& f, double s0, const std::array<double, N>& y0, double h,
                            std::size_t count, const IntegratorOptions& opt, OnNode&& on_node,
                            IntegratorStats* stats = nullptr) {
  using State = std::array<double, N>;

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegratorStats local;
  IntegratorStats& st = stats ? *stats : local;

  const double dir = h >= 0 ? 1.0 : -1.0;
  const double node_step = std::abs(h);
  State y = y0;
  double s = s0;
  State k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, tmp{}, ynew{};
  f(s, y, k1);
  ++st.rhs_evals;

  double step = node_step;
  std::size_t reached = 0;
  long steps = 0;
  for (std::size_t k = 1; k <= count; ++k) {
    const double target = s0 + dir * node_step * static_cast<double>(k);
    while (true) {
      double remaining = (target - s) * dir;
      if (remaining <= 0) break;
      double hs = std::min(step, remaining);
      bool last = hs >= remaining * (1 - 1e-12);
      if (last) hs = remaining;
      const double dh = dir * hs;

      auto stage = [&](State& out, auto&&... terms) {
        for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + dh * (0.0 + ... + (terms.first * (*terms.second)[i]));
      };
      using P = std::pair<double, const State*>;
      stage(tmp, P{a21, &k1});
      f(s + c2 * dh, tmp, k2);
      stage(tmp, P{a31, &k1}, P{a32, &k2});
      f(s + c3 * dh, tmp, k3);
      stage(tmp, P{a41, &k1}, P{a42, &k2}, P{a43, &k3});
      f(s + c4 * dh, tmp, k4);
      stage(tmp, P{a51, &k1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4});
      f(s + c5 * dh, tmp, k5);
      stage(tmp, P{a61, &k1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4}, P{a65, &k5});
      f(s + dh, tmp, k6);
      stage(ynew, P{b1, &k1}, P{b3, &k3}, P{b4, &k4}, P{b5, &k5}, P{b6, &k6});
      const double s_new = last ? target : s + dh;
      f(s_new, ynew, k7);
      st.rhs_evals += 6;

      double err = 0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        const double ei = dh * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double q = std::abs(ei) / sc;
        if (!std::isfinite(q) || !std::isfinite(ynew[i])) finite = false;
        err = std::max(err, q);
      }
      if (++steps > opt.max_steps) fail(ErrorKind::StepFailure, "step budget exhausted");

      if (finite && err <= 1.0) {
        ++st.accepted;
        s = s_new;
        y = ynew;
        k1 = k7;
        const double fac = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        step = std::min(node_step, hs * fac);
      } else {
        ++st.rejected;
        const double fac = finite ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.25;
        step = hs * fac;
        if (step < opt.h_min) fail(ErrorKind::StepFailure, "step size underflow");
      }
    }
    reached = k;
    if (!on_node(k, s, static_cast<const State&>(y))) break;
  }
  return reached;
}

/// Cubic Hermite interpolation on [x0, x1] from values and slopes.
[[nodiscard]] inline double hermite(double x0, double x1, double y0, double y1, double d0, double d1,
                                    double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

/// Derivative of the cubic Hermite interpolant.
[[nodiscard]] inline double hermite_slope(double x0, double x1, double y0, double y1, double d0,
                                          double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) / h * y0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) / h * y1 +
         (3 * t2 - 2 * t) * d1;
}

/// Bisection on a continuous function with a sign change on [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, double width, int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0) return lo;
  double fhi = f(hi);
  if (fhi == 0) return hi;
  for (int it = 0; it < max_iter && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace warpcrit
