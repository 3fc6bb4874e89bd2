#pragma once

// Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4)) over a
// fixed-size state vector.  The step controller keeps the local error per
// unit time below tol, so the accumulated error over an interval of length T
// is of order tol * T.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>

namespace zoll::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

class step_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
// Dormand-Prince coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th order weights for the error estimate.
inline constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                        e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
}  // namespace detail

// Integrates y' = rhs(t, y) from t0 to t1 (either direction).  The callback
// after_step(t, y), when provided, runs after every accepted step and may
// mutate the state (used for chart switches).
template <std::size_t N, typename Rhs, typename AfterStep>
State<N> integrate(Rhs&& rhs, State<N> y, double t0, double t1, double tol,
                   AfterStep&& after_step, StepStats* stats = nullptr) {
  using namespace detail;
  if (t0 == t1) return y;
  if (!(tol > 0)) throw std::invalid_argument("integrate: tol must be positive");
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double t = t0;
  double h = dir * std::min(0.05, span);
  const double h_min = span * 1e-15 + 1e-300;
  std::size_t accepted = 0, rejected = 0;

  State<N> k1 = rhs(t, y), k2{}, k3{}, k4{}, k5{}, k6{}, k7{};
  auto axpy = [](State<N>& out, const State<N>& y0, std::initializer_list<std::pair<double, const State<N>*>> terms,
                 double h) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0;
      for (auto& [c, k] : terms) acc += c * (*k)[i];
      out[i] = y0[i] + h * acc;
    }
  };

  while (dir * (t1 - t) > 0) {
    if (dir * (t + h - t1) > 0) h = t1 - t;
    State<N> tmp;
    axpy(tmp, y, {{a21, &k1}}, h);
    k2 = rhs(t + c2 * h, tmp);
    axpy(tmp, y, {{a31, &k1}, {a32, &k2}}, h);
    k3 = rhs(t + c3 * h, tmp);
    axpy(tmp, y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h);
    k4 = rhs(t + c4 * h, tmp);
    axpy(tmp, y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h);
    k5 = rhs(t + c5 * h, tmp);
    axpy(tmp, y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h);
    k6 = rhs(t + h, tmp);
    State<N> y5;
    axpy(y5, y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    k7 = rhs(t + h, y5);

    // err_i = |y5_i - y4_i|; accept when max err_i / (1 + |y_i|) <= tol * |h|.
    // The bound keeps a rounding floor: when the stage combination is
    // dominated by roundoff of large right-hand sides (turning points of
    // near-meridian orbits), per-unit-time control would otherwise demand
    // sub-roundoff accuracy and stall.
    double err = 0, floor_ = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double d = (b1 - e1) * k1[i] + (b3 - e3) * k3[i] + (b4 - e4) * k4[i] +
                 (b5 - e5) * k5[i] + (b6 - e6) * k6[i] - e7 * k7[i];
      double mag = std::abs((b1 - e1) * k1[i]) + std::abs((b3 - e3) * k3[i]) +
                   std::abs((b4 - e4) * k4[i]) + std::abs((b5 - e5) * k5[i]) +
                   std::abs((b6 - e6) * k6[i]) + std::abs(e7 * k7[i]);
      double scale = 1.0 + std::abs(y[i]);
      err = std::max(err, std::abs(h * d) / scale);
      floor_ = std::max(floor_, std::abs(h) * mag / scale);
    }
    double bound = std::max(tol * std::abs(h), 32.0 * 2.220446049250313e-16 * floor_);
    if (err <= bound) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      ++accepted;
      if (after_step(t, y)) k1 = rhs(t, y);  // state was edited; refresh slope
      double f = (err > 0) ? 0.9 * std::pow(bound / err, 0.2) : 5.0;
      h *= std::clamp(f, 0.2, 5.0);
    } else {
      ++rejected;
      double f = 0.9 * std::pow(bound / err, 0.2);
      h *= std::clamp(f, 0.1, 0.9);
      if (std::abs(h) < h_min) throw step_failure("integrate: step size underflow");
    }
    if (accepted + rejected > 50'000'000) throw step_failure("integrate: step budget exhausted");
  }
  if (stats) {
    stats->accepted += accepted;
    stats->rejected += rejected;
  }
  return y;
}

template <std::size_t N, typename Rhs>
State<N> integrate(Rhs&& rhs, State<N> y, double t0, double t1, double tol,
                   StepStats* stats = nullptr) {
  auto no_edit = [](double, State<N>&) { return false; };
  return integrate<N>(static_cast<Rhs&&>(rhs), y, t0, t1, tol, no_edit, stats);
}

}  // namespace zoll::ode
