#pragma once

// Adaptive Dormand-Prince 5(4) driver with an energy-monotonicity guard.
//
// A step is accepted only when the embedded error estimate passes and the
// supplied energy does not increase (up to a relative slack). After each
// accepted step `on_accept(t, y)` may modify y in place (projection onto a
// constraint manifold) and returns false to stop the integration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace momentflow {

struct AdaptiveOptions {
  double t_end = 1.0;
  double initial_step = 1e-3;
  double rtol = 1e-10;
  double atol = 1e-14;
  // Steps never exceed max_step_fraction * max(t, 1).
  double max_step_fraction = 0.02;
  double min_step = 1e-14;
  double energy_slack = 1e-12;
  std::size_t max_steps = 50'000'000;
  // The integrator lands exactly on each of these times.
  std::vector<double> stop_times;
};

enum class DriverStatus { reached_end, stopped, step_underflow, step_limit };

template <typename Vector, typename Rhs, typename Energy, typename OnAccept>
DriverStatus integrate_dormand_prince(Vector& y, double& t, Rhs&& rhs, Energy&& energy,
                                      OnAccept&& on_accept, const AdaptiveOptions& opts) {
  // Dormand-Prince tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // b - b_hat for the embedded fourth-order solution.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<double> stops = opts.stop_times;
  std::sort(stops.begin(), stops.end());
  auto next_stop = std::upper_bound(stops.begin(), stops.end(), t);

  double h_nominal = opts.initial_step;
  double current_energy = energy(y);
  std::size_t steps = 0;

  while (t < opts.t_end) {
    if (++steps > opts.max_steps) return DriverStatus::step_limit;
    const double cap = opts.max_step_fraction * std::max(t, 1.0);
    double h = std::min({h_nominal, cap, opts.t_end - t});
    bool landing = false;
    if (next_stop != stops.end() && t + h >= *next_stop) {
      h = *next_stop - t;
      landing = true;
    }
    const bool clipped = h < h_nominal;
    if (h < opts.min_step * std::max(1.0, std::abs(t))) return DriverStatus::step_underflow;

    const Vector k1 = rhs(t, y);
    const Vector k2 = rhs(t + c2 * h, (y + h * a21 * k1).eval());
    const Vector k3 = rhs(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const Vector k4 = rhs(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const Vector k5 =
        rhs(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const Vector k6 =
        rhs(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    Vector y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector k7 = rhs(t + h, y_new);
    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      using std::abs;
      const double scale = opts.atol + opts.rtol * std::max<double>(abs(y(i)), abs(y_new(i)));
      err_norm = std::max(err_norm, double(abs(err(i))) / scale);
    }
    if (!std::isfinite(err_norm) || err_norm > 1.0) {
      const double factor =
          std::isfinite(err_norm) ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2)) : 0.2;
      h_nominal = h * factor;
      continue;
    }
    const double new_energy = energy(y_new);
    if (new_energy > current_energy + opts.energy_slack * std::abs(current_energy)) {
      h_nominal = h * 0.5;
      continue;
    }

    t = landing ? *next_stop : t + h;
    if (landing) ++next_stop;
    y = std::move(y_new);
    const bool keep_going = on_accept(t, y);
    current_energy = energy(y);
    if (!keep_going) return DriverStatus::stopped;

    const double grow = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
    // A clipped step says little about the admissible size; keep the nominal one.
    h_nominal = clipped ? std::max(h_nominal, h * grow) : h * std::max(grow, 0.2);
  }
  return DriverStatus::reached_end;
}

}  // namespace momentflow
