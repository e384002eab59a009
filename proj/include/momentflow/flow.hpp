#pragma once

// Kempf-Ness gradient flow of f = |mu|^2, its group lift, the projectivized
// flow on the unit sphere, and tail diagnostics for the convergence rates.

#include <iosfwd>
#include <optional>
#include <vector>

#include "momentflow/algebra.hpp"
#include "momentflow/types.hpp"

namespace momentflow {

enum class Termination { gradient_small, t_max, step_underflow };
enum class FlowKind { affine, cointegrated, projective };

const char* to_string(Termination t);
const char* to_string(FlowKind k);

struct FlowSample {
  double t = 0.0;
  double s = 0.0;
  CVector v;
  std::optional<CMatrix> g;
  double f = 0.0;
  double grad_norm = 0.0;
};

struct FlowTrajectory {
  std::vector<FlowSample> samples;
  Termination terminated_reason = Termination::t_max;
  FlowKind kind = FlowKind::affine;
};

struct FlowOptions {
  // Horizon in t for the affine flows and in s for the projective one.
  double t_max = 1e4;
  double eps_grad = 1e-10;
  double initial_step = 1e-3;
  double rtol = 1e-10;
  double atol = 1e-14;
  double max_step_fraction = 0.02;
  // Clock values the integrator must land on exactly (t, or s when projective).
  std::vector<double> stop_times;

  static FlowOptions affine_defaults() { return {}; }
  static FlowOptions projective_defaults() {
    FlowOptions o;
    o.t_max = 1e6;
    return o;
  }
};

// dv/dt = -grad f(v), with the clock ds/dt = |v|^2 carried in the state.
FlowTrajectory integrate_kempf_ness(const GroupPresentation& p, const CVector& v0,
                                    const FlowOptions& opts = FlowOptions::affine_defaults());

// Same flow together with its lift g(t) in G^C, g(0) = 1, driven by
// dg/dt g^{-1} = 2i xi_c with c the raised moment of g v0.
FlowTrajectory cointegrate_group(const GroupPresentation& p, const CVector& v0,
                                 const FlowOptions& opts = FlowOptions::affine_defaults());

// du/ds = -grad f-hat(u) on the unit sphere; samples carry t = s. The
// gradient is orthogonal to J0 u, so no phase correction is needed beyond
// renormalizing after each step. Throws DegenerateInputError for v0 = 0.
FlowTrajectory integrate_projective(const GroupPresentation& p, const CVector& v0,
                                    const FlowOptions& opts = FlowOptions::projective_defaults());

// Recomputes s by the trapezoidal rule on |v(t)|^2.
FlowTrajectory reparametrize(const FlowTrajectory& traj);

// max over samples of |g v0 - v(t)| / |v0| (0 when v0 = 0 or g absent).
double lift_residual(const FlowTrajectory& traj);

struct TailWindow {
  std::size_t first = 0;  // first sample index of the final decade
  std::size_t count = 0;
};

// Samples with t in [t_final / 10, t_final]. Throws DiagnosticError when the
// trajectory spans less than min_decades decades of t (with t > 0) or the
// window holds fewer than min_samples samples.
TailWindow final_decade(const FlowTrajectory& traj, double min_decades = 2.0,
                        std::size_t min_samples = 50);

struct LojasiewiczFit {
  double alpha_hat = 0.0;
  double decay_exponent = 0.0;
  double fit_quality = 0.0;       // R^2 of log f against log t
  double semilog_quality = 0.0;   // R^2 of log f against t
  std::size_t window_samples = 0;
};

// Least-squares slope of log f on log t over the final decade. Throws
// DiagnosticError when the tail is too short or f is not positive there.
LojasiewiczFit fit_lojasiewicz(const FlowTrajectory& traj);

struct RateReport {
  bool applicable = false;
  double energy_plateau_ratio = 0.0;     // max/min of f t^{1/(2a-1)} on the tail
  double distance_plateau_ratio = 0.0;   // max/min of |v - v_inf| t^{(1-a)/(2a-1)}
  double energy_plateau_max = 0.0;
  double distance_plateau_max = 0.0;
  double quartic_min = 0.0;              // min of |grad f|^4 / f^3 on the tail
  double quartic_max = 0.0;
  bool plateaus_ok = false;              // both ratios <= plateau_limit
};

// Rate plateaus of the final decade. Stationary or too-short trajectories
// return applicable = false. v_inf defaults to 0 (the collapsing case).
RateReport check_rates(const FlowTrajectory& traj, double alpha,
                       const std::optional<CVector>& v_inf = std::nullopt,
                       double plateau_limit = 1.5);

struct ClockFit {
  double slope = 0.0;  // fitted C in s ~ C log t + b
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t window_samples = 0;
};

// Regression of s against log t over the final decade.
ClockFit fit_log_clock(const FlowTrajectory& traj);

// Header: t,s,f,grad_norm,v_norm,v<i>_re,v<i>_im...,g<r><c>_re,g<r><c>_im...
void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj);

}  // namespace momentflow
