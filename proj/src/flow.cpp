#include "momentflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "momentflow/error.hpp"
#include "momentflow/format.hpp"
#include "momentflow/ode.hpp"
#include "momentflow/representation.hpp"

namespace momentflow {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::gradient_small: return "gradient_small";
    case Termination::t_max: return "t_max";
    case Termination::step_underflow: return "step_underflow";
  }
  return "unknown";
}

const char* to_string(FlowKind k) {
  switch (k) {
    case FlowKind::affine: return "affine";
    case FlowKind::cointegrated: return "cointegrated";
    case FlowKind::projective: return "projective";
  }
  return "unknown";
}

namespace {

AdaptiveOptions driver_options(const FlowOptions& opts) {
  if (!(opts.t_max > 0.0)) throw PreconditionError("flow: t_max must be positive");
  if (!(opts.eps_grad > 0.0)) throw PreconditionError("flow: eps_grad must be positive");
  if (!(opts.initial_step > 0.0)) throw PreconditionError("flow: initial_step must be positive");
  AdaptiveOptions a;
  a.t_end = opts.t_max;
  a.initial_step = opts.initial_step;
  a.rtol = opts.rtol;
  a.atol = opts.atol;
  a.max_step_fraction = opts.max_step_fraction;
  a.stop_times = opts.stop_times;
  return a;
}

Termination termination_of(DriverStatus s, bool gradient_stop) {
  if (gradient_stop) return Termination::gradient_small;
  switch (s) {
    case DriverStatus::reached_end: return Termination::t_max;
    case DriverStatus::stopped: return Termination::gradient_small;
    default: return Termination::step_underflow;
  }
}

// Shared loop: `unpack` turns a state into a sample (without t), `rhs` and
// `energy` act on the state. When the initial gradient is already below
// eps_grad a single step of size initial_step is taken.
template <typename Unpack, typename Rhs, typename Energy, typename Project>
FlowTrajectory run_flow(CVector y, FlowKind kind, const FlowOptions& opts, Unpack&& unpack,
                        Rhs&& rhs, Energy&& energy, Project&& project) {
  FlowTrajectory traj;
  traj.kind = kind;
  AdaptiveOptions a = driver_options(opts);

  FlowSample first = unpack(y);
  first.t = 0.0;
  const bool critical = first.grad_norm < opts.eps_grad;
  traj.samples.push_back(std::move(first));
  if (critical) a.t_end = std::min(opts.initial_step, opts.t_max);

  bool gradient_stop = false;
  double t = 0.0;
  const DriverStatus status = integrate_dormand_prince(
      y, t, rhs, energy,
      [&](double t_now, CVector& state) {
        project(state);
        FlowSample s = unpack(state);
        s.t = t_now;
        const bool small = s.grad_norm < opts.eps_grad;
        traj.samples.push_back(std::move(s));
        if (critical) return false;
        if (small) gradient_stop = true;
        return !small;
      },
      a);
  traj.terminated_reason = critical ? Termination::gradient_small
                                    : termination_of(status, gradient_stop);
  return traj;
}

}  // namespace

FlowTrajectory integrate_kempf_ness(const GroupPresentation& p, const CVector& v0,
                                    const FlowOptions& opts) {
  const Index n = p.dim_v();
  if (v0.size() != n) throw StructuralError("integrate_kempf_ness: v0 has wrong dimension");
  CVector y(n + 1);
  y.head(n) = v0;
  y(n) = 0.0;
  auto unpack = [&](const CVector& state) {
    FlowSample s;
    s.v = state.head(n);
    s.s = state(n).real();
    const EnergyGradient e = energy_and_gradient(p, s.v);
    s.f = e.f;
    s.grad_norm = e.grad.norm();
    return s;
  };
  auto rhs = [&](double, const CVector& state) {
    CVector d(n + 1);
    const CVector v = state.head(n);
    d.head(n) = -energy_and_gradient(p, v).grad;
    d(n) = v.squaredNorm();
    return d;
  };
  auto energy = [&](const CVector& state) {
    return energy_and_gradient(p, state.head(n)).f;
  };
  return run_flow(std::move(y), FlowKind::affine, opts, unpack, rhs, energy, [](CVector&) {});
}

FlowTrajectory cointegrate_group(const GroupPresentation& p, const CVector& v0,
                                 const FlowOptions& opts) {
  const Index n = p.dim_v();
  if (v0.size() != n) throw StructuralError("cointegrate_group: v0 has wrong dimension");
  const Index ng = n * n;
  CVector y(n + ng + 1);
  y.head(n) = v0;
  Eigen::Map<CMatrix>(y.data() + n, n, n).setIdentity();
  y(n + ng) = 0.0;

  auto unpack = [&](const CVector& state) {
    FlowSample s;
    s.v = state.head(n);
    s.g = CMatrix(Eigen::Map<const CMatrix>(state.data() + n, n, n));
    s.s = state(n + ng).real();
    const EnergyGradient e = energy_and_gradient(p, s.v);
    s.f = e.f;
    s.grad_norm = e.grad.norm();
    return s;
  };
  auto rhs = [&](double, const CVector& state) {
    CVector d(n + ng + 1);
    const CVector v = state.head(n);
    const Eigen::Map<const CMatrix> g(state.data() + n, n, n);
    d.head(n) = -energy_and_gradient(p, v).grad;
    // The lift is driven by g v0 rather than v so that it is a closed ODE on G^C.
    const CVector gv = g * v0;
    const RVector c = p.rank() > 0 ? moment_vector(p, moment_map(p, gv)) : RVector(0);
    const CMatrix x = 2.0 * kI * p.element(c);
    Eigen::Map<CMatrix>(d.data() + n, n, n) = x * g;
    d(n + ng) = v.squaredNorm();
    return d;
  };
  auto energy = [&](const CVector& state) {
    return energy_and_gradient(p, state.head(n)).f;
  };
  return run_flow(std::move(y), FlowKind::cointegrated, opts, unpack, rhs, energy,
                  [](CVector&) {});
}

FlowTrajectory integrate_projective(const GroupPresentation& p, const CVector& v0,
                                    const FlowOptions& opts) {
  const Index n = p.dim_v();
  if (v0.size() != n) throw StructuralError("integrate_projective: v0 has wrong dimension");
  const double norm = v0.norm();
  if (norm == 0.0) throw DegenerateInputError("integrate_projective: v0 = 0");
  auto unpack = [&](const CVector& state) {
    FlowSample s;
    s.v = state;
    const EnergyGradient e = projective_energy_and_gradient(p, state);
    s.f = e.f;
    s.grad_norm = e.grad.norm();
    return s;
  };
  auto rhs = [&](double, const CVector& state) {
    return CVector(-projective_energy_and_gradient(p, state).grad);
  };
  auto energy = [&](const CVector& state) {
    return projective_energy_and_gradient(p, state).f;
  };
  FlowTrajectory traj = run_flow(CVector(v0 / norm), FlowKind::projective, opts, unpack, rhs,
                                 energy, [](CVector& state) { state.normalize(); });
  for (FlowSample& s : traj.samples) s.s = s.t;
  return traj;
}

FlowTrajectory reparametrize(const FlowTrajectory& traj) {
  FlowTrajectory out = traj;
  if (out.samples.empty()) return out;
  out.samples[0].s = 0.0;
  for (std::size_t k = 1; k < out.samples.size(); ++k) {
    const FlowSample& a = out.samples[k - 1];
    FlowSample& b = out.samples[k];
    b.s = a.s + 0.5 * (b.t - a.t) * (a.v.squaredNorm() + b.v.squaredNorm());
  }
  return out;
}

double lift_residual(const FlowTrajectory& traj) {
  if (traj.samples.empty()) return 0.0;
  const CVector& v0 = traj.samples.front().v;
  const double scale = v0.norm();
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const FlowSample& s : traj.samples) {
    if (!s.g) continue;
    worst = std::max(worst, (*s.g * v0 - s.v).norm() / scale);
  }
  return worst;
}

TailWindow final_decade(const FlowTrajectory& traj, double min_decades, std::size_t min_samples) {
  const auto& ss = traj.samples;
  if (ss.size() < 3) throw DiagnosticError("tail fit: trajectory has fewer than 3 samples");
  const double t_end = ss.back().t;
  if (!(t_end > 0.0)) throw DiagnosticError("tail fit: trajectory does not advance in time");
  const double t_start = ss[1].t;
  if (std::log10(t_end / t_start) < min_decades) {
    throw DiagnosticError("tail fit: trajectory spans fewer than " +
                          std::to_string(min_decades) + " decades of t");
  }
  TailWindow w;
  const double lo = t_end / 10.0;
  w.first = static_cast<std::size_t>(
      std::lower_bound(ss.begin(), ss.end(), lo,
                       [](const FlowSample& s, double x) { return s.t < x; }) -
      ss.begin());
  w.count = ss.size() - w.first;
  if (w.count < min_samples) {
    throw DiagnosticError("tail fit: final decade holds " + std::to_string(w.count) +
                          " samples, need " + std::to_string(min_samples));
  }
  return w;
}

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Line l;
  if (sxx == 0.0) throw DiagnosticError("least squares: degenerate abscissa");
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  l.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return l;
}

}  // namespace

LojasiewiczFit fit_lojasiewicz(const FlowTrajectory& traj) {
  const TailWindow w = final_decade(traj);
  std::vector<double> log_t, t, log_f;
  for (std::size_t k = w.first; k < traj.samples.size(); ++k) {
    const FlowSample& s = traj.samples[k];
    if (!(s.f > 0.0)) throw DiagnosticError("fit_lojasiewicz: f vanishes in the tail");
    log_t.push_back(std::log(s.t));
    t.push_back(s.t);
    log_f.push_back(std::log(s.f));
  }
  if (!(traj.samples[w.first].f > traj.samples.back().f)) {
    throw DiagnosticError("fit_lojasiewicz: f does not decay over the final decade");
  }
  const Line powerlaw = least_squares(log_t, log_f);
  const Line semilog = least_squares(t, log_f);
  LojasiewiczFit fit;
  fit.decay_exponent = -powerlaw.slope;
  fit.alpha_hat = 0.5 * (1.0 + 1.0 / fit.decay_exponent);
  fit.fit_quality = powerlaw.r_squared;
  fit.semilog_quality = semilog.r_squared;
  fit.window_samples = w.count;
  return fit;
}

RateReport check_rates(const FlowTrajectory& traj, double alpha,
                       const std::optional<CVector>& v_inf, double plateau_limit) {
  RateReport r;
  if (!(alpha > 0.5 && alpha < 1.0)) return r;
  if (traj.samples.size() < 3) return r;
  if (!(traj.samples.front().f > 0.0) || traj.samples.back().f == traj.samples.front().f) {
    return r;
  }
  TailWindow w;
  try {
    w = final_decade(traj);
  } catch (const DiagnosticError&) {
    return r;
  }
  const double e_energy = 1.0 / (2.0 * alpha - 1.0);
  const double e_dist = (1.0 - alpha) / (2.0 * alpha - 1.0);
  const CVector limit =
      v_inf ? *v_inf : CVector::Zero(traj.samples.front().v.size()).eval();
  double emin = INFINITY, emax = 0.0, dmin = INFINITY, dmax = 0.0;
  double qmin = INFINITY, qmax = 0.0;
  for (std::size_t k = w.first; k < traj.samples.size(); ++k) {
    const FlowSample& s = traj.samples[k];
    const double e = s.f * std::pow(s.t, e_energy);
    const double d = (s.v - limit).norm() * std::pow(s.t, e_dist);
    emin = std::min(emin, e);
    emax = std::max(emax, e);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    if (s.f > 0.0) {
      const double q = std::pow(s.grad_norm, 4) / std::pow(s.f, 3);
      qmin = std::min(qmin, q);
      qmax = std::max(qmax, q);
    }
  }
  r.applicable = emin > 0.0 && dmin > 0.0;
  if (!r.applicable) return r;
  r.energy_plateau_ratio = emax / emin;
  r.distance_plateau_ratio = dmax / dmin;
  r.energy_plateau_max = emax;
  r.distance_plateau_max = dmax;
  r.quartic_min = std::isfinite(qmin) ? qmin : 0.0;
  r.quartic_max = qmax;
  r.plateaus_ok = r.energy_plateau_ratio <= plateau_limit &&
                  r.distance_plateau_ratio <= plateau_limit;
  return r;
}

ClockFit fit_log_clock(const FlowTrajectory& traj) {
  const TailWindow w = final_decade(traj);
  std::vector<double> log_t, s;
  for (std::size_t k = w.first; k < traj.samples.size(); ++k) {
    log_t.push_back(std::log(traj.samples[k].t));
    s.push_back(traj.samples[k].s);
  }
  const Line l = least_squares(log_t, s);
  return {l.slope, l.intercept, l.r_squared, w.count};
}

void write_trajectory_csv(std::ostream& os, const FlowTrajectory& traj) {
  const Index n = traj.samples.empty() ? 0 : traj.samples.front().v.size();
  const bool has_g = !traj.samples.empty() && traj.samples.front().g.has_value();
  os << "t,s,f,grad_norm,v_norm";
  for (Index i = 0; i < n; ++i) os << ",v" << i << "_re,v" << i << "_im";
  if (has_g) {
    for (Index r = 0; r < n; ++r) {
      for (Index c = 0; c < n; ++c) os << ",g" << r << c << "_re,g" << r << c << "_im";
    }
  }
  os << '\n';
  for (const FlowSample& s : traj.samples) {
    os << format_double(s.t) << ',' << format_double(s.s) << ',' << format_double(s.f) << ','
       << format_double(s.grad_norm) << ',' << format_double(s.v.norm());
    for (Index i = 0; i < n; ++i) {
      os << ',' << format_double(s.v(i).real()) << ',' << format_double(s.v(i).imag());
    }
    if (has_g) {
      for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) {
          const Complex z = s.g ? (*s.g)(r, c) : Complex(0.0);
          os << ',' << format_double(z.real()) << ',' << format_double(z.imag());
        }
      }
    }
    os << '\n';
  }
}

}  // namespace momentflow
