#include "momentflow/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "momentflow/degeneration.hpp"
#include "momentflow/flow.hpp"
#include "momentflow/format.hpp"
#include "momentflow/matrix_functions.hpp"
#include "momentflow/normal_form.hpp"
#include "momentflow/representation.hpp"
#include "momentflow/symmetric_space.hpp"

namespace momentflow {

namespace {

class Checks {
 public:
  explicit Checks(double scale) : scale_(scale) {}

  void at_most(const std::string& name, double value, double bound) {
    add({name, CheckKind::at_most, value, bound * scale_, 0.0, value <= bound * scale_});
  }
  void at_least(const std::string& name, double value, double bound) {
    const double b = bound / scale_;
    add({name, CheckKind::at_least, value, b, 0.0, value >= b});
  }
  // R^2-like quantities: relax the gap to 1.
  void fit_quality(const std::string& name, double value, double bound) {
    const double b = 1.0 - (1.0 - bound) * scale_;
    add({name, CheckKind::at_least, value, b, 0.0, value >= b});
  }
  void band(const std::string& name, double value, double target, double tol) {
    add({name, CheckKind::band, value, tol * scale_, target,
         std::abs(value - target) <= tol * scale_});
  }
  void flag(const std::string& name, bool ok) {
    add({name, CheckKind::flag, ok ? 1.0 : 0.0, 1.0, 0.0, ok});
  }

  const std::vector<CheckResult>& all() const { return checks_; }

 private:
  void add(CheckResult r) {
    if (!std::isfinite(r.value)) r.pass = false;
    checks_.push_back(std::move(r));
  }
  double scale_;
  std::vector<CheckResult> checks_;
};

std::string vec_str(const RVector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v(i));
  return s;
}

std::string ivec_str(const Eigen::VectorXi& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v(i));
  return s;
}

void kv(std::ostream& os, const std::string& key, const std::string& value) {
  os << key << " = " << value << '\n';
}
void kv(std::ostream& os, const std::string& key, double value) {
  kv(os, key, format_double(value));
}

// Uniform in [-1, 1) from raw 53-bit draws.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return 2.0 * static_cast<double>(rng_() >> 11) * 0x1.0p-53 - 1.0; }

 private:
  std::mt19937_64 rng_;
};

FlowOptions flow_options(const ExperimentConfig& c, double t_max) {
  FlowOptions o;
  o.t_max = t_max;
  o.eps_grad = c.eps_grad;
  o.initial_step = c.initial_step;
  o.rtol = c.rtol;
  return o;
}

// Oracle for the ray and degeneration checks: a weight system with the
// support of v0, together with the torus basis used to map beta back into g.
struct TorusOracle {
  WeightSystem weights;
  std::vector<Index> generators;  // basis indices spanning the torus (rank entries)
  std::vector<std::size_t> support;
  OracleResult result;
  RVector beta_g;  // beta mapped to coordinates in the full basis
};

std::optional<TorusOracle> make_oracle(const ExperimentConfig& c, const GroupPresentation& p,
                                       const CVector& v0) {
  TorusOracle o;
  if (c.group_kind == GroupKind::torus) {
    o.weights = {c.weight_rank, c.weights};
    for (int j = 0; j < c.weight_rank; ++j) o.generators.push_back(j);
  } else {
    if (c.torus_generator < 0) return std::nullopt;
    const CMatrix& xi = p.basis(c.torus_generator);
    if ((xi - CMatrix(xi.diagonal().asDiagonal())).norm() > 1e-12) return std::nullopt;
    // Weights scaled by 2 so that half-integral weights become integers; the
    // scale drops out of every normalized comparison.
    o.weights.rank = 1;
    for (Index j = 0; j < p.dim_v(); ++j) {
      const double w = 2.0 * xi(j, j).imag();
      if (std::abs(w - std::round(w)) > 1e-9) return std::nullopt;
      o.weights.weights.push_back(Eigen::VectorXi::Constant(1, static_cast<int>(std::lround(w))));
    }
    o.generators.push_back(c.torus_generator);
  }
  o.support = weight_support(v0);
  if (o.support.empty() || o.support.size() > 10) return std::nullopt;
  o.result = torus_oracle(o.weights, o.support);
  o.beta_g = RVector::Zero(p.rank());
  if (!o.result.semistable) {
    for (std::size_t j = 0; j < o.generators.size(); ++j) {
      o.beta_g(o.generators[j]) = o.result.beta(static_cast<Index>(j));
    }
    if (c.group_kind != GroupKind::torus) o.beta_g *= 0.5;
  }
  return o;
}

void write_ray_csv(const std::string& path, const RayDiagnostics& d) {
  std::ofstream os(path);
  os << "record,index,clock,value\n";
  for (std::size_t k = 0; k < d.distances.size(); ++k) {
    os << "distance," << k << ',' << format_double(d.clocks[k]) << ','
       << format_double(d.distances[k]) << '\n';
  }
  for (std::size_t k = 0; k < d.angles.size(); ++k) {
    os << "angle," << k + 1 << ',' << format_double(d.clocks[k + 1]) << ','
       << format_double(d.angles[k]) << '\n';
  }
  const std::size_t first = d.clocks.size() - d.probe_residuals.size();
  for (std::size_t k = 0; k < d.probe_residuals.size(); ++k) {
    os << "probe_residual," << first + k << ',' << format_double(d.clocks[first + k]) << ','
       << format_double(d.probe_residuals[k]) << '\n';
  }
  for (std::size_t k = 0; k < d.reference_residuals.size(); ++k) {
    os << "reference_residual," << first + k << ',' << format_double(d.clocks[first + k])
       << ',' << format_double(d.reference_residuals[k]) << '\n';
  }
  for (Index i = 0; i < d.spectrum.size(); ++i) {
    os << "eigenvalue," << i << ",," << format_double(d.spectrum(i)) << '\n';
  }
}

void write_degeneration_csv(const std::string& path, const DegenerationReport& r) {
  std::ofstream os(path);
  os << "field,index,value\n";
  for (Index i = 0; i < r.direction.size(); ++i) {
    os << "direction," << i << ',' << format_double(r.direction(i)) << '\n';
  }
  for (Index i = 0; i < r.spectrum.size(); ++i) {
    os << "spectrum," << i << ',' << format_double(r.spectrum(i)) << '\n';
  }
  for (Index i = 0; i < r.limit_point.size(); ++i) {
    os << "limit_point_abs," << i << ',' << format_double(std::abs(r.limit_point(i))) << '\n';
  }
  if (r.oracle_direction) {
    for (Index i = 0; i < r.oracle_direction->size(); ++i) {
      os << "oracle_beta," << i << ',' << format_double((*r.oracle_direction)(i)) << '\n';
    }
    os << "oracle_angle,0," << format_double(r.oracle_angle) << '\n';
  }
  os << "verdict,0," << to_string(r.verdict) << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c, const RunOptions& options) {
  const GroupPresentation p = build_group(c);
  const CheckTolerances& tol = c.check;
  Checks checks(options.tol_scale);
  ExperimentResult result;

  std::string out_dir = options.out_dir;
  if (out_dir.empty()) out_dir = c.output_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("MOMENTFLOW_OUT");
    out_dir = env != nullptr && *env != '\0' ? env : ".";
  }
  result.out_dir = out_dir;
  if (options.write_files) std::filesystem::create_directories(out_dir);
  const auto out_path = [&](const char* file) {
    return (std::filesystem::path(out_dir) / file).string();
  };

  std::ostringstream report;
  report << "[CONFIG]\n" << canonical_config(c);
  kv(report, "tol_scale", options.tol_scale);
  if (p.rank() > 0) {
    const DiagnosticsReport diag = validate_presentation(p);
    kv(report, "presentation.skewness", diag.skewness);
    kv(report, "presentation.closure", diag.closure);
    kv(report, "presentation.invariance", diag.invariance);
    checks.flag("presentation_valid", diag.ok);
  }
  report << '\n';

  // FLOW
  const CVector& v0 = c.initial_vector;
  FlowTrajectory traj;
  switch (c.mode) {
    case FlowMode::affine: traj = integrate_kempf_ness(p, v0, flow_options(c, c.t_max)); break;
    case FlowMode::cointegrate: traj = cointegrate_group(p, v0, flow_options(c, c.t_max)); break;
    case FlowMode::projective:
      traj = integrate_projective(p, v0, flow_options(c, c.projective_t_max));
      break;
  }
  const FlowSample& last = traj.samples.back();
  report << "[FLOW]\n";
  kv(report, "kind", to_string(traj.kind));
  kv(report, "samples", std::to_string(traj.samples.size()));
  kv(report, "terminated", to_string(traj.terminated_reason));
  kv(report, "t_final", last.t);
  kv(report, "s_final", last.s);
  kv(report, "f_initial", traj.samples.front().f);
  kv(report, "f_final", last.f);
  kv(report, "grad_norm_final", last.grad_norm);
  kv(report, "v_norm_final", last.v.norm());
  double worst_increase = 0.0;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const double prev = traj.samples[k - 1].f;
    worst_increase = std::max(worst_increase, (traj.samples[k].f - prev) / std::max(prev, 1e-300));
  }
  kv(report, "max_relative_f_increase", worst_increase);
  checks.flag("flow_no_underflow", traj.terminated_reason != Termination::step_underflow);
  checks.at_most("flow_f_monotone", worst_increase, 1e-12);
  if (c.mode == FlowMode::cointegrate) {
    const double lift = lift_residual(traj);
    kv(report, "lift_residual", lift);
    checks.at_most("lift_residual", lift, tol.lift);
  }
  if (c.kempf_ness) {
    std::vector<CMatrix> path;
    for (const FlowSample& s : traj.samples) path.push_back(*s.g);
    std::vector<std::size_t> idx;
    const std::vector<CMatrix> fine = refine_path(path, c.kempf_ness_h_path, &idx);
    const std::vector<double> e =
        kempf_ness_profile(p, v0, fine, KempfNessAction::projective, c.kempf_ness_h_path);
    std::vector<double> dev;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double exact = std::log((path[k] * v0).squaredNorm()) - std::log(v0.squaredNorm());
      dev.push_back(e[idx[k]] - exact);
    }
    double worst = 0.0;
    for (double d : dev) worst = std::max(worst, std::abs(d));
    kv(report, "kempf_ness.path_samples", std::to_string(fine.size()));
    kv(report, "kempf_ness.E_final", e.back());
    kv(report, "kempf_ness.max_deviation", worst);
    checks.at_most("kempf_ness_vs_log_norm", worst, tol.kempf_ness);

    // Convexity along random geodesics exp(u i xi_1) exp(i xi_0) of G^C / G.
    Uniform uni(c.seed * 7919 + 17);
    double min_second = INFINITY;
    for (int trial = 0; trial < c.kempf_ness_geodesics && p.rank() > 0; ++trial) {
      RVector a(p.rank()), b(p.rank());
      for (Index i = 0; i < p.rank(); ++i) a(i) = uni();
      for (Index i = 0; i < p.rank(); ++i) b(i) = uni();
      const CMatrix x0 = kI * p.element(a);
      const CMatrix x1 = kI * p.element(b);
      const CMatrix h0 = exp_group((0.5 / std::max(1.0, operator_norm(x0))) * x0);
      const CMatrix dir = (1.0 / std::max(1e-12, operator_norm(x1))) * x1;
      std::vector<CMatrix> g{CMatrix::Identity(p.dim_v(), p.dim_v()), h0};
      const int grid = 20;
      for (int j = 1; j <= grid; ++j) g.push_back(exp_group((double(j) / grid) * dir) * h0);
      std::vector<std::size_t> gi;
      const std::vector<CMatrix> gf = refine_path(g, 0.1 * c.kempf_ness_h_path, &gi);
      const std::vector<double> ge = kempf_ness_profile(p, v0, gf, KempfNessAction::projective,
                                                        0.1 * c.kempf_ness_h_path);
      for (std::size_t j = 2; j + 1 < gi.size(); ++j) {
        min_second = std::min(min_second, ge[gi[j - 1]] - 2.0 * ge[gi[j]] + ge[gi[j + 1]]);
      }
    }
    if (std::isfinite(min_second)) {
      kv(report, "kempf_ness.geodesics", std::to_string(c.kempf_ness_geodesics));
      kv(report, "kempf_ness.min_second_difference", min_second);
      checks.at_least("kempf_ness_convexity", min_second, -tol.convexity);
    }
  }
  report << '\n';

  // RATES
  report << "[RATES]\n";
  if (!c.rates && !c.clock) report << "disabled\n";
  if (c.rates) {
    try {
      const LojasiewiczFit fit = fit_lojasiewicz(traj);
      kv(report, "decay_exponent", fit.decay_exponent);
      kv(report, "alpha_hat", fit.alpha_hat);
      kv(report, "loglog_r2", fit.fit_quality);
      kv(report, "semilog_r2", fit.semilog_quality);
      kv(report, "window_samples", std::to_string(fit.window_samples));
      checks.band("decay_exponent", fit.decay_exponent, tol.decay_target, tol.decay_tol);
      checks.band("alpha_hat", fit.alpha_hat, tol.alpha_target, tol.alpha_tol);
      const RateReport rates = check_rates(traj, tol.alpha_target);
      kv(report, "rates.applicable", rates.applicable ? "true" : "false");
      kv(report, "energy_plateau_ratio", rates.energy_plateau_ratio);
      kv(report, "distance_plateau_ratio", rates.distance_plateau_ratio);
      kv(report, "quartic_min", rates.quartic_min);
      kv(report, "quartic_max", rates.quartic_max);
      checks.flag("rates_applicable", rates.applicable);
      checks.at_most("energy_plateau_ratio", rates.energy_plateau_ratio, tol.plateau_ratio);
      checks.at_most("distance_plateau_ratio", rates.distance_plateau_ratio, tol.plateau_ratio);
      checks.at_least("quartic_bound", rates.quartic_min, tol.quartic_floor);
    } catch (const DiagnosticError& e) {
      kv(report, "rates.error", e.what());
      checks.flag("rates_fit", false);
    }
  }
  if (c.clock) {
    try {
      const ClockFit fit = fit_log_clock(traj);
      kv(report, "clock.slope", fit.slope);
      kv(report, "clock.intercept", fit.intercept);
      kv(report, "clock.r2", fit.r_squared);
      checks.fit_quality("clock_r2", fit.r_squared, tol.clock_r2);
    } catch (const DiagnosticError& e) {
      kv(report, "clock.error", e.what());
      checks.flag("clock_fit", false);
    }
  }
  report << '\n';

  const std::optional<TorusOracle> oracle =
      (c.oracle ? make_oracle(c, p, v0) : std::optional<TorusOracle>());

  // RAY
  report << "[RAY]\n";
  if (!c.ray) report << "disabled\n";
  std::optional<RayDiagnostics> ray_diag;
  if (c.ray) {
    std::vector<RayPathSample> path;
    for (const FlowSample& s : traj.samples) {
      path.push_back({s.s, SymmetricSpacePoint::from_group(*s.g)});
    }
    RayOptions ro;
    ro.theta_ray = tol.ray_angle;
    std::optional<RVector> oracle_spectrum;
    if (oracle && !oracle->result.semistable) {
      CMatrix ref = kI * p.element(oracle->beta_g);
      ref /= ref.norm();
      oracle_spectrum = sorted_eigenvalues(ref);
      if (c.group_kind == GroupKind::torus) ro.reference_direction = ref;
    }
    try {
      const RayExtraction rx =
          extract_asymptotic_ray(path, SymmetricSpacePoint::identity(p.dim_v()), ro);
      const RayDiagnostics& d = rx.diagnostics;
      kv(report, "far_samples", std::to_string(d.distances.size()));
      kv(report, "distance_final", d.distances.back());
      kv(report, "angle_final", d.angles.back());
      kv(report, "angles_monotone", d.angles_monotone ? "true" : "false");
      kv(report, "spectrum", vec_str(d.spectrum));
      std::string probe;
      for (double r : d.probe_residuals) probe += (probe.empty() ? "" : " ") + format_double(r);
      kv(report, "probe_residuals", probe);
      checks.at_most("ray_final_angle", d.angles.back(), tol.ray_angle);
      if (tol.ray_monotone) checks.flag("ray_angles_monotone", d.angles_monotone);
      bool residual_decreasing = true;
      for (std::size_t k = 1; k < d.probe_residuals.size(); ++k) {
        if (d.probe_residuals[k] > d.probe_residuals[k - 1] + 1e-12) residual_decreasing = false;
      }
      checks.flag("ray_probe_residual_decreasing", residual_decreasing);
      checks.at_most("ray_probe_residual", d.probe_residuals.back(), tol.ray_residual);
      if (!d.reference_residuals.empty()) {
        std::string ref;
        for (double r : d.reference_residuals) ref += (ref.empty() ? "" : " ") + format_double(r);
        kv(report, "reference_residuals", ref);
        checks.at_most("ray_oracle_residual", d.reference_residuals.back(), tol.ray_residual);
      }
      if (rx.ray && rx.ray->rational) {
        kv(report, "rational_spectrum", ivec_str(rx.ray->rational->numerators));
      } else {
        kv(report, "rational_spectrum", "absent");
      }
      if (oracle_spectrum) {
        const double err = (d.spectrum - *oracle_spectrum).cwiseAbs().maxCoeff();
        kv(report, "oracle_spectrum", vec_str(*oracle_spectrum));
        kv(report, "oracle_spectrum_error", err);
        checks.at_most("ray_spectrum_vs_oracle", err, tol.ray_spectrum);
      }
      ray_diag = d;
    } catch (const NotAsymptoticError& e) {
      kv(report, "error", e.what());
      checks.flag("ray_escapes", false);
    }
  }
  report << '\n';

  // DEGENERATION
  report << "[DEGENERATION]\n";
  if (!c.degeneration) report << "disabled\n";
  std::optional<DegenerationReport> degeneration;
  if (c.degeneration) {
    const FlowTrajectory proj =
        c.mode == FlowMode::projective
            ? traj
            : integrate_projective(p, v0, flow_options(c, c.projective_t_max));
    kv(report, "projective_samples", std::to_string(proj.samples.size()));
    kv(report, "projective_terminated", to_string(proj.terminated_reason));
    kv(report, "projective_s_final", proj.samples.back().s);
    const bool destabilized = oracle ? !oracle->result.semistable : true;
    try {
      DegenerationReport r = limit_direction(p, proj, destabilized, c.eps_grad);
      kv(report, "mu_hat_norm", r.limit_norm);
      kv(report, "direction", vec_str(r.direction));
      kv(report, "spectrum", vec_str(r.spectrum));
      kv(report, "rational",
         r.rational_approx ? ivec_str(r.rational_approx->numerators) : std::string("absent"));
      if (oracle && c.group_kind == GroupKind::torus) {
        const OracleResult& o = oracle->result;
        kv(report, "oracle.faces_examined", std::to_string(o.faces_examined));
        kv(report, "oracle.semistable", o.semistable ? "true" : "false");
        if (!o.semistable) {
          kv(report, "oracle.beta", vec_str(o.beta));
          compare_with_oracle(p, r, o.beta, tol.oracle_angle * options.tol_scale);
          kv(report, "oracle.angle", r.oracle_angle);
          kv(report, "verdict", to_string(r.verdict));
          checks.flag("oracle_match", r.verdict == Verdict::match);
          const double defect = oracle_optimality_defect(oracle->weights, oracle->support, o.beta);
          kv(report, "oracle.optimality_defect", defect);
          checks.at_most("oracle_self_consistency", defect, 1e-12);
          // Coordinates whose weights lie off the optimal face must vanish.
          double collapse = 0.0;
          const double b2 = o.beta.squaredNorm();
          for (std::size_t j : oracle->support) {
            if (oracle->weights.weights[j].cast<double>().dot(o.beta) > b2 + 1e-9) {
              collapse = std::max(collapse, std::abs(r.limit_point(static_cast<Index>(j))));
            }
          }
          kv(report, "collapse_residual", collapse);
          checks.at_most("collapse_residual", collapse, tol.collapse);
        }
      } else {
        kv(report, "verdict", to_string(r.verdict));
      }
      degeneration = r;
    } catch (const PreconditionError& e) {
      kv(report, "error", e.what());
      checks.flag("projective_converged", false);
    } catch (const InconsistencyError& e) {
      kv(report, "error", e.what());
      checks.flag("limit_nonzero", false);
    } catch (const DegenerateInputError& e) {
      kv(report, "semistable", e.what());
    }
  }
  report << '\n';

  // NORMAL_FORM
  report << "[NORMAL_FORM]\n";
  if (!c.normal_form) report << "disabled\n";
  if (c.normal_form) {
    try {
      const NormalFormModel model = build_model(p, *c.z0);
      const NormalFormDiagnostics d = model_diagnostics(model);
      kv(report, "dim_g0", std::to_string(model.k0()));
      kv(report, "dim_m", std::to_string(model.km()));
      kv(report, "dim_real_N", std::to_string(2 * model.slice_dim()));
      kv(report, "xi_range", "all of g (left-trivialized; chart tangents mapped through dexp)");
      kv(report, "isotropy_residual", d.isotropy_residual);
      kv(report, "slice_orthogonality", d.slice_orthogonality);
      checks.flag("splitting_dimensions", d.dimensions_ok);
      ModelSampler sampler(model, c.seed);
      std::vector<MomentSample> ms;
      std::vector<ClosednessSample> cs;
      for (int i = 0; i < c.normal_form_samples; ++i) ms.push_back(sampler.moment_sample());
      for (int i = 0; i < c.normal_form_samples; ++i) cs.push_back(sampler.closedness_sample());
      const double moment = verify_moment_identity(model, ms, c.normal_form_step);
      const double closed = verify_closedness(model, cs, c.normal_form_step);
      const double gram = smallest_singular_value(model_gram(model, model_origin(model)));
      kv(report, "samples", std::to_string(c.normal_form_samples));
      kv(report, "moment_identity_residual", moment);
      kv(report, "closedness_residual", closed);
      kv(report, "origin_gram_min_singular_value", gram);
      checks.at_most("moment_identity", moment, tol.moment_identity);
      checks.at_most("closedness", closed, tol.closedness);
      checks.at_least("nondegenerate_at_origin", gram, tol.gram);
      // Dropping the bracket term only breaks closedness on nonabelian models.
      bool abelian = true;
      for (Index a = 0; a < p.rank(); ++a) {
        for (Index b = 0; b < p.rank(); ++b) {
          if ((p.basis(a) * p.basis(b) - p.basis(b) * p.basis(a)).norm() > 1e-12) abelian = false;
        }
      }
      if (!abelian) {
        FormTerms corrupted;
        corrupted.bracket = false;
        const double neg = verify_closedness(model, cs, c.normal_form_step, corrupted);
        kv(report, "negative_control_closedness", neg);
        checks.at_least("negative_control_detected", neg, tol.negative_control);
      } else {
        kv(report, "negative_control_closedness", "not applicable (abelian)");
      }
    } catch (const Error& e) {
      kv(report, "error", e.what());
      checks.flag("normal_form_built", false);
    }
  }
  report << '\n';

  // VERDICT
  report << "[VERDICT]\n";
  bool all = true;
  for (const CheckResult& r : checks.all()) {
    all = all && r.pass;
    report << (r.pass ? "pass " : "FAIL ") << r.name << " value=" << format_double(r.value);
    switch (r.kind) {
      case CheckKind::at_most: report << " bound<=" << format_double(r.threshold); break;
      case CheckKind::at_least: report << " bound>=" << format_double(r.threshold); break;
      case CheckKind::band:
        report << " target=" << format_double(r.target) << "+-" << format_double(r.threshold);
        break;
      case CheckKind::flag: break;
    }
    report << '\n';
  }
  report << "overall = " << (all ? "pass" : "fail") << '\n';

  result.checks = checks.all();
  result.passed = all;
  result.report = report.str();

  if (options.write_files) {
    {
      std::ofstream os(out_path("trajectory.csv"));
      write_trajectory_csv(os, traj);
    }
    if (ray_diag) write_ray_csv(out_path("ray.csv"), *ray_diag);
    if (degeneration) write_degeneration_csv(out_path("degeneration.csv"), *degeneration);
    std::ofstream os(out_path("report.txt"));
    os << result.report;
  }
  return result;
}

}  // namespace momentflow
