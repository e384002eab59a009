#include <doctest.h>

#include <sstream>

#include "momentflow/degeneration.hpp"
#include "momentflow/error.hpp"
#include "momentflow/flow.hpp"
#include "support.hpp"

using namespace momentflow;

namespace {

GroupPresentation u1() { return torus_presentation({1, {Eigen::VectorXi::Constant(1, 1)}}); }

GroupPresentation torus_c3() {
  return torus_presentation(
      {2, {Eigen::Vector2i(1, 0), Eigen::Vector2i(0, 1), Eigen::Vector2i(1, 1)}});
}

GroupPresentation torus_12() {
  return torus_presentation({1, {Eigen::VectorXi::Constant(1, 1), Eigen::VectorXi::Constant(1, 2)}});
}

GroupPresentation balanced() {
  return torus_presentation({1, {Eigen::VectorXi::Constant(1, 1), Eigen::VectorXi::Constant(1, -1)}});
}

const FlowSample& at_time(const FlowTrajectory& traj, double t) {
  for (const FlowSample& s : traj.samples) {
    if (s.t == t) return s;
  }
  FAIL("no sample at t = " << t);
  return traj.samples.back();
}

FlowTrajectory synthetic(const std::vector<double>& t, const std::vector<double>& f,
                         const std::vector<double>& norm) {
  FlowTrajectory traj;
  for (std::size_t k = 0; k < t.size(); ++k) {
    FlowSample s;
    s.t = t[k];
    s.f = f[k];
    s.v = CVector::Constant(1, norm[k]);
    s.grad_norm = 0.0;
    traj.samples.push_back(s);
  }
  return traj;
}

FlowTrajectory u1_run(double rtol = 1e-10) {
  FlowOptions o;
  o.t_max = 1e4;
  o.rtol = rtol;
  return cointegrate_group(u1(), CVector::Constant(1, 1.0), o);
}

}  // namespace

TEST_CASE("zero initial vector is stationary") {
  const FlowTrajectory traj = integrate_kempf_ness(torus_c3(), CVector::Zero(3));
  CHECK(traj.terminated_reason == Termination::gradient_small);
  for (const FlowSample& s : traj.samples) {
    CHECK(s.f == 0.0);
    CHECK(s.v.norm() == 0.0);
  }
}

TEST_CASE("U(1) weight 1 follows |v|^2 = 1/(1 + 2t)") {
  FlowOptions o;
  o.t_max = 200;
  o.stop_times = {1.0, 10.0, 100.0};
  const FlowTrajectory traj = integrate_kempf_ness(u1(), CVector::Constant(1, 1.0), o);
  for (double t : o.stop_times) {
    const double exact = 1.0 / (1.0 + 2.0 * t);
    CHECK(testing::rel_err(at_time(traj, t).v.squaredNorm(), exact) <= 1e-4);
    // The carried clock is s = log(1 + 2t) / 2.
    CHECK(testing::rel_err(at_time(traj, t).s, 0.5 * std::log1p(2 * t)) <= 1e-6);
  }
}

TEST_CASE("a zero of the moment map does not move") {
  const CVector v0 = Eigen::Vector2cd(1, Complex(0, 1));
  const FlowTrajectory traj = integrate_kempf_ness(balanced(), v0);
  REQUIRE(traj.samples.size() == 2);
  CHECK(traj.samples[1].t > 0.0);
  CHECK((traj.samples[1].v - v0).norm() <= 1e-12);

  const FlowTrajectory lifted = cointegrate_group(balanced(), v0);
  for (const FlowSample& s : lifted.samples) {
    REQUIRE(s.g.has_value());
    CHECK((*s.g - CMatrix::Identity(2, 2)).norm() <= 1e-12);
  }
}

TEST_CASE("abelian lift is diagonal and matches the scalar quadrature") {
  FlowOptions o;
  o.t_max = 1e3;
  o.stop_times = {0.5, 5.0, 50.0, 500.0};
  const FlowTrajectory traj = cointegrate_group(u1(), CVector::Constant(1, 1.0), o);
  for (double t : o.stop_times) {
    const FlowSample& s = at_time(traj, t);
    // log g = 2i xi integrated: -(1/4) log(1 + 2t) * 2.
    const Complex g = (*s.g)(0, 0);
    CHECK(std::abs(std::log(g) - Complex(-0.5 * std::log1p(2 * t), 0)) <= 1e-6);
  }
  // log H = 2 log g = -2 s: exponential collapse in the clock s.
  for (const FlowSample& s : traj.samples) {
    const double log_h = std::log(std::norm((*s.g)(0, 0)));
    CHECK(std::abs(log_h + 2 * s.s) <= 1e-6 * (1 + s.s));
  }

  const FlowTrajectory c3 = cointegrate_group(torus_c3(), Eigen::Vector3cd(1, 0.5, Complex(0, 2)));
  for (const FlowSample& s : c3.samples) {
    const CMatrix& g = *s.g;
    CHECK((g - CMatrix(g.diagonal().asDiagonal())).norm() == 0.0);
    for (Index j = 0; j < 3; ++j) {
      CHECK(g(j, j).real() > 0.0);
      CHECK(std::abs(g(j, j).imag()) <= 1e-12 * std::abs(g(j, j)));
    }
  }
}

TEST_CASE("trajectory invariants over random presentations") {
  testing::Gen gen(21);
  for (int trial = 0; trial < 12; ++trial) {
    const GroupPresentation p = gen.presentation(trial);
    const CVector v0 = gen.cvector(p.dim_v());
    FlowOptions o;
    o.t_max = 50;
    const FlowTrajectory traj = cointegrate_group(p, v0, o);
    CHECK(traj.terminated_reason != Termination::step_underflow);
    CHECK(traj.samples.front().s == 0.0);
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
      const FlowSample& a = traj.samples[k - 1];
      const FlowSample& b = traj.samples[k];
      CHECK(b.t > a.t);
      CHECK(b.s >= a.s);
      CHECK(b.f <= a.f * (1 + 1e-12));
    }
    CHECK(lift_residual(traj) <= 1e-6);
  }
}

TEST_CASE("flows commute with the compact group") {
  testing::Gen gen(22);
  const int deg[] = {2, 1};
  const GroupPresentation p = su2_presentation(deg);
  const CVector v0 = gen.cvector(5);
  const CMatrix k = exp_group(p.element(gen.rvector(3, 2.0)));
  FlowOptions o;
  o.t_max = 20;
  o.stop_times = {1.0, 5.0, 20.0};
  const FlowTrajectory a = integrate_kempf_ness(p, v0, o);
  const FlowTrajectory b = integrate_kempf_ness(p, k * v0, o);
  for (double t : o.stop_times) {
    CHECK((k * at_time(a, t).v - at_time(b, t).v).norm() <= 1e-7 * v0.norm());
  }
}

TEST_CASE("projective flow agrees with the normalized affine flow at matched clock") {
  testing::Gen gen(23);
  const int deg[] = {3};
  const std::vector<GroupPresentation> ps{torus_c3(), su2_presentation(deg)};
  for (const GroupPresentation& p : ps) {
    const CVector v0 = gen.cvector(p.dim_v());
    FlowOptions o;
    o.t_max = 100;
    const FlowTrajectory affine = integrate_kempf_ness(p, v0, o);
    FlowOptions po;
    for (std::size_t k = 10; k < affine.samples.size(); k += 10) {
      po.stop_times.push_back(affine.samples[k].s);
    }
    po.t_max = po.stop_times.back();
    const FlowTrajectory proj = integrate_projective(p, v0, po);
    std::size_t matched = 0;
    for (std::size_t k = 10; k < affine.samples.size(); k += 10) {
      const FlowSample& a = affine.samples[k];
      for (const FlowSample& q : proj.samples) {
        if (q.s != a.s) continue;
        CHECK((q.v - a.v / a.v.norm()).norm() <= 1e-5);
        ++matched;
      }
    }
    CHECK(matched >= po.stop_times.size() - 1);
  }
}

TEST_CASE("projective flow limits") {
  SUBCASE("single weight line is fixed") {
    const FlowTrajectory traj = integrate_projective(torus_12(), Eigen::Vector2cd(0, 1));
    CHECK(traj.terminated_reason == Termination::gradient_small);
    CHECK((traj.samples.back().v - Eigen::Vector2cd(0, 1)).norm() <= 1e-12);
  }
  SUBCASE("weights 1, 2 collapse to the weight-1 line") {
    const CVector v0 = Eigen::Vector2cd(1, 1) / std::sqrt(2.0);
    const FlowTrajectory traj = integrate_projective(torus_12(), v0);
    CHECK(traj.terminated_reason == Termination::gradient_small);
    CHECK(std::abs(traj.samples.back().v(1)) <= 1e-4);
  }
  SUBCASE("C^3 torus limit direction is proportional to (1, 1)") {
    const CVector v0 = CVector::Ones(3) / std::sqrt(3.0);
    const FlowTrajectory traj = integrate_projective(torus_c3(), v0);
    REQUIRE(traj.terminated_reason == Termination::gradient_small);
    const RVector m = projective_moment_map(torus_c3(), traj.samples.back().v).coords;
    CHECK(std::abs(m(0) - m(1)) <= 1e-6 * m.norm());
    CHECK(m(0) > 0.0);
  }
  SUBCASE("halving the tolerance leaves the limit unchanged") {
    const CVector v0 = CVector::Ones(3) / std::sqrt(3.0);
    FlowOptions o = FlowOptions::projective_defaults();
    const FlowTrajectory a = integrate_projective(torus_c3(), v0, o);
    o.rtol *= 0.5;
    o.atol *= 0.5;
    const FlowTrajectory b = integrate_projective(torus_c3(), v0, o);
    const RVector ma = projective_moment_map(torus_c3(), a.samples.back().v).coords;
    const RVector mb = projective_moment_map(torus_c3(), b.samples.back().v).coords;
    CHECK((ma - mb).norm() <= 1e-8);
  }
  CHECK_THROWS_AS(integrate_projective(torus_12(), CVector::Zero(2)), DegenerateInputError);
}

TEST_CASE("reparametrize") {
  std::vector<double> t, f, n, n2;
  for (int k = 0; k <= 2000; ++k) {
    t.push_back(0.01 * k);
    f.push_back(1.0);
    n.push_back(1.0);
    n2.push_back(1.0 / std::sqrt(1.0 + 0.01 * k));
  }
  const FlowTrajectory flat = reparametrize(synthetic(t, f, n));
  for (const FlowSample& s : flat.samples) CHECK(s.s == doctest::Approx(s.t));
  const FlowTrajectory decay = reparametrize(synthetic(t, f, n2));
  for (const FlowSample& s : decay.samples) CHECK(std::abs(s.s - std::log1p(s.t)) <= 1e-5);
  // The integrator's own clock agrees with the trapezoid rule.
  const FlowTrajectory traj = u1_run();
  const FlowTrajectory re = reparametrize(traj);
  CHECK(std::abs(re.samples.back().s - traj.samples.back().s) <= 1e-3 * traj.samples.back().s);
}

TEST_CASE("U(1) weight 1 rates") {
  const FlowTrajectory traj = u1_run();
  const LojasiewiczFit fit = fit_lojasiewicz(traj);
  CHECK(fit.decay_exponent == doctest::Approx(2.0).epsilon(0.025));
  CHECK(std::abs(fit.alpha_hat - 0.75) <= 0.02);
  CHECK(fit.fit_quality >= fit.semilog_quality);

  const RateReport r = check_rates(traj, 0.75);
  CHECK(r.applicable);
  CHECK(r.energy_plateau_ratio <= 1.05);
  CHECK(r.distance_plateau_ratio <= 1.05);
  // |grad f|^4 / f^3 = 64 exactly for f = |v|^4 / 4.
  CHECK(r.quartic_min == doctest::Approx(64.0));

  const ClockFit clock = fit_log_clock(traj);
  CHECK(clock.r_squared >= 0.99);
  CHECK(clock.slope == doctest::Approx(0.5).epsilon(1e-2));

  // Halving the tolerance moves the fitted exponents by far less than the band.
  const LojasiewiczFit half = fit_lojasiewicz(u1_run(5e-11));
  CHECK(std::abs(half.decay_exponent - fit.decay_exponent) <= 1e-4);
}

TEST_CASE("exponential decay prefers the semilog model") {
  std::vector<double> t, f, n;
  for (int k = 0; k <= 400; ++k) {
    t.push_back(std::pow(10.0, -2.0 + 4.0 * k / 400.0));
    f.push_back(std::exp(-t.back() / 10.0));
    n.push_back(1.0);
  }
  const LojasiewiczFit fit = fit_lojasiewicz(synthetic(t, f, n));
  CHECK(fit.fit_quality <= fit.semilog_quality);
}

TEST_CASE("rate checks on degenerate input") {
  const FlowTrajectory stationary = integrate_kempf_ness(balanced(), Eigen::Vector2cd(1, 1));
  CHECK_FALSE(check_rates(stationary, 0.75).applicable);
  CHECK_THROWS_AS(fit_lojasiewicz(stationary), DiagnosticError);
}

TEST_CASE("trajectory CSV layout") {
  FlowOptions o;
  o.t_max = 1.0;
  const FlowTrajectory traj = cointegrate_group(u1(), CVector::Constant(1, 1.0), o);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,s,f,grad_norm,v_norm,v0_re,v0_im,g00_re,g00_im");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == traj.samples.size());
}
