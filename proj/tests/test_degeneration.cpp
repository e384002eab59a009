#include <doctest.h>

#include <numeric>

#include "momentflow/degeneration.hpp"
#include "momentflow/error.hpp"
#include "momentflow/flow.hpp"
#include "momentflow/rational.hpp"
#include "support.hpp"

using namespace momentflow;

namespace {

WeightSystem c3_weights() {
  return {2, {Eigen::Vector2i(1, 0), Eigen::Vector2i(0, 1), Eigen::Vector2i(1, 1)}};
}

std::vector<std::size_t> all(std::size_t n) {
  std::vector<std::size_t> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

double angle(const RVector& a, const RVector& b) {
  return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
}

}  // namespace

TEST_CASE("torus oracle examples") {
  SUBCASE("single weight") {
    const OracleResult r = torus_oracle({1, {Eigen::VectorXi::Constant(1, 1)}}, {0});
    CHECK_FALSE(r.semistable);
    CHECK(r.beta(0) == doctest::Approx(1.0));
  }
  SUBCASE("C^3 weights") {
    const OracleResult r = torus_oracle(c3_weights(), all(3));
    CHECK_FALSE(r.semistable);
    CHECK((r.beta - Eigen::Vector2d(0.5, 0.5)).norm() <= 1e-14);
    CHECK(r.faces_examined == 7);
    CHECK(oracle_optimality_defect(c3_weights(), all(3), r.beta) <= 1e-14);
  }
  SUBCASE("symmetric weights are semistable") {
    const OracleResult r =
        torus_oracle({1, {Eigen::VectorXi::Constant(1, 1), Eigen::VectorXi::Constant(1, -1)}}, all(2));
    CHECK(r.semistable);
    CHECK(r.beta.norm() == 0.0);
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(torus_oracle(c3_weights(), {}), StructuralError);
    CHECK_THROWS_AS(torus_oracle(c3_weights(), {5}), StructuralError);
    testing::Gen gen(1);
    CHECK_THROWS_AS(torus_oracle(gen.weights(2, 11), all(11)), SizeError);
  }
}

TEST_CASE("torus oracle agrees with projected gradient on the simplex") {
  testing::Gen gen(2);
  for (int trial = 0; trial < 40; ++trial) {
    const int rank = gen.integer(1, 3);
    const WeightSystem w = gen.weights(rank, gen.integer(1, 7));
    const OracleResult r = torus_oracle(w, all(w.weights.size()));
    const RVector reference = testing::min_norm_point(w, all(w.weights.size()));
    if (r.semistable) {
      CHECK(reference.norm() <= 1e-6);
    } else {
      CHECK((r.beta - reference).norm() <= 1e-6);
      CHECK(oracle_optimality_defect(w, all(w.weights.size()), r.beta) <= 1e-10);
    }
  }
}

TEST_CASE("weight support") {
  const std::vector<std::size_t> s = weight_support(Eigen::Vector3cd(1, 0, Complex(0, 1e-3)));
  CHECK(s == std::vector<std::size_t>{0, 2});
}

TEST_CASE("limit direction on torus examples") {
  SUBCASE("single weight line") {
    const WeightSystem w{2, {Eigen::Vector2i(2, 1), Eigen::Vector2i(0, 1)}};
    const GroupPresentation p = torus_presentation(w);
    const FlowTrajectory traj = integrate_projective(p, Eigen::Vector2cd(1, 0));
    DegenerationReport r = limit_direction(p, traj, true);
    CHECK(angle(r.direction, Eigen::Vector2d(2, 1)) <= 1e-12);
    CHECK(r.limit_norm == doctest::Approx(0.5 * std::sqrt(5.0)));
    compare_with_oracle(p, r, torus_oracle(w, {0}).beta);
    CHECK(r.verdict == Verdict::match);
  }
  SUBCASE("weights 1, 2") {
    const GroupPresentation p = torus_presentation(
        {1, {Eigen::VectorXi::Constant(1, 1), Eigen::VectorXi::Constant(1, 2)}});
    const FlowTrajectory traj = integrate_projective(p, Eigen::Vector2cd(1, 1));
    const DegenerationReport r = limit_direction(p, traj, true);
    // mu-hat at the weight-1 line is 1/2.
    CHECK(r.limit_norm == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.direction(0) == doctest::Approx(1.0));
    CHECK(std::abs(r.limit_point(1)) <= 1e-4);
  }
  SUBCASE("C^3 torus") {
    const GroupPresentation p = torus_presentation(c3_weights());
    const FlowTrajectory traj = integrate_projective(p, CVector::Ones(3));
    DegenerationReport r = limit_direction(p, traj, true);
    CHECK(angle(r.direction, Eigen::Vector2d(1, 1)) <= 1e-3);
    REQUIRE(r.rational_approx.has_value());
    CHECK(r.rational_approx->numerators == Eigen::Vector2i(1, 1));
    compare_with_oracle(p, r, torus_oracle(c3_weights(), all(3)).beta);
    CHECK(r.verdict == Verdict::match);
    CHECK(r.oracle_angle <= 1e-3);
    // Negative control: the oracle of coordinate-swapped weights disagrees.
    // (2,1) lies strictly beyond the optimal vertex (1,0), so the flow
    // converges exponentially.
    const WeightSystem w2{2, {Eigen::Vector2i(1, 0), Eigen::Vector2i(2, 1)}};
    const WeightSystem swapped{2, {Eigen::Vector2i(0, 1), Eigen::Vector2i(1, 2)}};
    const GroupPresentation p2 = torus_presentation(w2);
    DegenerationReport r2 = limit_direction(p2, integrate_projective(p2, Eigen::Vector2cd(1, 1)), true);
    compare_with_oracle(p2, r2, torus_oracle(swapped, all(2)).beta);
    CHECK(r2.verdict == Verdict::mismatch);
    compare_with_oracle(p2, r2, torus_oracle(w2, all(2)).beta);
    CHECK(r2.verdict == Verdict::match);
  }
}

TEST_CASE("limit direction error paths") {
  const GroupPresentation p = torus_presentation(
      {1, {Eigen::VectorXi::Constant(1, 1), Eigen::VectorXi::Constant(1, -1)}});
  const FlowTrajectory semistable = integrate_projective(p, Eigen::Vector2cd(1, 0.5));
  REQUIRE(semistable.terminated_reason == Termination::gradient_small);
  CHECK_THROWS_AS(limit_direction(p, semistable, false), DegenerateInputError);
  CHECK_THROWS_AS(limit_direction(p, semistable, true), InconsistencyError);
  FlowOptions short_run = FlowOptions::projective_defaults();
  short_run.t_max = 0.1;
  const FlowTrajectory unfinished = integrate_projective(p, Eigen::Vector2cd(1, 0.5), short_run);
  CHECK_THROWS_AS(limit_direction(p, unfinished, true), PreconditionError);
}

TEST_CASE("hermitian direction spectrum") {
  const GroupPresentation p = torus_presentation(c3_weights());
  const RVector s = hermitian_direction_spectrum(p, Eigen::Vector2d(0.5, 0.5));
  CHECK((s - Eigen::Vector3d(-2, -1, -1) / std::sqrt(6.0)).norm() <= 1e-14);
  CHECK(hermitian_direction_spectrum(p, Eigen::Vector2d(0, 0)).norm() == 0.0);
}

TEST_CASE("certify_rational examples") {
  const auto r11 = certify_rational(Eigen::Vector2d(1, 1).normalized());
  REQUIRE(r11.has_value());
  CHECK(r11->numerators == Eigen::Vector2i(1, 1));
  const auto r12 = certify_rational(Eigen::Vector2d(1, 2).normalized());
  REQUIRE(r12.has_value());
  CHECK(r12->numerators == Eigen::Vector2i(1, 2));
  const auto neg = certify_rational(Eigen::Vector3d(-2, 1, 0).normalized());
  REQUIRE(neg.has_value());
  CHECK(neg->numerators == Eigen::Vector3i(-2, 1, 0));
  CHECK_THROWS_AS(certify_rational(Eigen::Vector2d(1, 1)), PreconditionError);
}

TEST_CASE("certify_rational negative control") {
  // (1, 1)/sqrt 2 pushed by 1e-2 along (1, 0): no denominator up to 64 brings
  // the rounded lattice point within 1e-3.
  const RVector x = (Eigen::Vector2d(1, 1).normalized() + Eigen::Vector2d(1e-2, 0)).normalized();
  CHECK_FALSE(certify_rational(x).has_value());
  // Brute-force oracle: a certificate with denominator q <= 64 is a lattice
  // point of Euclidean norm about q, and none of norm <= 65 is within 1e-3.
  // (Longer ones such as (64, 63) are, which is why the bound matters.)
  double best = INFINITY;
  for (int a = -65; a <= 65; ++a) {
    for (int b = -65; b <= 65; ++b) {
      if ((a == 0 && b == 0) || a * a + b * b > 65 * 65) continue;
      best = std::min(best, (Eigen::Vector2d(a, b).normalized() - x).norm());
    }
  }
  CHECK(best > 1e-3);
  double rounded = INFINITY;
  for (int q = 1; q <= 64; ++q) {
    const Eigen::Vector2d p = (q * x).array().round();
    if (p.norm() > 0) rounded = std::min(rounded, (p.normalized() - x).norm());
  }
  CHECK(rounded > 1e-3);
}

TEST_CASE("certify_rational properties") {
  testing::Gen gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = gen.integer(2, 4);
    Eigen::VectorXi p(n);
    for (Index i = 0; i < n; ++i) p(i) = gen.integer(-6, 6);
    if (p.cwiseAbs().maxCoeff() == 0) continue;
    int g = 0;
    for (Index i = 0; i < n; ++i) g = std::gcd(g, std::abs(p(i)));
    p /= g;
    const RVector x = p.cast<double>().normalized();
    const auto r = certify_rational(x);
    REQUIRE(r.has_value());
    CHECK(r->numerators == p);
    CHECK(r->angle <= 1e-12);

    // Any certificate for a noisy input is primitive and within tolerance.
    const RVector y = (x + gen.rvector(n, 1e-4)).normalized();
    if (const auto c = certify_rational(y)) {
      int h = 0;
      for (Index i = 0; i < n; ++i) h = std::gcd(h, std::abs(c->numerators(i)));
      CHECK(h == 1);
      CHECK((c->numerators.cast<double>().normalized() - y).norm() <= 1e-3 + 1e-15);
      CHECK(c->denominator <= 64);
    }
  }
}
