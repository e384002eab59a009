#include "momentflow/degeneration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momentflow/error.hpp"
#include "momentflow/matrix_functions.hpp"

namespace momentflow {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::match: return "match";
    case Verdict::mismatch: return "mismatch";
    case Verdict::no_oracle: return "no_oracle";
  }
  return "unknown";
}

RVector hermitian_direction_spectrum(const GroupPresentation& p, const RVector& coords) {
  CMatrix h = kI * p.element(coords);
  const double n = h.norm();
  if (n > 0.0) h /= n;
  return sorted_eigenvalues(h);
}

DegenerationReport limit_direction(const GroupPresentation& p, const FlowTrajectory& traj,
                                   bool destabilized, double eps_grad) {
  if (traj.samples.empty() || traj.terminated_reason != Termination::gradient_small) {
    throw PreconditionError("limit_direction: trajectory has not converged");
  }
  DegenerationReport r;
  r.limit_point = traj.samples.back().v.normalized();
  const MomentValue m = projective_moment_map(p, r.limit_point);
  r.limit_norm = std::sqrt(moment_norm_squared(p, m));
  if (r.limit_norm < 10.0 * eps_grad) {
    if (destabilized) {
      throw InconsistencyError("limit_direction: |mu-hat([v]_inf)| = " +
                               std::to_string(r.limit_norm) +
                               " vanishes on a destabilized input");
    }
    throw DegenerateInputError("limit_direction: the limit is a zero of mu-hat (semistable)");
  }
  r.limit_direction.coords = m.coords / r.limit_norm;
  r.direction = p.raise(r.limit_direction.coords);
  r.spectrum = hermitian_direction_spectrum(p, r.direction);
  if (p.kind() == PresentationKind::torus) {
    r.rational_approx = certify_rational(r.direction.normalized());
  } else if (r.spectrum.norm() > 0.0) {
    r.rational_approx = certify_rational(r.spectrum.normalized());
  }
  return r;
}

std::vector<std::size_t> weight_support(const CVector& v, double tol) {
  std::vector<std::size_t> out;
  const double scale = v.norm();
  for (Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) > tol * scale) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

OracleResult torus_oracle(const WeightSystem& weights, const std::vector<std::size_t>& support,
                          double semistable_tol) {
  if (support.empty()) throw StructuralError("torus_oracle: empty support");
  if (support.size() > 10) {
    throw SizeError("torus_oracle: support of size " + std::to_string(support.size()) +
                    " exceeds the brute-force limit of 10");
  }
  for (std::size_t j : support) {
    if (j >= weights.weights.size()) throw StructuralError("torus_oracle: support index too large");
    if (weights.weights[j].size() != weights.rank) {
      throw StructuralError("torus_oracle: weight of wrong rank");
    }
  }
  const std::size_t m = support.size();
  OracleResult best;
  double best_norm = INFINITY;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::size_t> face;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) face.push_back(support[i]);
    }
    ++best.faces_examined;
    const RVector w0 = weights.weights[face[0]].cast<double>();
    RVector x = w0;
    RVector bary = RVector::Ones(1);
    if (face.size() > 1) {
      RMatrix d(weights.rank, static_cast<Index>(face.size() - 1));
      for (std::size_t i = 1; i < face.size(); ++i) {
        d.col(static_cast<Index>(i - 1)) = weights.weights[face[i]].cast<double>() - w0;
      }
      // Minimum-norm point of w0 + range(d).
      const RVector lambda = d.completeOrthogonalDecomposition().solve(-w0);
      x = w0 + d * lambda;
      bary.resize(static_cast<Index>(face.size()));
      bary(0) = 1.0 - lambda.sum();
      bary.tail(lambda.size()) = lambda;
    }
    if (bary.minCoeff() < -1e-12) continue;
    const double nx = x.norm();
    if (nx < best_norm - 1e-15) {
      best_norm = nx;
      best.beta = x;
      best.face = face;
    }
  }
  best.semistable = best_norm <= semistable_tol;
  if (best.semistable) best.beta = RVector::Zero(weights.rank);
  return best;
}

double oracle_optimality_defect(const WeightSystem& weights,
                                const std::vector<std::size_t>& support, const RVector& beta) {
  const double b2 = beta.squaredNorm();
  double worst = 0.0;
  for (std::size_t j : support) {
    worst = std::max(worst, b2 - weights.weights[j].cast<double>().dot(beta));
  }
  return worst;
}

void compare_with_oracle(const GroupPresentation& p, DegenerationReport& report,
                         const RVector& beta, double tol) {
  if (beta.size() != report.direction.size()) {
    throw StructuralError("compare_with_oracle: oracle has the wrong rank");
  }
  report.oracle_direction = beta;
  const double nb = p.norm(beta);
  if (nb == 0.0) {
    report.verdict = Verdict::no_oracle;
    return;
  }
  const RVector u = report.direction / p.norm(report.direction);
  const RVector b = beta / nb;
  const double chord = p.norm(u - b);
  report.oracle_angle = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
  report.verdict = report.oracle_angle <= tol ? Verdict::match : Verdict::mismatch;
}

}  // namespace momentflow
