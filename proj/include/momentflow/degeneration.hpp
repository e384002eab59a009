#pragma once

// Optimal degeneration direction mu-hat([v]_inf) of a projective flow, its
// rational certificate, and a brute-force closest-point oracle for tori.

#include <optional>
#include <vector>

#include "momentflow/algebra.hpp"
#include "momentflow/flow.hpp"
#include "momentflow/rational.hpp"
#include "momentflow/representation.hpp"

namespace momentflow {

enum class Verdict { match, mismatch, no_oracle };
const char* to_string(Verdict v);

struct DegenerationReport {
  MomentValue limit_direction;  // lowered coordinates of mu-hat / |mu-hat|
  RVector direction;            // the same, raised (basis coordinates)
  double limit_norm = 0.0;      // |mu-hat([v]_inf)| before normalization
  CVector limit_point;          // unit representative of [v]_inf
  // Ascending eigenvalues of i xi_direction scaled to unit Frobenius norm;
  // comparable with the spectrum of the asymptotic ray at the identity.
  RVector spectrum;
  std::optional<RationalApprox> rational_approx;
  std::optional<RVector> oracle_direction;
  double oracle_angle = -1.0;
  Verdict verdict = Verdict::no_oracle;
};

// Reads mu-hat at the last sample of a projective trajectory. Throws
// PreconditionError if the trajectory did not stop on a small gradient,
// InconsistencyError if |mu-hat| < 10 eps_grad although destabilized is set,
// DegenerateInputError if the limit is a zero of mu-hat otherwise. For tori
// the rational certificate is taken on the coordinates, else on the spectrum.
DegenerationReport limit_direction(const GroupPresentation& p, const FlowTrajectory& traj,
                                   bool destabilized, double eps_grad = 1e-10);

// Sorted spectrum of i xi_c, normalized to unit Frobenius norm (zero stays zero).
RVector hermitian_direction_spectrum(const GroupPresentation& p, const RVector& coords);

struct OracleResult {
  bool semistable = false;
  RVector beta;                   // closest point of the hull to 0 (zero if semistable)
  std::vector<std::size_t> face;  // support indices spanning the optimal face
  std::size_t faces_examined = 0;
};

// Exhaustive closest-point search over every subset of the supported
// weights: each subset contributes the minimum-norm point of its affine hull
// when that point lies in the subset's convex hull. Throws StructuralError
// for an empty support or bad index, SizeError for more than 10 indices.
OracleResult torus_oracle(const WeightSystem& weights, const std::vector<std::size_t>& support,
                          double semistable_tol = 1e-10);

// Indices of the coordinates of v with |v_j| > tol |v|.
std::vector<std::size_t> weight_support(const CVector& v, double tol = 1e-12);

// The optimality condition <w_j, beta> >= |beta|^2 over the support.
double oracle_optimality_defect(const WeightSystem& weights,
                                const std::vector<std::size_t>& support, const RVector& beta);

// Sets verdict and oracle fields: match iff the metric angle between the limit
// direction and +beta is at most tol.
void compare_with_oracle(const GroupPresentation& p, DegenerationReport& report,
                         const RVector& beta, double tol = 1e-3);

}  // namespace momentflow
