#pragma once

// G^C / G realized as positive-definite Hermitian matrices H = g^* g with the
// affine-invariant metric |X|_H = |H^{-1/2} X H^{-1/2}|_F.

#include <optional>
#include <span>
#include <vector>

#include "momentflow/rational.hpp"
#include "momentflow/types.hpp"

namespace momentflow {

class SymmetricSpacePoint {
 public:
  // Throws DomainError unless h is Hermitian (relative tolerance 1e-12) and
  // positive-definite. The stored matrix is the Hermitian part of h.
  explicit SymmetricSpacePoint(const CMatrix& h);

  // The coset of g, represented by g^* g.
  static SymmetricSpacePoint from_group(const CMatrix& g);
  static SymmetricSpacePoint identity(Index n);

  const CMatrix& matrix() const { return h_; }
  Index dim() const { return h_.rows(); }
  const CMatrix& sqrt() const { return sqrt_; }
  const CMatrix& inv_sqrt() const { return inv_sqrt_; }

 private:
  CMatrix h_;
  CMatrix sqrt_;
  CMatrix inv_sqrt_;
};

double distance(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b);

// H(u) = H1^{1/2} (H1^{-1/2} H2 H1^{-1/2})^u H1^{1/2}.
SymmetricSpacePoint geodesic(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b, double u);

// Initial velocity X at a of the geodesic to b: |X|_a = distance(a, b).
CMatrix log_map(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b);
// Point at parameter u along the geodesic from a with initial velocity x.
SymmetricSpacePoint exp_map(const SymmetricSpacePoint& a, const CMatrix& x, double u = 1.0);

double tangent_norm(const SymmetricSpacePoint& a, const CMatrix& x);
// Angle between two tangent vectors at a in the base-point metric.
double tangent_angle(const SymmetricSpacePoint& a, const CMatrix& x, const CMatrix& y);

// Ascending eigenvalues of a^{-1/2} x a^{-1/2}, i.e. of x transported to the
// identity. These are the conjugacy invariants of a direction.
RVector direction_spectrum(const SymmetricSpacePoint& a, const CMatrix& x);

struct GeodesicRay {
  SymmetricSpacePoint base;
  CMatrix direction;  // unit in the metric at base
  std::optional<RationalApprox> rational;

  SymmetricSpacePoint at(double s) const { return exp_map(base, direction, s); }
};

struct RayPathSample {
  double clock = 0.0;
  SymmetricSpacePoint point;
};

struct RayOptions {
  double theta_ray = 1e-3;
  double probe = 1.0;
  double escape_distance = 10.0;
  double near_distance = 5.0;
  std::size_t min_far_samples = 20;
  std::size_t residual_samples = 5;
  // When set, the probe residual is also measured against the ray with
  // this (unit, at base) direction.
  std::optional<CMatrix> reference_direction;
};

struct RayDiagnostics {
  std::vector<double> clocks;     // clocks of the samples past near_distance
  std::vector<double> distances;  // distance from base at those samples
  std::vector<double> angles;     // angle between successive directions
  bool cauchy = false;            // last angle <= theta_ray
  bool angles_monotone = false;   // angles non-increasing up to 1e-12
  // d(gamma_t(probe), chi(probe)) for the last residual_samples samples, with
  // chi the ray along the final direction.
  std::vector<double> probe_residuals;
  std::vector<double> reference_residuals;  // same against the reference ray
  RVector spectrum;  // of the final direction
};

struct RayExtraction {
  std::optional<GeodesicRay> ray;  // absent when the directions are not Cauchy
  RayDiagnostics diagnostics;
};

// Throws NotAsymptoticError when the path stays within escape_distance of base
// or has fewer than min_far_samples samples past near_distance.
RayExtraction extract_asymptotic_ray(std::span<const RayPathSample> path,
                                     const SymmetricSpacePoint& base,
                                     const RayOptions& opts = {});

struct ConvexityProbe {
  double min_second_difference = 0.0;
  // Same divided by max(1, largest distance on the grid).
  double min_scaled_second_difference = 0.0;
};

// Centered second differences of u -> distance(a[u], b[u]) on a common grid.
// Throws ContractViolation when either path deviates from constant speed by
// more than speed_tol relative, or the sizes differ.
ConvexityProbe convexity_probe(std::span<const SymmetricSpacePoint> a,
                               std::span<const SymmetricSpacePoint> b,
                               double speed_tol = 1e-8);

}  // namespace momentflow
