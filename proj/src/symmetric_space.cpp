#include "momentflow/symmetric_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momentflow/error.hpp"
#include "momentflow/matrix_functions.hpp"

namespace momentflow {

SymmetricSpacePoint::SymmetricSpacePoint(const CMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw DomainError("symmetric space point: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermitian_defect(h) > 1e-12 * scale) {
    throw DomainError("symmetric space point: matrix is not Hermitian");
  }
  h_ = hermitian_part(h);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h_);
  const RVector& lambda = eig.eigenvalues();
  if (!(lambda(0) > 0.0)) {
    throw DomainError("symmetric space point: smallest eigenvalue " + std::to_string(lambda(0)) +
                      " is not positive");
  }
  const CMatrix& u = eig.eigenvectors();
  sqrt_ = hermitian_part(u * lambda.cwiseSqrt().cast<Complex>().asDiagonal() * u.adjoint());
  inv_sqrt_ =
      hermitian_part(u * lambda.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
                     u.adjoint());
}

SymmetricSpacePoint SymmetricSpacePoint::from_group(const CMatrix& g) {
  return SymmetricSpacePoint(hermitian_part(g.adjoint() * g));
}

SymmetricSpacePoint SymmetricSpacePoint::identity(Index n) {
  return SymmetricSpacePoint(CMatrix::Identity(n, n));
}

namespace {

void check_same_dim(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b) {
  if (a.dim() != b.dim()) throw DomainError("symmetric space: dimension mismatch");
}

// a^{-1/2} b a^{-1/2}, the point b seen from a.
CMatrix relative(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b) {
  return hermitian_part(a.inv_sqrt() * b.matrix() * a.inv_sqrt());
}

CMatrix to_identity(const SymmetricSpacePoint& a, const CMatrix& x) {
  return hermitian_part(a.inv_sqrt() * x * a.inv_sqrt());
}

CMatrix from_identity(const SymmetricSpacePoint& a, const CMatrix& y) {
  return hermitian_part(a.sqrt() * y * a.sqrt());
}

}  // namespace

double distance(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b) {
  check_same_dim(a, b);
  const RVector lambda = sorted_eigenvalues(relative(a, b));
  if (!(lambda(0) > 0.0)) throw DomainError("distance: relative matrix lost definiteness");
  return lambda.array().log().matrix().norm();
}

SymmetricSpacePoint geodesic(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b,
                             double u) {
  check_same_dim(a, b);
  if (u == 0.0) return a;
  if (u == 1.0) return b;
  return SymmetricSpacePoint(from_identity(a, hermitian_pow(relative(a, b), u)));
}

CMatrix log_map(const SymmetricSpacePoint& a, const SymmetricSpacePoint& b) {
  check_same_dim(a, b);
  return from_identity(a, hermitian_log(relative(a, b)));
}

SymmetricSpacePoint exp_map(const SymmetricSpacePoint& a, const CMatrix& x, double u) {
  if (x.rows() != a.dim() || x.cols() != a.dim()) {
    throw DomainError("exp_map: tangent vector has wrong size");
  }
  return SymmetricSpacePoint(from_identity(a, hermitian_exp((u * to_identity(a, x)).eval())));
}

double tangent_norm(const SymmetricSpacePoint& a, const CMatrix& x) {
  return to_identity(a, x).norm();
}

double tangent_angle(const SymmetricSpacePoint& a, const CMatrix& x, const CMatrix& y) {
  const CMatrix wx = to_identity(a, x);
  const CMatrix wy = to_identity(a, y);
  const double nx = wx.norm(), ny = wy.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  const double chord = (wx / nx - wy / ny).norm();
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

RVector direction_spectrum(const SymmetricSpacePoint& a, const CMatrix& x) {
  return sorted_eigenvalues(to_identity(a, x));
}

RayExtraction extract_asymptotic_ray(std::span<const RayPathSample> path,
                                     const SymmetricSpacePoint& base, const RayOptions& opts) {
  RayExtraction out;
  RayDiagnostics& d = out.diagnostics;
  std::vector<CMatrix> directions;
  double farthest = 0.0;
  for (const RayPathSample& s : path) {
    const CMatrix x = log_map(base, s.point);
    const double dist = tangent_norm(base, x);
    farthest = std::max(farthest, dist);
    if (dist < opts.near_distance) continue;
    d.clocks.push_back(s.clock);
    d.distances.push_back(dist);
    directions.push_back(x / dist);
  }
  if (farthest <= opts.escape_distance) {
    throw NotAsymptoticError("extract_asymptotic_ray: path stays within distance " +
                             std::to_string(farthest) + " of the base");
  }
  if (directions.size() < opts.min_far_samples) {
    throw NotAsymptoticError("extract_asymptotic_ray: only " +
                             std::to_string(directions.size()) + " samples past distance " +
                             std::to_string(opts.near_distance));
  }

  for (std::size_t k = 1; k < directions.size(); ++k) {
    d.angles.push_back(tangent_angle(base, directions[k - 1], directions[k]));
  }
  d.cauchy = d.angles.back() <= opts.theta_ray;
  d.angles_monotone = true;
  for (std::size_t k = 1; k < d.angles.size(); ++k) {
    if (d.angles[k] > d.angles[k - 1] + 1e-12) d.angles_monotone = false;
  }

  const CMatrix& final_dir = directions.back();
  const SymmetricSpacePoint chi = exp_map(base, final_dir, opts.probe);
  std::optional<SymmetricSpacePoint> chi_ref;
  if (opts.reference_direction) {
    const double nr = tangent_norm(base, *opts.reference_direction);
    chi_ref = exp_map(base, *opts.reference_direction / nr, opts.probe);
  }
  const std::size_t first =
      directions.size() > opts.residual_samples ? directions.size() - opts.residual_samples : 0;
  for (std::size_t k = first; k < directions.size(); ++k) {
    const SymmetricSpacePoint gamma = exp_map(base, directions[k], opts.probe);
    d.probe_residuals.push_back(distance(gamma, chi));
    if (chi_ref) d.reference_residuals.push_back(distance(gamma, *chi_ref));
  }
  d.spectrum = direction_spectrum(base, final_dir);

  if (d.cauchy) {
    GeodesicRay ray{base, final_dir, std::nullopt};
    if (d.spectrum.norm() > 0.0) ray.rational = certify_rational(d.spectrum.normalized());
    out.ray = std::move(ray);
  }
  return out;
}

ConvexityProbe convexity_probe(std::span<const SymmetricSpacePoint> a,
                               std::span<const SymmetricSpacePoint> b, double speed_tol) {
  if (a.size() != b.size()) throw ContractViolation("convexity_probe: grid sizes differ");
  if (a.size() < 3) throw ContractViolation("convexity_probe: need at least 3 grid points");
  auto check_speed = [&](std::span<const SymmetricSpacePoint> path, const char* name) {
    std::vector<double> speeds;
    for (std::size_t k = 1; k < path.size(); ++k) speeds.push_back(distance(path[k - 1], path[k]));
    const auto [lo, hi] = std::minmax_element(speeds.begin(), speeds.end());
    if (*hi - *lo > speed_tol * std::max(*hi, 1e-300) && *hi > 1e-14) {
      throw ContractViolation(std::string("convexity_probe: path ") + name +
                              " is not a constant-speed geodesic");
    }
  };
  check_speed(a, "A");
  check_speed(b, "B");
  std::vector<double> dist(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) dist[k] = distance(a[k], b[k]);
  const double scale = std::max(1.0, *std::max_element(dist.begin(), dist.end()));
  ConvexityProbe out;
  out.min_second_difference = INFINITY;
  for (std::size_t k = 1; k + 1 < dist.size(); ++k) {
    out.min_second_difference =
        std::min(out.min_second_difference, dist[k - 1] - 2.0 * dist[k] + dist[k + 1]);
  }
  out.min_scaled_second_difference = out.min_second_difference / scale;
  return out;
}

}  // namespace momentflow
