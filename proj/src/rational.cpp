#include "momentflow/rational.hpp"

#include <cmath>
#include <numeric>

#include "momentflow/error.hpp"

namespace momentflow {

std::optional<RationalApprox> certify_rational(const RVector& x, int max_denominator,
                                               double tol_angle) {
  if (x.size() == 0 || std::abs(x.norm() - 1.0) > 1e-8) {
    throw PreconditionError("certify_rational: direction must be a unit vector");
  }
  for (int q = 1; q <= max_denominator; ++q) {
    Eigen::VectorXi p(x.size());
    for (Index i = 0; i < x.size(); ++i) p(i) = static_cast<int>(std::lround(q * x(i)));
    if (p.cwiseAbs().maxCoeff() == 0) continue;
    const RVector pr = p.cast<double>();
    // Angle via the chord so tiny angles keep their precision.
    const double chord = (pr.normalized() - x).norm();
    const double angle = 2.0 * std::asin(std::min(1.0, 0.5 * chord));
    if (angle > tol_angle) continue;
    int g = 0;
    for (Index i = 0; i < p.size(); ++i) g = std::gcd(g, std::abs(p(i)));
    RationalApprox out;
    out.numerators = p / g;
    out.denominator = q;
    out.angle = angle;
    return out;
  }
  return std::nullopt;
}

}  // namespace momentflow
