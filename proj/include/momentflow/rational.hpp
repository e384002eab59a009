#pragma once

#include <optional>

#include "momentflow/types.hpp"

namespace momentflow {

struct RationalApprox {
  Eigen::VectorXi numerators;  // primitive integer vector
  int denominator = 1;         // the q for which numerators = round(q x) before reduction
  double angle = 0.0;          // angle between x and numerators
};

// Simultaneous rational approximation of a unit vector x: scans common
// denominators q = 1..max_denominator, rounds q x to the integer lattice and
// accepts the first candidate within tol_angle of x. Absence means no
// certificate at this resolution. Throws PreconditionError if |x| != 1.
std::optional<RationalApprox> certify_rational(const RVector& x, int max_denominator = 64,
                                               double tol_angle = 1e-3);

}  // namespace momentflow
