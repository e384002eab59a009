#pragma once

// Moment map geometry of a unitary representation on V = C^n.
//
// Conventions: <u, w> = sum_j u_j conj(w_j), J0 = multiplication by i and
// Omega0(u, w) = Re<u, J0 w> = Im<u, w>. With these, the two textbook formulas
// (mu(v), xi) = 1/2 Omega0(xi v, v) and mu(v) = 1/2 L_v^*(J0 v) coincide, and
// for a torus mu-hat takes values in +1/2 conv(weights).

#include <span>

#include "momentflow/algebra.hpp"
#include "momentflow/types.hpp"

namespace momentflow {

// Element of g stored metric-lowered: coords(a) = <mu, xi_a>.
struct MomentValue {
  RVector coords;
};

double symplectic_form(const CVector& u, const CVector& w);

// n x k matrix whose column a is xi_a v.
CMatrix infinitesimal_action(const GroupPresentation& p, const CVector& v);

MomentValue moment_map(const GroupPresentation& p, const CVector& v);
// Second route: 1/2 L_v^*(J0 v), with the adjoint taken for Re<.,.>.
MomentValue moment_map_via_adjoint(const GroupPresentation& p, const CVector& v);

// mu(v) / |v|^2. Throws DegenerateInputError when |v| <= 1e-12 * reference_norm.
MomentValue projective_moment_map(const GroupPresentation& p, const CVector& v,
                                  double reference_norm = 1.0);

// Coordinates of mu in the basis (raised with the metric) and its squared norm.
RVector moment_vector(const GroupPresentation& p, const MomentValue& m);
double moment_norm_squared(const GroupPresentation& p, const MomentValue& m);

// Coadjoint transport of a lowered moment value: the moment value at g v for
// unitary g, consistent with Ad_g on raised coordinates.
MomentValue coadjoint(const GroupPresentation& p, const CMatrix& g, const MomentValue& m);

struct EnergyGradient {
  double f = 0.0;
  CVector grad;
};

// f = |mu(v)|^2 and its Euclidean gradient for Re<.,.>, which equals
// -2 J0 L_v(mu(v)) under the convention above.
EnergyGradient energy_and_gradient(const GroupPresentation& p, const CVector& v);

// f-hat = |mu-hat|^2 on V \ 0 and its gradient; tangent to the sphere and
// orthogonal to J0 v.
EnergyGradient projective_energy_and_gradient(const GroupPresentation& p, const CVector& v);

enum class KempfNessAction { projective, affine };

// Path-integral of the Kempf-Ness one-form along sampled group elements.
// The form is normalized as alpha_g(R_g zeta) = -4 <mu-hat(g v0), Im zeta>, so
// that for the projective action the value is log|g v0|^2 - log|v0|^2 and for
// the affine action |g v0|^2 - |v0|^2. Each segment is treated as the
// one-parameter piece exp(tau log(g_{k+1} g_k^{-1})) g_k and integrated by the
// midpoint rule.
//
// Throws ContractViolation if path[0] is not the identity, if a segment is
// longer than h_path in operator norm, or if a segment leaves G^C.
double kempf_ness_value(const GroupPresentation& p, const CVector& v0,
                        std::span<const CMatrix> path,
                        KempfNessAction action = KempfNessAction::projective,
                        double h_path = 1e-2);

// Running values of the same integral at every sample of the path.
std::vector<double> kempf_ness_profile(const GroupPresentation& p, const CVector& v0,
                                       std::span<const CMatrix> path,
                                       KempfNessAction action = KempfNessAction::projective,
                                       double h_path = 1e-2);

// Inserts one-parameter interpolants so that every segment is at most h_path
// long. Original samples are kept; their indices in the output are written to
// *original_indices when provided.
std::vector<CMatrix> refine_path(std::span<const CMatrix> path, double h_path,
                                 std::vector<std::size_t>* original_indices = nullptr);

}  // namespace momentflow
