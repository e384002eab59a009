#pragma once

// Local model Y = G x_{G0} (m + N) around a zero z0 of the moment map.
//
// Points are charted near the identity coset as (xi_m, rho, v) with group
// part g = exp(xi_m). Tangent vectors come in two forms: chart tangents,
// constant in those coordinates, and left-trivialized ones (zeta, rho-dot,
// v-dot) with zeta = g^{-1} dg ranging over all of g.
//
// On left-trivialized tangents, with lambda = rho + mu_N(v) in g and
// lambda-dot = rho-dot + d mu_N(v)[v-dot],
//   Omega(X1, X2) = <lambda-dot_2, zeta_1> - <lambda-dot_1, zeta_2>
//                   + <lambda, [zeta_1, zeta_2]> + Omega0(zeta_1 z0, zeta_2 z0)
//                   + Omega0(v-dot_1, v-dot_2)
// and the moment map is Ad_g lambda.

#include <cstdint>
#include <random>
#include <vector>

#include "momentflow/algebra.hpp"
#include "momentflow/representation.hpp"

namespace momentflow {

struct NormalFormModel {
  GroupPresentation parent;
  CVector z0;
  RMatrix g0_basis;  // k x k0, columns metric-orthonormal, spanning ker(xi -> xi z0)
  RMatrix m_basis;   // k x km, metric-orthonormal complement of g0
  CMatrix n_basis;   // n x nN, Hermitian-orthonormal basis of the slice N
  // identification(a, b) = Re<m_b z0, m_a z0>; rho-tilde = J0 sum_b r_b m_b z0
  // with r = identification^{-1} rho.
  RMatrix identification;

  Index k0() const { return g0_basis.cols(); }
  Index km() const { return m_basis.cols(); }
  Index slice_dim() const { return n_basis.cols(); }  // complex dimension of N
};

struct NormalFormDiagnostics {
  double moment_at_z0 = 0.0;
  double isotropy_residual = 0.0;    // max |xi z0| over g0_basis
  double m_g0_orthogonality = 0.0;   // max |<m_a, g0_b>|
  double slice_orthogonality = 0.0;  // max |Re<N_j, u>| for u in g z0 + J0 g z0
  double slice_j_invariance = 0.0;   // distance of J0 N from N
  bool dimensions_ok = false;        // 2n = 2 km + 2 nN and k = k0 + km
};

// Throws PreconditionError when z0 = 0 or |mu(z0)| > 1e-10, and
// NumericalDegeneracyError when the isotropy splitting is numerically
// ambiguous or the invariants fail.
NormalFormModel build_model(const GroupPresentation& p, const CVector& z0);
NormalFormDiagnostics model_diagnostics(const NormalFormModel& model);

struct ModelPoint {
  RVector xi_m;  // km
  RVector rho;   // km
  CVector v;     // nN
};

struct ModelTangent {
  RVector xi_m;
  RVector rho;
  CVector v;
};

struct TrivializedTangent {
  RVector zeta;  // k, full Lie algebra coordinates
  RVector rho;   // km
  CVector v;     // nN
};

// Term mask for negative controls.
struct FormTerms {
  bool pairing = true;
  bool bracket = true;
  bool orbit = true;
  bool slice = true;
};

ModelPoint model_origin(const NormalFormModel& model);

CMatrix chart_group_element(const NormalFormModel& model, const ModelPoint& at);

// mu_N(v) as a vector of g (basis coordinates), and its derivative along dv.
RVector slice_moment(const NormalFormModel& model, const CVector& v);
RVector slice_moment_derivative(const NormalFormModel& model, const CVector& v,
                                const CVector& dv);

// J0 sum_b r_b m_b z0 for r = identification^{-1} rho.
CVector rho_tilde(const NormalFormModel& model, const RVector& rho);

TrivializedTangent trivialize(const NormalFormModel& model, const ModelPoint& at,
                              const ModelTangent& x);

double model_symplectic_form(const NormalFormModel& model, const ModelPoint& at,
                             const TrivializedTangent& x1, const TrivializedTangent& x2,
                             const FormTerms& terms = {});
double model_symplectic_form(const NormalFormModel& model, const ModelPoint& at,
                             const ModelTangent& x1, const ModelTangent& x2,
                             const FormTerms& terms = {});

// Ad_{exp(xi_m)}(rho + mu_N(v)), lowered.
MomentValue model_moment_map(const NormalFormModel& model, const ModelPoint& at);

// Infinitesimal action of eta in g at the point, left-trivialized.
TrivializedTangent model_action(const NormalFormModel& model, const ModelPoint& at,
                                const RVector& eta);

// Action of exp(sum_j c_j g0_j) on a point at the chart origin (xi_m = 0):
// [g0, rho, v] = [1, Ad_{g0} rho, g0 v].
ModelPoint residual_action(const NormalFormModel& model, const RVector& g0_coords,
                           const ModelPoint& at);

struct MomentSample {
  ModelPoint at;
  RVector eta;   // k
  ModelTangent z;
};

struct ClosednessSample {
  ModelPoint at;
  ModelTangent x, y, z;
};

// Max over samples of |d<mu, eta>(Z) - Omega(X_eta, Z)|, the left side by
// central differences of the given step along the chart tangent.
double verify_moment_identity(const NormalFormModel& model,
                              const std::vector<MomentSample>& samples, double step = 1e-4);

// Max over samples of |dOmega(X, Y, Z)| from central differences of the
// cyclic terms, chart tangents extended as constant fields.
double verify_closedness(const NormalFormModel& model,
                         const std::vector<ClosednessSample>& samples, double step = 1e-4,
                         const FormTerms& terms = {});

// Gram matrix of Omega on the coordinate chart frame at the point
// (2 km + 2 nN square), and its smallest singular value.
RMatrix model_gram(const NormalFormModel& model, const ModelPoint& at,
                   const FormTerms& terms = {});
double smallest_singular_value(const RMatrix& m);

// Deterministic generators. Points have |xi_m| <= chart_radius and entries
// of rho, v uniform in [-scale, scale]; tangents and eta uniform in [-1, 1].
class ModelSampler {
 public:
  ModelSampler(const NormalFormModel& model, std::uint64_t seed, double chart_radius = 0.5,
               double scale = 1.0);

  ModelPoint point();
  ModelTangent tangent();
  RVector algebra_element();
  MomentSample moment_sample();
  ClosednessSample closedness_sample();

 private:
  double uniform();  // in [-1, 1)

  const NormalFormModel& model_;
  std::mt19937_64 rng_;
  double chart_radius_;
  double scale_;
};

}  // namespace momentflow
