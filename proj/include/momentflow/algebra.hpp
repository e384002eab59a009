#pragma once

// Compact matrix groups presented by a skew-Hermitian basis of their Lie
// algebra acting on V = C^n, together with an Ad-invariant metric.

#include <span>
#include <vector>

#include <Eigen/Cholesky>

#include "momentflow/types.hpp"

namespace momentflow {

inline constexpr double kAlgebraTol = 1e-10;

enum class PresentationKind { torus, matrix_basis };

class GroupPresentation {
 public:
  // Throws StructuralError when a basis matrix is not dim_v x dim_v or the
  // metric is not k x k. An empty basis is the trivial (zero) Lie algebra.
  GroupPresentation(Index dim_v, std::vector<CMatrix> basis, RMatrix metric,
                    PresentationKind kind = PresentationKind::matrix_basis);

  Index dim_v() const { return dim_v_; }
  Index rank() const { return static_cast<Index>(basis_.size()); }
  const std::vector<CMatrix>& basis() const { return basis_; }
  const CMatrix& basis(Index a) const { return basis_[static_cast<std::size_t>(a)]; }
  const RMatrix& metric() const { return metric_; }
  PresentationKind kind() const { return kind_; }

  // Sum_a x_a xi_a.
  CMatrix element(const RVector& coords) const;
  CMatrix complex_element(const Eigen::VectorXcd& coords) const;

  // Real least-squares coordinates of x in span{xi_a}; the Frobenius residual
  // is written to *residual when provided.
  RVector expand(const CMatrix& x, double* residual = nullptr) const;
  // Complex coordinates of x in span_C{xi_a} (the complexified algebra).
  Eigen::VectorXcd expand_complex(const CMatrix& x, double* residual = nullptr) const;

  double inner(const RVector& x, const RVector& y) const { return x.dot(metric_ * y); }
  double norm(const RVector& x) const;
  RVector lower(const RVector& x) const { return metric_ * x; }
  RVector raise(const RVector& covector) const;

  // Coordinates of [xi_x, xi_y].
  RVector bracket(const RVector& x, const RVector& y) const;

 private:
  Index dim_v_;
  std::vector<CMatrix> basis_;
  RMatrix metric_;
  PresentationKind kind_;
  Eigen::LDLT<RMatrix> metric_solver_;
  Eigen::LDLT<RMatrix> frobenius_solver_;
  Eigen::LDLT<RMatrix> complex_frobenius_solver_;
};

struct WeightSystem {
  int rank = 0;
  std::vector<Eigen::VectorXi> weights;  // one weight in Z^rank per coordinate of V
};

// -Re tr(xi_a xi_b); Ad-invariant and positive-definite on skew-Hermitian bases.
RMatrix trace_metric(std::span<const CMatrix> basis);

// Uses the trace metric.
GroupPresentation make_presentation(Index dim_v, std::vector<CMatrix> basis);

// xi_j = i diag(w_1[j], ..., w_n[j]) with the Euclidean metric on R^rank.
GroupPresentation torus_presentation(const WeightSystem& weights);

// SU(2) acting on the direct sum of Sym^d C^2 over the listed degrees, with
// basis (i/2)(sigma_x, sigma_y, sigma_z) pushed through the representation and
// the trace metric of V. On each summand the monomial x^{d-k} y^k spans the
// sigma_z-weight line of weight (d - 2k)/2.
GroupPresentation su2_presentation(std::span<const int> degrees);

struct DiagnosticsReport {
  double skewness = 0.0;
  double closure = 0.0;
  double invariance = 0.0;
  bool metric_positive = true;
  bool ok = true;
};

// Throws StructuralError for an empty basis.
DiagnosticsReport validate_presentation(const GroupPresentation& p, double tol = kAlgebraTol);

// Matrix exponential (scaling and squaring).
CMatrix exp_group(const CMatrix& x);

// Coordinates of g xi g^{-1}. Throws DomainError when the result leaves the
// span of the basis by more than tol (g does not normalize the algebra).
RVector adjoint(const GroupPresentation& p, const CMatrix& g, const RVector& coords,
                double tol = kAlgebraTol);

// Matrix of Ad_g in basis coordinates (column a = adjoint(g, e_a)).
RMatrix adjoint_matrix(const GroupPresentation& p, const CMatrix& g, double tol = kAlgebraTol);

}  // namespace momentflow
