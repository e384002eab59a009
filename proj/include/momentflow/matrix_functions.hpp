#pragma once

// Spectral calculus for Hermitian (or real symmetric) matrices. Every result
// is re-symmetrized so Hermitian invariants hold to machine precision.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace momentflow {

template <typename Derived>
typename Derived::PlainObject hermitian_part(const Eigen::MatrixBase<Derived>& a) {
  return (0.5 * (a + a.adjoint())).eval();
}

template <typename Derived>
typename Derived::RealScalar hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

// Applies fn to the eigenvalues of the Hermitian matrix h.
template <typename Derived, typename Fn>
typename Derived::PlainObject hermitian_function(const Eigen::MatrixBase<Derived>& h, Fn&& fn) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> eig(hermitian_part(h));
  auto values = eig.eigenvalues().unaryExpr(fn).eval();
  Plain out = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().adjoint();
  return hermitian_part(out);
}

template <typename Derived>
typename Derived::RealScalar smallest_eigenvalue(const Eigen::MatrixBase<Derived>& h) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> eig(hermitian_part(h), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> sorted_eigenvalues(
    const Eigen::MatrixBase<Derived>& h) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> eig(hermitian_part(h), Eigen::EigenvaluesOnly);
  return eig.eigenvalues();  // ascending
}

template <typename Derived>
typename Derived::PlainObject hermitian_sqrt(const Eigen::MatrixBase<Derived>& h) {
  using Real = typename Derived::RealScalar;
  return hermitian_function(h, [](Real x) { return std::sqrt(x); });
}

template <typename Derived>
typename Derived::PlainObject hermitian_inv_sqrt(const Eigen::MatrixBase<Derived>& h) {
  using Real = typename Derived::RealScalar;
  return hermitian_function(h, [](Real x) { return Real(1) / std::sqrt(x); });
}

template <typename Derived>
typename Derived::PlainObject hermitian_log(const Eigen::MatrixBase<Derived>& h) {
  using Real = typename Derived::RealScalar;
  return hermitian_function(h, [](Real x) { return std::log(x); });
}

template <typename Derived>
typename Derived::PlainObject hermitian_exp(const Eigen::MatrixBase<Derived>& h) {
  using Real = typename Derived::RealScalar;
  return hermitian_function(h, [](Real x) { return std::exp(x); });
}

template <typename Derived>
typename Derived::PlainObject hermitian_pow(const Eigen::MatrixBase<Derived>& h,
                                            typename Derived::RealScalar u) {
  using Real = typename Derived::RealScalar;
  return hermitian_function(h, [u](Real x) { return std::pow(x, u); });
}

// Largest singular value.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0;
  using Plain = typename Derived::PlainObject;
  Plain gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Plain> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(eig.eigenvalues()(eig.eigenvalues().size() - 1),
                            typename Derived::RealScalar(0)));
}

}  // namespace momentflow
