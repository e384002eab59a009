#include "momentflow/algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "momentflow/error.hpp"

namespace momentflow {

namespace {

double real_frobenius(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace

GroupPresentation::GroupPresentation(Index dim_v, std::vector<CMatrix> basis, RMatrix metric,
                                     PresentationKind kind)
    : dim_v_(dim_v), basis_(std::move(basis)), metric_(std::move(metric)), kind_(kind) {
  if (dim_v_ <= 0) throw StructuralError("presentation: dim_v must be positive");
  for (std::size_t a = 0; a < basis_.size(); ++a) {
    if (basis_[a].rows() != dim_v_ || basis_[a].cols() != dim_v_) {
      throw StructuralError("presentation: basis matrix " + std::to_string(a) + " is " +
                            std::to_string(basis_[a].rows()) + "x" +
                            std::to_string(basis_[a].cols()) + ", expected " +
                            std::to_string(dim_v_) + "x" + std::to_string(dim_v_));
    }
  }
  const Index k = rank();
  if (metric_.rows() != k || metric_.cols() != k) {
    throw StructuralError("presentation: metric must be " + std::to_string(k) + "x" +
                          std::to_string(k));
  }
  RMatrix frob(k, k);
  RMatrix cfrob(2 * k, 2 * k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      const double ab = real_frobenius(this->basis(a), this->basis(b));
      const double a_ib = real_frobenius(this->basis(a), kI * this->basis(b));
      frob(a, b) = ab;
      cfrob(a, b) = ab;
      cfrob(a + k, b + k) = ab;
      cfrob(a, b + k) = a_ib;
      cfrob(b + k, a) = a_ib;
    }
  }
  metric_solver_.compute(metric_);
  frobenius_solver_.compute(frob);
  complex_frobenius_solver_.compute(cfrob);
}

CMatrix GroupPresentation::element(const RVector& coords) const {
  CMatrix out = CMatrix::Zero(dim_v_, dim_v_);
  for (Index a = 0; a < rank(); ++a) out += coords(a) * basis(a);
  return out;
}

CMatrix GroupPresentation::complex_element(const Eigen::VectorXcd& coords) const {
  CMatrix out = CMatrix::Zero(dim_v_, dim_v_);
  for (Index a = 0; a < rank(); ++a) out += coords(a) * basis(a);
  return out;
}

RVector GroupPresentation::expand(const CMatrix& x, double* residual) const {
  const Index k = rank();
  RVector rhs(k);
  for (Index a = 0; a < k; ++a) rhs(a) = real_frobenius(basis(a), x);
  RVector coords = k > 0 ? RVector(frobenius_solver_.solve(rhs)) : RVector(0);
  if (residual != nullptr) *residual = (x - element(coords)).norm();
  return coords;
}

Eigen::VectorXcd GroupPresentation::expand_complex(const CMatrix& x, double* residual) const {
  const Index k = rank();
  RVector rhs(2 * k);
  for (Index a = 0; a < k; ++a) {
    rhs(a) = real_frobenius(basis(a), x);
    rhs(a + k) = real_frobenius(kI * basis(a), x);
  }
  RVector sol = k > 0 ? RVector(complex_frobenius_solver_.solve(rhs)) : RVector(0);
  Eigen::VectorXcd coords(k);
  for (Index a = 0; a < k; ++a) coords(a) = Complex(sol(a), sol(a + k));
  if (residual != nullptr) *residual = (x - complex_element(coords)).norm();
  return coords;
}

double GroupPresentation::norm(const RVector& x) const {
  return std::sqrt(std::max(inner(x, x), 0.0));
}

RVector GroupPresentation::raise(const RVector& covector) const {
  if (rank() == 0) return RVector(0);
  return metric_solver_.solve(covector);
}

RVector GroupPresentation::bracket(const RVector& x, const RVector& y) const {
  const CMatrix a = element(x);
  const CMatrix b = element(y);
  return expand(a * b - b * a);
}

RMatrix trace_metric(std::span<const CMatrix> basis) {
  const auto k = static_cast<Index>(basis.size());
  RMatrix g(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      g(a, b) = -(basis[static_cast<std::size_t>(a)] * basis[static_cast<std::size_t>(b)])
                     .trace()
                     .real();
    }
  }
  return g;
}

GroupPresentation make_presentation(Index dim_v, std::vector<CMatrix> basis) {
  RMatrix metric = trace_metric(basis);
  return GroupPresentation(dim_v, std::move(basis), std::move(metric),
                           PresentationKind::matrix_basis);
}

GroupPresentation torus_presentation(const WeightSystem& w) {
  if (w.weights.empty()) throw StructuralError("torus_presentation: empty weight list");
  if (w.rank < 1) throw StructuralError("torus_presentation: rank must be >= 1");
  const auto n = static_cast<Index>(w.weights.size());
  for (std::size_t i = 0; i < w.weights.size(); ++i) {
    if (w.weights[i].size() != w.rank) {
      throw StructuralError("torus_presentation: weight " + std::to_string(i) + " has " +
                            std::to_string(w.weights[i].size()) + " entries, expected " +
                            std::to_string(w.rank));
    }
  }
  std::vector<CMatrix> basis;
  for (int j = 0; j < w.rank; ++j) {
    CMatrix xi = CMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) xi(i, i) = kI * double(w.weights[static_cast<std::size_t>(i)](j));
    basis.push_back(std::move(xi));
  }
  return GroupPresentation(n, std::move(basis), RMatrix::Identity(w.rank, w.rank),
                           PresentationKind::torus);
}

namespace {

// Isometry from Sym^d C^2 into (C^2)^{(x)d}: column k is the normalized
// symmetrization of the basis states with k factors equal to e_2.
CMatrix symmetric_embedding(int d) {
  const Index dim = Index(1) << d;
  CMatrix embed = CMatrix::Zero(dim, d + 1);
  for (Index state = 0; state < dim; ++state) {
    int ones = 0;
    for (int bit = 0; bit < d; ++bit) ones += (state >> bit) & 1;
    embed(state, ones) = 1.0;
  }
  for (Index k = 0; k <= d; ++k) embed.col(k).normalize();
  return embed;
}

CMatrix tensor_power_generator(const CMatrix& a, int d) {
  const Index dim = Index(1) << d;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int slot = 0; slot < d; ++slot) {
    CMatrix term = CMatrix::Identity(1, 1);
    for (int j = 0; j < d; ++j) {
      const CMatrix factor = (j == slot) ? a : CMatrix(CMatrix::Identity(2, 2));
      term = Eigen::kroneckerProduct(term, factor).eval();
    }
    out += term;
  }
  return out;
}

}  // namespace

GroupPresentation su2_presentation(std::span<const int> degrees) {
  if (degrees.empty()) throw StructuralError("su2_presentation: no summands");
  CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  sz << 1, 0, 0, -1;
  const std::array<CMatrix, 3> fundamental = {0.5 * kI * sx, 0.5 * kI * sy, 0.5 * kI * sz};

  Index n = 0;
  for (int d : degrees) {
    if (d < 0 || d > 10) throw StructuralError("su2_presentation: degree out of range");
    n += d + 1;
  }
  std::vector<CMatrix> basis(3, CMatrix::Zero(n, n));
  Index offset = 0;
  for (int d : degrees) {
    if (d > 0) {
      const CMatrix embed = symmetric_embedding(d);
      for (std::size_t a = 0; a < 3; ++a) {
        basis[a].block(offset, offset, d + 1, d + 1) =
            embed.adjoint() * tensor_power_generator(fundamental[a], d) * embed;
      }
    }
    offset += d + 1;
  }
  return make_presentation(n, std::move(basis));
}

DiagnosticsReport validate_presentation(const GroupPresentation& p, double tol) {
  if (p.rank() == 0) throw StructuralError("validate_presentation: empty basis");
  DiagnosticsReport report;
  const Index k = p.rank();
  for (Index a = 0; a < k; ++a) {
    report.skewness =
        std::max(report.skewness, (p.basis(a) + p.basis(a).adjoint()).cwiseAbs().maxCoeff());
  }
  // Structure constants: brackets[a * k + b] = coords of [xi_a, xi_b].
  std::vector<RVector> brackets(static_cast<std::size_t>(k * k));
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      const CMatrix c = p.basis(a) * p.basis(b) - p.basis(b) * p.basis(a);
      double residual = 0.0;
      brackets[static_cast<std::size_t>(a * k + b)] = p.expand(c, &residual);
      report.closure = std::max(report.closure, residual);
    }
  }
  const RMatrix& g = p.metric();
  for (Index z = 0; z < k; ++z) {
    for (Index x = 0; x < k; ++x) {
      for (Index y = 0; y < k; ++y) {
        const double lhs = brackets[static_cast<std::size_t>(z * k + x)].dot(g.col(y)) +
                           brackets[static_cast<std::size_t>(z * k + y)].dot(g.col(x));
        report.invariance = std::max(report.invariance, std::abs(lhs));
      }
    }
  }
  const double asymmetry = (g - g.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  report.metric_positive = asymmetry <= tol && eig.eigenvalues()(0) > tol;
  report.ok = report.skewness <= tol && report.closure <= tol && report.invariance <= tol &&
              report.metric_positive;
  return report;
}

CMatrix exp_group(const CMatrix& x) {
  if (x.rows() != x.cols()) throw StructuralError("exp_group: matrix must be square");
  return x.exp();
}

RVector adjoint(const GroupPresentation& p, const CMatrix& g, const RVector& coords, double tol) {
  const CMatrix x = p.element(coords);
  const CMatrix conj = g * x * g.inverse();
  double residual = 0.0;
  RVector out = p.expand(conj, &residual);
  if (residual > tol * std::max(1.0, x.norm())) {
    throw DomainError("adjoint: g does not normalize the Lie algebra (residual " +
                      std::to_string(residual) + ")");
  }
  return out;
}

RMatrix adjoint_matrix(const GroupPresentation& p, const CMatrix& g, double tol) {
  const Index k = p.rank();
  RMatrix out(k, k);
  for (Index a = 0; a < k; ++a) out.col(a) = adjoint(p, g, RVector::Unit(k, a), tol);
  return out;
}

}  // namespace momentflow
