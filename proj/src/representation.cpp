#include "momentflow/representation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "momentflow/error.hpp"
#include "momentflow/matrix_functions.hpp"

namespace momentflow {

namespace {

// <u, w> = sum u_j conj(w_j); Eigen's dot conjugates the left operand.
Complex hermitian_inner(const CVector& u, const CVector& w) { return w.dot(u); }

}  // namespace

double symplectic_form(const CVector& u, const CVector& w) {
  return hermitian_inner(u, w).imag();
}

CMatrix infinitesimal_action(const GroupPresentation& p, const CVector& v) {
  CMatrix out(p.dim_v(), p.rank());
  for (Index a = 0; a < p.rank(); ++a) out.col(a) = p.basis(a) * v;
  return out;
}

MomentValue moment_map(const GroupPresentation& p, const CVector& v) {
  RVector m(p.rank());
  for (Index a = 0; a < p.rank(); ++a) m(a) = 0.5 * symplectic_form(p.basis(a) * v, v);
  return {m};
}

MomentValue moment_map_via_adjoint(const GroupPresentation& p, const CVector& v) {
  const CMatrix lv = infinitesimal_action(p, v);
  const CVector jv = kI * v;
  RVector m(p.rank());
  for (Index a = 0; a < p.rank(); ++a) m(a) = 0.5 * hermitian_inner(lv.col(a), jv).real();
  return {m};
}

MomentValue projective_moment_map(const GroupPresentation& p, const CVector& v,
                                  double reference_norm) {
  const double norm = v.norm();
  if (norm <= 1e-12 * reference_norm) {
    throw DegenerateInputError("projective_moment_map: |v| = " + std::to_string(norm) +
                               " is below the degeneracy threshold");
  }
  MomentValue m = moment_map(p, v);
  m.coords /= norm * norm;
  return m;
}

RVector moment_vector(const GroupPresentation& p, const MomentValue& m) {
  return p.raise(m.coords);
}

double moment_norm_squared(const GroupPresentation& p, const MomentValue& m) {
  if (p.rank() == 0) return 0.0;
  return std::max(m.coords.dot(p.raise(m.coords)), 0.0);
}

MomentValue coadjoint(const GroupPresentation& p, const CMatrix& g, const MomentValue& m) {
  // <mu(g v), xi_a> = <mu(v), Ad_{g^{-1}} xi_a>.
  const RMatrix r = adjoint_matrix(p, g.inverse());
  return {r.transpose() * m.coords};
}

EnergyGradient energy_and_gradient(const GroupPresentation& p, const CVector& v) {
  EnergyGradient out;
  if (p.rank() == 0) {
    out.grad = CVector::Zero(v.size());
    return out;
  }
  const MomentValue m = moment_map(p, v);
  const RVector c = p.raise(m.coords);
  out.f = std::max(m.coords.dot(c), 0.0);
  out.grad = -2.0 * kI * (p.element(c) * v);
  return out;
}

EnergyGradient projective_energy_and_gradient(const GroupPresentation& p, const CVector& v) {
  const double r2 = v.squaredNorm();
  if (r2 == 0.0) throw DegenerateInputError("projective energy at v = 0");
  EnergyGradient e = energy_and_gradient(p, v);
  const double r4 = r2 * r2;
  e.grad = e.grad / r4 - (4.0 * e.f / (r4 * r2)) * v;
  e.f /= r4;
  return e;
}

namespace {

bool is_identity(const CMatrix& g) {
  return (g - CMatrix::Identity(g.rows(), g.cols())).norm() <= 1e-12;
}

// Contribution of one one-parameter segment: midpoint rule for
// int_0^1 -4 <mu-hat(exp(tau D) g v0), Im-part(D)> dtau.
double segment_integral(const GroupPresentation& p, const CMatrix& g0, const CMatrix& g1,
                        const CVector& v0, KempfNessAction action, double h_path,
                        double v0_norm) {
  const CMatrix step = g1 * g0.inverse();
  const CMatrix delta = step.log();
  if (operator_norm(delta) > h_path * (1.0 + 1e-9)) {
    throw ContractViolation("kempf_ness_value: path segment longer than h_path");
  }
  double residual = 0.0;
  const Eigen::VectorXcd z = p.expand_complex(delta, &residual);
  if (residual > kAlgebraTol * std::max(1.0, delta.norm()) + 1e-12) {
    throw ContractViolation("kempf_ness_value: path leaves the complexified group");
  }
  const RVector imaginary = z.imag();
  const CVector w = (0.5 * delta).exp() * g0 * v0;
  const MomentValue m = action == KempfNessAction::projective
                            ? projective_moment_map(p, w, v0_norm)
                            : moment_map(p, w);
  return -4.0 * m.coords.dot(imaginary);
}

}  // namespace

std::vector<double> kempf_ness_profile(const GroupPresentation& p, const CVector& v0,
                                       std::span<const CMatrix> path, KempfNessAction action,
                                       double h_path) {
  if (path.empty()) throw ContractViolation("kempf_ness_value: empty path");
  if (!is_identity(path.front())) {
    throw ContractViolation("kempf_ness_value: path must start at the identity");
  }
  std::vector<double> values(path.size(), 0.0);
  const double v0_norm = v0.norm();
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    values[k + 1] =
        values[k] + segment_integral(p, path[k], path[k + 1], v0, action, h_path, v0_norm);
  }
  return values;
}

double kempf_ness_value(const GroupPresentation& p, const CVector& v0,
                        std::span<const CMatrix> path, KempfNessAction action, double h_path) {
  return kempf_ness_profile(p, v0, path, action, h_path).back();
}

std::vector<CMatrix> refine_path(std::span<const CMatrix> path, double h_path,
                                 std::vector<std::size_t>* original_indices) {
  std::vector<CMatrix> out;
  if (original_indices != nullptr) original_indices->clear();
  if (path.empty()) return out;
  out.push_back(path[0]);
  if (original_indices != nullptr) original_indices->push_back(0);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const CMatrix delta = (path[k + 1] * path[k].inverse()).log();
    const double len = operator_norm(delta);
    const auto pieces = static_cast<int>(std::max(1.0, std::ceil(len / (0.999 * h_path))));
    if (pieces > 1) {
      const CMatrix unit = (delta / double(pieces)).exp();
      CMatrix g = path[k];
      for (int j = 1; j < pieces; ++j) {
        g = unit * g;
        out.push_back(g);
      }
    }
    out.push_back(path[k + 1]);
    if (original_indices != nullptr) original_indices->push_back(out.size() - 1);
  }
  return out;
}

}  // namespace momentflow
