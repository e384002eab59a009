#include "momentflow/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "momentflow/error.hpp"

namespace momentflow {

namespace {

constexpr double kKernelTol = 1e-8;

ModelPoint shifted(const ModelPoint& at, const ModelTangent& d, double eps) {
  return {at.xi_m + eps * d.xi_m, at.rho + eps * d.rho, at.v + eps * d.v};
}

}  // namespace

NormalFormModel build_model(const GroupPresentation& p, const CVector& z0) {
  const Index n = p.dim_v();
  const Index k = p.rank();
  if (z0.size() != n) throw StructuralError("build_model: z0 has wrong dimension");
  if (z0.norm() == 0.0) throw PreconditionError("build_model: z0 = 0");
  const double mu0 = std::sqrt(moment_norm_squared(p, moment_map(p, z0)));
  if (mu0 > 1e-10) {
    throw PreconditionError("build_model: |mu(z0)| = " + std::to_string(mu0) +
                            " is not zero");
  }

  NormalFormModel model{p, z0, RMatrix(k, 0), RMatrix(k, 0), CMatrix::Identity(n, n),
                        RMatrix(0, 0)};
  if (k == 0) return model;

  // Work in metric-orthonormal coordinates y = G^{1/2} x, where orthogonal
  // complements are Euclidean.
  Eigen::SelfAdjointEigenSolver<RMatrix> geig(p.metric());
  const RMatrix inv_sqrt_g = geig.eigenvectors() *
                             geig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             geig.eigenvectors().transpose();
  const CMatrix l = infinitesimal_action(p, z0);
  RMatrix lr(2 * n, k);
  lr.topRows(n) = l.real();
  lr.bottomRows(n) = l.imag();
  Eigen::JacobiSVD<RMatrix> svd(lr * inv_sqrt_g, Eigen::ComputeFullV);
  const RVector& sigma = svd.singularValues();
  const double smax = std::max(sigma.size() > 0 ? sigma(0) : 0.0, 1e-300);
  Index range_dim = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    const double rel = sigma(i) / smax;
    if (rel > 1e-10 && rel < 1e-6) {
      throw NumericalDegeneracyError("build_model: isotropy splitting is ill-conditioned "
                                     "(relative singular value " + std::to_string(rel) + ")");
    }
    if (rel > kKernelTol) ++range_dim;
  }
  if (smax <= 1e-300) range_dim = 0;
  const RMatrix& v = svd.matrixV();
  model.m_basis = inv_sqrt_g * v.leftCols(range_dim);
  model.g0_basis = inv_sqrt_g * v.rightCols(k - range_dim);

  const CMatrix orbit = l * model.m_basis.cast<Complex>();
  if (range_dim > 0) {
    Eigen::JacobiSVD<CMatrix> csvd(orbit, Eigen::ComputeFullU);
    const RVector& cs = csvd.singularValues();
    if (cs(range_dim - 1) <= kKernelTol * cs(0)) {
      throw NumericalDegeneracyError(
          "build_model: the orbit g z0 is not totally real (complex rank drops)");
    }
    model.n_basis = csvd.matrixU().rightCols(n - range_dim);
  }
  model.identification = (orbit.adjoint() * orbit).real();

  const NormalFormDiagnostics d = model_diagnostics(model);
  if (d.isotropy_residual > 1e-10 || d.m_g0_orthogonality > 1e-12 ||
      d.slice_orthogonality > 1e-12 || d.slice_j_invariance > 1e-10 || !d.dimensions_ok) {
    throw NumericalDegeneracyError("build_model: splitting invariants fail");
  }
  return model;
}

NormalFormDiagnostics model_diagnostics(const NormalFormModel& model) {
  const GroupPresentation& p = model.parent;
  NormalFormDiagnostics d;
  d.moment_at_z0 = std::sqrt(moment_norm_squared(p, moment_map(p, model.z0)));
  for (Index j = 0; j < model.k0(); ++j) {
    d.isotropy_residual =
        std::max(d.isotropy_residual, (p.element(model.g0_basis.col(j)) * model.z0).norm());
  }
  if (model.k0() > 0 && model.km() > 0) {
    d.m_g0_orthogonality =
        (model.m_basis.transpose() * p.metric() * model.g0_basis).cwiseAbs().maxCoeff();
  }
  const CMatrix orbit = infinitesimal_action(p, model.z0);
  for (Index j = 0; j < model.slice_dim(); ++j) {
    for (Index a = 0; a < orbit.cols(); ++a) {
      const CVector u = orbit.col(a);
      const CVector nj = model.n_basis.col(j);
      d.slice_orthogonality = std::max(
          {d.slice_orthogonality, std::abs(u.dot(nj).real()), std::abs((kI * u).dot(nj).real()),
           std::abs(u.dot(kI * nj).real()), std::abs((kI * u).dot(kI * nj).real())});
    }
  }
  if (model.slice_dim() > 0) {
    const CMatrix jn = kI * model.n_basis;
    const CMatrix proj = model.n_basis * (model.n_basis.adjoint() * jn);
    d.slice_j_invariance = (jn - proj).norm();
  }
  const Index n = p.dim_v();
  d.dimensions_ok = (2 * n == 2 * model.km() + 2 * model.slice_dim()) &&
                    (p.rank() == model.k0() + model.km());
  return d;
}

ModelPoint model_origin(const NormalFormModel& model) {
  return {RVector::Zero(model.km()), RVector::Zero(model.km()),
          CVector::Zero(model.slice_dim())};
}

CMatrix chart_group_element(const NormalFormModel& model, const ModelPoint& at) {
  return exp_group(model.parent.element(model.m_basis * at.xi_m));
}

RVector slice_moment(const NormalFormModel& model, const CVector& v) {
  const GroupPresentation& p = model.parent;
  const CVector vt = model.n_basis * v;
  RVector mu(model.k0());
  for (Index j = 0; j < model.k0(); ++j) {
    mu(j) = 0.5 * symplectic_form(p.element(model.g0_basis.col(j)) * vt, vt);
  }
  return model.g0_basis * mu;
}

RVector slice_moment_derivative(const NormalFormModel& model, const CVector& v,
                                const CVector& dv) {
  const GroupPresentation& p = model.parent;
  const CVector vt = model.n_basis * v;
  const CVector dvt = model.n_basis * dv;
  RVector mu(model.k0());
  for (Index j = 0; j < model.k0(); ++j) {
    const CMatrix xi = p.element(model.g0_basis.col(j));
    mu(j) = 0.5 * (symplectic_form(xi * dvt, vt) + symplectic_form(xi * vt, dvt));
  }
  return model.g0_basis * mu;
}

CVector rho_tilde(const NormalFormModel& model, const RVector& rho) {
  if (model.km() == 0) return CVector::Zero(model.parent.dim_v());
  const CMatrix orbit = infinitesimal_action(model.parent, model.z0) *
                        model.m_basis.cast<Complex>();
  const RVector r = model.identification.ldlt().solve(rho);
  return kI * (orbit * r.cast<Complex>());
}

TrivializedTangent trivialize(const NormalFormModel& model, const ModelPoint& at,
                              const ModelTangent& x) {
  const GroupPresentation& p = model.parent;
  const Index n = p.dim_v();
  const CMatrix a = p.element(model.m_basis * at.xi_m);
  const CMatrix da = p.element(model.m_basis * x.xi_m);
  // exp of [[A, dA], [0, A]] carries the derivative of exp at A along dA in
  // its upper-right block.
  CMatrix block = CMatrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.topRightCorner(n, n) = da;
  block.bottomRightCorner(n, n) = a;
  const CMatrix e = block.exp();
  const CMatrix g_inv = e.topLeftCorner(n, n).inverse();
  double residual = 0.0;
  RVector zeta = p.expand(g_inv * e.topRightCorner(n, n), &residual);
  if (residual > 1e-9 * std::max(1.0, da.norm())) {
    throw InconsistencyError("trivialize: left-trivialized tangent leaves the Lie algebra");
  }
  return {std::move(zeta), x.rho, x.v};
}

double model_symplectic_form(const NormalFormModel& model, const ModelPoint& at,
                             const TrivializedTangent& x1, const TrivializedTangent& x2,
                             const FormTerms& terms) {
  const GroupPresentation& p = model.parent;
  double out = 0.0;
  if (terms.pairing) {
    const RVector l1 = model.m_basis * x1.rho + slice_moment_derivative(model, at.v, x1.v);
    const RVector l2 = model.m_basis * x2.rho + slice_moment_derivative(model, at.v, x2.v);
    out += p.inner(l2, x1.zeta) - p.inner(l1, x2.zeta);
  }
  if (terms.bracket && p.rank() > 0) {
    const RVector lambda = model.m_basis * at.rho + slice_moment(model, at.v);
    out += p.inner(lambda, p.bracket(x1.zeta, x2.zeta));
  }
  if (terms.orbit) {
    out += symplectic_form(p.element(x1.zeta) * model.z0, p.element(x2.zeta) * model.z0);
  }
  if (terms.slice) {
    out += symplectic_form(model.n_basis * x1.v, model.n_basis * x2.v);
  }
  return out;
}

double model_symplectic_form(const NormalFormModel& model, const ModelPoint& at,
                             const ModelTangent& x1, const ModelTangent& x2,
                             const FormTerms& terms) {
  return model_symplectic_form(model, at, trivialize(model, at, x1), trivialize(model, at, x2),
                               terms);
}

MomentValue model_moment_map(const NormalFormModel& model, const ModelPoint& at) {
  const GroupPresentation& p = model.parent;
  if (p.rank() == 0) return {RVector(0)};
  const RVector lambda = model.m_basis * at.rho + slice_moment(model, at.v);
  return {p.lower(adjoint(p, chart_group_element(model, at), lambda))};
}

TrivializedTangent model_action(const NormalFormModel& model, const ModelPoint& at,
                                const RVector& eta) {
  const CMatrix g = chart_group_element(model, at);
  return {adjoint(model.parent, g.inverse(), eta), RVector::Zero(model.km()),
          CVector::Zero(model.slice_dim())};
}

ModelPoint residual_action(const NormalFormModel& model, const RVector& g0_coords,
                           const ModelPoint& at) {
  if (at.xi_m.size() > 0 && at.xi_m.cwiseAbs().maxCoeff() != 0.0) {
    throw ContractViolation("residual_action: point must lie at the chart origin");
  }
  const GroupPresentation& p = model.parent;
  const CMatrix h = exp_group(p.element(model.g0_basis * g0_coords));
  ModelPoint out = at;
  if (model.km() > 0) {
    out.rho = model.m_basis.transpose() * p.metric() * adjoint(p, h, model.m_basis * at.rho);
  }
  out.v = model.n_basis.adjoint() * (h * (model.n_basis * at.v));
  return out;
}

double verify_moment_identity(const NormalFormModel& model,
                              const std::vector<MomentSample>& samples, double step) {
  double worst = 0.0;
  for (const MomentSample& s : samples) {
    const double plus = model_moment_map(model, shifted(s.at, s.z, step)).coords.dot(s.eta);
    const double minus = model_moment_map(model, shifted(s.at, s.z, -step)).coords.dot(s.eta);
    const double lhs = (plus - minus) / (2.0 * step);
    const double rhs = model_symplectic_form(model, s.at, model_action(model, s.at, s.eta),
                                             trivialize(model, s.at, s.z));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double verify_closedness(const NormalFormModel& model,
                         const std::vector<ClosednessSample>& samples, double step,
                         const FormTerms& terms) {
  auto derivative = [&](const ModelPoint& at, const ModelTangent& dir, const ModelTangent& a,
                        const ModelTangent& b) {
    const double plus = model_symplectic_form(model, shifted(at, dir, step), a, b, terms);
    const double minus = model_symplectic_form(model, shifted(at, dir, -step), a, b, terms);
    return (plus - minus) / (2.0 * step);
  };
  double worst = 0.0;
  for (const ClosednessSample& s : samples) {
    const double d = derivative(s.at, s.x, s.y, s.z) - derivative(s.at, s.y, s.x, s.z) +
                     derivative(s.at, s.z, s.x, s.y);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

RMatrix model_gram(const NormalFormModel& model, const ModelPoint& at, const FormTerms& terms) {
  const Index km = model.km();
  const Index nn = model.slice_dim();
  const Index dim = 2 * km + 2 * nn;
  std::vector<ModelTangent> frame;
  for (Index i = 0; i < dim; ++i) {
    ModelTangent t{RVector::Zero(km), RVector::Zero(km), CVector::Zero(nn)};
    if (i < km) {
      t.xi_m(i) = 1.0;
    } else if (i < 2 * km) {
      t.rho(i - km) = 1.0;
    } else if (i < 2 * km + nn) {
      t.v(i - 2 * km) = 1.0;
    } else {
      t.v(i - 2 * km - nn) = kI;
    }
    frame.push_back(std::move(t));
  }
  RMatrix gram(dim, dim);
  for (Index a = 0; a < dim; ++a) {
    for (Index b = 0; b < dim; ++b) {
      gram(a, b) = model_symplectic_form(model, at, frame[static_cast<std::size_t>(a)],
                                         frame[static_cast<std::size_t>(b)], terms);
    }
  }
  return gram;
}

double smallest_singular_value(const RMatrix& m) {
  if (m.size() == 0) return INFINITY;
  Eigen::JacobiSVD<RMatrix> svd(m);
  return svd.singularValues().minCoeff();
}

ModelSampler::ModelSampler(const NormalFormModel& model, std::uint64_t seed, double chart_radius,
                           double scale)
    : model_(model), rng_(seed), chart_radius_(chart_radius), scale_(scale) {}

double ModelSampler::uniform() {
  // 53 random bits, independent of the standard library's distributions.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

ModelPoint ModelSampler::point() {
  const Index km = model_.km();
  const Index nn = model_.slice_dim();
  ModelPoint p{RVector(km), RVector(km), CVector(nn)};
  for (Index i = 0; i < km; ++i) p.xi_m(i) = uniform();
  if (km > 0) p.xi_m *= chart_radius_ / std::sqrt(double(km));
  for (Index i = 0; i < km; ++i) p.rho(i) = scale_ * uniform();
  for (Index i = 0; i < nn; ++i) {
    const double re = uniform();
    const double im = uniform();
    p.v(i) = scale_ * Complex(re, im);
  }
  return p;
}

ModelTangent ModelSampler::tangent() {
  const Index km = model_.km();
  const Index nn = model_.slice_dim();
  ModelTangent t{RVector(km), RVector(km), CVector(nn)};
  for (Index i = 0; i < km; ++i) t.xi_m(i) = uniform();
  for (Index i = 0; i < km; ++i) t.rho(i) = uniform();
  for (Index i = 0; i < nn; ++i) {
    const double re = uniform();
    const double im = uniform();
    t.v(i) = Complex(re, im);
  }
  return t;
}

RVector ModelSampler::algebra_element() {
  RVector e(model_.parent.rank());
  for (Index i = 0; i < e.size(); ++i) e(i) = uniform();
  return e;
}

MomentSample ModelSampler::moment_sample() {
  MomentSample s;
  s.at = point();
  s.eta = algebra_element();
  s.z = tangent();
  return s;
}

ClosednessSample ModelSampler::closedness_sample() {
  ClosednessSample s;
  s.at = point();
  s.x = tangent();
  s.y = tangent();
  s.z = tangent();
  return s;
}

}  // namespace momentflow
