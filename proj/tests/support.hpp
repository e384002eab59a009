#pragma once

// Hand-rolled deterministic generators shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "momentflow/algebra.hpp"
#include "momentflow/flow.hpp"
#include "momentflow/representation.hpp"
#include "momentflow/types.hpp"

namespace testing {

using namespace momentflow;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  CVector cvector(Index n, double scale = 1.0) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(uniform(-scale, scale), uniform(-scale, scale));
    return v;
  }
  RVector rvector(Index n, double scale = 1.0) {
    RVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = uniform(-scale, scale);
    return v;
  }
  CMatrix cmatrix(Index n, double scale = 1.0) {
    CMatrix m(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) m(i, j) = Complex(uniform(-scale, scale), uniform(-scale, scale));
    }
    return m;
  }
  CMatrix hermitian(Index n, double scale = 1.0) {
    const CMatrix a = cmatrix(n, scale);
    return 0.5 * (a + a.adjoint());
  }
  // Positive-definite with spectrum in [e^{-scale}, e^{scale}] roughly.
  CMatrix positive(Index n, double scale = 1.0) {
    const CMatrix x = hermitian(n, scale / std::sqrt(double(n)));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
           es.eigenvectors().adjoint();
  }
  CMatrix unitary(Index n) {
    Eigen::HouseholderQR<CMatrix> qr(cmatrix(n));
    return qr.householderQ();
  }

  WeightSystem weights(int rank, Index n, int max_abs = 3) {
    WeightSystem w;
    w.rank = rank;
    for (Index j = 0; j < n; ++j) {
      Eigen::VectorXi x(rank);
      for (int a = 0; a < rank; ++a) x(a) = integer(-max_abs, max_abs);
      w.weights.push_back(x);
    }
    return w;
  }

  // Alternates between random tori and SU(2) sums of symmetric powers.
  GroupPresentation presentation(int which) {
    if (which % 2 == 0) {
      const int rank = integer(1, 3);
      return torus_presentation(weights(rank, integer(1, 5)));
    }
    std::vector<int> degrees;
    const int parts = integer(1, 2);
    for (int i = 0; i < parts; ++i) degrees.push_back(integer(1, 3));
    return su2_presentation(degrees);
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Central differences of f along every real direction of C^n; entry j of
// the result is df[e_j] + i df[i e_j], the same layout as the gradient.
template <class F>
CVector numeric_gradient(F&& f, const CVector& v, double h) {
  CVector g(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    CVector p = v, m = v;
    p(j) += h;
    m(j) -= h;
    const double re = (f(p) - f(m)) / (2 * h);
    p = v;
    m = v;
    p(j) += Complex(0, h);
    m(j) -= Complex(0, h);
    const double im = (f(p) - f(m)) / (2 * h);
    g(j) = Complex(re, im);
  }
  return g;
}

// Minimum-norm point of conv{w_j : j in support} by projected gradient on the
// simplex, an oracle independent of the face enumeration.
inline RVector min_norm_point(const WeightSystem& w, const std::vector<std::size_t>& support,
                              int iterations = 200000) {
  const Index m = static_cast<Index>(support.size());
  RMatrix a(w.rank, m);
  for (Index j = 0; j < m; ++j) a.col(j) = w.weights[support[j]].cast<double>();
  RVector lambda = RVector::Constant(m, 1.0 / double(m));
  const double lip = 2.0 * (a.transpose() * a).norm() + 1e-12;
  for (int it = 0; it < iterations; ++it) {
    RVector y = lambda - (2.0 / lip) * (a.transpose() * (a * lambda));
    // Euclidean projection onto the simplex.
    std::vector<double> s(y.data(), y.data() + m);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (Index k = 0; k < m; ++k) {
      cum += s[k];
      const double t = (cum - 1.0) / double(k + 1);
      if (s[k] - t > 0) theta = t;
    }
    lambda = (y.array() - theta).max(0.0).matrix();
  }
  return a * lambda;
}

}  // namespace testing
