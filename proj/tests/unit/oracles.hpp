#pragma once

// Reference computations written without the library's code paths.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "blindmimo/types.hpp"

namespace oracle {

using blindmimo::CMatrix;
using blindmimo::cplx;

/// m (m^H m)^{-1/2} through an eigendecomposition of the Gram matrix.
inline CMatrix polar(const CMatrix& m) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(m.adjoint() * m);
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return m * (eig.eigenvectors() * inv_sqrt.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint());
}

/// trace((m^H m)^{1/2}).
inline double nuclear(const CMatrix& m) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

/// Entrywise sum |Y A G^{-1/2}|^p by explicit loops.
inline double objective(const CMatrix& y, const CMatrix& a, const Eigen::VectorXd& g, int p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      cplx w = 0.0;
      for (Eigen::Index t = 0; t < y.cols(); ++t) w += y(i, t) * a(t, k);
      s += std::pow(std::abs(w / std::sqrt(g(k))), p);
    }
  }
  return s;
}

inline double real_inner(const CMatrix& a, const CMatrix& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += (std::conj(a(i)) * b(i)).real();
  return s;
}

}  // namespace oracle
