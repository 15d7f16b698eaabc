#pragma once

#include "blindmimo/random.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

/// Frobenius residual ||m^H m - I||_F.
double stiefel_residual(const CMatrix& m);

/// A T x K complex matrix with orthonormal columns. Construction checks the
/// constraint, so every instance in the program is feasible.
class StiefelPoint {
 public:
  static constexpr double kTolerance = 1e-9;

  /// Throws ParameterError if ||a^H a - I||_F >= tol or K > T.
  explicit StiefelPoint(CMatrix a, double tol = kTolerance);

  const CMatrix& matrix() const { return a_; }
  Eigen::Index t_dim() const { return a_.rows(); }
  Eigen::Index k_dim() const { return a_.cols(); }

 private:
  CMatrix a_;
};

/// A tangent vector together with the point it is attached to.
struct TangentDirection {
  CMatrix xi;
  StiefelPoint base;

  /// Frobenius norm of the Hermitian part of base^H xi, zero on the tangent space.
  double tangency_residual() const;
};

/// Polar factor and the singular values it was computed from.
struct PolarFactor {
  StiefelPoint factor;
  RVector singular_values;  // descending
};

/// Haar-distributed point: phase-normalized Q factor of a complex Gaussian matrix.
StiefelPoint random_stiefel(Eigen::Index t_dim, Eigen::Index k_dim, Rng& rng);

/// U V^H from the compact SVD of m. Throws DegenerateInputError when the
/// smallest singular value is <= 1e-12 times the largest.
StiefelPoint polar_retract(const CMatrix& m);
PolarFactor polar_decompose(const CMatrix& m);

/// (I - a a^H) g + a (a^H g - g^H a) / 2.
TangentDirection riemannian_grad(const StiefelPoint& a, const CMatrix& euclid_grad);

double nuclear_norm(const CMatrix& m);

}  // namespace blindmimo
