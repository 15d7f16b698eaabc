#include "blindmimo/manifold.hpp"

#include <string>

namespace blindmimo {

namespace {

constexpr double kRankTolerance = 1e-12;

struct ThinSvd {
  CMatrix u;  // T x K
  CMatrix v;  // K x K
  RVector s;
};

// Householder QR first, then Jacobi on the K x K triangle.
ThinSvd thin_svd(const CMatrix& m) {
  const Eigen::Index t = m.rows(), k = m.cols();
  const Eigen::HouseholderQR<CMatrix> qr(m);
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::JacobiSVD<CMatrix> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CMatrix q = qr.householderQ() * CMatrix::Identity(t, k);
  return {q * svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

}  // namespace

double stiefel_residual(const CMatrix& m) {
  return (m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols())).norm();
}

StiefelPoint::StiefelPoint(CMatrix a, double tol) : a_(std::move(a)) {
  if (a_.cols() == 0 || a_.rows() == 0 || a_.cols() > a_.rows()) {
    throw ParameterError("StiefelPoint: need 0 < K <= T, got " + std::to_string(a_.rows()) + "x" +
                         std::to_string(a_.cols()));
  }
  const double r = stiefel_residual(a_);
  if (!(r < tol)) {
    throw ParameterError("StiefelPoint: columns not orthonormal, residual " + std::to_string(r));
  }
}

double TangentDirection::tangency_residual() const {
  const CMatrix s = base.matrix().adjoint() * xi;
  return (s + s.adjoint()).norm() / 2.0;
}

StiefelPoint random_stiefel(Eigen::Index t_dim, Eigen::Index k_dim, Rng& rng) {
  if (t_dim <= 0 || k_dim <= 0 || k_dim > t_dim) {
    throw ParameterError("random_stiefel: need 0 < k_dim <= t_dim");
  }
  const CMatrix g = rng.complex_normal_matrix(t_dim, k_dim);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(t_dim, k_dim);
  const CMatrix& r = qr.matrixQR();
  // Make diag(R) positive real so the factor is exactly Haar.
  for (Eigen::Index k = 0; k < k_dim; ++k) {
    const cplx d = r(k, k);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(k) *= d / mag;
  }
  return StiefelPoint(std::move(q));
}

PolarFactor polar_decompose(const CMatrix& m) {
  if (m.cols() == 0 || m.cols() > m.rows()) {
    throw DegenerateInputError("polar_retract: matrix has more columns than rows");
  }
  const auto svd = thin_svd(m);
  const RVector& s = svd.s;
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || !(smin > kRankTolerance * smax)) {
    throw DegenerateInputError("polar_retract: rank-deficient input (sigma_min/sigma_max = " +
                               std::to_string(smax > 0.0 ? smin / smax : 0.0) + ")");
  }
  return {StiefelPoint(svd.u * svd.v.adjoint()), s};
}

StiefelPoint polar_retract(const CMatrix& m) { return polar_decompose(m).factor; }

TangentDirection riemannian_grad(const StiefelPoint& a, const CMatrix& euclid_grad) {
  require_shape(euclid_grad, a.t_dim(), a.k_dim(), "riemannian_grad");
  const CMatrix& x = a.matrix();
  const CMatrix s = x.adjoint() * euclid_grad;
  // (I - x x^H) g + x (s - s^H)/2 == g - x (s + s^H)/2
  CMatrix xi = euclid_grad - x * ((s + s.adjoint()) * 0.5);
  return {std::move(xi), a};
}

double nuclear_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() < m.cols()) return nuclear_norm(m.adjoint());
  const Eigen::HouseholderQR<CMatrix> qr(m);
  const CMatrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  return Eigen::JacobiSVD<CMatrix>(r).singularValues().sum();
}

}  // namespace blindmimo
