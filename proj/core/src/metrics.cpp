#include "blindmimo/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace blindmimo {

namespace {

void check_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch");
  }
}

int ceil_log2(int k) {
  int bits = 0;
  while ((1 << bits) < k) ++bits;
  return bits;
}

}  // namespace

double gamma1() { return 0.75 * std::sqrt(std::numbers::pi); }

double evm(const CMatrix& x_hat, const CMatrix& x_true) {
  check_same_shape(x_hat, x_true, "evm");
  const Eigen::Index k = x_true.rows();
  if (k == 0) throw DimensionError("evm: empty input");
  double acc = 0.0;
  for (Eigen::Index r = 0; r < k; ++r) {
    const double ref = x_true.row(r).squaredNorm();
    if (!(ref > 0.0)) throw ParameterError("evm: true row " + std::to_string(r) + " has zero norm");
    acc += (x_hat.row(r) - x_true.row(r)).squaredNorm() / ref;
  }
  return acc / static_cast<double>(k);
}

RVector per_row_sinr(const CMatrix& x_hat, const CMatrix& x_true) {
  check_same_shape(x_hat, x_true, "per_row_sinr");
  RVector sinr(x_true.rows());
  for (Eigen::Index r = 0; r < x_true.rows(); ++r) {
    const double sig = x_true.row(r).squaredNorm();
    const double err = (x_hat.row(r) - x_true.row(r)).squaredNorm();
    sinr(r) = sig / std::max(err, 1e-12 * sig);
  }
  return sinr;
}

double achievable_rate_blind(const CMatrix& x_hat, const CMatrix& x_true, int t_len) {
  if (t_len <= 0) throw ParameterError("achievable_rate_blind: t_len must be positive");
  const RVector sinr = per_row_sinr(x_hat, x_true);
  const double k = static_cast<double>(x_true.rows());
  const double factor = 1.0 - 1.0 / t_len;
  double rate = 0.0;
  for (Eigen::Index r = 0; r < sinr.size(); ++r) rate += factor * std::log2(1.0 + sinr(r));
  return rate - k * ceil_log2(static_cast<int>(x_true.rows())) / t_len;
}

double achievable_rate_training(const CMatrix& x_hat, const CMatrix& x_true, int t_len, int t_pilot) {
  if (t_pilot < 0 || t_pilot >= t_len) {
    throw ParameterError("achievable_rate_training: need 0 <= t_pilot < t_len");
  }
  const RVector sinr = per_row_sinr(x_hat, x_true);
  const double factor = 1.0 - static_cast<double>(t_pilot) / t_len;
  double rate = 0.0;
  for (Eigen::Index r = 0; r < sinr.size(); ++r) rate += factor * std::log2(1.0 + sinr(r));
  return rate;
}

ObjectiveBound theoretical_objective_bound(int m, int k_users, double theta,
                                           const RVector& inv_snr_per_user) {
  if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theoretical_objective_bound: theta out of (0, 1]");
  if (m <= 0 || k_users <= 0) throw ParameterError("theoretical_objective_bound: empty dimensions");
  if (inv_snr_per_user.size() != k_users) {
    throw DimensionError("theoretical_objective_bound: need one inverse SNR per user");
  }
  if ((inv_snr_per_user.array() < 0.0).any()) {
    throw ParameterError("theoretical_objective_bound: negative inverse SNR");
  }
  double lower = 0.0;
  double upper = 0.0;
  for (Eigen::Index k = 0; k < inv_snr_per_user.size(); ++k) {
    const double s = inv_snr_per_user(k);
    const double noise_term = std::pow(s, 1.5);
    lower += theta * noise_term;
    upper += theta * (std::pow(1.0 + s, 1.5) - noise_term) + noise_term;
  }
  const double scale = gamma1() * m;
  return {scale * lower, scale * upper};
}

double symbol_error_rate(const LabelMatrix& decided, const LabelMatrix& truth, Eigen::Index col_begin) {
  if (decided.rows() != truth.rows() || decided.cols() != truth.cols()) {
    throw DimensionError("symbol_error_rate: shape mismatch");
  }
  const Eigen::Index cols = truth.cols() - col_begin;
  if (cols <= 0 || truth.rows() == 0) return 0.0;
  const auto errors = (decided.rightCols(cols).array() != truth.rightCols(cols).array()).count();
  return static_cast<double>(errors) / static_cast<double>(truth.rows() * cols);
}

double bit_error_rate(const std::vector<std::uint8_t>& decided, const std::vector<std::uint8_t>& truth) {
  if (decided.size() != truth.size()) throw DimensionError("bit_error_rate: length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) errors += decided[i] != truth[i];
  return static_cast<double>(errors) / static_cast<double>(truth.size());
}

}  // namespace blindmimo
