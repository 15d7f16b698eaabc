#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blindmimo/types.hpp"

namespace blindmimo {

/// E|z|^3 for z ~ CN(0, 1): Gamma(5/2) = (3/4) sqrt(pi).
double gamma1();

struct TrialMetrics {
  double evm = 0.0;
  double ser = 0.0;
  double ber = 0.0;
  double rate_blind = 0.0;
  std::optional<double> rate_training;
  std::optional<double> normalized_objective;
  int iters = 0;
  double wall_time = 0.0;  // seconds
};

/// (1/K) sum_k ||x_hat_k - x_k||^2 / ||x_k||^2. Throws on a zero-norm true row.
double evm(const CMatrix& x_hat, const CMatrix& x_true);

/// Per-row ||x_k||^2 / max(||x_hat_k - x_k||^2, 1e-12 ||x_k||^2).
RVector per_row_sinr(const CMatrix& x_hat, const CMatrix& x_true);

double achievable_rate_blind(const CMatrix& x_hat, const CMatrix& x_true, int t_len);
double achievable_rate_training(const CMatrix& x_hat, const CMatrix& x_true, int t_len, int t_pilot);

struct ObjectiveBound {
  double lower = 0.0;
  double upper = 0.0;
};

/// Expected l3 objective at the planted solution. inv_snr_per_user holds
/// sigma_z^2 / G_kk.
ObjectiveBound theoretical_objective_bound(int m, int k_users, double theta,
                                           const RVector& inv_snr_per_user);

/// Fraction of mismatching labels over columns [col_begin, T).
double symbol_error_rate(const LabelMatrix& decided, const LabelMatrix& truth, Eigen::Index col_begin = 0);
double bit_error_rate(const std::vector<std::uint8_t>& decided, const std::vector<std::uint8_t>& truth);

}  // namespace blindmimo
