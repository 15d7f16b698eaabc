#include "blindmimo/baselines.hpp"

#include <cmath>
#include <optional>

namespace blindmimo {

namespace {

constexpr int kMaxHalvings = 30;

}  // namespace

SolveResult riemannian_gd_from(const CMatrix& y_bar, const RVector& g_diag,
                               const SolverOptions& opts, const StiefelPoint& start) {
  opts.validate();
  const int p = opts.p_exponent;
  SolveTrace trace;
  std::optional<StiefelPoint> current(start);
  double eta_scale = 1.0;
  for (;;) {
    const double value = objective(y_bar, *current, g_diag, p);
    const CMatrix grad = euclid_grad(y_bar, current->matrix(), g_diag, p);
    ++trace.objective_evals;
    ++trace.gradient_evals;
    const double eta = optimality_eta(*current, grad);
    trace.objective_per_iter.push_back(value);
    trace.eta_per_iter.push_back(eta);
    trace.feasibility_per_iter.push_back(stiefel_residual(current->matrix()));

    const std::size_t j = trace.objective_per_iter.size() - 1;
    if (j == 0) eta_scale = std::max(eta, 1.0);
    if (eta < opts.eta_tol * eta_scale) {
      trace.stop_reason = StopReason::kEtaTol;
      break;
    }
    if (j > 0 && std::abs(value - trace.objective_per_iter[j - 1]) < opts.obj_rel_tol * std::abs(value)) {
      trace.stop_reason = StopReason::kObjTol;
      break;
    }
    if (trace.iters_run >= opts.max_iters) {
      trace.stop_reason = StopReason::kMaxIters;
      break;
    }

    const TangentDirection dir = riemannian_grad(*current, grad);
    double tau = 1.0;
    std::optional<StiefelPoint> accepted;
    for (int h = 0; h <= kMaxHalvings; ++h, tau *= 0.5) {
      StiefelPoint candidate = polar_retract(current->matrix() + tau * dir.xi);
      ++trace.objective_evals;
      if (objective(y_bar, candidate, g_diag, p) > value) {
        accepted.emplace(std::move(candidate));
        break;
      }
    }
    if (!accepted) {
      trace.stop_reason = StopReason::kObjTol;
      break;
    }
    current.emplace(std::move(*accepted));
    ++trace.iters_run;
  }
  return {std::move(*current), std::move(trace)};
}

SolveResult riemannian_gd_baseline(const CMatrix& y_bar, const RVector& g_diag,
                                   const SolverOptions& opts, Rng& rng) {
  const Eigen::Index k = g_diag.size();
  if (k == 0 || y_bar.cols() < k) throw DimensionError("riemannian_gd_baseline: need 0 < K <= T");
  return riemannian_gd_from(y_bar, g_diag, opts, random_stiefel(y_bar.cols(), k, rng));
}

cplx soft_threshold(cplx z, double t) {
  const double mag = std::abs(z);
  if (mag <= t) return {0.0, 0.0};
  return z * (1.0 - t / mag);
}

PilotResult pilot_zf_baseline(const CMatrix& y_bar_train, const CMatrix& x_train,
                              const CMatrix& y_bar_data, const RVector& g_diag, double lambda,
                              const PilotOptions& opts) {
  const Eigen::Index k = x_train.rows();
  const Eigen::Index m = y_bar_train.rows();
  if (x_train.cols() < 1) throw ParameterError("pilot_zf_baseline: need at least one pilot symbol");
  if (y_bar_train.cols() != x_train.cols() || g_diag.size() != k || y_bar_data.rows() != m) {
    throw DimensionError("pilot_zf_baseline: shape mismatch");
  }
  if (!(lambda >= 0.0)) throw ParameterError("pilot_zf_baseline: lambda must be non-negative");

  const CMatrix b = g_diag.cwiseSqrt().cast<cplx>().asDiagonal() * x_train;  // K x T_t
  const double spectral = Eigen::JacobiSVD<CMatrix>(b).singularValues()(0);
  const double lipschitz = 2.0 * spectral * spectral;
  if (!(lipschitz > 0.0)) throw DegenerateInputError("pilot_zf_baseline: pilot matrix is zero");
  const double step = 1.0 / lipschitz;
  const double thresh = lambda * step;

  const CMatrix ybh = y_bar_train * b.adjoint();
  const CMatrix bbh = b * b.adjoint();
  CMatrix h = CMatrix::Zero(m, k);
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const CMatrix grad = 2.0 * (h * bbh - ybh);
    CMatrix next = (h - step * grad).unaryExpr([thresh](cplx z) { return soft_threshold(z, thresh); });
    const double change = (next - h).norm();
    const double scale = next.norm();
    h = std::move(next);
    if (change <= opts.rel_tol * scale) {
      ++it;
      break;
    }
  }

  const CMatrix d = h * g_diag.cwiseSqrt().cast<cplx>().asDiagonal();
  const CMatrix gram = d.adjoint() * d;
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const RVector& ev = eig.eigenvalues();
  if (!(ev(ev.size() - 1) > 0.0) || !(ev(0) > 1e-12 * ev(ev.size() - 1))) {
    throw DegenerateInputError("pilot_zf_baseline: singular zero-forcing matrix");
  }
  PilotResult out;
  out.x_hat = gram.ldlt().solve(d.adjoint() * y_bar_data);
  out.h_est = std::move(h);
  out.ista_iters = it;
  return out;
}

}  // namespace blindmimo
