#pragma once

#include "blindmimo/detector.hpp"

namespace blindmimo {

/// Riemannian gradient ascent with polar retraction and backtracking
/// (tau starts at 1, halves up to 30 times until the objective increases).
/// Exhausting the line search ends the run with StopReason::kObjTol.
SolveResult riemannian_gd_baseline(const CMatrix& y_bar, const RVector& g_diag,
                                   const SolverOptions& opts, Rng& rng);
SolveResult riemannian_gd_from(const CMatrix& y_bar, const RVector& g_diag,
                               const SolverOptions& opts, const StiefelPoint& start);

/// Complex soft threshold: z * max(0, 1 - t/|z|).
cplx soft_threshold(cplx z, double t);

struct PilotOptions {
  int max_iters = 500;
  double rel_tol = 1e-8;
};

struct PilotResult {
  CMatrix x_hat;   // K x T zero-forcing estimate
  CMatrix h_est;   // M x K angular channel estimate
  int ista_iters = 0;
};

/// Sparse pilot-aided receiver: ISTA on ||Y_T - H G^{1/2} X_T||_F^2 + lambda ||H||_1
/// (step 1/L, L the Lipschitz constant 2 ||G^{1/2} X_T||_2^2), then zero forcing.
PilotResult pilot_zf_baseline(const CMatrix& y_bar_train, const CMatrix& x_train,
                              const CMatrix& y_bar_data, const RVector& g_diag, double lambda,
                              const PilotOptions& opts = {});

}  // namespace blindmimo
