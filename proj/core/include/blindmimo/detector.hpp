#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "blindmimo/manifold.hpp"
#include "blindmimo/random.hpp"
#include "blindmimo/signal.hpp"
#include "blindmimo/types.hpp"

namespace blindmimo {

struct SolverOptions {
  int p_exponent = 3;         // 3: l3 objective; 4: l4 objective
  int max_iters = 200;
  double eta_tol = 1e-6;      // relative to max(eta(A^0), 1)
  double obj_rel_tol = 1e-10;
  bool precondition = false;

  /// Throws ParameterError on out-of-range fields.
  void validate() const;
};

enum class StopReason { kEtaTol, kObjTol, kMaxIters };

std::string_view to_string(StopReason reason);

/// Per-iterate diagnostics. Entry j describes A^j; iters_run counts updates.
struct SolveTrace {
  std::vector<double> objective_per_iter;
  std::vector<double> eta_per_iter;
  std::vector<double> feasibility_per_iter;  // ||A^H A - I||_F
  int iters_run = 0;
  StopReason stop_reason = StopReason::kMaxIters;
  int gradient_evals = 0;
  int objective_evals = 0;
  int restarts = 0;

  double final_objective() const { return objective_per_iter.empty() ? 0.0 : objective_per_iter.back(); }
  double final_eta() const { return eta_per_iter.empty() ? 0.0 : eta_per_iter.back(); }
  /// True when no objective step decreases by more than slack.
  bool is_monotone(double slack) const;
};

struct SolveResult {
  StiefelPoint point;
  SolveTrace trace;
};

/// sum |Y A G^{-1/2}|^p over all entries.
double objective(const CMatrix& y_bar, const CMatrix& a, const RVector& g_diag, int p_exponent = 3);
double objective(const CMatrix& y_bar, const StiefelPoint& a, const RVector& g_diag,
                 int p_exponent = 3);

/// p Y^H (|W|^{p-2} .* W) G^{-1/2} with W = Y A G^{-1/2}. Its real inner
/// product with a direction D is the first-order change of the objective.
CMatrix euclid_grad(const CMatrix& y_bar, const CMatrix& a, const RVector& g_diag,
                    int p_exponent = 3);

/// One parameter-free ascent step: polar factor of the Euclidean gradient.
StiefelPoint iterate(const StiefelPoint& a, const CMatrix& y_bar, const RVector& g_diag,
                     int p_exponent = 3);

/// ||grad||_* - Re<a, grad>: the largest linearized gain over the manifold.
double optimality_eta(const StiefelPoint& a, const CMatrix& grad);

/// Runs the polar-gradient iteration from a Haar-random start. A degenerate
/// gradient triggers one restart from a fresh point; a second one propagates.
SolveResult solve(const CMatrix& y_bar, const RVector& g_diag, const SolverOptions& opts, Rng& rng);

/// Same iteration from a caller-supplied start; never restarts.
SolveResult solve_from(const CMatrix& y_bar, const RVector& g_diag, const SolverOptions& opts,
                       const StiefelPoint& start);

struct AmbiguityResolution {
  CVector phase_corrections;        // per output user, unit modulus
  std::vector<int> permutation;     // permutation[k]: estimated row assigned to user k
  RVector match_distances;          // header distance of the chosen match, per user
  std::vector<bool> phase_failed;   // reference entry too small to read a phase
};

struct ResolvedEstimate {
  CMatrix x_hat;
  AmbiguityResolution resolution;
};

/// Removes per-row phases with the common reference symbol, then matches rows
/// to users by minimum-cost assignment on the ID-header distances.
ResolvedEstimate resolve_ambiguity(const CMatrix& x_est, const FrameLayout& layout,
                                   const Constellation& c);
ResolvedEstimate resolve_ambiguity(const StiefelPoint& a_final, const FrameLayout& layout,
                                   const Constellation& c);

/// Debug-only alignment against the true data: best permutation by
/// |row correlation| and a least-squares phase per row. Not a receiver.
ResolvedEstimate oracle_alignment(const CMatrix& x_est, const CMatrix& x_true);

/// Polar factor U_Y V_Y^H of y_bar over its top k_retain singular triplets
/// (k_retain <= 0 keeps the full compact SVD). Throws DegenerateInputError
/// unless the k_users-th singular value exceeds 1e-10 times the largest.
CMatrix precondition(const CMatrix& y_bar, Eigen::Index k_users, Eigen::Index k_retain);

/// X = (D^H D)^{-1} D^H Y with D = Y_pre X_pre^H, rows rescaled to unit norm.
CMatrix postprocess(const CMatrix& y_bar_pre, const CMatrix& x_hat_pre, const CMatrix& y_bar);

struct Demodulated {
  LabelMatrix labels;
  CMatrix symbols;                  // unscaled constellation points
  std::vector<std::uint8_t> bits;   // row-major, all columns
};

/// Nearest-point decisions on sqrt(T) * x_hat.
Demodulated demodulate(const CMatrix& x_hat, const Constellation& c);

struct DetectionResult {
  CMatrix x_hat;
  Demodulated decisions;
  SolveResult solution;
  AmbiguityResolution resolution;
};

/// Full blind receiver: optional preconditioning, solve, post-projection,
/// ambiguity resolution and demodulation.
DetectionResult detect(const CMatrix& y_bar, const RVector& g_diag, const FrameLayout& layout,
                       const Constellation& c, const SolverOptions& opts, Rng& rng);

using SolverFn = std::function<SolveResult(const CMatrix&, const RVector&, const SolverOptions&, Rng&)>;

/// As detect, with the manifold solver supplied by the caller.
DetectionResult detect(const CMatrix& y_bar, const RVector& g_diag, const FrameLayout& layout,
                       const Constellation& c, const SolverOptions& opts, Rng& rng,
                       const SolverFn& solver);

}  // namespace blindmimo
