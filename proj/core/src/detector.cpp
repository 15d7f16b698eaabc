#include "blindmimo/detector.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "blindmimo/assignment.hpp"

namespace blindmimo {

namespace {

void check_problem(const CMatrix& y_bar, const CMatrix& a, const RVector& g_diag, int p) {
  if (a.rows() != y_bar.cols()) {
    throw DimensionError("detector: A has " + std::to_string(a.rows()) + " rows but Y has " +
                         std::to_string(y_bar.cols()) + " columns");
  }
  if (g_diag.size() != a.cols()) throw DimensionError("detector: g_diag length must equal K");
  if ((g_diag.array() <= 0.0).any()) throw ParameterError("detector: g_diag must be positive");
  if (p != 3 && p != 4) throw ParameterError("detector: p_exponent must be 3 or 4");
}

/// W = Y A G^{-1/2}
CMatrix projected(const CMatrix& y_bar, const CMatrix& a, const RVector& g_diag) {
  return y_bar * a * g_diag.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
}

double power_sum(const CMatrix& w, int p) {
  const auto mag2 = w.array().abs2();
  if (p == 4) return mag2.square().sum();
  return (mag2 * mag2.sqrt()).sum();
}

CMatrix gradient_from(const CMatrix& y_bar, const CMatrix& w, const RVector& g_diag, int p) {
  CMatrix weighted(w.rows(), w.cols());
  if (p == 4) {
    weighted = (w.array().abs2().cast<cplx>() * w.array()).matrix();
  } else {
    weighted = (w.array().abs().cast<cplx>() * w.array()).matrix();
  }
  return static_cast<double>(p) * (y_bar.adjoint() * weighted) *
         g_diag.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal();
}

struct Evaluation {
  double value;
  CMatrix grad;
};

Evaluation evaluate(const CMatrix& y_bar, const CMatrix& a, const RVector& g_diag, int p) {
  const CMatrix w = projected(y_bar, a, g_diag);
  return {power_sum(w, p), gradient_from(y_bar, w, g_diag, p)};
}

SolveResult run_iteration(const CMatrix& y_bar, const RVector& g_diag, const SolverOptions& opts,
                          StiefelPoint start) {
  SolveTrace trace;
  std::optional<StiefelPoint> current(std::move(start));
  double eta_scale = 1.0;
  for (;;) {
    const CMatrix& a = current->matrix();
    Evaluation ev = evaluate(y_bar, a, g_diag, opts.p_exponent);
    ++trace.gradient_evals;
    ++trace.objective_evals;
    PolarFactor next = polar_decompose(ev.grad);
    const double eta = std::max(0.0, next.singular_values.sum() - real_inner(a, ev.grad));

    trace.objective_per_iter.push_back(ev.value);
    trace.eta_per_iter.push_back(eta);
    trace.feasibility_per_iter.push_back(stiefel_residual(a));

    const std::size_t j = trace.objective_per_iter.size() - 1;
    if (j == 0) eta_scale = std::max(eta, 1.0);
    if (eta < opts.eta_tol * eta_scale) {
      trace.stop_reason = StopReason::kEtaTol;
      break;
    }
    if (j > 0) {
      const double prev = trace.objective_per_iter[j - 1];
      if (std::abs(ev.value - prev) < opts.obj_rel_tol * std::abs(ev.value)) {
        trace.stop_reason = StopReason::kObjTol;
        break;
      }
    }
    if (trace.iters_run >= opts.max_iters) {
      trace.stop_reason = StopReason::kMaxIters;
      break;
    }
    current.emplace(std::move(next.factor));
    ++trace.iters_run;
  }
  return {std::move(*current), std::move(trace)};
}

}  // namespace

void SolverOptions::validate() const {
  if (p_exponent != 3 && p_exponent != 4) throw ParameterError("SolverOptions: p_exponent must be 3 or 4");
  if (max_iters < 1) throw ParameterError("SolverOptions: max_iters must be >= 1");
  if (!(eta_tol >= 0.0) || !(obj_rel_tol >= 0.0)) {
    throw ParameterError("SolverOptions: tolerances must be non-negative");
  }
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kEtaTol:
      return "eta_tol";
    case StopReason::kObjTol:
      return "obj_tol";
    case StopReason::kMaxIters:
      return "max_iters";
  }
  return "unknown";
}

bool SolveTrace::is_monotone(double slack) const {
  for (std::size_t i = 1; i < objective_per_iter.size(); ++i) {
    if (objective_per_iter[i] < objective_per_iter[i - 1] - slack) return false;
  }
  return true;
}

double objective(const CMatrix& y_bar, const CMatrix& a, const RVector& g_diag, int p_exponent) {
  check_problem(y_bar, a, g_diag, p_exponent);
  return power_sum(projected(y_bar, a, g_diag), p_exponent);
}

double objective(const CMatrix& y_bar, const StiefelPoint& a, const RVector& g_diag, int p_exponent) {
  return objective(y_bar, a.matrix(), g_diag, p_exponent);
}

CMatrix euclid_grad(const CMatrix& y_bar, const CMatrix& a, const RVector& g_diag, int p_exponent) {
  check_problem(y_bar, a, g_diag, p_exponent);
  return gradient_from(y_bar, projected(y_bar, a, g_diag), g_diag, p_exponent);
}

StiefelPoint iterate(const StiefelPoint& a, const CMatrix& y_bar, const RVector& g_diag,
                     int p_exponent) {
  return polar_retract(euclid_grad(y_bar, a.matrix(), g_diag, p_exponent));
}

double optimality_eta(const StiefelPoint& a, const CMatrix& grad) {
  require_shape(grad, a.t_dim(), a.k_dim(), "optimality_eta");
  return std::max(0.0, nuclear_norm(grad) - real_inner(a.matrix(), grad));
}

SolveResult solve_from(const CMatrix& y_bar, const RVector& g_diag, const SolverOptions& opts,
                       const StiefelPoint& start) {
  opts.validate();
  check_problem(y_bar, start.matrix(), g_diag, opts.p_exponent);
  if (y_bar.cols() < g_diag.size()) throw DimensionError("solve: need T >= K");
  return run_iteration(y_bar, g_diag, opts, start);
}

SolveResult solve(const CMatrix& y_bar, const RVector& g_diag, const SolverOptions& opts, Rng& rng) {
  opts.validate();
  const Eigen::Index t = y_bar.cols();
  const Eigen::Index k = g_diag.size();
  if (t < k || k == 0) throw DimensionError("solve: need 0 < K <= T");
  if (y_bar.cwiseAbs2().sum() == 0.0) throw ParameterError("solve: received signal is identically zero");
  try {
    return solve_from(y_bar, g_diag, opts, random_stiefel(t, k, rng));
  } catch (const DegenerateInputError&) {
    SolveResult retry = solve_from(y_bar, g_diag, opts, random_stiefel(t, k, rng));
    retry.trace.restarts = 1;
    return retry;
  }
}

ResolvedEstimate resolve_ambiguity(const CMatrix& x_est, const FrameLayout& layout,
                                   const Constellation& c) {
  const Eigen::Index k = x_est.rows();
  const Eigen::Index t = x_est.cols();
  const int hl = layout.header_len;
  if (layout.id_codebook.rows() != k || layout.id_codebook.cols() != hl) {
    throw DimensionError("resolve_ambiguity: ID codebook does not match the estimate");
  }
  if (t < 1 + hl) throw DimensionError("resolve_ambiguity: estimate shorter than the frame header");
  (void)c;

  AmbiguityResolution res;
  res.phase_failed.assign(static_cast<std::size_t>(k), false);
  const cplx ref_dir = layout.ref_value / std::abs(layout.ref_value);

  // Step 1: rotate each row so its reference entry has the reference phase.
  CMatrix rotated(k, t);
  CVector row_phase(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const cplx lead = x_est(r, 0);
    const double mag = std::abs(lead);
    cplx corr{1.0, 0.0};
    if (mag > 1e-12) {
      corr = ref_dir * std::conj(lead) / mag;
    } else {
      res.phase_failed[static_cast<std::size_t>(r)] = true;
    }
    row_phase(r) = corr;
    rotated.row(r) = corr * x_est.row(r);
  }

  // Step 2: match rows to users on header distance.
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  RMatrix cost = RMatrix::Zero(k, k);
  if (hl > 0) {
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index u = 0; u < k; ++u) {
        cost(r, u) = (rotated.row(r).segment(1, hl) - scale * layout.id_codebook.row(u)).norm();
      }
    }
  }
  const std::vector<int> user_of_row = min_cost_assignment(cost);

  ResolvedEstimate out;
  out.x_hat.resize(k, t);
  res.phase_corrections.resize(k);
  res.permutation.assign(static_cast<std::size_t>(k), 0);
  res.match_distances.resize(k);
  std::vector<bool> failed_by_user(static_cast<std::size_t>(k), false);
  for (Eigen::Index r = 0; r < k; ++r) {
    const int u = user_of_row[static_cast<std::size_t>(r)];
    out.x_hat.row(u) = rotated.row(r);
    res.phase_corrections(u) = row_phase(r);
    res.permutation[static_cast<std::size_t>(u)] = static_cast<int>(r);
    res.match_distances(u) = cost(r, u);
    failed_by_user[static_cast<std::size_t>(u)] = res.phase_failed[static_cast<std::size_t>(r)];
  }
  res.phase_failed = std::move(failed_by_user);
  out.resolution = std::move(res);
  return out;
}

ResolvedEstimate resolve_ambiguity(const StiefelPoint& a_final, const FrameLayout& layout,
                                   const Constellation& c) {
  return resolve_ambiguity(CMatrix(a_final.matrix().adjoint()), layout, c);
}

ResolvedEstimate oracle_alignment(const CMatrix& x_est, const CMatrix& x_true) {
  if (x_est.rows() != x_true.rows() || x_est.cols() != x_true.cols()) {
    throw DimensionError("oracle_alignment: shape mismatch");
  }
  const Eigen::Index k = x_est.rows();
  const CMatrix corr = x_est * x_true.adjoint();  // corr(r, u) = <x_true_u, x_est_r>
  const RMatrix cost = -corr.cwiseAbs();
  const std::vector<int> user_of_row = min_cost_assignment(cost);

  ResolvedEstimate out;
  out.x_hat.resize(k, x_est.cols());
  auto& res = out.resolution;
  res.phase_corrections.resize(k);
  res.permutation.assign(static_cast<std::size_t>(k), 0);
  res.match_distances.resize(k);
  res.phase_failed.assign(static_cast<std::size_t>(k), false);
  for (Eigen::Index r = 0; r < k; ++r) {
    const int u = user_of_row[static_cast<std::size_t>(r)];
    const cplx cr = corr(r, u);
    const cplx phase = std::abs(cr) > 0.0 ? std::conj(cr) / std::abs(cr) : cplx{1.0, 0.0};
    out.x_hat.row(u) = phase * x_est.row(r);
    res.phase_corrections(u) = phase;
    res.permutation[static_cast<std::size_t>(u)] = static_cast<int>(r);
    res.match_distances(u) = (out.x_hat.row(u) - x_true.row(u)).norm();
  }
  return out;
}

CMatrix precondition(const CMatrix& y_bar, Eigen::Index k_users, Eigen::Index k_retain) {
  const Eigen::Index rank_max = std::min(y_bar.rows(), y_bar.cols());
  if (k_users <= 0 || k_users > rank_max) throw DimensionError("precondition: K exceeds min(M, T)");
  const Eigen::BDCSVD<CMatrix> svd(y_bar, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  if (!(s(0) > 0.0) || !(s(k_users - 1) > 1e-10 * s(0))) {
    throw DegenerateInputError("precondition: received signal has rank < K");
  }
  const Eigen::Index keep = (k_retain <= 0) ? rank_max : std::min(k_retain, rank_max);
  return svd.matrixU().leftCols(keep) * svd.matrixV().leftCols(keep).adjoint();
}

CMatrix postprocess(const CMatrix& y_bar_pre, const CMatrix& x_hat_pre, const CMatrix& y_bar) {
  if (y_bar_pre.rows() != y_bar.rows() || y_bar_pre.cols() != y_bar.cols() ||
      x_hat_pre.cols() != y_bar.cols()) {
    throw DimensionError("postprocess: shape mismatch");
  }
  const CMatrix d = y_bar_pre * x_hat_pre.adjoint();
  const CMatrix gram = d.adjoint() * d;
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const RVector& ev = eig.eigenvalues();
  if (!(ev(ev.size() - 1) > 0.0) || !(ev(0) > 1e-12 * ev(ev.size() - 1))) {
    throw DegenerateInputError("postprocess: D^H D is singular");
  }
  CMatrix x = gram.ldlt().solve(d.adjoint() * y_bar);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double n = x.row(r).norm();
    if (!(n > 0.0)) throw DegenerateInputError("postprocess: zero row after projection");
    x.row(r) /= n;
  }
  return x;
}

Demodulated demodulate(const CMatrix& x_hat, const Constellation& c) {
  const double gain = std::sqrt(static_cast<double>(x_hat.cols()));
  Demodulated out;
  out.labels.resize(x_hat.rows(), x_hat.cols());
  out.symbols.resize(x_hat.rows(), x_hat.cols());
  out.bits.reserve(static_cast<std::size_t>(x_hat.size() * c.bits_per_symbol));
  for (Eigen::Index r = 0; r < x_hat.rows(); ++r) {
    for (Eigen::Index t = 0; t < x_hat.cols(); ++t) {
      const int label = c.nearest_label(gain * x_hat(r, t));
      out.labels(r, t) = label;
      out.symbols(r, t) = c.points[static_cast<std::size_t>(label)];
      for (std::uint8_t b : c.label_bits(label)) out.bits.push_back(b);
    }
  }
  return out;
}

DetectionResult detect(const CMatrix& y_bar, const RVector& g_diag, const FrameLayout& layout,
                       const Constellation& c, const SolverOptions& opts, Rng& rng,
                       const SolverFn& solver) {
  const Eigen::Index k = g_diag.size();
  if (opts.precondition) {
    const CMatrix y_pre = precondition(y_bar, k, k);
    SolveResult sol = solver(y_pre, g_diag, opts, rng);
    const CMatrix x_est = postprocess(y_pre, sol.point.matrix().adjoint(), y_bar);
    ResolvedEstimate resolved = resolve_ambiguity(x_est, layout, c);
    Demodulated dec = demodulate(resolved.x_hat, c);
    return {std::move(resolved.x_hat), std::move(dec), std::move(sol), std::move(resolved.resolution)};
  }
  SolveResult sol = solver(y_bar, g_diag, opts, rng);
  ResolvedEstimate resolved = resolve_ambiguity(sol.point, layout, c);
  Demodulated dec = demodulate(resolved.x_hat, c);
  return {std::move(resolved.x_hat), std::move(dec), std::move(sol), std::move(resolved.resolution)};
}

DetectionResult detect(const CMatrix& y_bar, const RVector& g_diag, const FrameLayout& layout,
                       const Constellation& c, const SolverOptions& opts, Rng& rng) {
  return detect(y_bar, g_diag, layout, c, opts, rng,
                [](const CMatrix& y, const RVector& g, const SolverOptions& o, Rng& r) {
                  return solve(y, g, o, r);
                });
}

}  // namespace blindmimo
