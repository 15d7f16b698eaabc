#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blindmimo/channel.hpp"
#include "blindmimo/detector.hpp"
#include "blindmimo/metrics.hpp"
#include "blindmimo/signal.hpp"

namespace blindmimo {

enum class FadingModel { kIdentity, kLogDistance };

std::string_view to_string(FadingModel model);
FadingModel parse_fading_model(std::string_view name);

enum class Method { kL3, kL4, kRgd, kPilot };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
/// Comma-separated list such as "l3,l4,rgd,pilot".
std::vector<Method> parse_method_list(std::string_view list);

/// Parameter swept by run_sweep. An empty name means a single point.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

/// Scenario parameters; JSON configs use the same field names.
struct SystemConfig {
  int k_users = 8;
  int t_len = 240;
  int n_h = 256;
  int n_v = 1;
  double d_over_lambda = 0.5;
  double snr_db = 20.0;
  double theta = 0.1;   // Bernoulli-Gaussian sparsity
  int n_paths = 5;      // clustered model paths per user
  ChannelModel channel_model = ChannelModel::kClustered;
  ConstellationKind constellation = ConstellationKind::kQpsk;
  FadingModel fading_model = FadingModel::kIdentity;
  std::vector<double> power;  // empty: unit power for every user
  int trials = 100;
  std::uint64_t base_seed = 1;
  SolverOptions solver;
  std::vector<Method> methods{Method::kL3};
  int pilot_len = 6;
  double pilot_lambda = 2.0;
  SweepAxis sweep;
  int threads = 0;  // 0: hardware concurrency

  int m_total() const { return n_h * n_v; }
  /// Throws ParameterError on inconsistent fields.
  void validate() const;
};

SystemConfig config_from_json(std::string_view json_text);
SystemConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const SystemConfig& cfg);
/// Stable 64-bit hash of the canonical JSON form, as 16 hex digits.
std::string config_fingerprint(const SystemConfig& cfg);

/// Sets the named field (snr_db, t_len, k_users, theta, n_h, n_v, n_paths, pilot_len).
void apply_sweep_value(SystemConfig& cfg, std::string_view axis, double value);

/// sigma_z^2 = sum_k G_kk P_kk / (T * SNR).
double noise_variance_for(const RVector& g_diag, const RVector& p_diag, int t_len, double snr_db);

/// Large-scale fading: all ones, or log-distance path loss at 28 GHz with
/// d ~ U(20, 200) m and the real part of CN(0, 4.2) as dB shadowing.
RVector draw_fading(FadingModel model, int k_users, Rng& rng);

/// One channel use: everything a receiver sees plus the ground truth.
struct Scenario {
  ChannelRealization channel;
  DataFrame frame;
  ReceivedSignal rx;
  CMatrix pilot_x;  // K x T_t unit-power pilot symbols (times P^{1/2})
  CMatrix pilot_y;  // M x T_t received pilots, rescaled by sqrt(T)
};

Scenario generate_scenario(const SystemConfig& cfg, std::uint64_t seed);

struct TrialRecord {
  std::string fingerprint;
  std::string method;
  std::string sweep_axis;
  double sweep_value = 0.0;
  int sweep_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  TrialMetrics metrics;
  std::string stop_reason;
  double final_eta = 0.0;
  int gradient_evals = 0;
  int objective_evals = 0;
  std::optional<std::string> error;
};

/// Runs one method on one scenario. Solver errors are captured in the record.
TrialRecord run_trial(const SystemConfig& cfg, Method method, const Scenario& scenario,
                      std::uint64_t solver_seed);

/// Every (sweep value, trial, method) in deterministic order. Trials run on
/// cfg.threads workers; records reach the sink in order regardless.
void run_sweep(const SystemConfig& cfg, const std::function<void(const TrialRecord&)>& sink);
std::vector<TrialRecord> run_sweep(const SystemConfig& cfg);

/// 2 exp(-(delta sqrt(T)/C - sqrt(K))^2).
double concentration_bound(int k_users, int t_len, double c_const, double delta);

/// delta at which (1/ln 2) S_inf^2 max(delta, delta^2) equals the threshold.
double concentration_delta(double stat_threshold, double s_inf);

struct ConcentrationRow {
  int k_users = 0;
  int t_len = 0;
  int trials = 0;
  double empirical = 0.0;     // Pr[statistic^2 > delta2]
  double binomial_sd = 0.0;   // sqrt(p (1 - p) / trials)
  std::optional<double> theoretical;
};

/// Frequency of ||XX^H - I||_F^2 / K > delta2 for i.i.d. symbol frames.
/// c_values maps K to the curve constant; trials must be >= 100.
std::vector<ConcentrationRow> run_concentration_experiment(
    const std::vector<int>& k_list, const std::vector<int>& t_list, double delta2, int trials,
    const std::map<int, double>& c_values, std::uint64_t seed,
    ConstellationKind constellation = ConstellationKind::kQpsk);

/// Planted instance for convergence studies: Bernoulli-Gaussian channel,
/// Haar data (X^H on the Stiefel manifold), G = P = I, noise variance given.
struct ConvergenceVariant {
  std::string name;
  int m = 512;
  int k_users = 8;
  int t_len = 200;
  double theta = 0.2;
  double noise_variance = 0.1;
};

struct ConvergenceTrace {
  std::string variant;
  int trial = 0;
  std::uint64_t seed = 0;
  double upper_bound = 0.0;
  std::vector<double> normalized;   // objective / upper bound, per iterate
  int iters_to_threshold = -1;      // -1 when never reached
  StopReason stop_reason = StopReason::kMaxIters;
};

/// Trial t of every variant shares its seed so variants are paired.
std::vector<ConvergenceTrace> run_convergence_experiment(const std::vector<ConvergenceVariant>& variants,
                                                         int trials, std::uint64_t seed,
                                                         const SolverOptions& opts,
                                                         double threshold = 0.9);
ConvergenceTrace run_convergence_trial(const ConvergenceVariant& variant, int trial,
                                       std::uint64_t seed, const SolverOptions& opts,
                                       double threshold = 0.9);

}  // namespace blindmimo
