#include "blindmimo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "blindmimo/baselines.hpp"

namespace blindmimo {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t method_tag(Method m) { return 0x6d657468000000ULL + static_cast<std::uint64_t>(m); }

}  // namespace

std::string_view to_string(FadingModel model) {
  return model == FadingModel::kIdentity ? "identity" : "log_distance";
}

FadingModel parse_fading_model(std::string_view name) {
  if (name == "identity") return FadingModel::kIdentity;
  if (name == "log_distance") return FadingModel::kLogDistance;
  throw ParameterError("unknown fading model '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kL3: return "l3";
    case Method::kL4: return "l4";
    case Method::kRgd: return "rgd";
    case Method::kPilot: return "pilot";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "l3") return Method::kL3;
  if (name == "l4") return Method::kL4;
  if (name == "rgd") return Method::kRgd;
  if (name == "pilot") return Method::kPilot;
  throw ParameterError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view list) {
  std::vector<Method> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    std::string_view item = list.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const Method m = parse_method(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw ParameterError("method list is empty");
  return out;
}

void SystemConfig::validate() const {
  if (k_users <= 0 || t_len <= 0 || n_h <= 0 || n_v <= 0) {
    throw ParameterError("config: dimensions must be positive");
  }
  if (k_users > m_total()) throw ParameterError("config: k_users exceeds the antenna count");
  const int l = header_length(k_users, build_constellation(constellation).size());
  if (t_len < k_users) throw ParameterError("config: t_len must be at least k_users");
  if (t_len <= 1 + l) {
    throw ParameterError("config: t_len must exceed 1 + header length (" + std::to_string(1 + l) + ")");
  }
  if (!(d_over_lambda > 0.0)) throw ParameterError("config: d_over_lambda must be positive");
  if (!std::isfinite(snr_db)) throw ParameterError("config: snr_db must be finite");
  if (channel_model == ChannelModel::kBernoulliGaussian && !(theta > 0.0 && theta <= 1.0)) {
    throw ParameterError("config: theta must lie in (0, 1]");
  }
  if (channel_model == ChannelModel::kClustered && n_paths <= 0) {
    throw ParameterError("config: n_paths must be positive");
  }
  if (!power.empty()) {
    if (static_cast<int>(power.size()) != k_users) throw ParameterError("config: power needs k_users entries");
    for (double p : power) {
      if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("config: power entries must be positive");
    }
  }
  if (trials <= 0) throw ParameterError("config: trials must be positive");
  if (methods.empty()) throw ParameterError("config: no methods");
  if (std::find(methods.begin(), methods.end(), Method::kPilot) != methods.end() && pilot_len < 1) {
    throw ParameterError("config: pilot method needs pilot_len >= 1");
  }
  if (pilot_len < 0 || !(pilot_lambda >= 0.0)) throw ParameterError("config: bad pilot settings");
  if (threads < 0) throw ParameterError("config: threads must be >= 0");
  solver.validate();
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

json solver_to_json(const SolverOptions& s) {
  return json{{"p_exponent", s.p_exponent},
              {"max_iters", s.max_iters},
              {"eta_tol", s.eta_tol},
              {"obj_rel_tol", s.obj_rel_tol},
              {"precondition", s.precondition}};
}

}  // namespace

SystemConfig config_from_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config: top level must be an object");

  static const std::vector<std::string> known{
      "k_users", "t_len",  "n_h",         "n_v",       "d_over_lambda", "snr_db",
      "theta",   "n_paths", "channel_model", "constellation", "fading_model", "power",
      "trials",  "base_seed", "solver",   "methods",   "pilot_len",     "pilot_lambda",
      "sweep",   "threads"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParameterError("config: unknown field '" + key + "'");
    }
  }

  SystemConfig cfg;
  try {
    take(j, "k_users", cfg.k_users);
    take(j, "t_len", cfg.t_len);
    take(j, "n_h", cfg.n_h);
    take(j, "n_v", cfg.n_v);
    take(j, "d_over_lambda", cfg.d_over_lambda);
    if (j.contains("snr_db")) {
      const json& s = j.at("snr_db");
      if (s.is_array()) {
        cfg.sweep.name = "snr_db";
        cfg.sweep.values = s.get<std::vector<double>>();
        if (!cfg.sweep.values.empty()) cfg.snr_db = cfg.sweep.values.front();
      } else {
        cfg.snr_db = s.get<double>();
      }
    }
    take(j, "theta", cfg.theta);
    take(j, "n_paths", cfg.n_paths);
    if (j.contains("channel_model")) cfg.channel_model = parse_channel_model(j.at("channel_model").get<std::string>());
    if (j.contains("constellation")) cfg.constellation = parse_constellation(j.at("constellation").get<std::string>());
    if (j.contains("fading_model")) cfg.fading_model = parse_fading_model(j.at("fading_model").get<std::string>());
    take(j, "power", cfg.power);
    take(j, "trials", cfg.trials);
    take(j, "base_seed", cfg.base_seed);
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      take(s, "p_exponent", cfg.solver.p_exponent);
      take(s, "max_iters", cfg.solver.max_iters);
      take(s, "eta_tol", cfg.solver.eta_tol);
      take(s, "obj_rel_tol", cfg.solver.obj_rel_tol);
      take(s, "precondition", cfg.solver.precondition);
    }
    if (j.contains("methods")) {
      const json& m = j.at("methods");
      if (m.is_string()) {
        cfg.methods = parse_method_list(m.get<std::string>());
      } else {
        cfg.methods.clear();
        for (const auto& item : m) cfg.methods.push_back(parse_method(item.get<std::string>()));
      }
    }
    take(j, "pilot_len", cfg.pilot_len);
    take(j, "pilot_lambda", cfg.pilot_lambda);
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      take(s, "axis", cfg.sweep.name);
      take(s, "values", cfg.sweep.values);
    }
    take(j, "threads", cfg.threads);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json(ss.str());
  } catch (const std::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const SystemConfig& cfg) {
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(std::string(to_string(m)));
  json j{{"k_users", cfg.k_users},
         {"t_len", cfg.t_len},
         {"n_h", cfg.n_h},
         {"n_v", cfg.n_v},
         {"d_over_lambda", cfg.d_over_lambda},
         {"snr_db", cfg.snr_db},
         {"theta", cfg.theta},
         {"n_paths", cfg.n_paths},
         {"channel_model", std::string(to_string(cfg.channel_model))},
         {"constellation", std::string(to_string(cfg.constellation))},
         {"fading_model", std::string(to_string(cfg.fading_model))},
         {"power", cfg.power},
         {"trials", cfg.trials},
         {"base_seed", cfg.base_seed},
         {"solver", solver_to_json(cfg.solver)},
         {"methods", methods},
         {"pilot_len", cfg.pilot_len},
         {"pilot_lambda", cfg.pilot_lambda},
         {"sweep", json{{"axis", cfg.sweep.name}, {"values", cfg.sweep.values}}},
         {"threads", cfg.threads}};
  return j.dump(2);
}

std::string config_fingerprint(const SystemConfig& cfg) {
  // thread count does not change results
  SystemConfig canon = cfg;
  canon.threads = 0;
  const std::string text = config_to_json(canon);
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_sweep_value(SystemConfig& cfg, std::string_view axis, double value) {
  const auto as_int = [&](int& dst) {
    if (value != std::round(value)) throw ParameterError("sweep: " + std::string(axis) + " needs integers");
    dst = static_cast<int>(value);
  };
  if (axis == "snr_db") cfg.snr_db = value;
  else if (axis == "theta") cfg.theta = value;
  else if (axis == "t_len") as_int(cfg.t_len);
  else if (axis == "k_users") as_int(cfg.k_users);
  else if (axis == "n_h") as_int(cfg.n_h);
  else if (axis == "n_v") as_int(cfg.n_v);
  else if (axis == "n_paths") as_int(cfg.n_paths);
  else if (axis == "pilot_len") as_int(cfg.pilot_len);
  else throw ParameterError("sweep: unsupported axis '" + std::string(axis) + "'");
}

double noise_variance_for(const RVector& g_diag, const RVector& p_diag, int t_len, double snr_db) {
  if (g_diag.size() != p_diag.size()) throw DimensionError("noise_variance_for: length mismatch");
  if (t_len <= 0) throw ParameterError("noise_variance_for: t_len must be positive");
  const double snr = std::pow(10.0, snr_db / 10.0);
  return g_diag.cwiseProduct(p_diag).sum() / (t_len * snr);
}

RVector draw_fading(FadingModel model, int k_users, Rng& rng) {
  RVector g = RVector::Ones(k_users);
  if (model == FadingModel::kIdentity) return g;
  for (int k = 0; k < k_users; ++k) {
    const double d = rng.uniform(20.0, 200.0);
    const double shadow = std::sqrt(4.2) * rng.complex_normal().real();
    const double g_db = -32.4 - 18.5 * std::log10(d) - 20.0 * std::log10(28.0) + shadow;
    g(k) = std::pow(10.0, g_db / 10.0);
  }
  return g;
}

Scenario generate_scenario(const SystemConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  const Constellation c = build_constellation(cfg.constellation);
  const ArrayGeometry geom{cfg.n_h, cfg.n_v, cfg.d_over_lambda};

  ChannelRealization channel =
      cfg.channel_model == ChannelModel::kClustered
          ? clustered_channel(cfg.k_users, cfg.n_paths, geom, rng)
          : bernoulli_gaussian_channel(geom.m_total(), cfg.k_users, cfg.theta, rng);
  const RVector g = draw_fading(cfg.fading_model, cfg.k_users, rng);
  const RVector p = cfg.power.empty() ? RVector::Ones(cfg.k_users).eval()
                                      : Eigen::Map<const RVector>(cfg.power.data(), cfg.k_users).eval();
  DataFrame frame = build_frame(cfg.k_users, cfg.t_len, c, rng);
  const double sigma2 = noise_variance_for(g, p, cfg.t_len, cfg.snr_db);
  ReceivedSignal rx = synthesize_received(channel, frame.x, g, p, sigma2, rng);

  CMatrix pilot_x(cfg.k_users, 0);
  CMatrix pilot_y(geom.m_total(), 0);
  if (cfg.pilot_len > 0) {
    const double scale = std::sqrt(static_cast<double>(cfg.t_len));
    // same per-symbol energy as the data frame
    pilot_x = random_symbol_matrix(cfg.k_users, cfg.pilot_len, c, rng) *
              std::sqrt(static_cast<double>(cfg.pilot_len));
    pilot_y = synthesize_received(channel, pilot_x / scale, g, p, sigma2, rng).y_bar * scale;
  }
  return Scenario{std::move(channel), std::move(frame), std::move(rx), std::move(pilot_x),
                  std::move(pilot_y)};
}

namespace {

std::vector<std::uint8_t> payload_bits_of(const LabelMatrix& labels, const Constellation& c, int col_begin) {
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(labels.rows() * (labels.cols() - col_begin) * c.bits_per_symbol));
  for (Eigen::Index k = 0; k < labels.rows(); ++k) {
    for (Eigen::Index t = col_begin; t < labels.cols(); ++t) {
      const auto b = c.label_bits(labels(k, t));
      bits.insert(bits.end(), b.begin(), b.end());
    }
  }
  return bits;
}

std::optional<double> normalized_objective_of(const SystemConfig& cfg, const Scenario& s,
                                              const CMatrix& x_hat) {
  try {
    const StiefelPoint a = polar_retract(x_hat.adjoint());
    const double theta_ref = cfg.channel_model == ChannelModel::kBernoulliGaussian
                                 ? cfg.theta
                                 : s.channel.theta_effective();
    const RVector inv_snr = RVector::Constant(cfg.k_users, s.rx.noise_variance).cwiseQuotient(s.rx.g_diag);
    const double upper =
        theoretical_objective_bound(cfg.m_total(), cfg.k_users, theta_ref, inv_snr).upper;
    return objective(s.rx.y_bar, a, s.rx.g_diag, 3) / upper;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

TrialRecord run_trial(const SystemConfig& cfg, Method method, const Scenario& scenario,
                      std::uint64_t solver_seed) {
  TrialRecord rec;
  rec.method = std::string(to_string(method));
  rec.seed = solver_seed;
  rec.metrics.evm = rec.metrics.ser = rec.metrics.ber = rec.metrics.rate_blind = kNaN;

  const Constellation c = build_constellation(cfg.constellation);
  const DataFrame& frame = scenario.frame;
  const int col0 = frame.layout.payload_begin();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Rng rng(solver_seed);
    CMatrix x_hat;
    LabelMatrix labels;
    if (method == Method::kPilot) {
      const PilotResult pr = pilot_zf_baseline(scenario.pilot_y, scenario.pilot_x, scenario.rx.y_bar,
                                               scenario.rx.g_diag, cfg.pilot_lambda);
      x_hat = pr.x_hat;
      labels = demodulate(x_hat, c).labels;
      rec.metrics.iters = pr.ista_iters;
      rec.metrics.rate_training = achievable_rate_training(x_hat, frame.x, cfg.t_len, cfg.pilot_len);
      rec.stop_reason = "ista";
    } else {
      SolverOptions opts = cfg.solver;
      opts.p_exponent = method == Method::kL4 ? 4 : 3;
      DetectionResult det =
          method == Method::kRgd
              ? detect(scenario.rx.y_bar, scenario.rx.g_diag, frame.layout, c, opts, rng,
                       SolverFn(riemannian_gd_baseline))
              : detect(scenario.rx.y_bar, scenario.rx.g_diag, frame.layout, c, opts, rng);
      x_hat = std::move(det.x_hat);
      labels = std::move(det.decisions.labels);
      const SolveTrace& tr = det.solution.trace;
      rec.metrics.iters = tr.iters_run;
      rec.metrics.rate_blind = achievable_rate_blind(x_hat, frame.x, cfg.t_len);
      rec.stop_reason = std::string(to_string(tr.stop_reason));
      rec.final_eta = tr.final_eta();
      rec.gradient_evals = tr.gradient_evals;
      rec.objective_evals = tr.objective_evals;
    }
    rec.metrics.evm = evm(x_hat, frame.x);
    rec.metrics.ser = symbol_error_rate(labels, frame.labels, col0);
    rec.metrics.ber = bit_error_rate(payload_bits_of(labels, c, col0), frame.payload_bits(c));
    rec.metrics.normalized_objective = normalized_objective_of(cfg, scenario, x_hat);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  rec.metrics.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

void run_sweep(const SystemConfig& cfg, const std::function<void(const TrialRecord&)>& sink) {
  cfg.validate();
  const std::string fp = config_fingerprint(cfg);
  const bool swept = !cfg.sweep.name.empty() && !cfg.sweep.values.empty();
  const std::size_t n_points = swept ? cfg.sweep.values.size() : 1;
  std::vector<SystemConfig> point_cfgs;
  for (std::size_t i = 0; i < n_points; ++i) {
    SystemConfig pc = cfg;
    if (swept) apply_sweep_value(pc, cfg.sweep.name, cfg.sweep.values[i]);
    pc.validate();
    point_cfgs.push_back(std::move(pc));
  }

  const std::size_t n_tasks = n_points * static_cast<std::size_t>(cfg.trials);
  auto run_task = [&](std::size_t task) {
    const std::size_t i = task / static_cast<std::size_t>(cfg.trials);
    const int t = static_cast<int>(task % static_cast<std::size_t>(cfg.trials));
    const SystemConfig& pc = point_cfgs[i];
    const std::uint64_t scen_seed = derive_seed(cfg.base_seed, {i, static_cast<std::uint64_t>(t)});
    std::vector<TrialRecord> recs;
    std::optional<Scenario> scen;
    std::string scen_error;
    try {
      scen.emplace(generate_scenario(pc, scen_seed));
    } catch (const std::exception& e) {
      scen_error = e.what();
    }
    for (Method m : pc.methods) {
      const std::uint64_t solver_seed = derive_seed(scen_seed, {method_tag(m)});
      TrialRecord r;
      if (scen) {
        r = run_trial(pc, m, *scen, solver_seed);
      } else {
        r.method = std::string(to_string(m));
        r.seed = solver_seed;
        r.metrics.evm = r.metrics.ser = r.metrics.ber = r.metrics.rate_blind = kNaN;
        r.error = "scenario: " + scen_error;
      }
      r.fingerprint = fp;
      r.sweep_axis = swept ? cfg.sweep.name : "";
      r.sweep_value = swept ? cfg.sweep.values[i] : 0.0;
      r.sweep_index = static_cast<int>(i);
      r.trial = t;
      recs.push_back(std::move(r));
    }
    return recs;
  };

  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(n_tasks, 1)));
  if (n_threads <= 1) {
    for (std::size_t task = 0; task < n_tasks; ++task) {
      for (const auto& r : run_task(task)) sink(r);
    }
    return;
  }

  std::vector<std::optional<std::vector<TrialRecord>>> slots(n_tasks);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < n_threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t task = next++; task < n_tasks; task = next++) {
        auto recs = run_task(task);
        {
          std::lock_guard lock(mu);
          slots[task] = std::move(recs);
        }
        cv.notify_all();
      }
    });
  }
  for (std::size_t task = 0; task < n_tasks; ++task) {
    std::vector<TrialRecord> recs;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return slots[task].has_value(); });
      recs = std::move(*slots[task]);
      slots[task].reset();
    }
    for (const auto& r : recs) sink(r);
  }
}

std::vector<TrialRecord> run_sweep(const SystemConfig& cfg) {
  std::vector<TrialRecord> out;
  run_sweep(cfg, [&](const TrialRecord& r) { out.push_back(r); });
  return out;
}

double concentration_bound(int k_users, int t_len, double c_const, double delta) {
  if (k_users <= 0 || t_len <= 0 || !(c_const > 0.0) || !(delta > 0.0)) {
    throw ParameterError("concentration_bound: arguments must be positive");
  }
  const double arg = delta * std::sqrt(static_cast<double>(t_len)) / c_const - std::sqrt(static_cast<double>(k_users));
  // below this point the tail estimate says nothing
  if (arg <= 0.0) return 1.0;
  return std::min(1.0, 2.0 * std::exp(-arg * arg));
}

double concentration_delta(double stat_threshold, double s_inf) {
  if (!(stat_threshold > 0.0) || !(s_inf > 0.0)) throw ParameterError("concentration_delta: arguments must be positive");
  const double r = stat_threshold * std::numbers::ln2 / (s_inf * s_inf);
  return r <= 1.0 ? r : std::sqrt(r);
}

std::vector<ConcentrationRow> run_concentration_experiment(
    const std::vector<int>& k_list, const std::vector<int>& t_list, double delta2, int trials,
    const std::map<int, double>& c_values, std::uint64_t seed, ConstellationKind constellation) {
  if (trials < 100) throw ParameterError("run_concentration_experiment: trials must be >= 100");
  if (!(delta2 > 0.0)) throw ParameterError("run_concentration_experiment: delta2 must be positive");
  const Constellation c = build_constellation(constellation);
  const double delta = concentration_delta(std::sqrt(delta2), c.peak_magnitude());
  std::vector<ConcentrationRow> rows;
  for (int k : k_list) {
    for (int t : t_list) {
      if (k <= 0 || t <= 0) throw ParameterError("run_concentration_experiment: K and T must be positive");
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(t)}));
      int hits = 0;
      for (int n = 0; n < trials; ++n) {
        const double s = concentration_statistic(random_symbol_matrix(k, t, c, rng));
        if (s * s > delta2) ++hits;
      }
      ConcentrationRow row;
      row.k_users = k;
      row.t_len = t;
      row.trials = trials;
      row.empirical = static_cast<double>(hits) / trials;
      row.binomial_sd = std::sqrt(row.empirical * (1.0 - row.empirical) / trials);
      if (auto it = c_values.find(k); it != c_values.end()) {
        row.theoretical = concentration_bound(k, t, it->second, delta);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

ConvergenceTrace run_convergence_trial(const ConvergenceVariant& v, int trial, std::uint64_t seed,
                                       const SolverOptions& opts, double threshold) {
  if (v.m <= 0 || v.k_users <= 0 || v.t_len < v.k_users || !(v.noise_variance >= 0.0)) {
    throw ParameterError("run_convergence_trial: invalid variant '" + v.name + "'");
  }
  ConvergenceTrace out;
  out.variant = v.name;
  out.trial = trial;
  out.seed = derive_seed(seed, {static_cast<std::uint64_t>(trial)});
  Rng rng(out.seed);
  const ChannelRealization ch = bernoulli_gaussian_channel(v.m, v.k_users, v.theta, rng);
  const CMatrix x = random_stiefel(v.t_len, v.k_users, rng).matrix().adjoint();
  const RVector ones = RVector::Ones(v.k_users);
  const ReceivedSignal rx = synthesize_received(ch, x, ones, ones, v.noise_variance, rng);

  out.upper_bound = theoretical_objective_bound(v.m, v.k_users, v.theta,
                                                RVector::Constant(v.k_users, v.noise_variance))
                        .upper;
  Rng solver_rng(derive_seed(out.seed, {1}));
  SolverOptions o = opts;
  o.p_exponent = 3;
  const SolveResult res = solve(rx.y_bar, ones, o, solver_rng);
  out.stop_reason = res.trace.stop_reason;
  for (std::size_t j = 0; j < res.trace.objective_per_iter.size(); ++j) {
    const double val = res.trace.objective_per_iter[j] / out.upper_bound;
    out.normalized.push_back(val);
    if (out.iters_to_threshold < 0 && val >= threshold) out.iters_to_threshold = static_cast<int>(j);
  }
  return out;
}

std::vector<ConvergenceTrace> run_convergence_experiment(const std::vector<ConvergenceVariant>& variants,
                                                         int trials, std::uint64_t seed,
                                                         const SolverOptions& opts, double threshold) {
  std::vector<ConvergenceTrace> out;
  for (const auto& v : variants) {
    for (int t = 0; t < trials; ++t) out.push_back(run_convergence_trial(v, t, seed, opts, threshold));
  }
  return out;
}

}  // namespace blindmimo
