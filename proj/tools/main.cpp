// blindmimo command line: simulate, convergence, concentration, report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blindmimo/harness.hpp"
#include "blindmimo/report.hpp"

namespace fs = std::filesystem;
using namespace blindmimo;

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string methods;
  std::optional<bool> precondition;
  std::optional<int> threads;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config with SystemConfig field names")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "base seed");
  app->add_option("--trials", c.trials, "trials per point")->check(CLI::PositiveNumber);
  app->add_option("--methods", c.methods, "comma list of l3,l4,rgd,pilot");
  app->add_option("--precondition", c.precondition, "polar preconditioning of the received block");
  app->add_option("--threads", c.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
}

SystemConfig resolve(const Common& c) {
  SystemConfig cfg = c.config.empty() ? SystemConfig{} : load_config(c.config);
  if (c.seed) cfg.base_seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (!c.methods.empty()) cfg.methods = parse_method_list(c.methods);
  if (c.precondition) cfg.solver.precondition = *c.precondition;
  if (c.threads) cfg.threads = *c.threads;
  cfg.validate();
  return cfg;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

int cmd_simulate(const Common& c) {
  const SystemConfig cfg = resolve(c);
  fs::create_directories(c.out);
  {
    std::ofstream f(fs::path(c.out) / "config.json");
    f << config_to_json(cfg) << '\n';
  }
  std::vector<TrialRecord> records;
  int failures = 0;
  run_sweep(cfg, [&](const TrialRecord& r) {
    failures += r.error ? 1 : 0;
    records.push_back(r);
  });
  emit_report(records, c.out);
  std::cout << records.size() << " records (" << failures << " with errors) -> " << c.out << '\n';
  return 0;
}

int cmd_report(const Common& c, const std::string& input) {
  const fs::path in = input.empty() ? fs::path(c.out) / "trials.jsonl" : fs::path(input);
  const auto records = read_trials_jsonl(in);
  emit_summary(records, c.out);
  std::cout << records.size() << " records summarized -> " << c.out << '\n';
  return 0;
}

struct ConcArgs {
  std::string k_list = "4,8";
  std::string t_list = "8,16,32,64,128,256,512,1024";
  double delta2 = 0.1;
  std::map<int, double> c_values{{4, 0.416}, {8, 0.464}};
};

int cmd_concentration(const Common& c, const ConcArgs& a) {
  const SystemConfig cfg = resolve(c);
  const int trials = c.trials.value_or(1000);
  const auto rows = run_concentration_experiment(parse_ints(a.k_list), parse_ints(a.t_list), a.delta2,
                                                 trials, a.c_values, cfg.base_seed, cfg.constellation);
  fs::create_directories(c.out);
  std::ofstream csv(fs::path(c.out) / "summary.csv");
  csv << std::setprecision(12);
  csv << "k_users,t_len,trials,empirical,binomial_sd,theoretical\n";
  std::map<int, std::vector<std::vector<double>>> per_k;
  for (const auto& r : rows) {
    const double th = r.theoretical.value_or(std::nan(""));
    csv << r.k_users << ',' << r.t_len << ',' << r.trials << ',' << r.empirical << ',' << r.binomial_sd << ','
        << th << '\n';
    per_k[r.k_users].push_back({static_cast<double>(r.t_len), r.empirical, 2.0 * r.binomial_sd, th});
  }
  for (const auto& [k, data] : per_k) {
    write_plot_dat(fs::path(c.out) / ("plot_concentration_K" + std::to_string(k) + ".dat"),
                   "exceedance frequency, delta^2 = " + std::to_string(a.delta2),
                   {"t_len", "empirical", "two_sd", "theoretical"}, data);
  }
  std::cout << rows.size() << " (K, T) points -> " << c.out << '\n';
  return 0;
}

struct ConvArgs {
  int m = 512;
  int k = 8;
  int t = 200;
  double theta = 0.2;
  double sigma2 = 0.1;
  double threshold = 0.9;
};

int cmd_convergence(const Common& c, const ConvArgs& a) {
  const SystemConfig cfg = resolve(c);
  const int trials = c.trials.value_or(30);
  const ConvergenceVariant base{"base", a.m, a.k, a.t, a.theta, a.sigma2};
  std::vector<ConvergenceVariant> variants{base, base, base, base};
  variants[1].name = "theta_half";
  variants[1].theta = a.theta / 2;
  variants[2].name = "k_half";
  variants[2].k_users = std::max(1, a.k / 2);
  variants[3].name = "sigma2_tenth";
  variants[3].noise_variance = a.sigma2 / 10;
  const auto traces = run_convergence_experiment(variants, trials, cfg.base_seed, cfg.solver, a.threshold);

  fs::create_directories(c.out);
  std::ofstream csv(fs::path(c.out) / "summary.csv");
  csv << "variant,m,k_users,t_len,theta,noise_variance,trials,reached,median_iters_to_threshold\n";
  for (const auto& v : variants) {
    std::vector<double> hits;
    std::vector<std::vector<double>> curves;
    for (const auto& tr : traces) {
      if (tr.variant != v.name) continue;
      hits.push_back(tr.iters_to_threshold < 0 ? std::nan("") : tr.iters_to_threshold);
      curves.push_back(tr.normalized);
    }
    const SummaryStats s = summarize(hits);
    csv << v.name << ',' << v.m << ',' << v.k_users << ',' << v.t_len << ',' << v.theta << ','
        << v.noise_variance << ',' << trials << ',' << s.n << ',' << s.median << '\n';

    std::size_t len = 0;
    for (const auto& cv : curves) len = std::max(len, cv.size());
    std::vector<std::vector<double>> data;
    for (std::size_t j = 0; j < len; ++j) {
      std::vector<double> col;
      // a finished run holds its last value
      for (const auto& cv : curves) col.push_back(cv.empty() ? std::nan("") : cv[std::min(j, cv.size() - 1)]);
      const SummaryStats st = summarize(col);
      data.push_back({static_cast<double>(j), st.median, st.mean, st.ci95});
    }
    write_plot_dat(fs::path(c.out) / ("plot_convergence_" + v.name + ".dat"),
                   "normalized objective per iteration, variant " + v.name,
                   {"iteration", "median", "mean", "ci95"}, data);
  }
  std::cout << traces.size() << " traces -> " << c.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind massive MIMO detection on the Stiefel manifold"};
  app.require_subcommand(1);

  Common sim_c, conv_c, conc_c, rep_c;
  auto* sim = app.add_subcommand("simulate", "seeded Monte Carlo sweep");
  add_common(sim, sim_c);

  auto* conv = app.add_subcommand("convergence", "normalized objective traces for paired variants");
  add_common(conv, conv_c);
  ConvArgs conv_a;
  conv->add_option("--m", conv_a.m, "antennas");
  conv->add_option("--k", conv_a.k, "users");
  conv->add_option("--t", conv_a.t, "frame length");
  conv->add_option("--theta", conv_a.theta, "Bernoulli-Gaussian sparsity");
  conv->add_option("--sigma2", conv_a.sigma2, "noise variance");
  conv->add_option("--threshold", conv_a.threshold, "normalized objective level");

  auto* conc = app.add_subcommand("concentration", "exceedance frequency of ||XX^H - I||_F^2 / K");
  add_common(conc, conc_c);
  ConcArgs conc_a;
  conc->add_option("--k-list", conc_a.k_list, "comma list of K");
  conc->add_option("--t-list", conc_a.t_list, "comma list of T");
  conc->add_option("--delta2", conc_a.delta2, "threshold on the squared statistic");
  conc->add_option("--c", conc_a.c_values, "curve constant per K, e.g. --c 4 0.416");

  auto* rep = app.add_subcommand("report", "rebuild summary.csv and plot files from trials.jsonl");
  add_common(rep, rep_c);
  std::string rep_in;
  rep->add_option("--in", rep_in, "trials.jsonl (default <out>/trials.jsonl)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(sim_c);
    if (*conv) return cmd_convergence(conv_c, conv_a);
    if (*conc) return cmd_concentration(conc_c, conc_a);
    if (*rep) return cmd_report(rep_c, rep_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
