#include "blindmimo/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

namespace blindmimo {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double num(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return kNaN;
  return j.at(key).get<double>();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

struct MetricGetter {
  const char* name;
  std::function<double(const TrialRecord&)> get;
};

const std::vector<MetricGetter>& metric_getters() {
  static const std::vector<MetricGetter> g{
      {"evm", [](const TrialRecord& r) { return r.metrics.evm; }},
      {"ser", [](const TrialRecord& r) { return r.metrics.ser; }},
      {"ber", [](const TrialRecord& r) { return r.metrics.ber; }},
      {"rate_blind", [](const TrialRecord& r) { return r.metrics.rate_blind; }},
      {"rate_training", [](const TrialRecord& r) { return r.metrics.rate_training.value_or(kNaN); }},
      {"normalized_objective", [](const TrialRecord& r) { return r.metrics.normalized_objective.value_or(kNaN); }},
      {"iters", [](const TrialRecord& r) { return r.error ? kNaN : static_cast<double>(r.metrics.iters); }},
  };
  return g;
}

}  // namespace

std::string record_to_json(const TrialRecord& r) {
  json j{{"fingerprint", r.fingerprint},
         {"method", r.method},
         {"sweep_axis", r.sweep_axis},
         {"sweep_value", r.sweep_value},
         {"sweep_index", r.sweep_index},
         {"trial", r.trial},
         {"seed", r.seed},
         {"evm", r.metrics.evm},
         {"ser", r.metrics.ser},
         {"ber", r.metrics.ber},
         {"rate_blind", r.metrics.rate_blind},
         {"rate_training", r.metrics.rate_training ? json(*r.metrics.rate_training) : json(nullptr)},
         {"normalized_objective",
          r.metrics.normalized_objective ? json(*r.metrics.normalized_objective) : json(nullptr)},
         {"iters", r.metrics.iters},
         {"stop_reason", r.stop_reason},
         {"final_eta", r.final_eta},
         {"gradient_evals", r.gradient_evals},
         {"objective_evals", r.objective_evals},
         {"error", r.error ? json(*r.error) : json(nullptr)}};
  return j.dump();
}

TrialRecord record_from_json(std::string_view line) {
  TrialRecord r;
  try {
    const json j = json::parse(line);
    r.fingerprint = j.at("fingerprint").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.sweep_axis = j.at("sweep_axis").get<std::string>();
    r.sweep_value = num(j, "sweep_value");
    r.sweep_index = j.at("sweep_index").get<int>();
    r.trial = j.at("trial").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.metrics.evm = num(j, "evm");
    r.metrics.ser = num(j, "ser");
    r.metrics.ber = num(j, "ber");
    r.metrics.rate_blind = num(j, "rate_blind");
    if (!j.at("rate_training").is_null()) r.metrics.rate_training = j.at("rate_training").get<double>();
    if (!j.at("normalized_objective").is_null()) {
      r.metrics.normalized_objective = j.at("normalized_objective").get<double>();
    }
    r.metrics.iters = j.at("iters").get<int>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    r.final_eta = num(j, "final_eta");
    r.gradient_evals = j.at("gradient_evals").get<int>();
    r.objective_evals = j.at("objective_evals").get<int>();
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad trial record: ") + e.what());
  }
  return r;
}

void write_trials_jsonl(const std::filesystem::path& path, const std::vector<TrialRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) out << record_to_json(r) << '\n';
  finish(out, path);
}

std::vector<TrialRecord> read_trials_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<TrialRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

SummaryStats summarize(const std::vector<double>& samples) {
  std::vector<double> v;
  for (double x : samples) {
    if (std::isfinite(x)) v.push_back(x);
  }
  SummaryStats s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) {
    s.mean = s.median = s.ci95 = kNaN;
    return s;
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / s.n;
  std::sort(v.begin(), v.end());
  s.median = s.n % 2 ? v[s.n / 2] : 0.5 * (v[s.n / 2 - 1] + v[s.n / 2]);
  if (s.n < 2) {
    s.ci95 = kNaN;
    return s;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  const double sd = std::sqrt(ss / (s.n - 1));
  const boost::math::students_t dist(s.n - 1);
  s.ci95 = boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

std::vector<SummaryRow> summary_rows(const std::vector<TrialRecord>& records) {
  struct Group {
    std::string method;
    std::string axis;
    int index;
    double value;
    std::vector<const TrialRecord*> recs;
  };
  std::vector<Group> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.method == r.method && g.index == r.sweep_index && g.axis == r.sweep_axis;
    });
    if (it == groups.end()) {
      groups.push_back({r.method, r.sweep_axis, r.sweep_index, r.sweep_value, {}});
      it = std::prev(groups.end());
    }
    it->recs.push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& g : groups) {
    int failures = 0;
    for (const auto* r : g.recs) failures += r->error ? 1 : 0;
    for (const auto& m : metric_getters()) {
      std::vector<double> xs;
      for (const auto* r : g.recs) xs.push_back(m.get(*r));
      rows.push_back({g.method, g.axis, g.value, m.name, failures, summarize(xs)});
    }
  }
  return rows;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "method,sweep_axis,sweep_value,metric,n,failures,mean,median,ci95\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.sweep_axis << ',' << fmt(r.sweep_value) << ',' << r.metric << ','
        << r.stats.n << ',' << r.failures << ',' << fmt(r.stats.mean) << ',' << fmt(r.stats.median)
        << ',' << fmt(r.stats.ci95) << '\n';
  }
  finish(out, path);
}

void write_plot_dat(const std::filesystem::path& path, std::string_view title,
                    const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  if (!title.empty()) out << "# " << title << '\n';
  out << '#';
  for (const auto& c : columns) out << ' ' << c;
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw std::invalid_argument("write_plot_dat: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << fmt(row[i]);
    out << '\n';
  }
  finish(out, path);
}

void write_timings_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& records) {
  auto out = open_out(path);
  out << "method,sweep_index,trial,wall_time\n";
  for (const auto& r : records) {
    out << r.method << ',' << r.sweep_index << ',' << r.trial << ',' << fmt(r.metrics.wall_time) << '\n';
  }
  finish(out, path);
}

void emit_summary(const std::vector<TrialRecord>& records, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto rows = summary_rows(records);
  write_summary_csv(out_dir / "summary.csv", rows);

  std::vector<std::string> methods;
  for (const auto& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  for (const auto& m : metric_getters()) {
    for (const auto& method : methods) {
      std::vector<std::vector<double>> data;
      std::string axis;
      for (const auto& r : rows) {
        if (r.method != method || r.metric != m.name || r.stats.n == 0) continue;
        axis = r.sweep_axis;
        data.push_back({r.sweep_value, r.stats.mean, r.stats.ci95});
      }
      if (data.empty()) continue;
      write_plot_dat(out_dir / ("plot_" + std::string(m.name) + "_" + method + ".dat"),
                     std::string(m.name) + " vs " + (axis.empty() ? "point" : axis) + ", method " + method,
                     {"x", "y", "y_err"}, data);
    }
  }
}

void emit_report(const std::vector<TrialRecord>& records, const std::filesystem::path& out_dir) {
  emit_summary(records, out_dir);
  write_trials_jsonl(out_dir / "trials.jsonl", records);
  write_timings_csv(out_dir / "timings.csv", records);
}

}  // namespace blindmimo
