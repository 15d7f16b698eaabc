#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "blindmimo/harness.hpp"

namespace blindmimo {

/// One JSON object per record. Non-finite numbers become null. wall_time is
/// left out so that identical runs give identical bytes.
std::string record_to_json(const TrialRecord& rec);
TrialRecord record_from_json(std::string_view line);

void write_trials_jsonl(const std::filesystem::path& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_trials_jsonl(const std::filesystem::path& path);

struct SummaryStats {
  int n = 0;           // finite samples
  double mean = 0.0;
  double median = 0.0;
  double ci95 = 0.0;   // half width, Student t with n - 1 dof; NaN for n < 2
};

/// Statistics over the finite entries of samples; all NaN when there are none.
SummaryStats summarize(const std::vector<double>& samples);

struct SummaryRow {
  std::string method;
  std::string sweep_axis;
  double sweep_value = 0.0;
  std::string metric;
  int failures = 0;  // records carrying an error
  SummaryStats stats;
};

/// Rows ordered by first appearance of (method, sweep point), then metric.
std::vector<SummaryRow> summary_rows(const std::vector<TrialRecord>& records);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

/// Space-delimited numeric table with a '#' header naming the columns.
void write_plot_dat(const std::filesystem::path& path, std::string_view title,
                    const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows);

void write_timings_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& records);

/// summary.csv and plot_<metric>_<method>.dat (x = sweep value, y = mean,
/// y_err = ci95) under out_dir.
void emit_summary(const std::vector<TrialRecord>& records, const std::filesystem::path& out_dir);

/// emit_summary plus trials.jsonl and timings.csv.
void emit_report(const std::vector<TrialRecord>& records, const std::filesystem::path& out_dir);

}  // namespace blindmimo
