#pragma once

// Evaluation statistics: score distributions, Sharpe ratios, pooled [0,1]
// rescaling, correlation estimates with confidence intervals, the
// timing/memory harness, and report assembly.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lids {

struct ScoreDistribution {
  std::string label;
  std::vector<double> scores;
  double mean = 0.0;
  double sd = 0.0;  // sample (n - 1); 0 for a single score
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Quartiles use linear interpolation between order statistics.
ScoreDistribution summarize(std::string label, std::vector<double> scores);
double quantile_sorted(const std::vector<double>& sorted, double prob);

double sharpe_ratio(double mean, double sd);

// Affine map of the pooled min/max onto [0, 1], applied to every group.
std::vector<std::vector<double>> rescale_unit_interval(const std::vector<std::vector<double>>& groups);

struct CorrelationEstimate {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline constexpr std::uint64_t kDefaultSeed = 20250917;
inline constexpr int kDcorResamples = 2000;

// 95% CI by Fisher z with standard error 1/sqrt(n - 3).
CorrelationEstimate pearson(const std::vector<double>& x, const std::vector<double>& y);
// tau-b; 95% CI from the normal approximation var = 2(2n + 5) / (9n(n - 1)).
CorrelationEstimate kendall_tau(const std::vector<double>& x, const std::vector<double>& y);
// Double-centred (V-statistic) distance correlation; percentile bootstrap CI.
double distance_correlation_value(const std::vector<double>& x, const std::vector<double>& y);
CorrelationEstimate distance_correlation(const std::vector<double>& x, const std::vector<double>& y,
                                         int resamples = kDcorResamples, std::uint64_t seed = kDefaultSeed);

struct MetricCost {
  double seconds = 0.0;
  double peak_mb = 0.0;  // growth of the resident high-water mark during the run
};

MetricCost measure_cost(const std::function<void()>& work);

struct ScoreSet {
  std::string label;
  std::string metric = "lids";
  std::vector<double> scores;
};

struct HumanScores {
  std::vector<double> scores;
  std::string paired_label;  // score set compared with the human ratings
};

struct ReportInputs {
  std::vector<ScoreSet> sets;
  std::optional<HumanScores> human;
  std::map<std::string, double> timings_s;
  std::map<std::string, double> memory_mb;
  std::uint64_t seed = kDefaultSeed;
};

struct EvaluationReport {
  std::vector<ScoreDistribution> distributions;
  std::map<std::string, double> sharpe;
  std::map<std::string, std::vector<std::vector<double>>> rescaled;
  std::map<std::string, std::vector<std::string>> rescaled_labels;
  std::optional<std::map<std::string, CorrelationEstimate>> correlations;  // pearson, kendall, dcor
  std::string correlation_label;
  std::map<std::string, double> timings_s;
  std::map<std::string, double> memory_mb;
  std::vector<std::string> notes;
  std::uint64_t seed = kDefaultSeed;
};

EvaluationReport build_report(const ReportInputs& inputs);
std::string report_to_json(const EvaluationReport& report);
std::string render_table(const EvaluationReport& report);

}  // namespace lids
