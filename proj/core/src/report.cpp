#include "lids/report.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lids/error.hpp"
#include "lids/number_format.hpp"

namespace lids {
namespace {

constexpr double kZ975 = 1.959963984540054;

void require_paired(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_n) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "x has " + std::to_string(x.size()) + " values, y has " + std::to_string(y.size()));
  }
  if (x.size() < min_n) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least " + std::to_string(min_n) + " pairs, got " + std::to_string(x.size()));
  }
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::vector<double> double_centered(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> a(n * n);
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(v[i] - v[j]);
      a[i * n + j] = d;
      row_mean[i] += d;
    }
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] += grand - row_mean[i] - row_mean[j];
  }
  return a;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Resident set figures from /proc, in kB; -1 when unavailable.
long proc_status_kb(const char* key) {
  std::ifstream in("/proc/self/status");
  std::string line;
  const std::string prefix = std::string(key) + ":";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return std::strtol(line.c_str() + prefix.size(), nullptr, 10);
  }
  return -1;
}

bool reset_peak_rss() {
  std::ofstream out("/proc/self/clear_refs");
  if (!out) return false;
  out << "5";
  return static_cast<bool>(out.flush());
}

double rounded(double v) { return round_significant(v); }

nlohmann::ordered_json correlation_json(const CorrelationEstimate& c) {
  return {{"estimate", rounded(c.estimate)}, {"ci_low", rounded(c.ci_low)}, {"ci_high", rounded(c.ci_high)}};
}

}  // namespace

double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyInput, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ScoreDistribution summarize(std::string label, std::vector<double> scores) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "score set '" + label + "' is empty");
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorCode::kNonFiniteEntry, "score set '" + label + "' has a non-finite value");
  }
  ScoreDistribution d;
  d.label = std::move(label);
  d.mean = mean_of(scores);
  if (scores.size() > 1) {
    double ss = 0.0;
    for (double s : scores) ss += (s - d.mean) * (s - d.mean);
    d.sd = std::sqrt(ss / static_cast<double>(scores.size() - 1));
  }
  std::vector<double> sorted(scores);
  std::sort(sorted.begin(), sorted.end());
  d.min = sorted.front();
  d.max = sorted.back();
  d.q1 = quantile_sorted(sorted, 0.25);
  d.median = quantile_sorted(sorted, 0.5);
  d.q3 = quantile_sorted(sorted, 0.75);
  d.scores = std::move(scores);
  return d;
}

double sharpe_ratio(double mean, double sd) {
  if (!(sd > 0.0)) throw Error(ErrorCode::kZeroDispersion, "standard deviation " + std::to_string(sd));
  return mean / sd;
}

std::vector<std::vector<double>> rescale_unit_interval(const std::vector<std::vector<double>>& groups) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& g : groups) {
    for (double v : g) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) throw Error(ErrorCode::kDegenerateRange, "pooled scores have fewer than two distinct values");
  const double span = hi - lo;
  std::vector<std::vector<double>> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<double> r;
    r.reserve(g.size());
    for (double v : g) r.push_back(v == hi ? 1.0 : (v - lo) / span);
    out.push_back(std::move(r));
  }
  return out;
}

CorrelationEstimate pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require_paired(x, y, 3);
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw Error(ErrorCode::kZeroVariance, "a variable is constant");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double n = static_cast<double>(x.size());
  if (n <= 3.0) return {r, -1.0, 1.0};
  const double z = std::atanh(r);
  const double half = kZ975 / std::sqrt(n - 3.0);
  return {r, std::tanh(z - half), std::tanh(z + half)};
}

CorrelationEstimate kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  require_paired(x, y, 3);
  const std::size_t n = x.size();
  double concordant = 0.0, discordant = 0.0, ties_x = 0.0, ties_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ties_x += 1.0;
      if (dy == 0.0) ties_y += 1.0;
      if (dx == 0.0 || dy == 0.0) continue;
      ((dx > 0.0) == (dy > 0.0) ? concordant : discordant) += 1.0;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = std::sqrt((pairs - ties_x) * (pairs - ties_y));
  if (denom <= 0.0) throw Error(ErrorCode::kZeroVariance, "a variable is constant");
  const double tau = (concordant - discordant) / denom;
  const double nn = static_cast<double>(n);
  const double half = kZ975 * std::sqrt(2.0 * (2.0 * nn + 5.0) / (9.0 * nn * (nn - 1.0)));
  return {tau, std::max(-1.0, tau - half), std::min(1.0, tau + half)};
}

double distance_correlation_value(const std::vector<double>& x, const std::vector<double>& y) {
  require_paired(x, y, 4);
  const auto a = double_centered(x);
  const auto b = double_centered(y);
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa <= 0.0 || bb <= 0.0) throw Error(ErrorCode::kZeroDistanceVariance, "a variable is constant");
  // dCor^2 = dCov^2 / sqrt(dVarX^2 dVarY^2); the 1/n^2 factors cancel.
  return std::sqrt(std::clamp(ab / std::sqrt(aa * bb), 0.0, 1.0));
}

CorrelationEstimate distance_correlation(const std::vector<double>& x, const std::vector<double>& y, int resamples,
                                         std::uint64_t seed) {
  const double estimate = distance_correlation_value(x, y);
  const std::size_t n = x.size();
  std::vector<double> boot;
  boot.reserve(static_cast<std::size_t>(std::max(0, resamples)));
  std::vector<double> bx(n), by(n);
  for (int r = 0; r < resamples; ++r) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r))));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = pick(rng);
      bx[i] = x[k];
      by[i] = y[k];
    }
    try {
      boot.push_back(distance_correlation_value(bx, by));
    } catch (const Error&) {
      // resample collapsed to a constant; it carries no dependence information
    }
  }
  if (boot.empty()) return {estimate, estimate, estimate};
  std::sort(boot.begin(), boot.end());
  return {estimate, quantile_sorted(boot, 0.025), quantile_sorted(boot, 0.975)};
}

MetricCost measure_cost(const std::function<void()>& work) {
  const bool reset = reset_peak_rss();
  const long rss_before = proc_status_kb("VmRSS");
  rusage before{};
  getrusage(RUSAGE_SELF, &before);

  const auto start = std::chrono::steady_clock::now();
  work();
  const auto stop = std::chrono::steady_clock::now();

  MetricCost cost;
  cost.seconds = std::chrono::duration<double>(stop - start).count();
  const long hwm = proc_status_kb("VmHWM");
  if (reset && hwm >= 0 && rss_before >= 0) {
    cost.peak_mb = static_cast<double>(std::max(0L, hwm - rss_before)) / 1024.0;
  } else {
    rusage after{};
    getrusage(RUSAGE_SELF, &after);
    cost.peak_mb = static_cast<double>(std::max(0L, after.ru_maxrss - before.ru_maxrss)) / 1024.0;
  }
  return cost;
}

EvaluationReport build_report(const ReportInputs& inputs) {
  if (inputs.sets.empty()) throw Error(ErrorCode::kEmptyInput, "a report needs at least one score set");
  EvaluationReport report;
  report.seed = inputs.seed;
  report.timings_s = inputs.timings_s;
  report.memory_mb = inputs.memory_mb;

  std::set<std::string> labels;
  std::vector<std::string> metric_order;
  std::map<std::string, std::vector<const ScoreSet*>> by_metric;
  for (const auto& set : inputs.sets) {
    const std::string label = set.metric == "lids" ? set.label : set.metric + "/" + set.label;
    if (!labels.insert(label).second) throw Error(ErrorCode::kInvalidArgument, "duplicate score set '" + label + "'");
    report.distributions.push_back(summarize(label, set.scores));
    const auto& d = report.distributions.back();
    if (d.sd > 0.0) {
      report.sharpe[label] = sharpe_ratio(d.mean, d.sd);
    } else {
      report.notes.push_back("sharpe omitted for '" + label + "': zero dispersion");
    }
    if (!by_metric.count(set.metric)) metric_order.push_back(set.metric);
    by_metric[set.metric].push_back(&set);
  }

  for (const auto& metric : metric_order) {
    const auto& sets = by_metric[metric];
    if (sets.size() < 2) continue;
    std::vector<std::vector<double>> groups;
    std::vector<std::string> names;
    for (const auto* s : sets) {
      groups.push_back(s->scores);
      names.push_back(s->label);
    }
    try {
      report.rescaled[metric] = rescale_unit_interval(groups);
      report.rescaled_labels[metric] = std::move(names);
    } catch (const Error& e) {
      report.notes.push_back("rescaling skipped for '" + metric + "': " + e.what());
    }
  }

  if (inputs.human) {
    const auto& human = *inputs.human;
    const ScoreSet* paired = &inputs.sets.front();
    if (!human.paired_label.empty()) {
      auto it = std::find_if(inputs.sets.begin(), inputs.sets.end(),
                             [&](const ScoreSet& s) { return s.label == human.paired_label; });
      if (it == inputs.sets.end()) {
        throw Error(ErrorCode::kInvalidArgument, "human scores paired with unknown set '" + human.paired_label + "'");
      }
      paired = &*it;
    }
    std::map<std::string, CorrelationEstimate> corr;
    corr["pearson"] = pearson(human.scores, paired->scores);
    corr["kendall"] = kendall_tau(human.scores, paired->scores);
    corr["dcor"] = distance_correlation(human.scores, paired->scores, kDcorResamples, inputs.seed);
    report.correlations = std::move(corr);
    report.correlation_label = paired->label;
  }
  return report;
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json doc;
  auto& dists = doc["distributions"] = nlohmann::ordered_json::array();
  for (const auto& d : report.distributions) {
    dists.push_back({{"label", d.label},
                     {"n", d.scores.size()},
                     {"mean", rounded(d.mean)},
                     {"sd", rounded(d.sd)},
                     {"min", rounded(d.min)},
                     {"q1", rounded(d.q1)},
                     {"median", rounded(d.median)},
                     {"q3", rounded(d.q3)},
                     {"max", rounded(d.max)}});
  }
  auto& sharpe = doc["sharpe"] = nlohmann::ordered_json::object();
  for (const auto& d : report.distributions) {
    if (auto it = report.sharpe.find(d.label); it != report.sharpe.end()) sharpe[d.label] = rounded(it->second);
  }
  auto& rescaled = doc["rescaled"] = nlohmann::ordered_json::object();
  for (const auto& [metric, groups] : report.rescaled) {
    auto& arr = rescaled[metric] = nlohmann::ordered_json::array();
    for (const auto& g : groups) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (double v : g) row.push_back(rounded(v));
      arr.push_back(std::move(row));
    }
  }
  if (!report.rescaled_labels.empty()) doc["rescaled_labels"] = report.rescaled_labels;
  if (report.correlations) {
    auto& corr = doc["correlations"] = nlohmann::ordered_json::object();
    for (const char* kind : {"pearson", "kendall", "dcor"}) corr[kind] = correlation_json(report.correlations->at(kind));
    doc["correlation_pair"] = {{"human", "human"}, {"metric_label", report.correlation_label}};
  } else {
    doc["correlations"] = nullptr;
  }
  auto& timings = doc["timings_s"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.timings_s) timings[k] = rounded(v);
  auto& memory = doc["memory_mb"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.memory_mb) memory[k] = rounded(v);
  doc["seed"] = report.seed;
  if (!report.notes.empty()) doc["notes"] = report.notes;
  return doc.dump(2) + "\n";
}

std::string render_table(const EvaluationReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %5s %10s %10s %10s %10s %12s\n", "label", "n", "mean", "sd", "median",
                "max", "sharpe");
  out << line;
  for (const auto& d : report.distributions) {
    const auto it = report.sharpe.find(d.label);
    const std::string sharpe = it == report.sharpe.end() ? "-" : format_significant(it->second, 7);
    std::snprintf(line, sizeof line, "%-28s %5zu %10.6f %10.6f %10.6f %10.6f %12s\n", d.label.c_str(),
                  d.scores.size(), d.mean, d.sd, d.median, d.max, sharpe.c_str());
    out << line;
  }
  if (report.correlations) {
    out << "\ncorrelation with human scores (" << report.correlation_label << ")\n";
    for (const char* kind : {"pearson", "kendall", "dcor"}) {
      const auto& c = report.correlations->at(kind);
      std::snprintf(line, sizeof line, "  %-8s %9.6f  [%9.6f, %9.6f]\n", kind, c.estimate, c.ci_low, c.ci_high);
      out << line;
    }
  }
  if (!report.timings_s.empty()) {
    out << "\ncost\n";
    for (const auto& [metric, seconds] : report.timings_s) {
      const auto mem = report.memory_mb.find(metric);
      std::snprintf(line, sizeof line, "  %-12s %10.6f s %10.3f MB\n", metric.c_str(), seconds,
                    mem == report.memory_mb.end() ? 0.0 : mem->second);
      out << line;
    }
  }
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  return out.str();
}

}  // namespace lids
