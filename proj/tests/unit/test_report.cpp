#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "lids/error.hpp"
#include "lids/report.hpp"
#include "test_support.hpp"

using namespace lids;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::vector<double> read_column(const std::filesystem::path& p, int column) {
  std::ifstream in(p);
  std::string line;
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double a, b;
    row >> a >> b;
    out.push_back(column == 0 ? a : b);
  }
  return out;
}

}  // namespace

TEST(Sharpe, TableRows) {
  EXPECT_NEAR(sharpe_ratio(0.675266, 0.006546), 103.158, 0.01);
  EXPECT_NEAR(sharpe_ratio(0.775645, 0.033374), 23.241, 0.005);
  EXPECT_EQ(code_of([] { sharpe_ratio(0.5, 0.0); }), ErrorCode::kZeroDispersion);
}

TEST(Sharpe, ScaleInvariant) {
  for (double c : {0.01, 3.0, 1e4}) EXPECT_NEAR(sharpe_ratio(c * 0.7, c * 0.02), sharpe_ratio(0.7, 0.02), 1e-9);
}

TEST(Summarize, MatchesRecomputation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(2 + trial));
    for (auto& v : s) v = u(rng);
    const auto d = summarize("x", s);
    double mean = 0;
    for (double v : s) mean += v;
    mean /= s.size();
    double ss = 0;
    for (double v : s) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(d.mean, mean, 1e-12);
    EXPECT_NEAR(d.sd, std::sqrt(ss / (s.size() - 1)), 1e-12);
    EXPECT_EQ(d.min, *std::min_element(s.begin(), s.end()));
    EXPECT_EQ(d.max, *std::max_element(s.begin(), s.end()));
    EXPECT_LE(d.q1, d.median);
    EXPECT_LE(d.median, d.q3);
  }
  const auto q = summarize("q", {1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(q.q1, 1.75);
  EXPECT_DOUBLE_EQ(q.median, 2.5);
  EXPECT_DOUBLE_EQ(q.q3, 3.25);
  EXPECT_EQ(summarize("one", {0.4}).sd, 0.0);
  EXPECT_EQ(code_of([] { summarize("none", {}); }), ErrorCode::kEmptyInput);
}

TEST(Rescale, Examples) {
  const auto r = rescale_unit_interval({{2, 4}, {6}});
  EXPECT_EQ(r, (std::vector<std::vector<double>>{{0, 0.5}, {1}}));
  const std::vector<std::vector<double>> unit{{0, 0.25}, {1, 0.5}};
  EXPECT_EQ(rescale_unit_interval(unit), unit);
  EXPECT_EQ(code_of([] { rescale_unit_interval({{3, 3}, {3}}); }), ErrorCode::kDegenerateRange);
}

TEST(Rescale, AffineOrderPreserving) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<std::vector<double>> g(3, std::vector<double>(7));
  for (auto& grp : g) {
    for (auto& v : grp) v = u(rng);
  }
  const auto r = rescale_unit_interval(g);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t j = 0; j < 7; ++j) {
          if (g[a][i] < g[b][j]) EXPECT_LT(r[a][i], r[b][j]);
        }
      }
    }
  }
  // relative spacing
  const double ratio = (g[0][1] - g[0][0]) / (g[1][1] - g[1][0]);
  EXPECT_NEAR((r[0][1] - r[0][0]) / (r[1][1] - r[1][0]), ratio, 1e-9);
}

TEST(Correlation, Trivial) {
  const std::vector<double> x{1, 2, 3, 4, 5, 7};
  std::vector<double> lin, neg, aff;
  for (double v : x) {
    lin.push_back(2 * v + 1);
    neg.push_back(-v);
    aff.push_back(3 * v - 5);
  }
  EXPECT_NEAR(pearson(x, lin).estimate, 1.0, 1e-12);
  EXPECT_NEAR(pearson(x, neg).estimate, -1.0, 1e-12);
  EXPECT_NEAR(kendall_tau(x, x).estimate, 1.0, 1e-12);
  EXPECT_NEAR(kendall_tau(x, neg).estimate, -1.0, 1e-12);
  EXPECT_NEAR(distance_correlation_value(x, x), 1.0, 1e-12);
  EXPECT_NEAR(distance_correlation_value(x, aff), 1.0, 1e-12);
  EXPECT_EQ(kendall_tau({1, 2, 3, 4}, {1, 3, 2, 4}).estimate, 2.0 / 3.0);
}

TEST(Correlation, Errors) {
  EXPECT_EQ(code_of([] { pearson({1, 2, 3}, {1, 2}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { pearson({1, 1, 1}, {1, 2, 3}); }), ErrorCode::kZeroVariance);
  EXPECT_EQ(code_of([] { kendall_tau({1, 2}, {1, 2, 3}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { distance_correlation_value({2, 2, 2, 2}, {1, 2, 3, 4}); }),
            ErrorCode::kZeroDistanceVariance);
}

TEST(Correlation, BruteForceOracles) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0, 1);
  std::uniform_int_distribution<int> tie(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 9);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = trial % 3 == 0 ? tie(rng) : z(rng);
      y[i] = 0.5 * x[i] + (trial % 3 == 0 ? tie(rng) : z(rng));
    }
    try {
      EXPECT_NEAR(pearson(x, y).estimate, support::brute_pearson(x, y), 1e-10);
      EXPECT_NEAR(kendall_tau(x, y).estimate, support::brute_kendall_b(x, y), 1e-10);
      const double d = distance_correlation_value(x, y);
      EXPECT_NEAR(d, support::brute_dcor(x, y), 1e-10);
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
    } catch (const Error&) {
      // constant draw in a tied trial; nothing to compare
    }
  }
}

TEST(Correlation, Invariances) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0, 1);
  std::vector<double> x(15), y(15), ax, ey;
  for (std::size_t i = 0; i < 15; ++i) {
    x[i] = z(rng);
    y[i] = x[i] + z(rng);
    ax.push_back(4 * x[i] + 2);
    ey.push_back(std::exp(y[i]));
  }
  EXPECT_NEAR(pearson(ax, y).estimate, pearson(x, y).estimate, 1e-12);
  EXPECT_NEAR(kendall_tau(x, ey).estimate, kendall_tau(x, y).estimate, 1e-12);
}

TEST(Correlation, ConfidenceIntervals) {
  const auto fixture = support::fixture_dir() / "human_vs_metric.tsv";
  const auto h = read_column(fixture, 0), m = read_column(fixture, 1);
  ASSERT_EQ(h.size(), 30u);
  const auto p = pearson(h, m);
  EXPECT_NEAR(p.estimate, support::brute_pearson(h, m), 1e-12);
  const double half = 1.959963984540054 / std::sqrt(27.0);
  EXPECT_NEAR(p.ci_low, std::tanh(std::atanh(p.estimate) - half), 1e-12);
  EXPECT_NEAR(p.ci_high, std::tanh(std::atanh(p.estimate) + half), 1e-12);

  const auto k = kendall_tau(h, m);
  const double kh = 1.959963984540054 * std::sqrt(2.0 * 65.0 / (9.0 * 30.0 * 29.0));
  EXPECT_NEAR(k.ci_high - k.estimate, std::min(kh, 1.0 - k.estimate), 1e-12);

  const auto d1 = distance_correlation(h, m, 500, 7);
  const auto d2 = distance_correlation(h, m, 500, 7);
  EXPECT_EQ(d1.ci_low, d2.ci_low);
  EXPECT_EQ(d1.ci_high, d2.ci_high);
  EXPECT_LE(d1.ci_low, d1.ci_high);
  EXPECT_GE(d1.ci_low, 0.0);
  EXPECT_LE(d1.ci_high, 1.0);
}

TEST(Report, SingleDistribution) {
  ReportInputs in;
  in.sets.push_back({"llm", "lids", {0.9, 0.92, 0.95}});
  const auto r = build_report(in);
  ASSERT_EQ(r.distributions.size(), 1u);
  EXPECT_EQ(r.sharpe.count("llm"), 1u);
  EXPECT_TRUE(r.rescaled.empty());
  EXPECT_FALSE(r.correlations);
  const auto doc = nlohmann::json::parse(report_to_json(r));
  EXPECT_TRUE(doc["correlations"].is_null());
  EXPECT_EQ(doc["seed"], kDefaultSeed);
}

TEST(Report, ThreeDistributionsAndHuman) {
  ReportInputs in;
  in.sets.push_back({"llm", "lids", {0.95, 0.96, 0.97, 0.94}});
  in.sets.push_back({"naive", "lids", {0.90, 0.91, 0.905, 0.92}});
  in.sets.push_back({"topic", "lids", {0.80, 0.85, 0.83, 0.84}});
  in.human = HumanScores{{4, 5, 4.5, 3}, "llm"};
  const auto r = build_report(in);
  EXPECT_EQ(r.sharpe.size(), 3u);
  for (const auto& [label, _] : r.sharpe) {
    EXPECT_TRUE(std::any_of(r.distributions.begin(), r.distributions.end(),
                            [&](const ScoreDistribution& d) { return d.label == label; }));
  }
  const auto& groups = r.rescaled.at("lids");
  EXPECT_EQ(groups, rescale_unit_interval({in.sets[0].scores, in.sets[1].scores, in.sets[2].scores}));
  ASSERT_TRUE(r.correlations);
  EXPECT_EQ(r.correlations->size(), 3u);
  const auto doc = nlohmann::json::parse(report_to_json(r));
  for (const char* k : {"pearson", "kendall", "dcor"}) EXPECT_TRUE(doc["correlations"].contains(k));
  EXPECT_EQ(report_to_json(r), report_to_json(build_report(in)));
  EXPECT_NE(render_table(r).find("naive"), std::string::npos);
}

TEST(Report, ZeroDispersionNoted) {
  ReportInputs in;
  in.sets.push_back({"flat", "lids", {0.5, 0.5}});
  const auto r = build_report(in);
  EXPECT_TRUE(r.sharpe.empty());
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_THROW(build_report(ReportInputs{}), Error);
}

TEST(MeasureCost, ReportsTimeAndMemory) {
  const auto cost = measure_cost([] {
    std::vector<char> block(64 << 20, 1);
    volatile char sink = block[block.size() / 2];
    (void)sink;
  });
  EXPECT_GT(cost.seconds, 0.0);
  EXPECT_GT(cost.peak_mb, 16.0);
}
