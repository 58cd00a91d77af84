// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "lids/baseline.hpp"
#include "lids/embedding_store.hpp"
#include "lids/layer_inference.hpp"
#include "lids/metric.hpp"
#include "lids/reference_metrics.hpp"
#include "lids/report.hpp"
#include "lids/svd_layers.hpp"
#include "test_support.hpp"

using namespace lids;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.require(false, fmt("runtime %.3f s over budget", secs));
  }
  std::printf("%s %-24s %8.3fs  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::vector<EmbeddedText> fixture_battery() {
  std::mt19937_64 rng(20250917);
  std::uniform_int_distribution<int> rows(2, 40), cols(2, 16);
  std::vector<EmbeddedText> out;
  while (out.size() < 200) {
    auto t = support::random_text(rng, rows(rng), cols(rng));
    out.push_back(std::move(t));
  }
  return out;
}

Outcome sharpe_arithmetic() {
  Outcome o;
  const double a = sharpe_ratio(0.675266, 0.006546);
  const double b = sharpe_ratio(0.775645, 0.033374);
  const double c = sharpe_ratio(0.961594, 0.003868);
  o.require(std::abs(a - 103.158) <= 0.01, fmt("row 1 = %.4f", a));
  o.require(std::abs(b - 23.241) <= 0.005, fmt("row 2 = %.4f", b));
  o.require(std::abs(c - 248.6) <= 0.1, fmt("top row = %.3f", c));
  if (o.pass) o.detail = fmt("103.158/23.241/248.6 -> %.4f", a) + fmt(" %.4f", b) + fmt(" %.3f", c);
  return o;
}

Outcome metric_axioms(const std::vector<EmbeddedText>& battery) {
  Outcome o;
  double worst_self = 0.0;
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto& t = battery[i];
    const auto& other = battery[(i + 1) % battery.size()];
    if (t.dim() == other.dim()) {
      const auto r = macs(other.to_double(), t.to_double());
      o.require(r.score >= 0.0 && r.score <= 1.0, fmt("score %.17g outside [0,1]", r.score));
    }
    const Eigen::MatrixXd x = t.to_double();
    const auto self = macs(x, x);
    worst_self = std::max(worst_self, std::abs(self.score - 1.0));
    o.require(self.score >= 0.0 && self.score <= 1.0, "self score outside [0,1]");

    const Eigen::MatrixXd ref = other.dim() == t.dim() ? other.to_double() : x.reverse().eval();
    const auto base = macs(ref, x);
    for (double c : {0.1, 7.3}) {
      const auto scaled = macs(ref, Eigen::MatrixXd(c * x));
      o.require(std::abs(scaled.score - base.score) <= 1e-9 && scaled.k_hat == base.k_hat,
                fmt("scale invariance broken at c = %g", c));
    }

    const auto stack = compute_svd(x);
    SvdStack flipped = stack;
    for (Eigen::Index l = 0; l < flipped.rank_bound(); l += 2) {
      flipped.left.col(l) *= -1.0;
      flipped.right.col(l) *= -1.0;
      flipped.signs[static_cast<std::size_t>(l)] = layer_sign(flipped.right.col(l));
    }
    for (int k = 1; k <= stack.rank_bound(); ++k) {
      const auto a = direction_vector(x, stack, k).values;
      const auto b = direction_vector(x, flipped, k).values;
      o.require((a - b).norm() <= 1e-9 * std::max(1.0, a.norm()), "sign flip changed d(k)");
    }
  }
  o.require(worst_self <= 1e-9, fmt("|macs(t,t) - 1| = %.3g", worst_self));
  if (o.pass) o.detail = fmt("200 fixtures, max |macs(t,t)-1| = %.2g", worst_self);
  return o;
}

Outcome svd_contract(const std::vector<EmbeddedText>& battery) {
  Outcome o;
  double recon = 0.0, ortho = 0.0;
  for (const auto& t : battery) {
    const Eigen::MatrixXd x = t.to_double();
    if (x.norm() == 0.0) continue;
    const auto s = compute_svd(x);
    const Eigen::MatrixXd back = s.left * s.singular_values.asDiagonal() * s.right.transpose();
    recon = std::max(recon, (x - back).norm() / x.norm());
    const auto r = s.rank_bound();
    // columns with a zero singular value carry no constraint on the factor
    Eigen::Index live = 0;
    while (live < r && s.singular_values(live) > 1e-10 * s.singular_values(0)) ++live;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(live, live);
    ortho = std::max(ortho, (s.left.leftCols(live).transpose() * s.left.leftCols(live) - id).cwiseAbs().maxCoeff());
    ortho = std::max(ortho, (s.right.leftCols(live).transpose() * s.right.leftCols(live) - id).cwiseAbs().maxCoeff());
    for (Eigen::Index l = 1; l < r; ++l) o.require(s.singular_values(l) <= s.singular_values(l - 1), "unsorted");
  }
  o.require(recon <= 1e-5, fmt("reconstruction %.3g", recon));
  o.require(ortho <= 1e-6, fmt("orthonormality %.3g", ortho));
  if (o.pass) o.detail = fmt("recon %.2g", recon) + fmt(", ortho %.2g", ortho);
  return o;
}

Outcome separation() {
  Outcome o;
  const auto dir = support::bundle_dir();
  const auto article = load_embedded_text_file(dir / "article.lids");
  std::map<std::string, std::vector<double>> scores;
  for (const std::string kind : {"good", "topic", "naive"}) {
    std::vector<EmbeddedText> texts;
    for (int i = 1; i <= 10; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%s_%02d.lids", kind.c_str(), i);
      texts.push_back(load_embedded_text_file(dir / name));
    }
    for (const auto& item : score_batch(article, texts)) {
      if (!item.result) throw std::runtime_error(item.error);
      scores[kind].push_back(item.result->score);
    }
  }
  const double good = *std::min_element(scores["good"].begin(), scores["good"].end());
  const double topic = *std::max_element(scores["topic"].begin(), scores["topic"].end());
  const double naive = *std::max_element(scores["naive"].begin(), scores["naive"].end());
  o.detail = fmt("min good %.4f", good) + fmt(" > max topic %.4f", topic) + fmt(" > max naive %.4f", naive);
  o.require(good > topic && topic > naive, o.detail);
  return o;
}

Outcome bh_oracle() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> size(1, 64);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = static_cast<std::size_t>(size(rng));
    std::vector<double> p(m);
    const int regime = trial % 4;
    for (auto& v : p) {
      v = unif(rng);
      if (regime == 1) v = std::pow(v, 6.0);        // many small values
      if (regime == 2) v = std::round(v * 20) / 20;  // ties
      if (regime == 3 && unif(rng) < 0.3) v *= 1e-4;
    }
    std::vector<std::size_t> previous;
    for (double q : {0.005, 0.05, 0.2}) {
      const auto got = bh_select(p, q);
      o.require(got == support::oracle_bh(p, q), "bh_select differs from brute force");
      o.require(std::includes(got.begin(), got.end(), previous.begin(), previous.end()), "not monotone in q");
      previous = got;
      ++checked;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " (vector, q) cases equal, monotone";
  return o;
}

Outcome inference_calibration() {
  Outcome o;
  const double q = kDefaultFdrQ;
  const int layers = 3;
  double fdp_sum = 0.0;
  int fdp_count = 0;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(seed));
    const auto text = support::text_from(support::planted_matrix(rng, 60, 60, 0, 0.0));
    const auto clouds = keyword_clouds(text, layers, q, layers);
    for (const auto& layer : clouds.layers) {
      // under pure noise every selection is false
      fdp_sum += layer.selected_count() > 0 ? 1.0 : 0.0;
      ++fdp_count;
    }
  }
  const double fdp = fdp_sum / fdp_count;

  int recovered = 0;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(5000 + static_cast<std::uint64_t>(seed));
    const auto text = support::text_from(support::planted_matrix(rng, 60, 60, 5, 30.0));
    const auto clouds = keyword_clouds(text, 1, q, 1);
    int hits = 0;
    for (const auto& e : clouds.layers[0].entries) {
      if (e.selected && (e.word == "w0" || e.word == "w1" || e.word == "w2" || e.word == "w3" || e.word == "w4")) ++hits;
    }
    if (hits == 5) ++recovered;
  }
  const double rate = recovered / 200.0;
  o.detail = fmt("null FDP %.4f", fdp) + fmt(" (limit %.3f)", 2 * q) + fmt(", planted recovery %.3f", rate);
  o.require(fdp <= 2 * q, o.detail);
  o.require(rate >= 0.95, o.detail);
  return o;
}

Outcome correlation_oracles() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> size(4, 12);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(size(rng));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = z(rng);
      y[i] = 0.5 * x[i] + z(rng);
      if (trial % 3 == 0) {
        x[i] = std::round(x[i]);  // ties for tau-b
        y[i] = std::round(y[i]);
      }
    }
    worst = std::max(worst, std::abs(pearson(x, y).estimate - support::brute_pearson(x, y)));
    worst = std::max(worst, std::abs(kendall_tau(x, y).estimate - support::brute_kendall_b(x, y)));
    worst = std::max(worst, std::abs(distance_correlation_value(x, y) - support::brute_dcor(x, y)));
  }
  const double tau = kendall_tau({1, 2, 3, 4}, {1, 3, 2, 4}).estimate;
  o.require(worst <= 1e-10, fmt("max deviation %.3g", worst));
  o.require(tau == 2.0 / 3.0, fmt("kendall example %.17g", tau));
  if (o.pass) o.detail = fmt("max deviation %.2g, tau example = 2/3", worst);
  return o;
}

Outcome baseline_metrics() {
  Outcome o;
  const double r1 = rouge1(overlap_tokens("the cat sat"), overlap_tokens("the cat")).f1;
  const double rl = rougeL(overlap_tokens("a b c d e"), overlap_tokens("a c e")).recall;
  const auto words = overlap_tokens("the quick brown fox jumps over the lazy dog");
  const double b = bleu(words, words);
  o.require(std::abs(r1 - 0.8) <= 1e-12, fmt("rouge1 F1 %.17g", r1));
  o.require(std::abs(rl - 0.6) <= 1e-12, fmt("rougeL recall %.17g", rl));
  o.require(std::abs(b - 1.0) <= 1e-12, fmt("bleu %.17g", b));
  double worst = 0.0;
  for (const auto& entry : fs::directory_iterator(support::bundle_dir())) {
    if (entry.path().extension() != ".lids") continue;
    const auto t = load_embedded_text_file(entry.path());
    worst = std::max(worst, std::abs(bertscore(t, t).f1 - 1.0));
  }
  o.require(worst <= 1e-9, fmt("bertscore self F1 off by %.3g", worst));
  if (o.pass) o.detail = fmt("rouge1 %.3f", r1) + fmt(", rougeL R %.3f", rl) + fmt(", bleu %.3f", b);
  return o;
}

Outcome naive_statistics() {
  Outcome o;
  std::ifstream in(support::bundle_dir() / "text" / "article.txt");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto words = split_words(buf.str());
  std::map<std::string, double> expected;
  for (const auto& w : words) expected[w] += 1.0 / static_cast<double>(words.size());
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = naive_summary(words, 10000, seed);
    o.require(s.words.size() == 10000, "length contract");
    std::map<std::string, double> got;
    for (const auto& w : s.words) {
      o.require(expected.count(w) > 0, "word outside the reference");
      got[w] += 1.0 / 10000.0;
    }
    for (const auto& [w, f] : expected) worst = std::max(worst, std::abs(got[w] - f));
  }
  o.require(worst <= 0.01, fmt("max frequency deviation %.4f", worst));
  if (o.pass) o.detail = fmt("max frequency deviation %.4f over 20 seeds", worst);
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto dir = support::bundle_dir();
  cli::ScoreOptions opt{dir / "article.lids", {}, false};
  for (const char* name : {"good_01.lids", "topic_04.lids", "naive_07.lids", "good_10.lids"}) {
    opt.summaries.push_back(dir / name);
  }
  cli::RunConfig config;
  std::ostringstream a, b, err;
  o.require(cli::cmd_score(opt, config, a, err) == cli::kExitOk, err.str());
  config.threads = 3;
  o.require(cli::cmd_score(opt, config, b, err) == cli::kExitOk, err.str());
  o.require(!a.str().empty() && a.str() == b.str(), "cmd_score output differs");

  const auto text = load_embedded_text_file(dir / "good_02.lids");
  for (auto format : {CloudFormat::kJson, CloudFormat::kSvg}) {
    const auto first = emit_cloud(keyword_clouds(text, 3, 0.05, 3), format);
    const auto second = emit_cloud(keyword_clouds(text, 3, 0.05, 3), format);
    o.require(first == second, "emit_cloud output differs");
  }
  if (o.pass) o.detail = "cmd_score and emit_cloud byte-identical";
  return o;
}

}  // namespace

int main() {
  const auto battery = fixture_battery();
  criterion("sharpe-arithmetic", 0.001, sharpe_arithmetic);
  criterion("metric-axioms", 30.0, [&] { return metric_axioms(battery); });
  criterion("svd-contract", 0, [&] { return svd_contract(battery); });
  criterion("benchmark-separation", 60.0, separation);
  criterion("bh-oracle", 0, bh_oracle);
  criterion("inference-calibration", 300.0, inference_calibration);
  criterion("correlation-oracles", 0, correlation_oracles);
  criterion("baseline-metrics", 0, baseline_metrics);
  criterion("naive-statistics", 0, naive_statistics);
  criterion("determinism", 0, determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
