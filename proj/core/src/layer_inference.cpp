#include "lids/layer_inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lids/error.hpp"

namespace lids {
namespace {

void check_noise_rank(Eigen::Index rows, Eigen::Index cols, int k) {
  const auto bound = std::min(rows, cols);
  if (k < 1 || k >= bound) {
    throw Error(ErrorCode::kRankTooLarge,
                "noise rank k = " + std::to_string(k) + " must satisfy 1 <= k < min(n, p) = " + std::to_string(bound));
  }
}

}  // namespace

double estimate_noise_sigma(const SvdStack& stack, Eigen::Index rows, Eigen::Index cols, int k) {
  check_noise_rank(rows, cols, k);
  const auto& lambda = stack.singular_values;
  const double residual = lambda.tail(lambda.size() - k).squaredNorm();
  const double n = static_cast<double>(rows);
  const double p = static_cast<double>(cols);
  const double kk = static_cast<double>(k);
  const double dof = std::max(1.0, n * p - kk * (n + p - kk));
  return std::max(kSigmaFloor, std::sqrt(residual / dof));
}

double estimate_noise_sigma(const Eigen::MatrixXd& x, int k) {
  check_noise_rank(x.rows(), x.cols(), k);
  return estimate_noise_sigma(compute_svd(x), x.rows(), x.cols(), k);
}

double two_sided_pvalue(double z) noexcept { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

LayerStats layer_zstats(const SvdStack& stack, double sigma_hat, int layer) {
  if (layer < 1 || layer > stack.rank_bound()) {
    throw Error(ErrorCode::kLayerOutOfRange,
                "layer " + std::to_string(layer) + " outside [1, " + std::to_string(stack.rank_bound()) + "]");
  }
  if (!(sigma_hat > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma_hat must be positive");
  const auto l = static_cast<Eigen::Index>(layer - 1);
  const double lambda = stack.singular_values(l);
  if (lambda <= kSigmaFloor) {
    throw Error(ErrorCode::kZeroSingularValue, "layer " + std::to_string(layer) + " has singular value " +
                                                   std::to_string(lambda));
  }
  LayerStats out;
  out.layer = layer;
  out.singular_value = lambda;
  out.sigma_hat = sigma_hat;
  out.z = (lambda * stack.signs[static_cast<std::size_t>(l)] / sigma_hat) * stack.left.col(l);
  out.pvalues = out.z.unaryExpr([](double z) { return two_sided_pvalue(z); });
  return out;
}

std::vector<std::size_t> bh_select(std::span<const double> pvalues, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::kInvalidArgument, "q must lie in (0, 1)");
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    if (!(pvalues[i] >= 0.0 && pvalues[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "p-value " + std::to_string(i) + " outside [0, 1]");
    }
  }
  const std::size_t m = pvalues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });

  std::size_t cutoff = 0;
  for (std::size_t i = m; i >= 1; --i) {
    if (pvalues[order[i - 1]] <= static_cast<double>(i) * q / static_cast<double>(m)) {
      cutoff = i;
      break;
    }
  }
  std::vector<std::size_t> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cutoff));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<WordEntry> recombine_words(const std::vector<TokenRecord>& tokens, std::span<const double> stats,
                                       std::span<const double> pvalues) {
  if (stats.size() != tokens.size() || pvalues.size() != tokens.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(tokens.size()) + " tokens, " +
                                                std::to_string(stats.size()) + " stats, " +
                                                std::to_string(pvalues.size()) + " p-values");
  }
  std::vector<WordEntry> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t j = i;
    while (j < tokens.size() && tokens[j].word_index == tokens[i].word_index) ++j;

    WordEntry entry;
    entry.stat = 0.0;
    entry.pvalue = 1.0;
    bool content = false;
    for (std::size_t k = i; k < j; ++k) {
      const auto& t = tokens[k];
      if (!(t.stopword() || t.punctuation() || t.special())) content = true;
      std::string_view piece = t.text;
      if (t.continuation() && piece.starts_with("##")) piece.remove_prefix(2);
      entry.word += piece;
      entry.stat = std::max(entry.stat, std::abs(stats[k]));
      entry.pvalue = std::min(entry.pvalue, pvalues[k]);
      entry.pieces.push_back(k);
    }
    if (content) out.push_back(std::move(entry));
    i = j;
  }
  return out;
}

std::size_t LayerKeywordSet::selected_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const WordEntry& e) { return e.selected; }));
}

bool KeywordClouds::any_selected() const {
  return std::any_of(layers.begin(), layers.end(), [](const LayerKeywordSet& s) { return s.selected_count() > 0; });
}

KeywordClouds keyword_clouds(const EmbeddedText& text, int layers, double q, int rank_for_noise,
                             const MaskPolicy& mask) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::kInvalidArgument, "q must lie in (0, 1)");
  const auto bound = std::min<Eigen::Index>(text.rows(), text.dim());
  if (layers < 1 || layers >= bound) {
    throw Error(ErrorCode::kRankTooLarge, "layer count " + std::to_string(layers) +
                                              " must satisfy 1 <= k <= min(n, p) - 1 = " + std::to_string(bound - 1));
  }
  const Eigen::MatrixXd x = mask.any() ? apply_row_mask(text, mask).to_double() : text.to_double();
  const SvdStack stack = compute_svd(x);

  KeywordClouds out;
  out.noise_rank = rank_for_noise;
  out.sigma_hat = estimate_noise_sigma(stack, x.rows(), x.cols(), rank_for_noise);

  for (int l = 1; l <= layers; ++l) {
    const LayerStats stats = layer_zstats(stack, out.sigma_hat, l);
    const std::span<const double> z(stats.z.data(), static_cast<std::size_t>(stats.z.size()));
    const std::span<const double> p(stats.pvalues.data(), static_cast<std::size_t>(stats.pvalues.size()));
    const auto rejected = bh_select(p, q);
    std::vector<bool> piece_selected(text.size(), false);
    for (auto i : rejected) piece_selected[i] = true;

    std::vector<WordEntry> words = recombine_words(text.tokens(), z, p);
    for (auto& w : words) {
      w.selected = std::any_of(w.pieces.begin(), w.pieces.end(), [&](std::size_t k) { return piece_selected[k]; });
    }

    // One entry per distinct word, first occurrence keeps its position.
    std::map<std::string, std::size_t> seen;
    std::vector<WordEntry> merged;
    for (auto& w : words) {
      auto [it, fresh] = seen.emplace(w.word, merged.size());
      if (fresh) {
        merged.push_back(std::move(w));
        continue;
      }
      auto& into = merged[it->second];
      into.stat = std::max(into.stat, w.stat);
      into.pvalue = std::min(into.pvalue, w.pvalue);
      into.selected = into.selected || w.selected;
      into.pieces.insert(into.pieces.end(), w.pieces.begin(), w.pieces.end());
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const WordEntry& a, const WordEntry& b) { return a.stat > b.stat; });

    out.layers.push_back(LayerKeywordSet{l, stats.singular_value, q, std::move(merged)});
  }
  return out;
}

}  // namespace lids
