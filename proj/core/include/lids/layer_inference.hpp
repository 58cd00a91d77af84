#pragma once

// Per-layer keyword selection. Component statistics for the left singular
// vectors use a first-order plug-in (SE(u_li) ~ sigma_hat / lambda_l) in
// place of full SOFARI debiasing; Benjamini-Hochberg controls the FDR per
// layer; wordpieces are recombined into words for display.

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lids/embedding_store.hpp"
#include "lids/svd_layers.hpp"

namespace lids {

inline constexpr double kSigmaFloor = 1e-12;
inline constexpr double kDefaultFdrQ = 0.005;
inline constexpr const char* kInferenceMethod = "sofari-approx-plugin";

// sigma_hat^2 = ||X - X_k||_F^2 / max(1, n*p - k(n + p - k)), floored at 1e-12.
// Requires 1 <= k < min(n, p).
double estimate_noise_sigma(const Eigen::MatrixXd& x, int k);
double estimate_noise_sigma(const SvdStack& stack, Eigen::Index rows, Eigen::Index cols, int k);

struct LayerStats {
  int layer = 0;              // 1-based
  double singular_value = 0;  // lambda_l
  double sigma_hat = 0;
  Eigen::VectorXd z;          // lambda_l * s_l * u_li / sigma_hat
  Eigen::VectorXd pvalues;    // two-sided normal tail
};

double two_sided_pvalue(double z) noexcept;

LayerStats layer_zstats(const SvdStack& stack, double sigma_hat, int layer);

// Indices (ascending) rejected by the BH step-up rule at level q.
std::vector<std::size_t> bh_select(std::span<const double> pvalues, double q);

struct WordEntry {
  std::string word;
  double stat = 0.0;    // max |stat| over the word's pieces
  double pvalue = 1.0;  // min over the word's pieces
  bool selected = false;
  std::vector<std::size_t> pieces;  // token indices
};

// Groups tokens by word_index. Words made only of stopword, punctuation or
// special pieces are dropped.
std::vector<WordEntry> recombine_words(const std::vector<TokenRecord>& tokens, std::span<const double> stats,
                                       std::span<const double> pvalues);

struct LayerKeywordSet {
  int layer = 0;
  double singular_value = 0.0;
  double q = kDefaultFdrQ;
  std::vector<WordEntry> entries;  // unique words, decreasing stat

  std::size_t selected_count() const;
};

struct KeywordClouds {
  std::vector<LayerKeywordSet> layers;
  double sigma_hat = 0.0;
  int noise_rank = 0;
  std::string method = kInferenceMethod;

  bool any_selected() const;
};

// Layers 1..layers. Requires layers <= min(n, p) - 1 and
// 1 <= rank_for_noise < min(n, p). BH runs over token pieces; a word is
// selected when any of its pieces is. Repeated words are merged (max stat,
// min p-value).
KeywordClouds keyword_clouds(const EmbeddedText& text, int layers, double q, int rank_for_noise,
                             const MaskPolicy& mask = {});

enum class CloudFormat { kJson, kSvg };

std::string emit_cloud(const KeywordClouds& clouds, CloudFormat format);
std::string emit_cloud_json(const KeywordClouds& clouds);
std::string emit_cloud_svg(const KeywordClouds& clouds);

}  // namespace lids
