#pragma once

// Shared helpers for the unit and acceptance tests: fixture paths, random
// embedded texts and a few brute-force oracles that avoid the library code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lids/embedding_store.hpp"

namespace lids::support {

inline std::filesystem::path fixture_dir() { return LIDS_FIXTURE_DIR; }
inline std::filesystem::path bundle_dir() { return fixture_dir() / "bundle"; }

// Gaussian matrix with entries N(0, 1).
inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

// Plain tokens w0, w1, ... (one word each) around the given matrix.
inline EmbeddedText text_from(const Eigen::MatrixXd& m, const std::string& model = "test") {
  std::vector<TokenRecord> tokens;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    tokens.push_back({"w" + std::to_string(i), static_cast<std::uint32_t>(i), 0});
  }
  return EmbeddedText(model, std::move(tokens), m.cast<float>());
}

// Random text with a mix of flags and wordpiece continuations.
inline EmbeddedText random_text(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::vector<TokenRecord> tokens;
  std::uint32_t word = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = kind(rng);
    TokenRecord t;
    if (i == 0) {
      t = {"[CLS]", 0, token_flag::kSpecial};
    } else if (k == 0 && !tokens.back().special()) {
      t = {"##x" + std::to_string(i), word, static_cast<std::uint8_t>(token_flag::kContinuation | (tokens.back().flags & token_flag::kStopword))};
    } else if (k <= 2) {
      t = {"the", ++word, token_flag::kStopword};
    } else if (k == 3) {
      t = {",", ++word, token_flag::kPunctuation};
    } else {
      t = {"tok" + std::to_string(i), ++word, 0};
    }
    tokens.push_back(t);
  }
  return EmbeddedText("random", std::move(tokens), gaussian(rng, n, p).cast<float>());
}

// Independent direction vector: d(k) = sum_l lambda_l^(alpha+1) s_l v_l,
// computed from a Jacobi SVD (a different backend from the library's).
inline Eigen::VectorXd oracle_direction(const Eigen::MatrixXd& x, int k, double alpha) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(x.cols());
  for (int l = 0; l < k; ++l) {
    const Eigen::VectorXd v = svd.matrixV().col(l);
    const double s = v.sum() < 0.0 ? -1.0 : 1.0;
    const double lambda = svd.singularValues()(l);
    if (lambda == 0.0) continue;
    d += std::pow(lambda, alpha + 1.0) * s * v;
  }
  return d;
}

inline double oracle_abs_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    ab += a(i) * b(i);
    aa += a(i) * a(i);
    bb += b(i) * b(i);
  }
  if (std::sqrt(aa) < 1e-12 || std::sqrt(bb) < 1e-12) return 0.0;
  return std::abs(ab) / std::sqrt(aa * bb);
}

// BH by its definition: largest i with p_(i) <= i q / m, reject those with
// p <= p_(i). Ties at the cut are rejected together.
inline std::vector<std::size_t> oracle_bh(const std::vector<double>& p, double q) {
  const std::size_t m = p.size();
  std::vector<double> sorted(p);
  std::sort(sorted.begin(), sorted.end());
  std::size_t best = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    if (sorted[i - 1] <= static_cast<double>(i) * q / static_cast<double>(m)) best = i;
  }
  std::vector<std::size_t> out;
  if (best == 0) return out;
  const double cut = sorted[best - 1];
  for (std::size_t i = 0; i < m; ++i) {
    if (p[i] <= cut) out.push_back(i);
  }
  return out;
}

}  // namespace lids::support

namespace lids::support {

// Rank-1 signal theta * u v^T on the first `planted` rows (equal weights)
// plus N(0, sigma^2) noise; theta = 0 gives pure noise.
inline Eigen::MatrixXd planted_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index p, int planted, double theta,
                                      double sigma = 1.0) {
  Eigen::MatrixXd x = gaussian(rng, n, p, sigma);
  if (planted > 0 && theta != 0.0) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    u.head(planted).setConstant(1.0 / std::sqrt(static_cast<double>(planted)));
    Eigen::VectorXd v = gaussian(rng, p, 1).col(0);
    v.normalize();
    x += theta * u * v.transpose();
  }
  return x;
}

}  // namespace lids::support

namespace lids::support {

// Brute-force references written from the textbook definitions.
inline double brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline double brute_kendall_b(const std::vector<double>& x, const std::vector<double>& y) {
  auto sgn = [](double v) { return (v > 0) - (v < 0); };
  double num = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      num += sgn(x[i] - x[j]) * sgn(y[i] - y[j]);
      tx += std::abs(sgn(x[i] - x[j]));
      ty += std::abs(sgn(y[i] - y[j]));
    }
  }
  return num / std::sqrt(tx * ty);
}

inline double brute_dcor(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto centred = [n](const std::vector<double>& v) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::abs(v[i] - v[j]);
    }
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double ri = 0, cj = 0, all = 0;
        for (std::size_t k = 0; k < n; ++k) {
          ri += d[i][k];
          cj += d[k][j];
          for (std::size_t l = 0; l < n; ++l) all += d[k][l];
        }
        a[i][j] = d[i][j] - ri / n - cj / n + all / (n * n);
      }
    }
    return a;
  };
  const auto a = centred(x), b = centred(y);
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ab += a[i][j] * b[i][j];
      aa += a[i][j] * a[i][j];
      bb += b[i][j] * b[i][j];
    }
  }
  return std::sqrt(ab / n / n) / std::pow(aa / n / n * bb / n / n, 0.25);
}

}  // namespace lids::support
