#pragma once

// Latent SVD layers of an embedding matrix and the layered direction vectors
//   d(k) = sum_{l<=k} lambda_l^alpha * s_l * sum_i u_{l,i} w_i
// where w_i is row i of the (possibly masked) matrix and s_l fixes the sign
// ambiguity of the singular pair (u_l, v_l).

#include <vector>

#include <Eigen/Core>

#include "lids/embedding_store.hpp"

namespace lids {

struct SvdStack {
  Eigen::VectorXd singular_values;  // nonincreasing, length r = min(n, p)
  Eigen::MatrixXd left;             // n x r, columns u_l
  Eigen::MatrixXd right;            // p x r, columns v_l
  std::vector<int> signs;           // s_l in {+1, -1}

  Eigen::Index rank_bound() const noexcept { return singular_values.size(); }
};

struct DirectionVector {
  Eigen::VectorXd values;
  int k = 0;
  double alpha = 1.0;
};

inline constexpr double kDefaultAlpha = 1.0;

// Thin SVD. Throws ZeroMatrix for an all-zero input, NumericalFailure if the
// decomposition does not produce a finite result.
SvdStack compute_svd(const Eigen::MatrixXd& x);
SvdStack compute_svd(const EmbeddedText& text);

// Sign of <v, 1>; +1 on an exact zero.
int layer_sign(const Eigen::Ref<const Eigen::VectorXd>& v) noexcept;

DirectionVector direction_vector(const Eigen::MatrixXd& x, const SvdStack& stack, int k,
                                 double alpha = kDefaultAlpha);
DirectionVector direction_vector(const EmbeddedText& text, const SvdStack& stack, int k,
                                 double alpha = kDefaultAlpha);

// d(1..k_max), built incrementally; element k-1 holds d(k).
std::vector<DirectionVector> direction_profile(const Eigen::MatrixXd& x, const SvdStack& stack, int k_max,
                                               double alpha = kDefaultAlpha);
std::vector<DirectionVector> direction_profile(const EmbeddedText& text, const SvdStack& stack, int k_max,
                                               double alpha = kDefaultAlpha);

}  // namespace lids
