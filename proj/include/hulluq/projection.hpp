#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hulluq/geometry.hpp"

namespace hulluq {

/// Response embeddings, one row per response (n x d).
using EmbeddingMatrix = Eigen::MatrixXd;

/// Rank-2 PCA model of an embedding set. Component rows are orthonormal
/// and sign-fixed so each row's largest-magnitude entry is positive;
/// explained variances use the n-1 divisor and are descending.
struct PcaModel {
  Eigen::VectorXd mean;                           // d
  Eigen::Matrix<double, 2, Eigen::Dynamic> components;  // 2 x d
  double explained_variance[2] = {0.0, 0.0};
};

/// Fit the top-2 principal subspace of `embeddings` via SVD of the
/// centered matrix. With n=1 the components are an arbitrary orthonormal
/// pair and both variances are 0; with n=2 the second component is an
/// orthonormal completion with zero variance.
PcaModel fit_pca(const EmbeddingMatrix& embeddings);

/// Project rows onto the model plane: point_i = components * (row_i - mean).
std::vector<Point2D> project(const PcaModel& model, const EmbeddingMatrix& embeddings);

}  // namespace hulluq
