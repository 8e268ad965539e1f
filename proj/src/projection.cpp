#include "hulluq/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace hulluq {

namespace {

void require_finite(const EmbeddingMatrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("non-finite embedding entry");
}

// Eigenvector signs are arbitrary; make the largest-magnitude entry
// positive so fits are reproducible.
void fix_sign(Eigen::Matrix<double, 2, Eigen::Dynamic>& components) {
  for (int r = 0; r < 2; ++r) {
    Eigen::Index idx = 0;
    components.row(r).cwiseAbs().maxCoeff(&idx);
    if (components(r, idx) < 0.0) components.row(r) = -components.row(r);
  }
}

}  // namespace

PcaModel fit_pca(const EmbeddingMatrix& embeddings) {
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = embeddings.cols();
  if (n == 0) throw std::invalid_argument("empty embedding set");
  if (d < 2) throw std::invalid_argument("dimension too small");
  require_finite(embeddings);

  PcaModel model;
  model.mean = embeddings.colwise().mean();
  model.components.resize(2, d);

  if (n == 1) {
    model.components.setZero();
    model.components(0, 0) = 1.0;
    model.components(1, 1) = 1.0;
    return model;
  }

  const EmbeddingMatrix centered = embeddings.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<EmbeddingMatrix> svd(centered, Eigen::ComputeThinV);
  model.components.row(0) = svd.matrixV().col(0).transpose();
  model.components.row(1) = svd.matrixV().col(1).transpose();
  fix_sign(model.components);

  const auto& sigma = svd.singularValues();
  model.explained_variance[0] = sigma(0) * sigma(0) / static_cast<double>(n - 1);
  model.explained_variance[1] = sigma(1) * sigma(1) / static_cast<double>(n - 1);
  return model;
}

std::vector<Point2D> project(const PcaModel& model, const EmbeddingMatrix& embeddings) {
  if (embeddings.cols() != model.mean.size()) {
    throw std::invalid_argument("embedding dimension does not match model");
  }
  require_finite(embeddings);
  std::vector<Point2D> out;
  out.reserve(static_cast<std::size_t>(embeddings.rows()));
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    const Eigen::Vector2d p =
        model.components * (embeddings.row(i).transpose() - model.mean);
    out.push_back({p(0), p(1)});
  }
  return out;
}

}  // namespace hulluq
