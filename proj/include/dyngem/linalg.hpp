// Copyright 2026 The dyngem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

#include "dyngem/types.hpp"

namespace dyngem {

// A = U diag(S) V^T truncated to rank d. U is n x d, V is m x d, both with
// orthonormal columns; S is non-increasing and non-negative.
struct TruncatedSvd {
  Matrix U;
  Vector S;
  Matrix V;

  Eigen::Index rank() const { return S.size(); }
  Matrix reconstruct() const { return U * S.asDiagonal() * V.transpose(); }
};

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

// max |Q^T Q - I|
inline double orthonormality_error(const Matrix& q) {
  if (q.cols() == 0) return 0.0;
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

inline TruncatedSvd truncated_svd(const Matrix& a, Eigen::Index d) {
  if (d < 1 || d > std::min(a.rows(), a.cols())) {
    throw std::invalid_argument("truncated_svd: rank " + std::to_string(d) +
                                " outside [1, " +
                                std::to_string(std::min(a.rows(), a.cols())) + "]");
  }
  if (!a.allFinite()) throw std::domain_error("truncated_svd: non-finite matrix entries");
  // Full decomposition; the divide-and-conquer solver falls back to Jacobi
  // for small blocks.
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.U = svd.matrixU().leftCols(d);
  out.S = svd.singularValues().head(d);
  out.V = svd.matrixV().leftCols(d);
  return out;
}

// ||A - U S V^T||_F^2
inline double reconstruction_loss(const Matrix& a, const TruncatedSvd& f) {
  return (a - f.reconstruct()).squaredNorm();
}

// Orthogonal R minimizing ||X R - Y||_F, R = U V^T from the SVD of X^T Y.
// Reflections are allowed unless proper_rotation is set, in which case the
// last singular direction is flipped to force det(R) = +1.
inline Matrix procrustes_rotation(const Matrix& x, const Matrix& y, bool proper_rotation = false) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("procrustes_rotation: shape mismatch");
  }
  if (x.cols() < 1) throw std::invalid_argument("procrustes_rotation: need at least one column");
  const Matrix m = x.transpose() * y;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  if (proper_rotation && (u * v.transpose()).determinant() < 0.0) {
    u.col(u.cols() - 1) *= -1.0;
  }
  return u * v.transpose();
}

struct Projection2d {
  Matrix coords;          // n x 2
  Eigen::Vector2d variance = Eigen::Vector2d::Zero();  // captured per axis
  Matrix axes;            // d x 2 principal directions
  bool degenerate = false;
};

// Centers rows and projects onto the top two principal directions of the
// sample covariance (divisor n - 1). Each axis is signed so that its
// largest-magnitude component is positive. All-identical rows (including a
// single row) yield zero coordinates with the degenerate flag set.
inline Projection2d pca_project_2d(const Matrix& x) {
  if (x.cols() < 2) throw std::invalid_argument("pca_project_2d: need at least 2 columns");
  Projection2d out;
  out.coords = Matrix::Zero(x.rows(), 2);
  out.axes = Matrix::Zero(x.cols(), 2);
  if (x.rows() == 0) {
    out.degenerate = true;
    return out;
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - mean;
  if (x.rows() < 2 || centered.cwiseAbs().maxCoeff() == 0.0) {
    out.degenerate = true;
    return out;
  }
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Eigen::Index d = x.cols();
  for (int k = 0; k < 2; ++k) {
    Vector axis = eig.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    out.axes.col(k) = axis;
    out.variance(k) = std::max(0.0, eig.eigenvalues()(d - 1 - k));
  }
  out.coords = centered * out.axes;
  return out;
}

}  // namespace dyngem
