//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "frames.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "error.hpp"

namespace ipbind {
namespace {
constexpr double kDegenerateRelTol = 1e-9;

void canonicalize_sign(Eigen::Ref<Eigen::Vector3d> v) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(v[k]) > std::abs(v[best]))
      best = k;
  }
  if (v[best] < 0)
    v = -v;
}

// Gram-Schmidt of candidate against the already accepted columns.
bool try_extend(Eigen::Matrix3d &basis, int &count, Eigen::Vector3d candidate) {
  for (int k = 0; k < count; ++k)
    candidate -= basis.col(k).dot(candidate) * basis.col(k);
  const double norm = candidate.norm();
  if (norm < 1e-6)
    return false;
  basis.col(count++) = candidate / norm;
  return true;
}
} // namespace

std::string_view frame_mode_name(FrameMode mode) {
  switch (mode) {
  case FrameMode::kSE3:
    return "SE3";
  case FrameMode::kE3:
    return "E3";
  case FrameMode::kNone:
    return "NONE";
  }
  return "";
}

PcaDecomposition principal_axes(const Eigen::MatrixX3d &coords) {
  if (coords.rows() < 1)
    throw DataError("principal_axes: empty coordinate set");
  if (!coords.allFinite())
    throw DataError("principal_axes: non-finite coordinates");

  PcaDecomposition pca;
  const Eigen::RowVector3d centroid = coords.colwise().mean();
  const Eigen::MatrixX3d centered = coords.rowwise() - centroid;
  pca.covariance = centered.transpose() * centered;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(pca.covariance);
  // Ascending from Eigen; reverse to descending.
  Eigen::Vector3d lambda;
  Eigen::Matrix3d vecs;
  for (int k = 0; k < 3; ++k) {
    lambda[k] = std::max(0.0, solver.eigenvalues()[2 - k]);
    vecs.col(k) = solver.eigenvectors().col(2 - k);
  }
  pca.eigenvalues = lambda;

  const double scale = std::max(lambda[0], 1e-300);
  auto close = [&](int a, int b) {
    return std::abs(lambda[a] - lambda[b]) <= kDegenerateRelTol * scale;
  };
  std::array<bool, 3> distinct {};
  distinct[0] = !close(0, 1) && !close(0, 2);
  distinct[1] = !close(1, 0) && !close(1, 2);
  distinct[2] = !close(2, 0) && !close(2, 1);
  // All-zero spectrum: nothing is distinct.
  if (lambda[0] <= 0.0)
    distinct = { false, false, false };

  Eigen::Matrix3d basis = Eigen::Matrix3d::Zero();
  int count = 0;
  for (int k = 0; k < 3; ++k) {
    if (distinct[k])
      try_extend(basis, count, vecs.col(k));
  }
  for (int k = 0; k < 3 && count < 3; ++k)
    try_extend(basis, count, Eigen::Vector3d::Unit(k));

  for (int k = 0; k < 3; ++k)
    canonicalize_sign(basis.col(k));
  pca.eigenvectors = basis;
  return pca;
}

FrameSet compute_frames(const Eigen::MatrixX3d &coords, FrameMode mode) {
  if (coords.rows() < 1)
    throw DataError("compute_frames: empty coordinate set");
  if (!coords.allFinite())
    throw DataError("compute_frames: non-finite coordinates");

  FrameSet frames;
  frames.mode = mode;
  if (mode == FrameMode::kNone) {
    frames.rotations.push_back(Eigen::Matrix3d::Identity());
    return frames;
  }

  frames.centroid = coords.colwise().mean().transpose();
  const auto pca = principal_axes(coords);
  const Eigen::Vector3d u1 = pca.eigenvectors.col(0);
  const Eigen::Vector3d u2 = pca.eigenvectors.col(1);
  const Eigen::Vector3d u3 = pca.eigenvectors.col(2);
  constexpr std::array<double, 2> signs = { 1.0, -1.0 };

  if (mode == FrameMode::kSE3) {
    const Eigen::Vector3d cross = u1.cross(u2);
    for (double a : signs) {
      for (double b : signs) {
        Eigen::Matrix3d r;
        r.col(0) = a * u1;
        r.col(1) = b * u2;
        r.col(2) = (a * b) * cross;
        frames.rotations.push_back(r);
      }
    }
  } else {
    for (double a : signs) {
      for (double b : signs) {
        for (double c : signs) {
          Eigen::Matrix3d r;
          r.col(0) = a * u1;
          r.col(1) = b * u2;
          r.col(2) = c * u3;
          frames.rotations.push_back(r);
        }
      }
    }
  }
  return frames;
}

Eigen::MatrixX3d apply_frame(const Eigen::MatrixX3d &coords,
                             const Eigen::Matrix3d &rotation,
                             const Eigen::Vector3d &centroid) {
  return (coords.rowwise() - centroid.transpose()) * rotation;
}

double average_frame_outputs(std::span<const double> outputs) {
  if (outputs.empty())
    throw UsageError("average_frame_outputs: empty output list");
  double sum = 0.0;
  for (double v : outputs)
    sum += v;
  return sum / static_cast<double>(outputs.size());
}

Eigen::VectorXd
average_frame_outputs(std::span<const Eigen::VectorXd> outputs) {
  if (outputs.empty())
    throw UsageError("average_frame_outputs: empty output list");
  Eigen::VectorXd sum = outputs.front();
  for (std::size_t k = 1; k < outputs.size(); ++k) {
    if (outputs[k].size() != sum.size())
      throw UsageError("average_frame_outputs: outputs differ in shape");
    sum += outputs[k];
  }
  return sum / static_cast<double>(outputs.size());
}

} // namespace ipbind
