//
// IPBind - Copyright 2026 The IPBind Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef IPBIND_CORE_FRAMES_HPP_
#define IPBIND_CORE_FRAMES_HPP_

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ipbind {

enum class FrameMode { kSE3, kE3, kNone };

std::string_view frame_mode_name(FrameMode mode);

struct PcaDecomposition {
  Eigen::Matrix3d covariance;
  Eigen::Vector3d eigenvalues;  // descending
  Eigen::Matrix3d eigenvectors; // column k pairs with eigenvalues[k]
};

struct FrameSet {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::vector<Eigen::Matrix3d> rotations;
  FrameMode mode = FrameMode::kSE3;
};

// Centered scatter matrix and its eigenbasis. Near-degenerate eigenvalues
// (relative gap <= 1e-9) leave the basis underdetermined; it is completed
// deterministically from the canonical axes and every axis is sign-fixed so
// its largest-magnitude component is positive.
PcaDecomposition principal_axes(const Eigen::MatrixX3d &coords);

// SE3: 4 proper rotations [a u1, b u2, ab (u1 x u2)] for
// (a, b) = (+,+), (+,-), (-,+), (-,-).
// E3: 8 matrices [a u1, b u2, c u3], a outermost, '+' before '-'.
// NONE: identity with zero centroid.
FrameSet compute_frames(const Eigen::MatrixX3d &coords, FrameMode mode);

// (X - 1 t^T) R
Eigen::MatrixX3d apply_frame(const Eigen::MatrixX3d &coords,
                             const Eigen::Matrix3d &rotation,
                             const Eigen::Vector3d &centroid);

// Mean in the given order; throws on an empty list.
double average_frame_outputs(std::span<const double> outputs);
Eigen::VectorXd average_frame_outputs(std::span<const Eigen::VectorXd> outputs);

} // namespace ipbind

#endif // IPBIND_CORE_FRAMES_HPP_
