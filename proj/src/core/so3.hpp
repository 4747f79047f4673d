#pragma once

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace geofuse {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Small-angle switch points. Below these the closed forms are 0/0 and the
// series expansions are used instead.
inline constexpr double kExpTaylorThreshold = 1e-6;
inline constexpr double kJacobianTaylorThreshold = 1e-4;

// Chart boundary: log is rejected for rotation angles >= pi - kLogDomainMargin.
inline constexpr double kLogDomainMargin = 1e-6;

/// Map a vector to its skew-symmetric matrix, so that wedge(u)*v = u x v.
Mat3 wedge(const Vec3& u);

/// Inverse of wedge. Throws DomainError if M is not skew-symmetric to 1e-9.
Vec3 vee(const Mat3& M);

/// Exponential map so(3) -> SO(3) via the Rodrigues formula.
Mat3 exp_so3(const Vec3& u);

/// Logarithm map SO(3) -> so(3) coordinates.
/// Throws DomainError when the rotation angle is within kLogDomainMargin of pi.
Vec3 log_so3(const Mat3& R);

/// Rotation angle theta = arccos((tr(R) - 1) / 2), clamped into [0, pi].
double rotation_angle(const Mat3& R);

/// R * exp_so3(u), re-orthonormalized when drift exceeds 1e-12.
Mat3 boxplus(const Mat3& R, const Vec3& u);

/// Nearest rotation matrix by polar decomposition.
Mat3 project_to_so3(const Mat3& M);

/// Left Jacobian of the exponential map.
Mat3 left_jacobian(const Vec3& u);

/// Inverse of the left Jacobian. Throws DomainError when ||u|| is within
/// 1e-6 of pi or exceeds 2*pi - 1e-6 (sin singularities of the closed form).
Mat3 left_jacobian_inv(const Vec3& u);

/// Adjoint matrix of R acting on so(3) coordinates; equals R on SO(3).
Mat3 adjoint_matrix(const Mat3& R);

/// Lie-algebra adjoint matrix ad_u; equals wedge(u).
Mat3 ad_matrix(const Vec3& u);

/// True if ||R^T R - I||_F <= tol and det(R) > 0.
bool is_rotation(const Mat3& R, double tol = 1e-9);

}  // namespace geofuse
