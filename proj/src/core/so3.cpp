#include "core/so3.hpp"

#include <algorithm>
#include <cmath>

namespace geofuse {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Mat3 wedge(const Vec3& u) {
    Mat3 M;
    M << 0.0, -u.z(), u.y(),
         u.z(), 0.0, -u.x(),
        -u.y(), u.x(), 0.0;
    return M;
}

Vec3 vee(const Mat3& M) {
    if ((M + M.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw DomainError("vee: matrix is not skew-symmetric");
    }
    return Vec3(M(2, 1), M(0, 2), M(1, 0));
}

Mat3 exp_so3(const Vec3& u) {
    const double theta = u.norm();
    const Mat3 U = wedge(u);
    double a, b;  // R = I + a*U + b*U^2
    if (theta < kExpTaylorThreshold) {
        const double t2 = theta * theta;
        a = 1.0 - t2 / 6.0;
        b = 0.5 - t2 / 24.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / (theta * theta);
    }
    return Mat3::Identity() + a * U + b * U * U;
}

double rotation_angle(const Mat3& R) {
    const double c = std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

Vec3 log_so3(const Mat3& R) {
    const double theta = rotation_angle(R);
    if (theta >= kPi - kLogDomainMargin) {
        throw DomainError("log_so3: rotation angle at or beyond pi - 1e-6");
    }
    const Vec3 w(0.5 * (R(2, 1) - R(1, 2)),
                 0.5 * (R(0, 2) - R(2, 0)),
                 0.5 * (R(1, 0) - R(0, 1)));
    // w = sin(theta) * axis
    if (theta < kExpTaylorThreshold) {
        const double t2 = theta * theta;
        return w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
    }
    return w * (theta / std::sin(theta));
}

Mat3 project_to_so3(const Mat3& M) {
    Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0.0) {
        Mat3 D = Mat3::Identity();
        D(2, 2) = -1.0;
        R = svd.matrixU() * D * svd.matrixV().transpose();
    }
    return R;
}

Mat3 boxplus(const Mat3& R, const Vec3& u) {
    Mat3 out = R * exp_so3(u);
    if ((out.transpose() * out - Mat3::Identity()).norm() > 1e-12) {
        out = project_to_so3(out);
    }
    return out;
}

Mat3 left_jacobian(const Vec3& u) {
    const double theta = u.norm();
    const Mat3 U = wedge(u);
    double a, b;  // J = I - a*U + b*U^2
    if (theta < kJacobianTaylorThreshold) {
        const double t2 = theta * theta;
        a = 0.5 - t2 / 24.0;
        b = 1.0 / 6.0 - t2 / 120.0;
    } else {
        a = (1.0 - std::cos(theta)) / (theta * theta);
        b = (theta - std::sin(theta)) / (theta * theta * theta);
    }
    return Mat3::Identity() - a * U + b * U * U;
}

Mat3 left_jacobian_inv(const Vec3& u) {
    const double theta = u.norm();
    if (theta >= 2.0 * kPi - 1e-6 || std::abs(theta - kPi) < 1e-6) {
        throw DomainError("left_jacobian_inv: ||u|| at a sin singularity");
    }
    const Mat3 U = wedge(u);
    double c;  // J^-1 = I + U/2 + c*U^2
    if (theta < kJacobianTaylorThreshold) {
        const double t2 = theta * theta;
        c = 1.0 / 12.0 + t2 / 720.0;
    } else {
        c = 1.0 / (theta * theta) -
            (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
    }
    return Mat3::Identity() + 0.5 * U + c * U * U;
}

Mat3 adjoint_matrix(const Mat3& R) {
    // Ad^v_R u = (R u^ R^T)^v = R u on SO(3).
    return R;
}

Mat3 ad_matrix(const Vec3& u) {
    return wedge(u);
}

bool is_rotation(const Mat3& R, double tol) {
    return (R.transpose() * R - Mat3::Identity()).norm() <= tol &&
           std::abs(R.determinant() - 1.0) <= tol;
}

}  // namespace geofuse
