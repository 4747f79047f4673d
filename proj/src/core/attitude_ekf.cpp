#include "core/attitude_ekf.hpp"

namespace geofuse {

Mat3 symmetrize_checked(const Mat3& P) {
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw InternalError("covariance asymmetry exceeds 1e-10");
    }
    return 0.5 * (P + P.transpose());
}

AgentEstimate predict(const AgentEstimate& est, const ImuSample& imu) {
    const Vec3 step = imu.dt * imu.omega;
    const Mat3 F = exp_so3(step).transpose();
    const Mat3 Jt = left_jacobian(step).transpose();

    AgentEstimate out;
    out.attitude = boxplus(est.attitude, step);
    out.cov = symmetrize_checked(F * est.cov * F.transpose() +
                                 (imu.dt * imu.dt) * Jt * imu.gyro_cov * Jt.transpose());
    out.time = est.time + imu.dt;
    return out;
}

AgentEstimate update_directional(const AgentEstimate& est, const DirectionalMeasurement& m,
                                 const Vec3& d) {
    const Vec3 predicted = est.attitude.transpose() * d;
    const Mat3 H = wedge(predicted);
    const Mat3 S = H * est.cov * H.transpose() + m.noise_cov;

    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > 1e12) {
        throw SingularInnovation("update_directional: innovation covariance ill-conditioned");
    }

    const Mat3 K = est.cov * H.transpose() * S.inverse();
    const Vec3 mu = K * (m.value - predicted);
    const Mat3 P_post = symmetrize_checked((Mat3::Identity() - K * H) * est.cov);

    // covariance reset: absorb the correction into the reference point
    const Mat3 J = left_jacobian(mu);
    AgentEstimate out;
    out.attitude = boxplus(est.attitude, mu);
    out.cov = symmetrize_checked(J * P_post * J.transpose());
    out.time = est.time;

    // A single direction carries no information about rotation around itself,
    // so the variance along the (post-update) body axis of d must not shrink.
    // The linearized update and reset are only first-order exact and leak
    // variance out of that axis when corrections are large; restore the floor.
    const Vec3 axis_before = est.attitude.transpose() * d;
    const Vec3 axis_after = out.attitude.transpose() * d;
    const double var_before = axis_before.dot(est.cov * axis_before);
    const double var_after = axis_after.dot(out.cov * axis_after);
    if (var_after < var_before) {
        out.cov += (var_before - var_after) * (axis_after * axis_after.transpose());
    }
    return out;
}

}  // namespace geofuse
