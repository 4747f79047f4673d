#pragma once

#include "core/concentrated_gaussian.hpp"
#include "core/so3.hpp"

namespace geofuse {

/// An agent's attitude estimate: the information state is the zero-mean
/// concentrated Gaussian GP_attitude(0, cov).
struct AgentEstimate {
    Mat3 attitude = Mat3::Identity();
    Mat3 cov = Mat3::Identity();
    double time = 0.0;
};

struct ImuSample {
    Vec3 omega;       // rad/s, body frame
    double dt;        // s
    Mat3 gyro_cov;    // (rad/s)^2
};

struct DirectionalMeasurement {
    Vec3 value;           // body-frame observation of a known direction
    int direction_index;  // which reference direction
    Mat3 noise_cov;
};

/// Propagate through R(t+1) = R exp(dt * omega^).
/// Error convention R = Rhat * exp(eps^) gives F = exp(dt*omega)^T and
/// input matrix G = -dt * J_{dt*omega}^T, so
/// cov <- F cov F^T + dt^2 * J^T gyro_cov J.
AgentEstimate predict(const AgentEstimate& est, const ImuSample& imu);

/// Kalman update in logarithmic coordinates for z = R^T d + n, with output
/// matrix H = wedge(Rhat^T d), followed by the covariance reset
/// (attitude <- Rhat exp(mu+), cov <- J_{mu+} P+ J_{mu+}^T).
/// Throws SingularInnovation when cond(H P H^T + N) > 1e12.
AgentEstimate update_directional(const AgentEstimate& est, const DirectionalMeasurement& m,
                                 const Vec3& d);

/// (P + P^T)/2, throwing InternalError if the asymmetry exceeds 1e-10.
Mat3 symmetrize_checked(const Mat3& P);

}  // namespace geofuse
