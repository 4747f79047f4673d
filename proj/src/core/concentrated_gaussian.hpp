#pragma once

#include "core/rng.hpp"
#include "core/so3.hpp"

namespace geofuse {

/// True if M is symmetric to 1e-10 and its smallest eigenvalue exceeds min_eig.
bool is_spd(const Mat3& M, double min_eig = 0.0);

/// Gaussian in logarithmic coordinates around a reference rotation.
/// X ~ ref * exp((mean + n)^) with n ~ N(0, cov).
struct ConcentratedGaussian {
    Mat3 ref;
    Vec3 mean;
    Mat3 cov;

    /// Validating constructor: ref in SO(3), ||mean|| < pi, cov SPD.
    static ConcentratedGaussian make(const Mat3& ref, const Vec3& mean, const Mat3& cov);

    /// Bypasses SPD validation. For degenerate (zero-covariance) test fixtures only.
    static ConcentratedGaussian make_unchecked(const Mat3& ref, const Vec3& mean, const Mat3& cov);
};

/// Log of the density at X, with the Euclidean normalizer
/// -0.5 * log((2 pi)^3 det cov). Valid approximation for concentrated cov.
double log_density(const ConcentratedGaussian& d, const Mat3& X);

/// Draw X = ref boxplus (mean + n), n ~ N(0, cov).
Mat3 sample(const ConcentratedGaussian& d, Rng& rng);

/// Re-express as a zero-mean distribution at the shifted reference
/// ref * exp(mean^), transporting cov by the left Jacobian:
/// cov_out = J_mean cov J_mean^T. KL-optimal to linearization order.
ConcentratedGaussian absorb_mean(const ConcentratedGaussian& d);

/// Re-express a zero-mean distribution at a new reference point X2:
/// mean_out = log(X2^-1 ref), cov_out = J^-1 cov J^-T. Inverse of absorb_mean.
ConcentratedGaussian change_reference(const ConcentratedGaussian& d, const Mat3& X2);

}  // namespace geofuse
