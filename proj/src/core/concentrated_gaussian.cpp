#include "core/concentrated_gaussian.hpp"

#include <cmath>

namespace geofuse {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool is_spd(const Mat3& M, double min_eig) {
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
    Eigen::SelfAdjointEigenSolver<Mat3> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > min_eig;
}

ConcentratedGaussian ConcentratedGaussian::make(const Mat3& ref, const Vec3& mean,
                                                const Mat3& cov) {
    if (!is_rotation(ref)) {
        throw DomainError("ConcentratedGaussian: reference point is not a rotation");
    }
    if (mean.norm() >= kPi) {
        throw DomainError("ConcentratedGaussian: ||mean|| must stay below pi");
    }
    if (!is_spd(cov)) {
        throw DomainError("ConcentratedGaussian: covariance is not SPD");
    }
    return ConcentratedGaussian{ref, mean, cov};
}

ConcentratedGaussian ConcentratedGaussian::make_unchecked(const Mat3& ref, const Vec3& mean,
                                                          const Mat3& cov) {
    return ConcentratedGaussian{ref, mean, cov};
}

double log_density(const ConcentratedGaussian& d, const Mat3& X) {
    const Vec3 x = log_so3(d.ref.transpose() * X);
    const Vec3 r = x - d.mean;
    const double quad = r.dot(d.cov.ldlt().solve(r));
    const double log_norm =
        -0.5 * (3.0 * std::log(2.0 * kPi) + std::log(d.cov.determinant()));
    return -0.5 * quad + log_norm;
}

Mat3 sample(const ConcentratedGaussian& d, Rng& rng) {
    return boxplus(d.ref, d.mean + rng.mvn(d.cov));
}

ConcentratedGaussian absorb_mean(const ConcentratedGaussian& d) {
    if (d.mean.norm() >= kPi) {
        throw DomainError("absorb_mean: ||mean|| must stay below pi");
    }
    const Mat3 J = left_jacobian(d.mean);
    return ConcentratedGaussian{boxplus(d.ref, d.mean), Vec3::Zero(),
                                J * d.cov * J.transpose()};
}

ConcentratedGaussian change_reference(const ConcentratedGaussian& d, const Mat3& X2) {
    if (d.mean.norm() > 1e-12) {
        throw DomainError("change_reference: input must be zero-mean");
    }
    const Vec3 mu2 = log_so3(X2.transpose() * d.ref);
    const Mat3 Jinv = left_jacobian_inv(mu2);
    return ConcentratedGaussian{X2, mu2, Jinv * d.cov * Jinv.transpose()};
}

}  // namespace geofuse
