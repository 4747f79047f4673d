#include "core/fusion.hpp"

#include <cmath>
#include <limits>

namespace geofuse {

RelativeMeasurement angular_to_physical(const RelativeMeasurement& m,
                                        const FusionOptions& opts,
                                        const Mat3* proxy_relative) {
    if (m.kind != RelKind::Angular) {
        throw DomainError("angular_to_physical: measurement is not angular");
    }
    const Mat3& proxy =
        (opts.proxy_from_estimates && proxy_relative != nullptr) ? *proxy_relative : m.value;
    const Vec3 mu = log_so3(proxy);
    const Mat3 J = left_jacobian(mu);
    return RelativeMeasurement{RelKind::Physical, m.value, J * m.noise_cov * J.transpose()};
}

ConcentratedGaussian preprocess_relative(const SharePacket& pkt, const AgentEstimate& ego) {
    if (pkt.measurement.kind != RelKind::Physical) {
        throw DomainError("preprocess_relative: expects a physical measurement");
    }
    const Mat3& Rj = pkt.sender_estimate.attitude;
    const Mat3 A = adjoint_matrix((Rj.transpose() * ego.attitude).transpose());
    const Mat3 cov = A * pkt.sender_estimate.cov * A.transpose() + pkt.measurement.noise_cov;
    return ConcentratedGaussian{Rj * pkt.measurement.value, Vec3::Zero(),
                                0.5 * (cov + cov.transpose())};
}

ConcentratedGaussian geometric_correction(const ConcentratedGaussian& shared,
                                          const AgentEstimate& ego) {
    return change_reference(shared, ego.attitude);
}

EllipsoidFusionResult cce_fuse(const Mat3& ego_cov, const Vec3& mean,
                               const Mat3& shared_cov, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) {
        throw DomainError("cce_fuse: alpha outside [0, 1]");
    }
    // analytic limits: the d^2 formula divides by alpha and 1 - alpha
    if (alpha >= 1.0 - 1e-12) {
        return EllipsoidFusionResult{Vec3::Zero(), ego_cov, 1.0, 1.0, 0.0};
    }
    if (alpha <= 1e-12) {
        return EllipsoidFusionResult{mean, shared_cov, 0.0, 1.0, 0.0};
    }

    const Mat3 ego_inv = ego_cov.inverse();
    const Mat3 shared_inv = shared_cov.inverse();
    const Mat3 X = (alpha * ego_inv + (1.0 - alpha) * shared_inv).inverse();

    const Mat3 metric = ego_cov / alpha + shared_cov / (1.0 - alpha);
    const double d2 = mean.dot(metric.ldlt().solve(mean));
    if (d2 >= 1.0) {
        throw EmptyIntersection("cce_fuse: d^2 >= 1, convex combination invalid");
    }
    const double k = 1.0 - d2;

    EllipsoidFusionResult out;
    out.mean_correction = X * ((1.0 - alpha) * shared_inv * mean);
    out.cov = 0.5 * k * (X + X.transpose());
    out.alpha_used = alpha;
    out.shrink_factor = k;
    out.mahalanobis_sq = d2;
    return out;
}

namespace {

double det_or_inf(const Mat3& ego_cov, const Vec3& mean, const Mat3& shared_cov,
                  double alpha) {
    try {
        return cce_fuse(ego_cov, mean, shared_cov, alpha).cov.determinant();
    } catch (const EmptyIntersection&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

double optimal_alpha(const Mat3& ego_cov, const Vec3& mean, const Mat3& shared_cov) {
    // coarse grid seeds the bracket; det(P+(alpha)) is smooth but not
    // guaranteed unimodal
    constexpr int kGrid = 64;
    std::vector<double> alphas;
    alphas.push_back(0.0);
    for (int i = 0; i < kGrid; ++i) {
        const double lo = 1e-3, hi = 1.0 - 1e-3;
        alphas.push_back(lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1));
    }
    alphas.push_back(1.0);

    std::vector<double> dets(alphas.size());
    int best = 0;
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        dets[i] = det_or_inf(ego_cov, mean, shared_cov, alphas[i]);
        if (dets[i] < dmin) {
            dmin = dets[i];
            best = static_cast<int>(i);
        }
        if (std::isfinite(dets[i]) && dets[i] > dmax) dmax = dets[i];
    }
    if (!std::isfinite(dmin)) {
        throw EmptyIntersection("optimal_alpha: no alpha yields d^2 < 1");
    }
    if (dmax - dmin <= 1e-12 * std::max(std::abs(dmax), 1e-300)) {
        return 0.5;  // det constant in alpha; tie-break
    }

    double lo = alphas[best > 0 ? best - 1 : 0];
    double hi = alphas[best + 1 < static_cast<int>(alphas.size()) ? best + 1 : best];

    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = det_or_inf(ego_cov, mean, shared_cov, a);
    double fb = det_or_inf(ego_cov, mean, shared_cov, b);
    while (hi - lo > 1e-4) {
        if (fa <= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = det_or_inf(ego_cov, mean, shared_cov, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = det_or_inf(ego_cov, mean, shared_cov, b);
        }
    }
    double result = 0.5 * (lo + hi);
    // endpoints may still win outright
    if (dets.front() <= det_or_inf(ego_cov, mean, shared_cov, result)) result = 0.0;
    if (dets.back() < det_or_inf(ego_cov, mean, shared_cov, result)) result = 1.0;
    return result;
}

AgentEstimate fuse_relative(const AgentEstimate& ego, const SharePacket& pkt,
                            const AlphaPolicy& policy, const FusionOptions& opts,
                            std::vector<FusionEvent>* events) {
    if (pkt.timestamp < ego.time - 1e-9) {
        throw InternalError("fuse_relative: packet timestamp is not monotone");
    }
    FusionEvent ev;
    ev.timestamp = pkt.timestamp;
    try {
        RelativeMeasurement m = pkt.measurement;
        if (m.kind == RelKind::Angular) {
            if (opts.naive) {
                // naive baseline keeps Q unmodified
                m = RelativeMeasurement{RelKind::Physical, m.value, m.noise_cov};
            } else {
                const Mat3 est_relative =
                    pkt.sender_estimate.attitude.transpose() * ego.attitude;
                m = angular_to_physical(m, opts, &est_relative);
            }
        }
        SharePacket physical = pkt;
        physical.measurement = m;

        const ConcentratedGaussian shared = preprocess_relative(physical, ego);

        ConcentratedGaussian corrected;
        if (opts.naive) {
            // mean still via log, covariance copied across the coordinate change
            const Vec3 mu = log_so3(ego.attitude.transpose() * shared.ref);
            corrected = ConcentratedGaussian{ego.attitude, mu, shared.cov};
        } else {
            corrected = geometric_correction(shared, ego);
        }

        const double alpha = (policy.kind == AlphaPolicyKind::Fixed)
                                 ? policy.alpha
                                 : optimal_alpha(ego.cov, corrected.mean, corrected.cov);
        const EllipsoidFusionResult fused =
            cce_fuse(ego.cov, corrected.mean, corrected.cov, alpha);

        AgentEstimate out;
        if (opts.naive) {
            out.attitude = boxplus(ego.attitude, fused.mean_correction);
            out.cov = symmetrize_checked(fused.cov);
        } else {
            // reset shares the absorb_mean code path
            const ConcentratedGaussian reset = absorb_mean(ConcentratedGaussian::make_unchecked(
                ego.attitude, fused.mean_correction, fused.cov));
            out.attitude = reset.ref;
            out.cov = symmetrize_checked(reset.cov);
        }
        out.time = ego.time;
        ev.alpha = alpha;
        if (events) events->push_back(ev);
        return out;
    } catch (const DomainError& e) {
        ev.rejected = true;
        ev.reason = e.what();
    } catch (const EmptyIntersection& e) {
        ev.rejected = true;
        ev.reason = e.what();
    }
    if (events) events->push_back(ev);
    return ego;
}

}  // namespace geofuse
