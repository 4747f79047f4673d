#pragma once

#include <string>
#include <vector>

#include "core/attitude_ekf.hpp"
#include "core/concentrated_gaussian.hpp"

namespace geofuse {

enum class RelKind { Physical, Angular };

/// Relative-attitude measurement of the ego agent taken by a neighbour.
/// Physical: value = Rj^-1 Ri boxplus kappa, kappa ~ N(0, Q).
/// Angular:  value = exp(log(Rj^-1 Ri) + kappa^).
struct RelativeMeasurement {
    RelKind kind;
    Mat3 value;
    Mat3 noise_cov;  // Q_j
};

/// What the altruistic agent broadcasts.
struct SharePacket {
    RelativeMeasurement measurement;
    AgentEstimate sender_estimate;
    int sender_id = 1;
    int target_id = 0;
    double timestamp = 0.0;
};

struct EllipsoidFusionResult {
    Vec3 mean_correction;   // u+
    Mat3 cov;               // P+
    double alpha_used;
    double shrink_factor;   // k = 1 - d^2
    double mahalanobis_sq;  // d^2
};

enum class AlphaPolicyKind { Fixed, Optimal };

struct AlphaPolicy {
    AlphaPolicyKind kind = AlphaPolicyKind::Optimal;
    double alpha = 0.5;  // used when kind == Fixed
};

struct FusionOptions {
    /// Use Rhat_j^-1 Rhat_i instead of the measurement as the proxy
    /// rotation in angular_to_physical.
    bool proxy_from_estimates = false;
    /// Ablation baseline: identity Jacobians everywhere (Q untransformed,
    /// covariance copied across the coordinate change, no reset Jacobian).
    bool naive = false;
};

struct FusionEvent {
    double timestamp = 0.0;
    bool rejected = false;
    std::string reason;
    double alpha = -1.0;
};

/// Convert an angular measurement into an equivalent physical one:
/// Q* = J_{log(z)} Q J_{log(z)}^T, using the measurement as the proxy for
/// the unknown true relative state (or the estimates when configured).
/// Throws DomainError if the proxy rotation angle is >= pi - 1e-6.
RelativeMeasurement angular_to_physical(const RelativeMeasurement& m,
                                        const FusionOptions& opts = {},
                                        const Mat3* proxy_relative = nullptr);

/// Combine the packet with both state estimates into a fresh zero-mean
/// estimate of the ego attitude:
///   ref = Rhat_j * y,  cov = A P_j A^T + Q,  A = (Rhat_j^-1 Rhat_i)^T.
ConcentratedGaussian preprocess_relative(const SharePacket& pkt, const AgentEstimate& ego);

/// Transport the shared distribution into the ego's local coordinates
/// (change_reference to the ego attitude).
ConcentratedGaussian geometric_correction(const ConcentratedGaussian& shared,
                                          const AgentEstimate& ego);

/// Convex combination ellipsoid fusion.
///   X = (a P^-1 + (1-a) P*^-1)^-1, d^2 = ||mu||^2 in (P/a + P*/(1-a))^-1,
///   k = 1 - d^2, P+ = kX, u+ = X (1-a) P*^-1 mu.
/// Endpoints a = 0 and a = 1 use the analytic limits.
/// Throws EmptyIntersection when d^2 >= 1.
EllipsoidFusionResult cce_fuse(const Mat3& ego_cov, const Vec3& mean,
                               const Mat3& shared_cov, double alpha);

/// argmin over alpha in [0,1] of det(cce_fuse(...).cov), to 1e-4 in alpha.
/// Returns 0.5 when the determinant is constant in alpha.
double optimal_alpha(const Mat3& ego_cov, const Vec3& mean, const Mat3& shared_cov);

/// Full relative-measurement fusion pipeline with reset. Internal domain or
/// intersection failures degrade to a no-op on the ego estimate, recorded in
/// the event sink when one is supplied.
AgentEstimate fuse_relative(const AgentEstimate& ego, const SharePacket& pkt,
                            const AlphaPolicy& policy, const FusionOptions& opts = {},
                            std::vector<FusionEvent>* events = nullptr);

}  // namespace geofuse
