#include "core/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "core/concentrated_gaussian.hpp"
#include "core/fusion.hpp"
#include "core/rng.hpp"
#include "core/so3.hpp"

namespace geofuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat3 random_spd(Rng& rng, double scale) {
    Mat3 A;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) A(r, c) = rng.normal();
    }
    return scale * (A * A.transpose() + 0.1 * Mat3::Identity());
}

SelftestGroupResult exp_log_roundtrip() {
    SelftestGroupResult g{"exp_log_roundtrip", false, 0.0, 1e-9};
    Rng rng(101);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 v = rng.unit_vector() * rng.uniform() * (kPi - 0.1);
        g.measured = std::max(g.measured, (log_so3(exp_so3(v)) - v).norm());
    }
    g.passed = g.measured <= g.tolerance;
    return g;
}

SelftestGroupResult jacobian_finite_difference(bool perturb) {
    SelftestGroupResult g{"jacobian_finite_difference", false, 0.0, 1e-5};
    Rng rng(202);
    const double h = 1e-5;
    for (int k = 0; k < 100; ++k) {
        const Vec3 u = rng.unit_vector() * (0.05 + rng.uniform() * 2.5);
        const Vec3 w = rng.unit_vector();
        const Mat3 fd =
            exp_so3(-u) * (exp_so3(u + h * w) - exp_so3(u - h * w)) / (2.0 * h);
        Mat3 J = left_jacobian(u);
        if (perturb) J += 1e-3 * Mat3::Identity();
        g.measured = std::max(g.measured, (fd - wedge(J * w)).norm());
    }
    g.passed = g.measured <= g.tolerance;
    return g;
}

SelftestGroupResult adjoint_oracle() {
    SelftestGroupResult g{"adjoint_definitional_oracle", false, 0.0, 1e-10};
    Rng rng(303);
    for (int k = 0; k < 100; ++k) {
        const Mat3 R = exp_so3(rng.unit_vector() * rng.uniform() * 3.0);
        const Vec3 u = rng.normal3();
        const Vec3 lhs = adjoint_matrix(R) * u;
        const Vec3 rhs = vee(R * wedge(u) * R.transpose());
        g.measured = std::max(g.measured, (lhs - rhs).norm());
    }
    g.passed = g.measured <= g.tolerance;
    return g;
}

SelftestGroupResult orthogonality_drift() {
    SelftestGroupResult g{"orthogonality_drift_1e4_boxplus", false, 0.0, 1e-9};
    Rng rng(404);
    Mat3 R = Mat3::Identity();
    for (int k = 0; k < 10000; ++k) {
        R = boxplus(R, 0.05 * rng.normal3());
        g.measured =
            std::max(g.measured, (R.transpose() * R - Mat3::Identity()).norm());
    }
    g.passed = g.measured <= g.tolerance;
    return g;
}

SelftestGroupResult cce_containment() {
    SelftestGroupResult g{"cce_containment", false, 0.0, 1e-9};
    Rng rng(505);
    int fixtures = 0;
    while (fixtures < 20) {
        const Mat3 P = random_spd(rng, 0.5);
        const Mat3 Ps = random_spd(rng, 0.5);
        const Vec3 mu = 0.3 * rng.normal3();
        const double alpha = 0.2 + 0.6 * rng.uniform();
        EllipsoidFusionResult fused;
        try {
            fused = cce_fuse(P, mu, Ps, alpha);
        } catch (const EmptyIntersection&) {
            continue;
        }
        ++fixtures;
        const Mat3 fused_inv = fused.cov.inverse();
        const Mat3 P_inv = P.inverse();
        const Mat3 Ps_inv = Ps.inverse();
        Eigen::SelfAdjointEigenSolver<Mat3> es(P);
        const Mat3 L = es.eigenvectors() *
                       es.eigenvalues().cwiseSqrt().asDiagonal();
        int found = 0;
        for (int s = 0; s < 20000 && found < 200; ++s) {
            // uniform sample of the ego ellipsoid
            const Vec3 u = L * (rng.unit_vector() * std::cbrt(rng.uniform()));
            if (u.dot(P_inv * u) > 1.0) continue;
            const Vec3 r = u - mu;
            if (r.dot(Ps_inv * r) > 1.0) continue;
            ++found;
            const Vec3 q = u - fused.mean_correction;
            g.measured = std::max(g.measured, q.dot(fused_inv * q) - 1.0);
        }
    }
    g.passed = g.measured <= g.tolerance;
    return g;
}

SelftestGroupResult mean_absorption_transport(int samples) {
    SelftestGroupResult g{"mean_absorption_transport", false, 0.0, 0.15};
    Rng rng(606);
    for (int k = 0; k < 5; ++k) {
        const Mat3 ref = exp_so3(rng.unit_vector() * rng.uniform() * 2.0);
        const Vec3 mu = rng.unit_vector() * (0.1 + 0.4 * rng.uniform());
        const Mat3 cov = random_spd(rng, 0.05);
        const auto d = ConcentratedGaussian::make(ref, mu, cov);
        const auto z = absorb_mean(d);
        Mat3 emp = Mat3::Zero();
        for (int s = 0; s < samples; ++s) {
            const Vec3 x = log_so3(z.ref.transpose() * sample(d, rng));
            emp += x * x.transpose();
        }
        emp /= static_cast<double>(samples);
        g.measured = std::max(g.measured, (emp - z.cov).norm() / z.cov.norm());
    }
    g.passed = g.measured <= g.tolerance;
    return g;
}

}  // namespace

bool SelftestReport::all_passed() const {
    for (const auto& g : groups) {
        if (!g.passed) return false;
    }
    return !groups.empty();
}

SelftestReport run_selftest(const SelftestOptions& opts) {
    SelftestReport report;
    report.groups.push_back(exp_log_roundtrip());
    report.groups.push_back(jacobian_finite_difference(opts.perturb_jacobian));
    report.groups.push_back(adjoint_oracle());
    report.groups.push_back(orthogonality_drift());
    report.groups.push_back(cce_containment());
    report.groups.push_back(mean_absorption_transport(opts.mc_samples));
    return report;
}

void print_report(const SelftestReport& report) {
    for (const auto& g : report.groups) {
        std::printf("[%s] %-32s measured=%.3e tol=%.3e\n", g.passed ? "PASS" : "FAIL",
                    g.name.c_str(), g.measured, g.tolerance);
    }
}

}  // namespace geofuse
