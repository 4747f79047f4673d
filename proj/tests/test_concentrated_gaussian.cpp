#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/concentrated_gaussian.hpp"

using namespace geofuse;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat3 random_spd(Rng& rng, double scale) {
    Mat3 A;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) A(r, c) = rng.normal();
    }
    return scale * (A * A.transpose() + 0.1 * Mat3::Identity());
}

Mat3 random_rotation(Rng& rng, double max_angle = 2.5) {
    return exp_so3(rng.unit_vector() * rng.uniform() * max_angle);
}

}  // namespace

TEST_CASE("constructor validation") {
    Rng rng(11);
    const Mat3 ref = random_rotation(rng);
    CHECK_NOTHROW(ConcentratedGaussian::make(ref, Vec3(0.1, 0, 0), Mat3::Identity()));
    CHECK_THROWS_AS(ConcentratedGaussian::make(ref, Vec3(kPi, 0, 0), Mat3::Identity()),
                    DomainError);
    CHECK_THROWS_AS(ConcentratedGaussian::make(ref, Vec3::Zero(), Mat3::Zero()), DomainError);
    Mat3 asym = Mat3::Identity();
    asym(0, 1) = 1e-3;
    CHECK_THROWS_AS(ConcentratedGaussian::make(ref, Vec3::Zero(), asym), DomainError);
    // degenerate fixtures go through the unchecked constructor
    CHECK_NOTHROW(ConcentratedGaussian::make_unchecked(ref, Vec3::Zero(), Mat3::Zero()));
}

TEST_CASE("log_density peak and quadratic term") {
    Rng rng(12);
    const Mat3 ref = random_rotation(rng);
    const Vec3 mu(0.2, -0.1, 0.15);
    const auto d = ConcentratedGaussian::make(ref, mu, 0.04 * Mat3::Identity());

    const double peak = log_density(d, boxplus(ref, mu));
    for (int k = 0; k < 200; ++k) {
        const Mat3 X = boxplus(ref, mu + 0.3 * rng.normal3());
        CHECK(log_density(d, X) <= peak + 1e-12);
    }

    // Sigma = I, mu = 0: quadratic term at exp((0.3,0,0)^) is -0.045
    const auto unit = ConcentratedGaussian::make(ref, Vec3::Zero(), Mat3::Identity());
    const double log_norm = -0.5 * 3.0 * std::log(2.0 * kPi);
    CHECK(log_density(unit, boxplus(ref, Vec3(0.3, 0, 0))) - log_norm ==
          doctest::Approx(-0.045).epsilon(1e-10));
}

TEST_CASE("log_density ratio matches quadrature oracle on a subgroup") {
    // normalized 1D restriction along X(t) = ref * exp(t a): the quadrature
    // normalizer cancels in log ratios
    Rng rng(13);
    const Mat3 ref = random_rotation(rng);
    const Vec3 mu(0.1, 0.05, -0.08);
    const Mat3 cov = random_spd(rng, 0.05);
    const auto d = ConcentratedGaussian::make(ref, mu, cov);
    const Vec3 axis = rng.unit_vector();

    const int grid = 2001;
    const double lo = -1.5, hi = 1.5;
    std::vector<double> logf(grid);
    const Mat3 cov_inv = cov.inverse();
    double z = 0.0;
    const double step = (hi - lo) / (grid - 1);
    for (int g = 0; g < grid; ++g) {
        const Vec3 r = (lo + g * step) * axis - mu;
        logf[g] = -0.5 * r.dot(cov_inv * r);
        z += std::exp(logf[g]) * step;
    }
    auto oracle_at = [&](int g) { return logf[g] - std::log(z); };

    const int g1 = 700, g2 = 1400;
    const double t1 = lo + g1 * step, t2 = lo + g2 * step;
    const double direct =
        log_density(d, boxplus(ref, t1 * axis)) - log_density(d, boxplus(ref, t2 * axis));
    CHECK(direct == doctest::Approx(oracle_at(g1) - oracle_at(g2)).epsilon(1e-9));
}

TEST_CASE("sampling statistics") {
    Rng rng(14);
    const Mat3 ref = random_rotation(rng);
    const Vec3 mu(0.2, -0.15, 0.1);
    const Mat3 cov = random_spd(rng, 0.03);
    const auto d = ConcentratedGaussian::make(ref, mu, cov);

    const int n = 100000;
    Vec3 mean_acc = Vec3::Zero();
    Mat3 cov_acc = Mat3::Zero();
    std::vector<Vec3> logs;
    logs.reserve(n);
    for (int k = 0; k < n; ++k) {
        const Vec3 x = log_so3(ref.transpose() * sample(d, rng));
        logs.push_back(x);
        mean_acc += x;
    }
    const Vec3 emp_mean = mean_acc / n;
    for (const auto& x : logs) {
        const Vec3 r = x - mu;
        cov_acc += r * r.transpose();
    }
    const Mat3 emp_cov = cov_acc / n;

    for (int a = 0; a < 3; ++a) {
        const double sigma = std::sqrt(cov(a, a));
        CHECK(std::abs(emp_mean[a] - mu[a]) < 4.0 * sigma / std::sqrt(double(n)));
    }
    CHECK((emp_cov - cov).norm() / cov.norm() < 0.05);
}

TEST_CASE("sample degenerate covariance limit") {
    Rng rng(15);
    const Mat3 ref = random_rotation(rng);
    const Vec3 mu(0.3, 0.1, -0.2);
    const auto d = ConcentratedGaussian::make_unchecked(ref, mu, 1e-18 * Mat3::Identity());
    CHECK((sample(d, rng) - boxplus(ref, mu)).norm() < 1e-8);
}

TEST_CASE("absorb_mean") {
    Rng rng(16);
    const Mat3 ref = random_rotation(rng);
    const Mat3 cov = random_spd(rng, 0.2);

    SUBCASE("zero mean is identity") {
        const auto d = ConcentratedGaussian::make(ref, Vec3::Zero(), cov);
        const auto z = absorb_mean(d);
        CHECK((z.ref - ref).norm() < 1e-14);
        CHECK(z.mean.norm() == 0.0);
        CHECK((z.cov - cov).norm() < 1e-14);
    }

    SUBCASE("closed-form covariance") {
        const Vec3 mu(0.5, 0, 0);
        const auto d = ConcentratedGaussian::make(ref, mu, Mat3::Identity());
        const auto z = absorb_mean(d);
        const Mat3 J = left_jacobian(mu);
        CHECK((z.cov - J * J.transpose()).norm() < 1e-14);
        CHECK((z.ref - ref * exp_so3(mu)).norm() < 1e-12);
    }

    SUBCASE("rejects mean at pi") {
        CHECK_THROWS_AS(
            absorb_mean(ConcentratedGaussian::make_unchecked(ref, Vec3(kPi, 0, 0), cov)),
            DomainError);
    }
}

TEST_CASE("absorb_mean KL minimality (Monte-Carlo)") {
    Rng rng(17);
    const Mat3 ref = random_rotation(rng);
    const Vec3 mu(0.3, -0.2, 0.1);
    const Mat3 cov = random_spd(rng, 0.02);
    const auto p = ConcentratedGaussian::make(ref, mu, cov);
    const auto q = absorb_mean(p);

    const int n = 100000;
    std::vector<Mat3> xs;
    xs.reserve(n);
    for (int k = 0; k < n; ++k) xs.push_back(sample(p, rng));

    auto kl_to = [&](const ConcentratedGaussian& cand) {
        double acc = 0.0;
        for (const auto& x : xs) acc += log_density(p, x) - log_density(cand, x);
        return acc / n;
    };

    const double kl_opt = kl_to(q);
    for (int c = 0; c < 20; ++c) {
        Mat3 delta;
        for (int r = 0; r < 3; ++r) {
            for (int cc = 0; cc < 3; ++cc) delta(r, cc) = rng.normal();
        }
        delta = 0.05 * q.cov.norm() * (delta * delta.transpose()).normalized() *
                (rng.uniform() < 0.5 ? 1.0 : -1.0);
        Mat3 cand_cov = q.cov + delta;
        Eigen::SelfAdjointEigenSolver<Mat3> es(cand_cov, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 1e-6) continue;
        const auto cand = ConcentratedGaussian::make(q.ref, Vec3::Zero(), cand_cov);
        CHECK(kl_opt <= kl_to(cand));
    }
}

TEST_CASE("change_reference") {
    Rng rng(18);
    const Mat3 ref = random_rotation(rng);
    const Mat3 cov = random_spd(rng, 0.1);
    const auto d = ConcentratedGaussian::make(ref, Vec3::Zero(), cov);

    SUBCASE("same reference is identity") {
        const auto out = change_reference(d, ref);
        CHECK(out.mean.norm() < 1e-12);
        CHECK((out.cov - cov).norm() < 1e-10);
    }

    SUBCASE("rejects nonzero mean input") {
        const auto bad = ConcentratedGaussian::make(ref, Vec3(0.1, 0, 0), cov);
        CHECK_THROWS_AS(change_reference(bad, Mat3::Identity()), DomainError);
    }

    SUBCASE("inverse pair with absorb_mean") {
        for (int k = 0; k < 50; ++k) {
            const Mat3 X2 = boxplus(ref, 0.4 * rng.normal3());
            const auto moved = change_reference(d, X2);
            const auto back = absorb_mean(moved);
            CHECK((back.ref - ref).norm() < 1e-9);
            CHECK(back.mean.norm() == 0.0);
            CHECK((back.cov - cov).norm() < 1e-9);
        }
    }

    SUBCASE("sampling transport consistency") {
        Rng rng2(19);
        const Mat3 X2 = boxplus(ref, Vec3(0.3, -0.2, 0.25));
        const auto moved = change_reference(d, X2);
        REQUIRE(moved.mean.norm() <= 0.5);
        const int n = 100000;
        Mat3 acc = Mat3::Zero();
        for (int k = 0; k < n; ++k) {
            const Vec3 x = log_so3(X2.transpose() * sample(d, rng2)) - moved.mean;
            acc += x * x.transpose();
        }
        const Mat3 emp = acc / n;
        CHECK((emp - moved.cov).norm() / moved.cov.norm() < 0.10);
    }
}

TEST_CASE("transport invariants") {
    Rng rng(20);
    for (int k = 0; k < 50; ++k) {
        const Mat3 ref = random_rotation(rng);
        const Mat3 cov = random_spd(rng, 0.1);
        const Vec3 mu = rng.unit_vector() * rng.uniform() * (kPi - 0.15);
        const auto d = ConcentratedGaussian::make(ref, mu, cov);
        const auto z = absorb_mean(d);

        // positive-definiteness preserved
        Eigen::SelfAdjointEigenSolver<Mat3> es(z.cov, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > 0.0);

        // determinant multiplicativity
        const double detJ = left_jacobian(mu).determinant();
        CHECK(std::abs(z.cov.determinant() - detJ * detJ * cov.determinant()) <=
              1e-8 * std::abs(z.cov.determinant()));
    }

    // small-mean continuity: ||cov_out - cov_in|| <= 2 ||mu|| ||cov_in||
    for (int k = 0; k < 50; ++k) {
        const Mat3 ref = random_rotation(rng);
        const Mat3 cov = random_spd(rng, 0.1);
        const Vec3 mu = rng.unit_vector() * rng.uniform() * 0.1;
        const auto z = absorb_mean(ConcentratedGaussian::make(ref, mu, cov));
        CHECK((z.cov - cov).norm() <= 2.0 * mu.norm() * cov.norm());
    }
}
