#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/sim.hpp"

using namespace geofuse;

namespace {

ScenarioConfig short_scenario(double duration = 10.0, int runs = 2) {
    ScenarioConfig cfg = default_scenario();
    cfg.duration_s = duration;
    cfg.num_runs = runs;
    return cfg;
}

}  // namespace

TEST_CASE("omega profiles match the experiment definition") {
    const Vec3 amp_i(10.0, 1.0, 0.1);
    CHECK((omega_profile(amp_i, 0.0) - Vec3(0, 1, 0)).norm() == 0.0);
    const Vec3 at1 = omega_profile(amp_i, 1.0);
    CHECK(at1.x() == doctest::Approx(10 * std::abs(std::sin(1.0))));
    CHECK(at1.y() == doctest::Approx(std::abs(std::cos(1.0))));
    CHECK(at1.z() == doctest::Approx(0.1 * std::abs(std::sin(1.0))));
}

TEST_CASE("generate_trajectory") {
    ScenarioConfig cfg = short_scenario(2.0);

    SUBCASE("zero profile and zero noise stays constant") {
        AgentConfig a = cfg.agents[0];
        a.trajectory_amplitudes = Vec3::Zero();
        a.gyro_noise_cov = Mat3::Zero();
        Rng rng(41);
        std::vector<Mat3> states;
        std::vector<Vec3> omegas;
        generate_trajectory(a, cfg, rng, &states, &omegas);
        CHECK(states.size() == 101);
        CHECK(omegas.size() == 100);
        for (const auto& R : states) CHECK((R - Mat3::Identity()).norm() < 1e-12);
    }

    SUBCASE("re-integration oracle") {
        Rng rng(42);
        std::vector<Mat3> states;
        std::vector<Vec3> omegas;
        generate_trajectory(cfg.agents[0], cfg, rng, &states, &omegas);
        Mat3 R = Mat3::Identity();
        for (std::size_t n = 0; n < omegas.size(); ++n) {
            R = boxplus(R, cfg.dt * omegas[n]);
            CHECK((R - states[n + 1]).norm() < 1e-12);
        }
    }
}

TEST_CASE("synthesize_directional") {
    Rng rng(43);

    SUBCASE("noiseless identity returns the direction") {
        const Vec3 d(0, 1, 0);
        const auto m = synthesize_directional(Mat3::Identity(), d, 0, Mat3::Zero(), rng);
        CHECK((m.value - d).norm() == 0.0);
    }

    SUBCASE("empirical noise covariance") {
        const Mat3 N = Vec3(0.04, 0.01, 0.09).asDiagonal();
        const Mat3 R = exp_so3(Vec3(0.4, -0.2, 0.9));
        const Vec3 d(1, 0, 0);
        const int n = 100000;
        Mat3 acc = Mat3::Zero();
        for (int k = 0; k < n; ++k) {
            const Vec3 r = synthesize_directional(R, d, 0, N, rng).value - R.transpose() * d;
            acc += r * r.transpose();
        }
        CHECK(((acc / n) - N).norm() / N.norm() < 0.05);
    }
}

TEST_CASE("synthesize_relative") {
    const Mat3 R_i = exp_so3(Vec3(0.5, -0.3, 0.8));
    const Mat3 R_j = exp_so3(Vec3(-0.2, 0.9, 0.1));
    const Mat3 rel = R_j.transpose() * R_i;

    SUBCASE("zero noise returns the relative state for both kinds") {
        Rng rng(44);
        CHECK((synthesize_relative(RelKind::Physical, R_i, R_j, Mat3::Zero(), rng).value -
               rel).norm() < 1e-12);
        CHECK((synthesize_relative(RelKind::Angular, R_i, R_j, Mat3::Zero(), rng).value -
               rel).norm() < 1e-12);
    }

    SUBCASE("shared draw relates the two models exactly") {
        const Mat3 Q = Vec3(0.25, 0.09, 0.04).asDiagonal();
        Rng rng_a(45), rng_b(45);
        const auto phys = synthesize_relative(RelKind::Physical, R_i, R_j, Q, rng_a);
        const auto ang = synthesize_relative(RelKind::Angular, R_i, R_j, Q, rng_b);
        // same kappa: physical right-translates, angular adds in the exponent
        const Vec3 kappa = log_so3(rel.transpose() * phys.value);
        CHECK((ang.value - exp_so3(log_so3(rel) + kappa)).norm() < 1e-9);
    }
}

TEST_CASE("run_scenario zero-noise limit") {
    ScenarioConfig cfg = short_scenario(5.0);
    for (auto& a : cfg.agents) {
        a.gyro_noise_cov = Mat3::Zero();
        a.directional_noise_cov = 1e-16 * Mat3::Identity();
    }
    cfg.relative_noise_cov = Mat3::Zero();
    cfg.initial_estimate_cov = 1e-18 * Mat3::Identity();
    const auto rec = run_scenario(cfg, 7);
    for (std::size_t s = 0; s < rec.time.size(); ++s) {
        CHECK(rec.error_proposed[s] <= 1e-6);
        CHECK(rec.error_directional_only[s] <= 1e-6);
        CHECK(rec.error_naive[s] <= 1e-6);
    }
}

TEST_CASE("event schedule exactness") {
    ScenarioConfig cfg = default_scenario();
    cfg.num_runs = 1;
    const auto rec = run_scenario(cfg, 12345);
    CHECK(rec.directional_events_per_agent == 1200);  // 20 Hz * 60 s
    CHECK(rec.relative_events == 60);
    CHECK(rec.time.size() == 3001);
    CHECK(rec.time.front() == 0.0);
    CHECK(rec.time.back() == doctest::Approx(60.0));
    for (std::size_t s = 0; s < rec.time.size(); ++s) {
        CHECK(rec.error_proposed[s] >= 0.0);
        CHECK(rec.error_proposed[s] <= 3.14159265358979323846);
    }
}

TEST_CASE("rotation_error metric") {
    CHECK(rotation_error(Mat3::Identity(), Mat3::Identity()) == 0.0);
    Rng rng(46);
    for (int k = 0; k < 50; ++k) {
        const Mat3 R = exp_so3(rng.unit_vector() * rng.uniform() * 3.0);
        const double angle = rng.uniform() * 3.0;
        const Mat3 Rhat = boxplus(R, angle * rng.unit_vector());
        CHECK(rotation_error(R, Rhat) == doctest::Approx(angle).epsilon(1e-9));
    }
}

TEST_CASE("monte carlo determinism and aggregation") {
    ScenarioConfig cfg = short_scenario(5.0, 4);

    SUBCASE("bit-identical across invocations and thread counts") {
        const auto a = run_monte_carlo(cfg, 1);
        const auto b = run_monte_carlo(cfg, 4);
        REQUIRE(a.time.size() == b.time.size());
        for (std::size_t s = 0; s < a.time.size(); ++s) {
            CHECK(a.proposed.mean[s] == b.proposed.mean[s]);
            CHECK(a.directional_only.p25[s] == b.directional_only.p25[s]);
            CHECK(a.naive.p75[s] == b.naive.p75[s]);
        }
    }

    SUBCASE("single run collapses the percentiles") {
        cfg.num_runs = 1;
        const auto summary = run_monte_carlo(cfg);
        const auto rec = run_scenario(cfg, split_seed(cfg.seed, 0));
        for (std::size_t s = 0; s < summary.time.size(); ++s) {
            CHECK(summary.proposed.mean[s] == rec.error_proposed[s]);
            CHECK(summary.proposed.p25[s] == rec.error_proposed[s]);
            CHECK(summary.proposed.p75[s] == rec.error_proposed[s]);
        }
    }

    SUBCASE("doubling the run count moves means within standard error") {
        ScenarioConfig small = short_scenario(5.0, 16);
        const auto s16 = run_monte_carlo(small);
        small.num_runs = 32;
        const auto s32 = run_monte_carlo(small);

        // per-run spread estimated from the wider percentile band
        for (std::size_t s = 50; s < s16.time.size(); s += 50) {
            const double iqr = s32.proposed.p75[s] - s32.proposed.p25[s];
            const double sigma = std::max(iqr / 1.35, 1e-3);
            CHECK(std::abs(s16.proposed.mean[s] - s32.proposed.mean[s]) <
                  3.0 * sigma / std::sqrt(16.0));
        }
    }
}

TEST_CASE("config validation") {
    ScenarioConfig cfg = default_scenario();
    CHECK_NOTHROW(cfg.validate());

    SUBCASE("bad rates") {
        cfg.directional_rate_hz = 100.0;  // above 1/dt
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("non-unit direction") {
        cfg.agents[0].directions[0] = Vec3(0, 2, 0);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("negative runs") {
        cfg.num_runs = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("wrong agent count") {
        cfg.agents.pop_back();
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}
