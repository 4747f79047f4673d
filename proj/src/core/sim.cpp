#include "core/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace geofuse {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_valid_cov(const Mat3& M) {
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
    Eigen::SelfAdjointEigenSolver<Mat3> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-12;
}

int events_due(double t, double rate_hz) {
    return static_cast<int>(std::floor(t * rate_hz + 1e-9));
}

}  // namespace

Vec3 omega_profile(const Vec3& a, double tau) {
    return Vec3(a.x() * std::abs(std::sin(tau)),
                a.y() * std::abs(std::cos(tau)),
                a.z() * std::abs(std::sin(tau)));
}

double rotation_error(const Mat3& R, const Mat3& Rhat) {
    return rotation_angle(R.transpose() * Rhat);
}

void ScenarioConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be positive");
    if (!(directional_rate_hz > 0.0) || directional_rate_hz > 1.0 / dt + 1e-9) {
        throw ConfigError("directional_rate_hz must lie in (0, 1/dt]");
    }
    if (!(relative_rate_hz > 0.0) || relative_rate_hz > 1.0 / dt + 1e-9) {
        throw ConfigError("relative_rate_hz must lie in (0, 1/dt]");
    }
    if (agents.size() != 2) throw ConfigError("scenario requires exactly two agents");
    for (std::size_t a = 0; a < agents.size(); ++a) {
        const auto& ag = agents[a];
        if (ag.directions.empty()) throw ConfigError("agent has no reference directions");
        for (const auto& d : ag.directions) {
            if (std::abs(d.norm() - 1.0) > 1e-9) {
                throw ConfigError("reference direction is not unit norm");
            }
        }
        if (!is_valid_cov(ag.directional_noise_cov)) {
            throw ConfigError("directional_noise_cov is not symmetric PSD");
        }
        if (!is_valid_cov(ag.gyro_noise_cov)) {
            throw ConfigError("gyro_noise_cov is not symmetric PSD");
        }
    }
    if (!is_valid_cov(relative_noise_cov)) throw ConfigError("relative Q is not symmetric PSD");
    if (!is_valid_cov(initial_estimate_cov)) {
        throw ConfigError("initial_estimate_cov is not symmetric PSD");
    }
    if (alpha_policy.kind == AlphaPolicyKind::Fixed &&
        (alpha_policy.alpha < 0.0 || alpha_policy.alpha > 1.0)) {
        throw ConfigError("fixed alpha must lie in [0, 1]");
    }
    if (initial_offset_rad < 0.0 || initial_offset_rad > kPi - 1e-3 + 1e-12) {
        throw ConfigError("initial_offset_rad must lie in [0, pi - 1e-3]");
    }
    if (num_runs < 1) throw ConfigError("num_runs must be at least 1");
}

void generate_trajectory(const AgentConfig& agent, const ScenarioConfig& cfg, Rng& rng,
                         std::vector<Mat3>* true_states, std::vector<Vec3>* noisy_omegas) {
    const int steps = static_cast<int>(std::llround(cfg.duration_s / cfg.dt));
    true_states->clear();
    noisy_omegas->clear();
    true_states->reserve(steps + 1);
    noisy_omegas->reserve(steps);
    Mat3 R = Mat3::Identity();
    true_states->push_back(R);
    for (int n = 0; n < steps; ++n) {
        const double tau = n * cfg.dt;
        const Vec3 omega = omega_profile(agent.trajectory_amplitudes, tau);
        const Vec3 noisy = omega + rng.mvn(agent.gyro_noise_cov);
        R = boxplus(R, cfg.dt * (cfg.truth_uses_clean_omega ? omega : noisy));
        true_states->push_back(R);
        noisy_omegas->push_back(noisy);
    }
}

DirectionalMeasurement synthesize_directional(const Mat3& true_state, const Vec3& d,
                                              int direction_index, const Mat3& noise_cov,
                                              Rng& rng) {
    return DirectionalMeasurement{true_state.transpose() * d + rng.mvn(noise_cov),
                                  direction_index, noise_cov};
}

RelativeMeasurement synthesize_relative(RelKind kind, const Mat3& R_i, const Mat3& R_j,
                                        const Mat3& Q_j, Rng& rng) {
    const Mat3 relative = R_j.transpose() * R_i;
    const Vec3 kappa = rng.mvn(Q_j);
    if (kind == RelKind::Physical) {
        return RelativeMeasurement{kind, boxplus(relative, kappa), Q_j};
    }
    return RelativeMeasurement{kind, exp_so3(log_so3(relative) + kappa), Q_j};
}

RunRecord run_scenario(const ScenarioConfig& cfg, std::uint64_t run_seed) {
    cfg.validate();
    Rng rng(run_seed);

    const int steps = static_cast<int>(std::llround(cfg.duration_s / cfg.dt));
    const AgentConfig& agent_i = cfg.agents[0];
    const AgentConfig& agent_j = cfg.agents[1];

    // true initial states differ by initial_offset_rad about a random axis
    Mat3 R_i = Mat3::Identity();
    Mat3 R_j = boxplus(R_i, cfg.initial_offset_rad * rng.unit_vector());

    auto initial_error = [&]() {
        Vec3 eps;
        do {
            eps = rng.mvn(cfg.initial_estimate_cov);
        } while (eps.norm() >= kPi - 0.05);
        return eps;
    };

    AgentEstimate est_i;
    est_i.attitude = boxplus(R_i, initial_error());
    est_i.cov = cfg.initial_estimate_cov;
    AgentEstimate est_j;
    est_j.attitude = boxplus(R_j, initial_error());
    est_j.cov = cfg.initial_estimate_cov;

    // the three ego variants share the initial estimate and all sensor draws
    AgentEstimate proposed = est_i;
    AgentEstimate directional_only = est_i;
    AgentEstimate naive = est_i;

    FusionOptions proposed_opts;
    proposed_opts.proxy_from_estimates = cfg.proxy_from_estimates;
    FusionOptions naive_opts;
    naive_opts.naive = true;
    std::vector<FusionEvent> proposed_events;
    std::vector<FusionEvent> naive_events;

    RunRecord rec;
    rec.time.reserve(steps + 1);
    rec.error_proposed.reserve(steps + 1);
    rec.error_directional_only.reserve(steps + 1);
    rec.error_naive.reserve(steps + 1);

    auto record = [&](double t) {
        const double ep = rotation_error(R_i, proposed.attitude);
        const double ed = rotation_error(R_i, directional_only.attitude);
        const double en = rotation_error(R_i, naive.attitude);
        if (!std::isfinite(ep) || !std::isfinite(ed) || !std::isfinite(en)) {
            throw InternalError("run_scenario: non-finite error value");
        }
        rec.time.push_back(t);
        rec.error_proposed.push_back(ep);
        rec.error_directional_only.push_back(ed);
        rec.error_naive.push_back(en);
    };
    record(0.0);

    int directional_fired = 0;
    int relative_fired = 0;

    for (int n = 1; n <= steps; ++n) {
        const double t = n * cfg.dt;
        const double tau = (n - 1) * cfg.dt;

        // fixed draw order per step: gyro i, gyro j, then event noise
        const Vec3 omega_i = omega_profile(agent_i.trajectory_amplitudes, tau);
        const Vec3 omega_j = omega_profile(agent_j.trajectory_amplitudes, tau);
        const Vec3 noisy_i = omega_i + rng.mvn(agent_i.gyro_noise_cov);
        const Vec3 noisy_j = omega_j + rng.mvn(agent_j.gyro_noise_cov);

        R_i = boxplus(R_i, cfg.dt * (cfg.truth_uses_clean_omega ? omega_i : noisy_i));
        R_j = boxplus(R_j, cfg.dt * (cfg.truth_uses_clean_omega ? omega_j : noisy_j));

        const ImuSample imu_i{noisy_i, cfg.dt, agent_i.gyro_noise_cov};
        const ImuSample imu_j{noisy_j, cfg.dt, agent_j.gyro_noise_cov};
        proposed = predict(proposed, imu_i);
        directional_only = predict(directional_only, imu_i);
        naive = predict(naive, imu_i);
        est_j = predict(est_j, imu_j);

        if (events_due(t, cfg.directional_rate_hz) > directional_fired) {
            ++directional_fired;
            for (std::size_t l = 0; l < agent_i.directions.size(); ++l) {
                const auto m = synthesize_directional(R_i, agent_i.directions[l],
                                                      static_cast<int>(l),
                                                      agent_i.directional_noise_cov, rng);
                proposed = update_directional(proposed, m, agent_i.directions[l]);
                directional_only = update_directional(directional_only, m, agent_i.directions[l]);
                naive = update_directional(naive, m, agent_i.directions[l]);
            }
            for (std::size_t l = 0; l < agent_j.directions.size(); ++l) {
                const auto m = synthesize_directional(R_j, agent_j.directions[l],
                                                      static_cast<int>(l),
                                                      agent_j.directional_noise_cov, rng);
                est_j = update_directional(est_j, m, agent_j.directions[l]);
            }
        }

        if (events_due(t, cfg.relative_rate_hz) > relative_fired) {
            ++relative_fired;
            SharePacket pkt;
            pkt.measurement =
                synthesize_relative(cfg.relative_model, R_i, R_j, cfg.relative_noise_cov, rng);
            pkt.sender_estimate = est_j;
            pkt.sender_id = 1;
            pkt.target_id = 0;
            pkt.timestamp = t;
            proposed = fuse_relative(proposed, pkt, cfg.alpha_policy, proposed_opts,
                                     &proposed_events);
            naive = fuse_relative(naive, pkt, cfg.alpha_policy, naive_opts, &naive_events);
        }

        record(t);
    }

    const int expected_directional = events_due(cfg.duration_s, cfg.directional_rate_hz);
    const int expected_relative = events_due(cfg.duration_s, cfg.relative_rate_hz);
    if (directional_fired != expected_directional || relative_fired != expected_relative) {
        throw InternalError("run_scenario: event schedule mismatch");
    }
    rec.directional_events_per_agent = directional_fired;
    rec.relative_events = relative_fired;
    rec.rejection_count = static_cast<int>(
        std::count_if(proposed_events.begin(), proposed_events.end(),
                      [](const FusionEvent& e) { return e.rejected; }));
    return rec;
}

namespace {

double percentile(std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

void aggregate(const std::vector<RunRecord>& runs,
               std::vector<double> RunRecord::*series, VariantSummary* out) {
    const std::size_t steps = runs[0].time.size();
    out->mean.assign(steps, 0.0);
    out->p25.assign(steps, 0.0);
    out->p75.assign(steps, 0.0);
    std::vector<double> column(runs.size());
    for (std::size_t s = 0; s < steps; ++s) {
        double sum = 0.0;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            column[r] = (runs[r].*series)[s];
            sum += column[r];
        }
        std::sort(column.begin(), column.end());
        out->mean[s] = sum / static_cast<double>(runs.size());
        out->p25[s] = percentile(column, 0.25);
        out->p75[s] = percentile(column, 0.75);
    }
}

}  // namespace

MonteCarloSummary run_monte_carlo(const ScenarioConfig& cfg, int threads) {
    cfg.validate();
    const int n = cfg.num_runs;
    std::vector<RunRecord> runs(n);

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, n);

    std::atomic<int> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= n) return;
            try {
                runs[k] = run_scenario(cfg, split_seed(cfg.seed, static_cast<std::uint64_t>(k)));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    MonteCarloSummary summary;
    summary.time = runs[0].time;
    summary.num_runs = n;
    summary.seed = cfg.seed;
    aggregate(runs, &RunRecord::error_proposed, &summary.proposed);
    aggregate(runs, &RunRecord::error_directional_only, &summary.directional_only);
    aggregate(runs, &RunRecord::error_naive, &summary.naive);
    return summary;
}

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.dt = 0.02;
    cfg.duration_s = 60.0;
    cfg.directional_rate_hz = 20.0;
    cfg.relative_rate_hz = 1.0;

    AgentConfig ego;
    ego.directions = {Vec3(0.0, 1.0, 0.0)};
    ego.directional_noise_cov = Vec3(0.04, 0.01, 0.09).asDiagonal();
    ego.gyro_noise_cov = Vec3(0.09, 0.04, 0.01).asDiagonal();
    ego.trajectory_amplitudes = Vec3(10.0, 1.0, 0.1);

    AgentConfig altruistic;
    altruistic.directions = {Vec3(0.0, 1.0, 0.0), Vec3(1.0, 0.0, 0.0)};
    altruistic.directional_noise_cov = Vec3(0.04, 0.01, 0.09).asDiagonal();
    altruistic.gyro_noise_cov = Vec3(0.09, 0.04, 0.01).asDiagonal();
    altruistic.trajectory_amplitudes = Vec3(1.0, 0.5, 5.0);

    cfg.agents = {ego, altruistic};
    cfg.relative_model = RelKind::Physical;
    cfg.relative_noise_cov = Vec3(0.25, 0.09, 0.04).asDiagonal();
    cfg.alpha_policy = AlphaPolicy{AlphaPolicyKind::Fixed, 0.1};
    cfg.initial_estimate_cov = Mat3::Identity();
    cfg.seed = 20250824;
    cfg.num_runs = 1000;
    return cfg;
}

}  // namespace geofuse
