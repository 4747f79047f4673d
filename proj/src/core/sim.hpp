#pragma once

#include <cstdint>
#include <vector>

#include "core/fusion.hpp"
#include "core/rng.hpp"

namespace geofuse {

/// Oscillatory angular-velocity profile
/// omega(tau) = (a*|sin tau|, b*|cos tau|, c*|sin tau|) rad/s.
Vec3 omega_profile(const Vec3& amplitudes, double tau);

struct AgentConfig {
    std::vector<Vec3> directions;       // known reference directions, unit norm
    Mat3 directional_noise_cov = Mat3::Zero();
    Mat3 gyro_noise_cov = Mat3::Zero();
    Vec3 trajectory_amplitudes = Vec3::Zero();
};

struct ScenarioConfig {
    double dt = 0.02;
    double duration_s = 60.0;
    double directional_rate_hz = 20.0;
    double relative_rate_hz = 1.0;
    std::vector<AgentConfig> agents;  // [0] = ego i, [1] = altruistic j
    RelKind relative_model = RelKind::Physical;
    Mat3 relative_noise_cov = Mat3::Identity();  // Q_j
    AlphaPolicy alpha_policy;
    double initial_offset_rad = 3.14159265358979323846 - 1e-3;
    Mat3 initial_estimate_cov = Mat3::Identity();
    std::uint64_t seed = 0;
    int num_runs = 1;
    /// When true the truth integrates the noiseless profile and only the
    /// filters see the corrupted signal. Default: truth is driven by the
    /// corrupted signal, which the filters also receive.
    bool truth_uses_clean_omega = false;
    bool proxy_from_estimates = false;

    /// Throws ConfigError on violated invariants.
    void validate() const;
};

/// Per-run error traces for the three ego-filter variants (radians).
struct RunRecord {
    std::vector<double> time;
    std::vector<double> error_proposed;
    std::vector<double> error_directional_only;
    std::vector<double> error_naive;
    int rejection_count = 0;
    int directional_events_per_agent = 0;
    int relative_events = 0;
};

struct VariantSummary {
    std::vector<double> mean;
    std::vector<double> p25;
    std::vector<double> p75;
};

struct MonteCarloSummary {
    std::vector<double> time;
    VariantSummary proposed;
    VariantSummary directional_only;
    VariantSummary naive;
    int num_runs = 0;
    std::uint64_t seed = 0;
};

/// e = arccos((tr(R^-1 Rhat) - 1)/2), clamped into [0, pi].
double rotation_error(const Mat3& R, const Mat3& Rhat);

/// Euler-integrate a trajectory, returning duration/dt + 1 true states and
/// the corrupted angular-velocity samples the filter would see.
void generate_trajectory(const AgentConfig& agent, const ScenarioConfig& cfg, Rng& rng,
                         std::vector<Mat3>* true_states, std::vector<Vec3>* noisy_omegas);

DirectionalMeasurement synthesize_directional(const Mat3& true_state, const Vec3& d,
                                              int direction_index, const Mat3& noise_cov,
                                              Rng& rng);

RelativeMeasurement synthesize_relative(RelKind kind, const Mat3& R_i, const Mat3& R_j,
                                        const Mat3& Q_j, Rng& rng);

/// One deterministic scenario: predict every step, directional updates at
/// the directional rate, relative-measurement fusion at the relative rate.
/// All three ego variants consume identical sensor realizations.
RunRecord run_scenario(const ScenarioConfig& cfg, std::uint64_t run_seed);

/// num_runs independent scenarios with seeds split_seed(cfg.seed, k),
/// aggregated per step into mean and 25th/75th percentiles.
/// threads = 0 picks hardware concurrency; thread count never changes output.
MonteCarloSummary run_monte_carlo(const ScenarioConfig& cfg, int threads = 0);

/// The paper's experiment configuration (two agents, 60 s, 1000 runs).
ScenarioConfig default_scenario();

}  // namespace geofuse
