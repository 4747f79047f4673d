#include "core/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace geofuse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError("config error at " + (path.empty() ? "/" : path) + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown key");
    }
}

double require_number(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + "/" + key, "missing required key");
    if (!obj[key].is_number()) fail(path + "/" + key, "expected a number");
    return obj[key].get<double>();
}

Mat3 parse_cov(const json& v, const std::string& path) {
    if (!v.is_array() || (v.size() != 3 && v.size() != 9)) {
        fail(path, "covariance must be 3 diagonal entries or 9 row-major entries");
    }
    for (const auto& e : v) {
        if (!e.is_number()) fail(path, "covariance entries must be numbers");
    }
    Mat3 M = Mat3::Zero();
    if (v.size() == 3) {
        for (int k = 0; k < 3; ++k) M(k, k) = v[k].get<double>();
    } else {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) M(r, c) = v[3 * r + c].get<double>();
        }
    }
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10) fail(path, "covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(M, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        fail(path, "covariance has a negative eigenvalue");
    }
    return M;
}

Vec3 parse_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
    for (const auto& e : v) {
        if (!e.is_number()) fail(path, "entries must be numbers");
    }
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

AgentConfig parse_agent(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown(obj, path,
                   {"directions", "directional_noise_cov", "gyro_noise_cov", "trajectory"});
    AgentConfig a;
    if (!obj.contains("directions") || !obj["directions"].is_array() ||
        obj["directions"].empty()) {
        fail(path + "/directions", "expected a nonempty array of unit vectors");
    }
    for (std::size_t l = 0; l < obj["directions"].size(); ++l) {
        a.directions.push_back(
            parse_vec3(obj["directions"][l], path + "/directions/" + std::to_string(l)));
    }
    if (!obj.contains("directional_noise_cov")) {
        fail(path + "/directional_noise_cov", "missing required key");
    }
    a.directional_noise_cov =
        parse_cov(obj["directional_noise_cov"], path + "/directional_noise_cov");
    if (!obj.contains("gyro_noise_cov")) fail(path + "/gyro_noise_cov", "missing required key");
    a.gyro_noise_cov = parse_cov(obj["gyro_noise_cov"], path + "/gyro_noise_cov");
    if (!obj.contains("trajectory")) fail(path + "/trajectory", "missing required key");
    a.trajectory_amplitudes = parse_vec3(obj["trajectory"], path + "/trajectory");
    return a;
}

std::string format9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

json cov_to_json(const Mat3& M) {
    const Mat3 D = M - Mat3(M.diagonal().asDiagonal());
    json v = json::array();
    if (D.cwiseAbs().maxCoeff() == 0.0) {
        for (int k = 0; k < 3; ++k) v.push_back(M(k, k));
    } else {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) v.push_back(M(r, c));
        }
    }
    return v;
}

}  // namespace

ScenarioConfig parse_config_json(const json& doc) {
    if (!doc.is_object()) fail("", "top-level document must be an object");
    reject_unknown(doc, "",
                   {"dt", "duration_s", "directional_rate_hz", "relative_rate_hz", "agents",
                    "relative", "fusion", "monte_carlo", "initial_offset_deg",
                    "initial_estimate_cov", "truth_uses_clean_omega", "proxy_from_estimates"});

    ScenarioConfig cfg;
    cfg.dt = require_number(doc, "", "dt");
    cfg.duration_s = require_number(doc, "", "duration_s");
    cfg.directional_rate_hz = require_number(doc, "", "directional_rate_hz");
    cfg.relative_rate_hz = require_number(doc, "", "relative_rate_hz");

    if (!doc.contains("agents") || !doc["agents"].is_array() || doc["agents"].size() != 2) {
        fail("/agents", "expected an array of exactly 2 agents");
    }
    cfg.agents.clear();
    for (std::size_t a = 0; a < doc["agents"].size(); ++a) {
        cfg.agents.push_back(parse_agent(doc["agents"][a], "/agents/" + std::to_string(a)));
    }

    if (!doc.contains("relative") || !doc["relative"].is_object()) {
        fail("/relative", "missing required object");
    }
    const json& rel = doc["relative"];
    reject_unknown(rel, "/relative", {"model", "Q", "rate_hz"});
    if (!rel.contains("model") || !rel["model"].is_string()) {
        fail("/relative/model", "expected \"physical\" or \"angular\"");
    }
    const std::string model = rel["model"].get<std::string>();
    if (model == "physical") {
        cfg.relative_model = RelKind::Physical;
    } else if (model == "angular") {
        cfg.relative_model = RelKind::Angular;
    } else {
        fail("/relative/model", "expected \"physical\" or \"angular\"");
    }
    if (!rel.contains("Q")) fail("/relative/Q", "missing required key");
    cfg.relative_noise_cov = parse_cov(rel["Q"], "/relative/Q");
    if (rel.contains("rate_hz")) {
        const double r = rel["rate_hz"].get<double>();
        if (std::abs(r - cfg.relative_rate_hz) > 1e-9) {
            fail("/relative/rate_hz", "disagrees with top-level relative_rate_hz");
        }
    }

    if (!doc.contains("fusion") || !doc["fusion"].is_object()) {
        fail("/fusion", "missing required object");
    }
    const json& fus = doc["fusion"];
    reject_unknown(fus, "/fusion", {"alpha_policy", "alpha"});
    if (!fus.contains("alpha_policy") || !fus["alpha_policy"].is_string()) {
        fail("/fusion/alpha_policy", "expected \"optimal\" or \"fixed\"");
    }
    const std::string policy = fus["alpha_policy"].get<std::string>();
    if (policy == "optimal") {
        cfg.alpha_policy.kind = AlphaPolicyKind::Optimal;
    } else if (policy == "fixed") {
        cfg.alpha_policy.kind = AlphaPolicyKind::Fixed;
        if (!fus.contains("alpha")) fail("/fusion/alpha", "required for fixed alpha policy");
    } else {
        fail("/fusion/alpha_policy", "expected \"optimal\" or \"fixed\"");
    }
    if (fus.contains("alpha")) {
        if (!fus["alpha"].is_number()) fail("/fusion/alpha", "expected a number");
        cfg.alpha_policy.alpha = fus["alpha"].get<double>();
    }

    if (!doc.contains("monte_carlo") || !doc["monte_carlo"].is_object()) {
        fail("/monte_carlo", "missing required object");
    }
    const json& mc = doc["monte_carlo"];
    reject_unknown(mc, "/monte_carlo", {"num_runs", "seed"});
    if (!mc.contains("num_runs") || !mc["num_runs"].is_number_integer()) {
        fail("/monte_carlo/num_runs", "expected an integer");
    }
    cfg.num_runs = mc["num_runs"].get<int>();
    if (!mc.contains("seed") || !mc["seed"].is_number_integer()) {
        fail("/monte_carlo/seed", "expected an integer");
    }
    cfg.seed = mc["seed"].get<std::uint64_t>();

    if (doc.contains("initial_offset_deg")) {
        if (!doc["initial_offset_deg"].is_number()) {
            fail("/initial_offset_deg", "expected a number");
        }
        const double rad = doc["initial_offset_deg"].get<double>() * kPi / 180.0;
        cfg.initial_offset_rad = std::min(rad, kPi - 1e-3);
    }
    if (doc.contains("initial_estimate_cov")) {
        cfg.initial_estimate_cov = parse_cov(doc["initial_estimate_cov"], "/initial_estimate_cov");
    }
    if (doc.contains("truth_uses_clean_omega")) {
        if (!doc["truth_uses_clean_omega"].is_boolean()) {
            fail("/truth_uses_clean_omega", "expected a boolean");
        }
        cfg.truth_uses_clean_omega = doc["truth_uses_clean_omega"].get<bool>();
    }
    if (doc.contains("proxy_from_estimates")) {
        if (!doc["proxy_from_estimates"].is_boolean()) {
            fail("/proxy_from_estimates", "expected a boolean");
        }
        cfg.proxy_from_estimates = doc["proxy_from_estimates"].get<bool>();
    }

    cfg.validate();
    return cfg;
}

nlohmann::json load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("JSON parse failure in " + path + ": " + e.what());
    }
    return doc;
}

ScenarioConfig parse_config(const std::string& path) {
    return parse_config_json(load_config_json(path));
}

void apply_override(nlohmann::json& doc, const std::string& key, const std::string& value) {
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::exception&) {
        parsed = value;  // bare strings are allowed unquoted
    }
    json* node = &doc;
    std::stringstream ss(key);
    std::string segment;
    std::vector<std::string> segments;
    while (std::getline(ss, segment, '.')) segments.push_back(segment);
    if (segments.empty()) throw ConfigError("empty override key");
    for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
        const std::string& seg = segments[s];
        if (node->is_array()) {
            const std::size_t idx = std::stoul(seg);
            if (idx >= node->size()) throw ConfigError("override index out of range: " + key);
            node = &(*node)[idx];
        } else {
            node = &(*node)[seg];
        }
    }
    const std::string& last = segments.back();
    if (node->is_array()) {
        const std::size_t idx = std::stoul(last);
        if (idx >= node->size()) throw ConfigError("override index out of range: " + key);
        (*node)[idx] = parsed;
    } else {
        (*node)[last] = parsed;
    }
}

nlohmann::json resolved_config_json(const ScenarioConfig& cfg) {
    json doc;
    doc["dt"] = cfg.dt;
    doc["duration_s"] = cfg.duration_s;
    doc["directional_rate_hz"] = cfg.directional_rate_hz;
    doc["relative_rate_hz"] = cfg.relative_rate_hz;
    doc["agents"] = json::array();
    for (const auto& a : cfg.agents) {
        json agent;
        agent["directions"] = json::array();
        for (const auto& d : a.directions) {
            agent["directions"].push_back({d.x(), d.y(), d.z()});
        }
        agent["directional_noise_cov"] = cov_to_json(a.directional_noise_cov);
        agent["gyro_noise_cov"] = cov_to_json(a.gyro_noise_cov);
        agent["trajectory"] = {a.trajectory_amplitudes.x(), a.trajectory_amplitudes.y(),
                               a.trajectory_amplitudes.z()};
        doc["agents"].push_back(agent);
    }
    doc["relative"]["model"] = cfg.relative_model == RelKind::Physical ? "physical" : "angular";
    doc["relative"]["Q"] = cov_to_json(cfg.relative_noise_cov);
    doc["fusion"]["alpha_policy"] =
        cfg.alpha_policy.kind == AlphaPolicyKind::Optimal ? "optimal" : "fixed";
    doc["fusion"]["alpha"] = cfg.alpha_policy.alpha;
    doc["monte_carlo"]["num_runs"] = cfg.num_runs;
    doc["monte_carlo"]["seed"] = cfg.seed;
    doc["initial_offset_deg"] = cfg.initial_offset_rad * 180.0 / kPi;
    doc["initial_estimate_cov"] = cov_to_json(cfg.initial_estimate_cov);
    doc["truth_uses_clean_omega"] = cfg.truth_uses_clean_omega;
    doc["proxy_from_estimates"] = cfg.proxy_from_estimates;
    return doc;
}

void emit_results(const MonteCarloSummary& summary, const ScenarioConfig& cfg,
                  const std::string& dir, double wall_time_s) {
    if (summary.time.empty()) throw ConfigError("emit_results: empty summary");
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path csv_path = fs::path(dir) / "errors.csv";
    const fs::path meta_path = fs::path(dir) / "run_meta.json";

    auto cleanup = [&]() {
        fs::remove(csv_path, ec);
        fs::remove(meta_path, ec);
    };

    try {
        std::ofstream csv(csv_path);
        if (!csv) throw ConfigError("cannot write " + csv_path.string());
        csv << "time_s,variant,mean_rad,p25_rad,p75_rad\n";
        struct Row {
            const char* name;
            const VariantSummary* v;
        };
        const Row rows[] = {{"proposed", &summary.proposed},
                            {"directional_only", &summary.directional_only},
                            {"naive", &summary.naive}};
        for (std::size_t s = 0; s < summary.time.size(); ++s) {
            for (const auto& row : rows) {
                csv << format9(summary.time[s]) << ',' << row.name << ','
                    << format9(row.v->mean[s]) << ',' << format9(row.v->p25[s]) << ','
                    << format9(row.v->p75[s]) << '\n';
            }
        }
        csv.close();
        if (!csv) throw ConfigError("write failure on " + csv_path.string());

        json meta;
        meta["config"] = resolved_config_json(cfg);
        meta["seed"] = summary.seed;
        meta["num_runs"] = summary.num_runs;
#ifdef GEOFUSE_BUILD_ID
        meta["build_id"] = GEOFUSE_BUILD_ID;
#else
        meta["build_id"] = "unknown";
#endif
        meta["wall_time_s"] = wall_time_s;
        std::ofstream mf(meta_path);
        if (!mf) throw ConfigError("cannot write " + meta_path.string());
        mf << meta.dump(2) << '\n';
        mf.close();
        if (!mf) throw ConfigError("write failure on " + meta_path.string());
    } catch (...) {
        cleanup();
        throw;
    }
}

}  // namespace geofuse
