#include "geofuse/geofuse.h"

#include <chrono>
#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/selftest.hpp"
#include "core/sim.hpp"

using namespace geofuse;

struct gf_config {
    ScenarioConfig cfg;
    nlohmann::json raw;  // pre-validation document, kept for overrides
};

struct gf_summary {
    MonteCarloSummary summary;
    ScenarioConfig cfg;
    double wall_time_s = 0.0;
};

namespace {

void set_error(char* errbuf, size_t errlen, const std::string& msg) {
    if (errbuf == nullptr || errlen == 0) return;
    std::strncpy(errbuf, msg.c_str(), errlen - 1);
    errbuf[errlen - 1] = '\0';
}

template <typename Fn>
gf_status guarded(char* errbuf, size_t errlen, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        set_error(errbuf, errlen, e.what());
        return GF_ERR_CONFIG;
    } catch (const DomainError& e) {
        set_error(errbuf, errlen, e.what());
        return GF_ERR_DOMAIN;
    } catch (const std::exception& e) {
        set_error(errbuf, errlen, e.what());
        return GF_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* gf_version(void) {
#ifdef GEOFUSE_BUILD_ID
    return GEOFUSE_BUILD_ID;
#else
    return "unknown";
#endif
}

gf_status gf_config_load(const char* path, gf_config** out, char* errbuf, size_t errlen) {
    if (path == nullptr || out == nullptr) {
        set_error(errbuf, errlen, "null argument");
        return GF_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded(errbuf, errlen, [&]() {
        auto raw = load_config_json(path);
        auto cfg = parse_config_json(raw);
        *out = new gf_config{std::move(cfg), std::move(raw)};
        return GF_OK;
    });
}

gf_status gf_config_default(gf_config** out, char* errbuf, size_t errlen) {
    if (out == nullptr) {
        set_error(errbuf, errlen, "null argument");
        return GF_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded(errbuf, errlen, [&]() {
        auto cfg = default_scenario();
        *out = new gf_config{cfg, resolved_config_json(cfg)};
        return GF_OK;
    });
}

gf_status gf_config_set(gf_config* cfg, const char* key, const char* value,
                        char* errbuf, size_t errlen) {
    if (cfg == nullptr || key == nullptr || value == nullptr) {
        set_error(errbuf, errlen, "null argument");
        return GF_ERR_CONFIG;
    }
    return guarded(errbuf, errlen, [&]() {
        nlohmann::json updated = cfg->raw;
        apply_override(updated, key, value);
        cfg->cfg = parse_config_json(updated);
        cfg->raw = std::move(updated);
        return GF_OK;
    });
}

void gf_config_free(gf_config* cfg) { delete cfg; }

gf_status gf_run_monte_carlo(const gf_config* cfg, int threads, gf_summary** out,
                             char* errbuf, size_t errlen) {
    if (cfg == nullptr || out == nullptr) {
        set_error(errbuf, errlen, "null argument");
        return GF_ERR_CONFIG;
    }
    *out = nullptr;
    return guarded(errbuf, errlen, [&]() {
        const auto start = std::chrono::steady_clock::now();
        auto summary = run_monte_carlo(cfg->cfg, threads);
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start;
        *out = new gf_summary{std::move(summary), cfg->cfg, elapsed.count()};
        return GF_OK;
    });
}

int gf_summary_num_steps(const gf_summary* s) {
    return s == nullptr ? 0 : static_cast<int>(s->summary.time.size());
}

gf_status gf_summary_write(const gf_summary* s, const char* out_dir,
                           char* errbuf, size_t errlen) {
    if (s == nullptr || out_dir == nullptr) {
        set_error(errbuf, errlen, "null argument");
        return GF_ERR_CONFIG;
    }
    return guarded(errbuf, errlen, [&]() {
        try {
            emit_results(s->summary, s->cfg, out_dir, s->wall_time_s);
        } catch (const ConfigError& e) {
            set_error(errbuf, errlen, e.what());
            return GF_ERR_IO;
        }
        return GF_OK;
    });
}

void gf_summary_free(gf_summary* s) { delete s; }

gf_status gf_selftest(void) {
    const auto report = run_selftest();
    print_report(report);
    return report.all_passed() ? GF_OK : GF_ERR_SELFTEST;
}

}  // extern "C"
