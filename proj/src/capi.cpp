#include "pmean/pmean.h"

#include <cstring>
#include <new>
#include <string>

#include "pmean/error.hpp"
#include "pmean/experiment.hpp"
#include "pmean/instance_io.hpp"
#include "pmean/online_alg.hpp"
#include "pmean/types.hpp"
#include "pmean/welfare.hpp"

struct pmean_instance {
    pmean::Instance value;
};

namespace {

thread_local std::string g_last_error;

pmean_status status_from(pmean::Errc code) {
    switch (code) {
    case pmean::Errc::invalid_argument: return PMEAN_ERR_INVALID_ARGUMENT;
    case pmean::Errc::parse: return PMEAN_ERR_PARSE;
    case pmean::Errc::scaling: return PMEAN_ERR_SCALING;
    case pmean::Errc::dimension: return PMEAN_ERR_DIMENSION;
    case pmean::Errc::domain: return PMEAN_ERR_DOMAIN;
    case pmean::Errc::size: return PMEAN_ERR_SIZE;
    case pmean::Errc::check_failed: return PMEAN_ERR_CHECK_FAILED;
    case pmean::Errc::io: return PMEAN_ERR_IO;
    case pmean::Errc::internal: return PMEAN_ERR_INTERNAL;
    }
    return PMEAN_ERR_INTERNAL;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs the body, translating exceptions into status codes.
template <typename Fn> pmean_status guarded(Fn&& body) {
    try {
        g_last_error.clear();
        return body();
    } catch (const pmean::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return PMEAN_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PMEAN_ERR_INTERNAL;
    }
}

pmean_status null_argument() {
    g_last_error = "null or invalid argument";
    return PMEAN_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char* pmean_status_name(pmean_status status) {
    switch (status) {
    case PMEAN_OK: return "ok";
    case PMEAN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PMEAN_ERR_PARSE: return "parse";
    case PMEAN_ERR_SCALING: return "scaling";
    case PMEAN_ERR_DIMENSION: return "dimension";
    case PMEAN_ERR_DOMAIN: return "domain";
    case PMEAN_ERR_SIZE: return "size";
    case PMEAN_ERR_CHECK_FAILED: return "check_failed";
    case PMEAN_ERR_IO: return "io";
    case PMEAN_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* pmean_last_error(void) { return g_last_error.c_str(); }

void pmean_free_string(char* text) { delete[] text; }

pmean_status pmean_instance_load(const char* path, pmean_instance** out) {
    if (path == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new pmean_instance{pmean::load_instance(path)};
        return PMEAN_OK;
    });
}

pmean_status pmean_instance_parse_json(const char* text, pmean_instance** out) {
    if (text == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new pmean_instance{pmean::parse_instance_json(text)};
        return PMEAN_OK;
    });
}

pmean_status pmean_instance_parse_csv(const char* text, pmean_instance** out) {
    if (text == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new pmean_instance{pmean::parse_instance_csv(text)};
        return PMEAN_OK;
    });
}

pmean_status pmean_instance_generate(const char* spec_json, pmean_instance** out) {
    if (spec_json == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        const std::string wrapped = std::string("{\"generator\":") + spec_json + "}";
        const pmean::ExperimentConfig config = pmean::parse_config(wrapped);
        *out = new pmean_instance{pmean::resolve_instance(config)};
        return PMEAN_OK;
    });
}

pmean_status pmean_instance_save(const pmean_instance* instance, const char* path) {
    if (instance == nullptr || path == nullptr) return null_argument();
    return guarded([&] {
        pmean::save_instance(instance->value, path);
        return PMEAN_OK;
    });
}

pmean_status pmean_instance_to_json(const pmean_instance* instance, char** out_text) {
    if (instance == nullptr || out_text == nullptr) return null_argument();
    return guarded([&] {
        *out_text = copy_string(pmean::instance_to_json(instance->value));
        return PMEAN_OK;
    });
}

int pmean_instance_agents(const pmean_instance* instance) {
    return instance == nullptr ? 0 : instance->value.agents();
}

long long pmean_instance_goods(const pmean_instance* instance) {
    return instance == nullptr ? 0 : instance->value.goods();
}

pmean_status pmean_instance_validate_scaling(const pmean_instance* instance, char** report_json) {
    if (instance == nullptr) return null_argument();
    return guarded([&] {
        const pmean::ScalingReport report = pmean::validate_scaling(instance->value);
        if (report_json != nullptr) {
            nlohmann::ordered_json doc;
            doc["ok"] = report.ok;
            doc["worst_agent"] = report.worst_agent + 1;
            doc["worst_deviation"] = report.worst_deviation;
            doc["violations"] = report.violations;
            *report_json = copy_string(doc.dump());
        }
        if (!report.ok) {
            g_last_error = "scaling violated: agent " + std::to_string(report.worst_agent + 1) +
                           " deviates by " + std::to_string(report.worst_deviation);
            return PMEAN_ERR_SCALING;
        }
        return PMEAN_OK;
    });
}

pmean_status pmean_instance_split_to_cap(const pmean_instance* instance, int paper_split,
                                         pmean_instance** out) {
    if (instance == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = new pmean_instance{pmean::split_to_cap(
            instance->value, paper_split ? pmean::SplitMode::paper : pmean::SplitMode::minimal)};
        return PMEAN_OK;
    });
}

void pmean_instance_free(pmean_instance* instance) { delete instance; }

pmean_status pmean_p_mean(const double* values, int n, const char* p, double* out) {
    if (values == nullptr || p == nullptr || out == nullptr || n < 1)
        return null_argument();
    return guarded([&] {
        *out = pmean::p_mean({values, static_cast<std::size_t>(n)}, pmean::Exponent::parse(p));
        return PMEAN_OK;
    });
}

pmean_status pmean_threshold(const char* p, int n, int universal, double* out) {
    if (p == nullptr || out == nullptr) return null_argument();
    return guarded([&] {
        *out = universal ? pmean::threshold_universal(n)
                         : pmean::threshold_for(pmean::Exponent::parse(p), n);
        return PMEAN_OK;
    });
}

pmean_status pmean_run(const pmean_instance* instance, const char* config_json,
                       char** report_json) {
    if (instance == nullptr || config_json == nullptr || report_json == nullptr)
        return null_argument();
    return guarded([&] {
        const pmean::ExperimentConfig config = pmean::parse_config(config_json);
        *report_json = copy_string(pmean::cmd_run(instance->value, config).dump());
        return PMEAN_OK;
    });
}

pmean_status pmean_oracle(const pmean_instance* instance, const char* config_json,
                          char** report_json) {
    if (instance == nullptr || config_json == nullptr || report_json == nullptr)
        return null_argument();
    return guarded([&] {
        const pmean::ExperimentConfig config = pmean::parse_config(config_json);
        *report_json = copy_string(pmean::cmd_oracle(instance->value, config).dump());
        return PMEAN_OK;
    });
}

pmean_status pmean_bench(const pmean_instance* instance, const char* config_json,
                         char** report_json) {
    if (config_json == nullptr || report_json == nullptr) return null_argument();
    return guarded([&] {
        const pmean::ExperimentConfig config = pmean::parse_config(config_json);
        const pmean::Instance* source = instance == nullptr ? nullptr : &instance->value;
        *report_json = copy_string(pmean::cmd_bench(source, config).dump());
        return PMEAN_OK;
    });
}

pmean_status pmean_adversary(const char* config_json, char** report_json) {
    if (config_json == nullptr || report_json == nullptr) return null_argument();
    return guarded([&] {
        const pmean::ExperimentConfig config = pmean::parse_config(config_json);
        *report_json = copy_string(pmean::cmd_adversary(config).dump());
        return PMEAN_OK;
    });
}

pmean_status pmean_validate(const char* config_json, char** report_json) {
    if (config_json == nullptr || report_json == nullptr) return null_argument();
    return guarded([&] {
        const pmean::ExperimentConfig config = pmean::parse_config(config_json);
        const pmean::Report report = pmean::cmd_validate(config);
        *report_json = copy_string(report.dump());
        if (!report.value("pass", true)) {
            std::string failing;
            for (const auto& chk : report["checks"])
                if (!chk.value("pass", true)) failing += (failing.empty() ? "" : ", ") +
                                                         chk["name"].get<std::string>();
            g_last_error = "validation failed: " + failing;
            return PMEAN_ERR_CHECK_FAILED;
        }
        return PMEAN_OK;
    });
}

pmean_status pmean_report_to_csv(const char* report_json, char** csv_out) {
    if (report_json == nullptr || csv_out == nullptr) return null_argument();
    return guarded([&] {
        pmean::Report report;
        try {
            report = pmean::Report::parse(report_json);
        } catch (const nlohmann::json::exception& e) {
            pmean::fail(pmean::Errc::parse, std::string("report JSON: ") + e.what());
        }
        *csv_out = copy_string(pmean::report_to_csv(report));
        return PMEAN_OK;
    });
}

} // extern "C"
