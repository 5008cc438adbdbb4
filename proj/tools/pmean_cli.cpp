// Command-line harness for online p-mean welfare experiments. All real work
// happens behind the C API in libpmean; this binary only assembles configs,
// moves text around, and maps statuses to exit codes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmean/pmean.h"

namespace {

using nlohmann::json;

// Exit code contract: 0 success, 1 invariant failure, 2 I/O or parse or
// configuration, 3 scaling violation.
int exit_code_for(pmean_status status) {
    switch (status) {
    case PMEAN_OK: return 0;
    case PMEAN_ERR_CHECK_FAILED: return 1;
    case PMEAN_ERR_SCALING: return 3;
    default: return 2;
    }
}

int fail_with(pmean_status status) {
    std::fprintf(stderr, "pmean: %s: %s\n", pmean_status_name(status), pmean_last_error());
    return exit_code_for(status);
}

struct OwnedString {
    char* text = nullptr;
    ~OwnedString() { pmean_free_string(text); }
};

struct OwnedInstance {
    pmean_instance* handle = nullptr;
    ~OwnedInstance() { pmean_instance_free(handle); }
};

struct CommonOpts {
    std::string instance_path;
    std::string generator;
    int n = 4;
    long t = 64;
    std::string p = "0";
    std::string threshold = "table";
    double phi = 0.0;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string diagnostics = "off";
    std::string split = "minimal";
    std::string algorithm = "alg";
    std::string out;
    bool with_oracle = false;
    long oracle_budget = 400;
    bool redirect_unassigned = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_instance = true) {
    if (with_instance) {
        cmd->add_option("--instance", opts.instance_path, "instance file (.json or .csv)");
        cmd->add_option("--generator", opts.generator,
                        "instance generator kind (random_dirichlet, random_sparse, "
                        "suboptimality_4agent, negative_p_groups)");
        cmd->add_option("--n", opts.n, "agent count for generators");
        cmd->add_option("--t", opts.t, "good count for random generators");
    }
    cmd->add_option("--p", opts.p, "welfare exponent: decimal or nsw|egal|-inf|util");
    cmd->add_option("--threshold", opts.threshold, "table|universal|manual")
        ->check(CLI::IsMember({"table", "universal", "manual"}));
    cmd->add_option("--phi", opts.phi, "manual threshold value");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--format", opts.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--diagnostics", opts.diagnostics, "off|lemmas|full")
        ->check(CLI::IsMember({"off", "lemmas", "full"}));
    cmd->add_option("--split", opts.split, "minimal|paper")
        ->check(CLI::IsMember({"minimal", "paper"}));
    cmd->add_option("--algorithm", opts.algorithm, "alg|greedy|uniform")
        ->check(CLI::IsMember({"alg", "greedy", "uniform"}));
    cmd->add_option("--out", opts.out, "write the report here instead of stdout");
    cmd->add_flag("--oracle", opts.with_oracle, "also compute the offline benchmark and ratio");
    cmd->add_option("--oracle-budget", opts.oracle_budget, "conditional-gradient iteration budget");
    cmd->add_flag("--redirect-unassigned", opts.redirect_unassigned,
                  "give an empty vulnerable set's share to the argmax agent");
}

json base_config(const CommonOpts& opts) {
    json config;
    if (!opts.instance_path.empty()) config["instance"] = opts.instance_path;
    config["p"] = opts.p;
    config["threshold"] = opts.threshold;
    if (opts.phi > 0.0) config["phi"] = opts.phi;
    config["algorithm"] = opts.algorithm;
    config["split"] = opts.split;
    config["diagnostics"] = opts.diagnostics;
    config["seed"] = opts.seed;
    config["oracle"] = opts.with_oracle;
    config["oracle_budget"] = opts.oracle_budget;
    config["redirect_unassigned"] = opts.redirect_unassigned;
    if (!opts.generator.empty()) {
        json gen;
        gen["kind"] = opts.generator;
        gen["n"] = opts.n;
        gen["t"] = opts.t;
        gen["seed"] = opts.seed;
        gen["p"] = opts.p;
        config["generator"] = gen;
    }
    return config;
}

int resolve_instance(const CommonOpts& opts, OwnedInstance& instance, bool required) {
    if (!opts.instance_path.empty() && !opts.generator.empty()) {
        std::fprintf(stderr, "pmean: give exactly one of --instance and --generator\n");
        return 2;
    }
    if (!opts.instance_path.empty()) {
        const pmean_status status = pmean_instance_load(opts.instance_path.c_str(), &instance.handle);
        if (status != PMEAN_OK) return fail_with(status);
        return 0;
    }
    if (!opts.generator.empty()) {
        // adaptive kinds stay inside the adversary/bench pipelines
        if (opts.generator == "random_dirichlet" || opts.generator == "random_sparse") {
            const json spec = base_config(opts)["generator"];
            const pmean_status status =
                pmean_instance_generate(spec.dump().c_str(), &instance.handle);
            if (status != PMEAN_OK) return fail_with(status);
        }
        return 0;
    }
    if (required) {
        std::fprintf(stderr, "pmean: an instance source is required (--instance or --generator)\n");
        return 2;
    }
    return 0;
}

int emit_report(const CommonOpts& opts, const char* report_json) {
    std::string text;
    if (opts.format == "csv") {
        OwnedString csv;
        const pmean_status status = pmean_report_to_csv(report_json, &csv.text);
        if (status != PMEAN_OK) return fail_with(status);
        text = csv.text;
    } else {
        text = report_json;
        text += "\n";
    }
    if (opts.out.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return 0;
    }
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "pmean: cannot write %s\n", opts.out.c_str());
        return 2;
    }
    out << text;
    return 0;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"online p-mean welfare maximization harness"};
    app.require_subcommand(1);

    CommonOpts run_opts, oracle_opts, adversary_opts, bench_opts, validate_opts;
    std::string oracle_method = "fw";
    double grid_step = 0.125;
    std::string bench_grid = "-inf,-2,-1,-0.5,0,0.5,1";
    std::string adversary_export;
    std::string validate_nlist = "4,8,16";

    auto* run_cmd = app.add_subcommand("run", "preprocess, run the online allocator, report");
    add_common(run_cmd, run_opts);

    auto* oracle_cmd = app.add_subcommand("oracle", "offline benchmark welfare for an instance");
    add_common(oracle_cmd, oracle_opts);
    oracle_cmd->add_option("--method", oracle_method, "fw|grid")
        ->check(CLI::IsMember({"fw", "grid"}));
    oracle_cmd->add_option("--grid-step", grid_step, "grid oracle step (1/4 or 1/8)");

    auto* adversary_cmd =
        app.add_subcommand("adversary", "run an adaptive lower-bound construction");
    add_common(adversary_cmd, adversary_opts);
    adversary_cmd->add_option("--export", adversary_export,
                              "write the adapted transcript as an instance file");

    auto* bench_cmd = app.add_subcommand("bench", "competitive ratios over a p grid");
    add_common(bench_cmd, bench_opts);
    bench_cmd->add_option("--p-grid", bench_grid, "comma-separated exponents (empty for none)");

    auto* validate_cmd =
        app.add_subcommand("validate", "run the property suites, or validate an instance file");
    add_common(validate_cmd, validate_opts);
    validate_cmd->add_option("--n-list", validate_nlist, "agent counts for the suites");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        OwnedInstance instance;
        if (int rc = resolve_instance(run_opts, instance, true); rc != 0) return rc;
        if (instance.handle == nullptr) {
            std::fprintf(stderr, "pmean: run needs a file or a random generator; "
                                 "adaptive kinds go through `pmean adversary`\n");
            return 2;
        }
        OwnedString report;
        const json config = base_config(run_opts);
        const pmean_status status = pmean_run(instance.handle, config.dump().c_str(), &report.text);
        if (status != PMEAN_OK) return fail_with(status);
        return emit_report(run_opts, report.text);
    }

    if (oracle_cmd->parsed()) {
        OwnedInstance instance;
        if (int rc = resolve_instance(oracle_opts, instance, true); rc != 0) return rc;
        if (instance.handle == nullptr) {
            std::fprintf(stderr, "pmean: oracle needs a file or a random generator\n");
            return 2;
        }
        json config = base_config(oracle_opts);
        config["oracle_method"] = oracle_method;
        config["grid_step"] = grid_step;
        OwnedString report;
        const pmean_status status =
            pmean_oracle(instance.handle, config.dump().c_str(), &report.text);
        if (status != PMEAN_OK) return fail_with(status);
        return emit_report(oracle_opts, report.text);
    }

    if (adversary_cmd->parsed()) {
        if (adversary_opts.generator.empty()) {
            std::fprintf(stderr, "pmean: adversary needs --generator\n");
            return 2;
        }
        json config = base_config(adversary_opts);
        config["embed_transcript"] = true;
        OwnedString report;
        const pmean_status status = pmean_adversary(config.dump().c_str(), &report.text);
        if (status != PMEAN_OK) return fail_with(status);
        if (!adversary_export.empty()) {
            const json parsed = json::parse(report.text);
            if (!parsed.contains("transcript")) {
                std::fprintf(stderr, "pmean: no transcript available to export\n");
                return 2;
            }
            std::ofstream out(adversary_export, std::ios::binary);
            if (!out) {
                std::fprintf(stderr, "pmean: cannot write %s\n", adversary_export.c_str());
                return 2;
            }
            out << parsed["transcript"].dump() << "\n";
        }
        return emit_report(adversary_opts, report.text);
    }

    if (bench_cmd->parsed()) {
        OwnedInstance instance;
        if (int rc = resolve_instance(bench_opts, instance, false); rc != 0) return rc;
        if (instance.handle == nullptr && bench_opts.generator.empty()) {
            std::fprintf(stderr, "pmean: bench needs an instance source\n");
            return 2;
        }
        json config = base_config(bench_opts);
        config["p_grid"] = split_list(bench_grid);
        OwnedString report;
        const pmean_status status =
            pmean_bench(instance.handle, config.dump().c_str(), &report.text);
        if (status != PMEAN_OK) return fail_with(status);
        return emit_report(bench_opts, report.text);
    }

    // validate
    json config = base_config(validate_opts);
    if (!validate_opts.instance_path.empty()) config["instance"] = validate_opts.instance_path;
    json nlist = json::array();
    for (const auto& item : split_list(validate_nlist)) nlist.push_back(std::stoi(item));
    config["validate_n"] = nlist;
    if (validate_opts.phi > 0.0) {
        config["threshold"] = "manual";
        config["phi"] = validate_opts.phi;
    }
    OwnedString report;
    const pmean_status status = pmean_validate(config.dump().c_str(), &report.text);
    if (report.text != nullptr) {
        if (int rc = emit_report(validate_opts, report.text); rc != 0) return rc;
    }
    if (status != PMEAN_OK) {
        std::fprintf(stderr, "pmean: %s: %s\n", pmean_status_name(status), pmean_last_error());
        return exit_code_for(status);
    }
    return 0;
}
