#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmean/adversary.hpp"
#include "pmean/diagnostics.hpp"
#include "pmean/online_alg.hpp"
#include "pmean/oracle.hpp"
#include "pmean/types.hpp"
#include "pmean/welfare.hpp"

namespace pmean {

using Report = nlohmann::ordered_json;

enum class DiagLevel { off, lemmas, full };
enum class OracleMethodChoice { conditional_gradient, grid };

struct GeneratorSpec {
    AdversaryKind kind = AdversaryKind::random_dirichlet;
    AdversaryParams params;
};

struct ExperimentConfig {
    std::optional<std::string> instance_path;
    std::optional<GeneratorSpec> generator;
    Exponent p = Exponent::nash();
    std::vector<Exponent> p_grid; // bench mode
    ThresholdMode threshold_mode = ThresholdMode::table;
    double phi_manual = 0.0;
    OnlineAlgorithm algorithm = OnlineAlgorithm::alg_phi;
    SplitMode split = SplitMode::minimal;
    DiagLevel diagnostics = DiagLevel::off;
    bool with_oracle = false;
    long oracle_budget = 400;
    OracleMethodChoice oracle_method = OracleMethodChoice::conditional_gradient;
    double grid_step = 0.125;
    std::uint64_t seed = 0;
    bool redirect_unassigned = false;
    bool embed_transcript = false;          // adversary mode: include the instance in the report
    std::vector<int> validate_agents = {4, 8, 16}; // validate suite sizes
};

ExperimentConfig parse_config(const std::string& config_json);

// Resolves the instance source: loads the file or runs the (non-adaptive)
// generator. Adaptive kinds are only valid in adversary or bench mode.
Instance resolve_instance(const ExperimentConfig& config);

double resolve_threshold(const ExperimentConfig& config, Exponent p, int agents);

// Competitive-ratio envelopes versus the half-optimal reference allocation,
// per threshold mode. The measured oracle/online ratio is expected to stay
// within twice these (the reference-vs-optimum factor plus log-base slack is
// the caller's concern).
double table_ratio_bound(Exponent p, int agents);
double universal_ratio_bound(Exponent p, int agents);

// Pipelines. Each returns a self-describing JSON report.
Report cmd_run(const Instance& instance, const ExperimentConfig& config);
Report cmd_oracle(const Instance& instance, const ExperimentConfig& config);
Report cmd_bench(const Instance* instance, const ExperimentConfig& config);
Report cmd_adversary(const ExperimentConfig& config);
Report cmd_validate(const ExperimentConfig& config);

// Flat CSV projection: bench reports become one row per grid point, other
// reports a single row of their scalar fields.
std::string report_to_csv(const Report& report);

// Property/invariant suites behind `validate`.
struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;
};
std::vector<CheckResult> validate_welfare_properties(std::uint64_t seed);
std::vector<CheckResult> validate_online_invariants(std::uint64_t seed,
                                                    const std::vector<int>& agent_counts,
                                                    std::optional<double> phi_override);
std::vector<CheckResult> validate_oracle_agreement(std::uint64_t seed);
std::vector<CheckResult> validate_adversary_counts();

} // namespace pmean
