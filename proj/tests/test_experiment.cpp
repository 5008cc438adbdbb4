#include <doctest.h>

#include <cmath>

#include "pmean/error.hpp"
#include "pmean/experiment.hpp"
#include "pmean/instance_io.hpp"

using namespace pmean;

namespace {

Instance small_instance(int n = 4, long t = 24, std::uint64_t seed = 5) {
    AdversaryParams params;
    params.n = n;
    params.t = t;
    params.seed = seed;
    return generate_random(AdversaryKind::random_dirichlet, params);
}

} // namespace

TEST_CASE("config parsing covers the full surface") {
    const ExperimentConfig config = parse_config(R"({
        "p": "-0.5",
        "threshold": "manual",
        "phi": 12.5,
        "algorithm": "greedy",
        "split": "paper",
        "diagnostics": "lemmas",
        "oracle": true,
        "oracle_budget": 99,
        "seed": 42,
        "generator": {"kind": "random_sparse", "n": 6, "t": 32, "seed": 7}
    })");
    CHECK(config.p.value() == -0.5);
    CHECK(config.threshold_mode == ThresholdMode::manual);
    CHECK(config.phi_manual == 12.5);
    CHECK(config.algorithm == OnlineAlgorithm::greedy);
    CHECK(config.split == SplitMode::paper);
    CHECK(config.diagnostics == DiagLevel::lemmas);
    CHECK(config.with_oracle);
    CHECK(config.oracle_budget == 99);
    CHECK(config.seed == 42);
    CHECK(config.generator->kind == AdversaryKind::random_sparse);

    CHECK_THROWS_AS(parse_config("{\"threshold\":\"manual\"}"), Error);
    CHECK_THROWS_AS(parse_config("{\"p\":\"nope\"}"), Error);
    CHECK_THROWS_AS(parse_config("{\"instance\":\"a\",\"generator\":{\"kind\":\"random_dirichlet\"}}"),
                    Error);
    CHECK_THROWS_AS(parse_config("nonsense"), Error);
    try {
        parse_config(R"({"seed":"abc"})"); // wrong field type maps to a parse failure
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse);
    }
}

TEST_CASE("run reports are self-describing and deterministic") {
    const Instance inst = small_instance();
    ExperimentConfig config;
    config.p = Exponent::nash();
    config.with_oracle = true;
    config.oracle_budget = 80;

    const Report a = cmd_run(inst, config);
    const Report b = cmd_run(inst, config);
    CHECK(a.dump() == b.dump());

    CHECK(a["mode"] == "run");
    CHECK(a["config"]["n"] == 4);
    CHECK(a["config"]["p"] == "0");
    CHECK(a["config"]["phi"].get<double>() ==
          doctest::Approx(threshold_for(Exponent::nash(), 4)));
    CHECK(a["config"]["threshold_mode"] == "table");
    CHECK(a["online_welfare"].get<double>() > 0.0);
    CHECK(a["agent_values"].size() == 4);
    CHECK(a["ratio"].get<double>() >= 1.0 - 1e-6);
    CHECK(a["min_value"].get<double>() >= 0.125 - 1e-9);
}

TEST_CASE("scaling violations abort the pipeline with the scaling code") {
    const Instance bad = Instance::from_goods(2, {{0.6, 0.5}, {0.5, 0.5}});
    ExperimentConfig config;
    try {
        cmd_run(bad, config);
        FAIL("expected a scaling error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::scaling);
        CHECK(std::string(e.what()).find("agent 1") != std::string::npos);
    }
}

TEST_CASE("lemma diagnostics appear under the manual n/4 threshold") {
    const Instance inst = small_instance(8, 32, 9);
    ExperimentConfig config;
    config.threshold_mode = ThresholdMode::manual;
    config.phi_manual = 2.0; // n/4
    config.diagnostics = DiagLevel::full;
    config.oracle_budget = 100;
    const Report report = cmd_run(inst, config);
    CHECK(report["diagnostics"]["hypothesis_met"] == true);
    CHECK(report["diagnostics"]["all_ok"] == true);
    CHECK(report["invariants"]["ok"] == true);

    ExperimentConfig loose = config;
    loose.phi_manual = 8.0; // n/2: hypothesis fails, reported but not asserted
    const Report r2 = cmd_run(inst, loose);
    CHECK(r2["diagnostics"]["hypothesis_met"] == false);
}

TEST_CASE("bench sorts rows by p and applies the upper-bound envelopes") {
    const Instance inst = small_instance(8, 32, 11);
    ExperimentConfig config;
    config.p_grid = {Exponent::finite(0.5), Exponent::neg_infinity(), Exponent::nash()};
    config.oracle_budget = 120;
    const Report report = cmd_bench(&inst, config);
    REQUIRE(report["rows"].size() == 3);
    CHECK(report["rows"][0]["p"] == "-inf");
    CHECK(report["rows"][1]["p"] == "0");
    CHECK(report["rows"][2]["p"] == "0.5");
    for (const auto& row : report["rows"]) {
        CHECK(row["bound_kind"] == "upper");
        CHECK(row["pass"] == true);
    }
    CHECK(report["pass"] == true);
}

TEST_CASE("bench covers a full p grid on a random n=16 instance") {
    const Instance inst = small_instance(16, 24, 2);
    ExperimentConfig config;
    for (const char* p : {"-inf", "-2", "-1", "-0.5", "-0.2", "0", "0.5", "1"})
        config.p_grid.push_back(Exponent::parse(p));
    config.oracle_budget = 120;
    const Report report = cmd_bench(&inst, config);
    REQUIRE(report["rows"].size() == 8);
    for (const auto& row : report["rows"]) CHECK(row["pass"] == true);
    CHECK(report["pass"] == true);
}

TEST_CASE("bench with an empty grid emits an empty table") {
    const Instance inst = small_instance();
    ExperimentConfig config;
    const Report report = cmd_bench(&inst, config);
    CHECK(report["rows"].empty());
    CHECK(report["pass"] == true);
}

TEST_CASE("bench against the 4-agent adversary shows ratios above one") {
    ExperimentConfig config;
    GeneratorSpec gen;
    gen.kind = AdversaryKind::suboptimality_4agent;
    gen.params.n = 4;
    config.generator = gen;
    config.p_grid = {Exponent::finite(-1.0), Exponent::nash(), Exponent::finite(0.5)};
    const Report report = cmd_bench(nullptr, config);
    for (const auto& row : report["rows"]) {
        CHECK(row["bound_kind"] == "lower");
        CHECK(row["ratio"].get<double>() > 1.0);
        CHECK(row["pass"] == true);
    }
}

TEST_CASE("a zero online welfare serializes as an inf ratio and still passes") {
    // greedy starves all but one special agent per group, so the harmonic
    // welfare collapses to zero and the ratio becomes +inf
    ExperimentConfig config;
    GeneratorSpec gen;
    gen.kind = AdversaryKind::negative_p_groups;
    gen.params.n = 27;
    config.generator = gen;
    config.algorithm = OnlineAlgorithm::greedy;
    config.p_grid = {Exponent::finite(-1.0)};
    const Report report = cmd_bench(nullptr, config);
    REQUIRE(report["rows"].size() == 1);
    CHECK(report["rows"][0]["ratio"] == "inf");
    CHECK(report["rows"][0]["pass"] == true);

    const std::string csv = report_to_csv(report);
    CHECK(csv.find(",inf,") != std::string::npos);
}

TEST_CASE("adversary pipeline reports bounds and embeds the transcript") {
    ExperimentConfig config;
    GeneratorSpec gen;
    gen.kind = AdversaryKind::suboptimality_4agent;
    gen.params.n = 4;
    config.generator = gen;
    config.p = Exponent::nash();
    config.embed_transcript = true;
    const Report report = cmd_adversary(config);
    CHECK(report["mode"] == "adversary");
    CHECK(report["oracle_welfare"].get<double>() == doctest::Approx(0.625));
    CHECK(report["ratio"].get<double>() > 1.0);
    CHECK(report["predicted"]["strict"] == true);
    REQUIRE(report.contains("transcript"));
    const Instance transcript = parse_instance_json(report["transcript"].dump());
    CHECK(transcript.goods() == 40);
    CHECK(transcript.meta().find("against=alg") != std::string::npos);
}

TEST_CASE("oracle pipeline honors method selection") {
    const Instance inst = small_instance(2, 4, 3);
    ExperimentConfig config;
    config.oracle_method = OracleMethodChoice::grid;
    config.grid_step = 0.25;
    const Report grid = cmd_oracle(inst, config);
    CHECK(grid["method"] == "grid_bruteforce");
    config.oracle_method = OracleMethodChoice::conditional_gradient;
    const Report fw = cmd_oracle(inst, config);
    CHECK(fw["method"] == "conditional_gradient");
    CHECK(fw["welfare"].get<double>() >= grid["welfare"].get<double>() - (2 * 4 * 0.25 + 1e-6));
}

TEST_CASE("ratio bound tables match the hand-computed constants at n=8") {
    const double lg = 4.0;
    CHECK(table_ratio_bound(Exponent::neg_infinity(), 8) ==
          doctest::Approx(128.0 * std::sqrt(8.0) * lg));
    CHECK(table_ratio_bound(Exponent::nash(), 8) == doctest::Approx(32.0 * 64.0));
    CHECK(table_ratio_bound(Exponent::finite(-2.0), 8) ==
          doctest::Approx(320.0 * std::sqrt(8.0) * lg));
    CHECK(table_ratio_bound(Exponent::finite(0.5), 8) == doctest::Approx(128.0 * 64.0));
    CHECK(table_ratio_bound(Exponent::finite(-0.1), 8) == doctest::Approx(192.0 * 64.0));
    CHECK(table_ratio_bound(Exponent::finite(-0.5), 8) ==
          doctest::Approx(std::pow(2.0, 3.0) * 8.0 * std::pow(8.0, 1.0 / 3.0) * 16.0));
    CHECK(universal_ratio_bound(Exponent::nash(), 8) == doctest::Approx(32.0 * std::sqrt(8.0) * lg));
}

TEST_CASE("validate runs the suites and the CSV projection is stable") {
    ExperimentConfig config;
    config.validate_agents = {4}; // keep the unit-test variant quick
    const Report report = cmd_validate(config);
    CHECK(report["pass"] == true);
    for (const auto& chk : report["checks"]) CHECK(chk["pass"] == true);

    const std::string csv = report_to_csv(report);
    CHECK(csv.rfind("name,pass,detail\n", 0) == 0);

    const Instance inst = small_instance();
    ExperimentConfig run_config;
    const std::string run_csv = report_to_csv(cmd_run(inst, run_config));
    CHECK(run_csv.rfind("field,value\n", 0) == 0);
    CHECK(run_csv.find("config.n,4") != std::string::npos);

    ExperimentConfig bench_config;
    bench_config.p_grid = {Exponent::nash()};
    bench_config.oracle_budget = 50;
    const std::string bench_csv = report_to_csv(cmd_bench(&inst, bench_config));
    CHECK(bench_csv.rfind("p,phi,online_welfare,oracle_welfare,ratio,bound,bound_kind,pass\n", 0) == 0);
}
