// Drives the installed CLI binary end to end (path arrives as argv[1]) and
// checks the documented exit-code contract.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string g_cli;

struct CliResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const auto dir = std::filesystem::temp_directory_path();
    const auto out_path = dir / ("pmean_cli_out_" + std::to_string(counter++) + ".txt");
    const std::string command = g_cli + " " + args + " > " + out_path.string() + " 2>&1";
    const int raw = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out_path);
    std::filesystem::remove(out_path);
    return result;
}

std::filesystem::path write_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-pmean-binary>\n");
        return 2;
    }
    g_cli = argv[1];
    doctest::Context context;
    context.applyCommandLine(argc - 1, argv + 1);
    return context.run();
}

TEST_CASE("run produces a JSON report and exit 0") {
    const auto inst = write_file("cli_ok.json", R"({"n":2,"goods":[[0.5,0.25],[0.5,0.75]]})");
    const CliResult r = run_cli("run --instance " + inst.string() + " --p 0");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"online_welfare\"") != std::string::npos);
    std::filesystem::remove(inst);
}

TEST_CASE("nsw is an alias for p=0") {
    const auto inst = write_file("cli_alias.json", R"({"n":2,"goods":[[0.5,0.25],[0.5,0.75]]})");
    const CliResult a = run_cli("run --instance " + inst.string() + " --p 0");
    const CliResult b = run_cli("run --instance " + inst.string() + " --p nsw");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    std::filesystem::remove(inst);
}

TEST_CASE("universal threshold ignores p") {
    const auto inst = write_file("cli_uni.json", R"({"n":2,"goods":[[0.5,0.25],[0.5,0.75]]})");
    const CliResult a = run_cli("run --instance " + inst.string() + " --p -2 --threshold universal");
    const CliResult b = run_cli("run --instance " + inst.string() + " --p 0.5 --threshold universal");
    CHECK(a.exit_code == 0);
    // same phi either way: 8 sqrt(2) log2(4)
    CHECK(a.out.find("\"phi\":22.6274") != std::string::npos);
    CHECK(b.out.find("\"phi\":22.6274") != std::string::npos);
    std::filesystem::remove(inst);
}

TEST_CASE("scaling violations exit with code 3") {
    const auto inst = write_file("cli_bad.json", R"({"n":2,"goods":[[0.6,0.5],[0.5,0.5]]})");
    const CliResult r = run_cli("run --instance " + inst.string() + " --p 0");
    CHECK(r.exit_code == 3);
    std::filesystem::remove(inst);

    const auto corrupt = write_file("cli_bad2.json", R"({"n":2,"goods":[[0.6,0.5],[0.5,0.5]]})");
    const CliResult v = run_cli("validate --instance " + corrupt.string());
    CHECK(v.exit_code == 3);
    std::filesystem::remove(corrupt);
}

TEST_CASE("unreadable or malformed instances exit with code 2") {
    CHECK(run_cli("run --instance /no/such/file.json --p 0").exit_code == 2);
    const auto broken = write_file("cli_broken.json", "{oops");
    CHECK(run_cli("run --instance " + broken.string() + " --p 0").exit_code == 2);
    std::filesystem::remove(broken);
    CHECK(run_cli("run --p 0").exit_code == 2); // no source at all
}

TEST_CASE("the tailored Nash threshold at n=8 resolves to 512") {
    const CliResult r =
        run_cli("run --generator random_dirichlet --n 8 --t 24 --seed 4 --p 0 --threshold table");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"phi\":512.0") != std::string::npos);
}

TEST_CASE("bench accepts a p grid and csv output") {
    const CliResult r = run_cli(
        "bench --generator random_dirichlet --n 4 --t 24 --seed 1 --p-grid -1,0 --format csv "
        "--oracle-budget 60");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("p,phi,online_welfare,oracle_welfare,ratio,bound,bound_kind,pass\n", 0) == 0);

    const CliResult empty = run_cli(
        "bench --generator random_dirichlet --n 4 --t 24 --seed 1 --p-grid \"\" --format csv");
    CHECK(empty.exit_code == 0);
}

TEST_CASE("adversary exports a loadable transcript") {
    const auto out = std::filesystem::temp_directory_path() / "cli_transcript.json";
    const CliResult r = run_cli("adversary --generator suboptimality_4agent --n 4 --p 0 --export " +
                                out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"ratio\"") != std::string::npos);

    const CliResult replay = run_cli("run --instance " + out.string() + " --p 0");
    CHECK(replay.exit_code == 0);
    std::filesystem::remove(out);
}

TEST_CASE("validate honors the phi hypothesis switch") {
    // phi = 2 > n/4 at n=4: lemma checks are reported, not asserted; exit 0
    const CliResult loose = run_cli("validate --n-list 4 --phi 2 --format csv");
    CHECK(loose.exit_code == 0);
    CHECK(loose.out.find("hypothesis not met") != std::string::npos);

    // phi = 2 = n/4 at n=8: hypothesis met, bounds asserted
    const CliResult tight = run_cli("validate --n-list 8 --phi 2 --format csv");
    CHECK(tight.exit_code == 0);
    CHECK(tight.out.find("hypothesis not met") == std::string::npos);
}

TEST_CASE("PMEAN_LOG=debug routes library logging to stderr") {
    const auto inst = write_file("cli_log.json", R"({"n":2,"goods":[[0.5,0.25],[0.5,0.75]]})");
    const auto err = std::filesystem::temp_directory_path() / "pmean_cli_err.txt";
    const std::string command = "PMEAN_LOG=debug " + g_cli + " run --instance " + inst.string() +
                                " --p 0 --oracle > /dev/null 2> " + err.string();
    CHECK(WEXITSTATUS(std::system(command.c_str())) == 0);
    CHECK(slurp(err).find("[pmean debug]") != std::string::npos);
    std::filesystem::remove(inst);
    std::filesystem::remove(err);
}

TEST_CASE("reports can land in a file via --out") {
    const auto inst = write_file("cli_out.json", R"({"n":2,"goods":[[0.5,0.25],[0.5,0.75]]})");
    const auto report = std::filesystem::temp_directory_path() / "cli_report.json";
    const CliResult r =
        run_cli("run --instance " + inst.string() + " --p util --out " + report.string());
    CHECK(r.exit_code == 0);
    CHECK(slurp(report).find("\"mode\":\"run\"") != std::string::npos);
    std::filesystem::remove(inst);
    std::filesystem::remove(report);
}
