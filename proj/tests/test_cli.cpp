#include "app/cli.hpp"
#include "app/config.hpp"
#include "app/report.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace conekernel::app;
namespace fs = std::filesystem;

namespace {

RunConfig make(std::string command, json params, std::uint64_t seed = 0) {
    RunConfig c;
    c.command = std::move(command);
    c.parameters = std::move(params);
    c.seed = seed;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("conekernel_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("exponents report") {
    const RunResult r = run(make("exponents", {{"kappa", 1.5707963}, {"matrix", {4, 0, 1}}}));
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["schema_version"] == 1);
    CHECK(r.report["command"] == "exponents");
    CHECK(r.report["results"]["kappa_tilde"].get<double>() == doctest::Approx(2.214297).epsilon(1e-6));
    CHECK(r.report["results"]["lambda_c"].get<double>() == doctest::Approx(1.418776).epsilon(1e-6));
    CHECK(r.report["results"]["lambda_c_kind"] == "exact");
    CHECK(r.report.contains("diagnostics"));
    CHECK(r.report["config"]["parameters"]["alpha"] == 0.0);
}

TEST_CASE("kappa-tilde report") {
    const RunResult r = run(make("kappa-tilde", {{"kappa", 2.0}, {"alpha", 0.3}, {"matrix", {2, 1, 2}}}));
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["results"]["max_discrepancy"].get<double>() <= 1e-10);
}

TEST_CASE("eigenvalue-cap report") {
    const RunResult r = run(make("eigenvalue-cap", {{"kappa", 3.1415926}}));
    REQUIRE(r.exit_code == 0);
    const json& res = r.report["results"];
    CHECK(res["Lambda"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res["bracket"][0].get<double>() == doctest::Approx(1.4427).epsilon(1e-4));
    CHECK(res["bracket"][1].get<double>() == doctest::Approx(2.3439).epsilon(1e-4));
    CHECK(res["inside_bracket"] == true);
}

TEST_CASE("validation failures exit 1 with an error object") {
    const RunResult spd = run(make("exponents", {{"kappa", 1.0}, {"matrix", {1, 2, 1}}}));
    CHECK(spd.exit_code == 1);
    CHECK(spd.report["error"]["code"] == "NOT_SPD");
    CHECK(spd.report["error"]["kind"] == "validation");
    CHECK(spd.files.empty());
    CHECK(run(make("exponents", json::object())).report["error"]["code"] == "MISSING_PARAMETER");
    CHECK(run(make("exponents", {{"kappa", 1.0}, {"kapa", 2.0}})).report["error"]["code"] == "UNKNOWN_PARAMETER");
    CHECK(run(make("exponents", {{"kappa", 7.0}})).report["error"]["code"] == "BAD_ANGLE");
    CHECK(run(make("exponents", {{"kappa", "wide"}})).exit_code == 1);
    CHECK(run(make("nonsense", json::object())).report["error"]["code"] == "UNKNOWN_COMMAND");
    CHECK(run(make("kernel-mc", {{"kappa", 1.5}, {"y", {1.0, 0.5}}, {"dt", 0.5}})).report["error"]["code"] ==
          "BAD_DT");
}

TEST_CASE("numerical failures exit 2") {
    const RunResult r = run(make("duality", {{"kappa", 1.5707963},
                                             {"x", {40.0, 0.0}},
                                             {"y", {1.0, 0.2}},
                                             {"n_paths", 1000}}));
    CHECK(r.exit_code == 2);
    CHECK(r.report["error"]["kind"] == "numerical");
    CHECK(r.report["error"]["code"] == "EMPTY_CELLS");
}

TEST_CASE("config echo round-trips") {
    RunConfig c = make("kernel-mc", {{"kappa", 1.5707963}, {"y", {0.7, 0.1}}, {"n_paths", 2000}}, 99);
    c.output_dir = "somewhere";
    const RunResult r = run(c);
    REQUIRE(r.exit_code == 0);
    const RunConfig back = config_from_json(r.report["config"]);
    CHECK(back.command == c.command);
    CHECK(back.seed == 99);
    CHECK(back.output_dir == "somewhere");
    CHECK(config_to_json(back) == r.report["config"]);
    CHECK(run(back).report_text() == r.report_text());
    CHECK_THROWS(config_from_json({{"command", "exponents"}, {"extra", 1}}));
}

TEST_CASE("reports are byte-identical across repeats and thread counts") {
    const RunConfig c = make("kernel-mc",
                             {{"kappa", 4.0}, {"y", {0.2, 0.9}}, {"n_paths", 20000}, {"amplitude", {0.5, 0.1, 0.2}},
                              {"matrix", {2.0, 0.2, 1.0}}, {"frequency", 3.0}},
                             7);
    const RunResult a = run(c, {1});
    const RunResult b = run(c, {1});
    const RunResult d = run(c, {4});
    REQUIRE(a.exit_code == 0);
    CHECK(a.report_text() == b.report_text());
    CHECK(a.report_text() == d.report_text());
    REQUIRE(a.files.size() == d.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i] == d.files[i]);
    CHECK(a.report_text().find("threads") == std::string::npos);
}

TEST_CASE("CSV formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CsvTable t({"a", "b"});
    t.row().add(1.5).add(static_cast<long long>(2));
    CHECK(t.str() == "a,b\n1.5,2\n");
}

TEST_CASE("kernel-exact writes a grid") {
    const RunResult r = run(make("kernel-exact", {{"kappa", 2.0}, {"y", {1.0, 0.2}}, {"n_radial", 5}, {"n_angular", 4}}));
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.files.size() == 1);
    CHECK(r.files[0].first == "kernel.csv");
    std::istringstream lines(r.files[0].second);
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) ++n;
    CHECK(n == 1 + 5 * 4);
}

TEST_CASE("command-line binary") {
    const std::string exe = CONEKERNEL_CLI_PATH;
    const fs::path dir = scratch_dir("binary");
    const std::string out = " > " + (dir / "stdout.txt").string();

    CHECK(shell(exe + " exponents --kappa 1.5707963 --matrix 4,0,1 --output-dir " + (dir / "a").string() + out) == 0);
    const json report = json::parse(slurp(dir / "a" / "report.json"));
    CHECK(report["results"]["lambda_c"].get<double>() == doctest::Approx(1.418776).epsilon(1e-6));

    CHECK(shell(exe + " exponents --kappa 1.0 --matrix 1,2,1 --output-dir " + (dir / "b").string() + out) == 1);
    CHECK(json::parse(slurp(dir / "b" / "error.json"))["error"]["code"] == "NOT_SPD");

    // Flags override the configuration file.
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"command": "exponents", "parameters": {"kappa": 1.0, "matrix": [4, 0, 1]}})";
    }
    CHECK(shell(exe + " exponents --config " + (dir / "cfg.json").string() + " --kappa 3.141592653589793" +
                " --output-dir " + (dir / "c").string() + out) == 0);
    const json c = json::parse(slurp(dir / "c" / "report.json"));
    CHECK(c["results"]["kappa_tilde"].get<double>() == doctest::Approx(3.141592653589793).epsilon(1e-12));
    CHECK(c["config"]["parameters"]["matrix"][0] == 4.0);

    const std::string mc = exe + " kernel-mc --kappa 1.5707963 --y 0.7,0.1 --n-paths 5000 --seed 3";
    // Same output directory, since the echoed config records it.
    CHECK(shell(mc + " --threads 1 --simd scalar --output-dir " + (dir / "m").string() + out) == 0);
    const std::string report1 = slurp(dir / "m" / "report.json");
    const std::string density1 = slurp(dir / "m" / "density.csv");
    CHECK(!fs::exists(dir / "m" / "metadata.json"));
    CHECK(shell(mc + " --threads 3 --metadata --output-dir " + (dir / "m").string() + out) == 0);
    CHECK(report1 == slurp(dir / "m" / "report.json"));
    CHECK(density1 == slurp(dir / "m" / "density.csv"));
    CHECK(fs::exists(dir / "m" / "metadata.json"));

    CHECK(shell(exe + " exponents --kappa abc" + out) == 1);
    CHECK(shell(exe + " exponents --kappa 1.0 --simd sse9" + out) == 1);
    fs::remove_all(dir);
}
