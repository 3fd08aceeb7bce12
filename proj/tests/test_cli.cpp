#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef DMATCH_CLI_PATH
#error "DMATCH_CLI_PATH must point at the built executable"
#endif
#ifndef DMATCH_EXAMPLE_CONFIG
#error "DMATCH_EXAMPLE_CONFIG must point at the shipped scenario file"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult run(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "dmatch_cli_stdout.txt";
    const std::string cmd = std::string(DMATCH_CLI_PATH) + " " + args
                          + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    return r;
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

const std::string kModelAndScenario = R"(
[model]
time_constants = [0.04, 0.05, 0.06]
[scenario]
tau = 0.1
step = 1e-4
horizon = 1.5
)";

} // namespace

TEST_CASE("synth reports gains and the delay margin") {
    const auto r = run("synth --config " DMATCH_EXAMPLE_CONFIG);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("tau_max") != std::string::npos);
    CHECK(r.out.find("0.49999999") != std::string::npos);
    CHECK(r.out.find("eta0") != std::string::npos);
}

TEST_CASE("simulate writes a CSV and the repeat run is byte-identical") {
    const fs::path dir_a = fs::temp_directory_path() / "dmatch_cli_a";
    const fs::path dir_b = fs::temp_directory_path() / "dmatch_cli_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    const auto ra = run("simulate --config " DMATCH_EXAMPLE_CONFIG " --out " + dir_a.string());
    REQUIRE(ra.exit_code == 0);
    const auto rb = run("simulate --config " DMATCH_EXAMPLE_CONFIG " --out " + dir_b.string());
    REQUIRE(rb.exit_code == 0);

    const fs::path csv_a = dir_a / "design_point_trajectory.csv";
    const fs::path csv_b = dir_b / "design_point_trajectory.csv";
    REQUIRE(fs::exists(csv_a));
    const auto bytes_a = slurp(csv_a);
    CHECK(bytes_a == slurp(csv_b));
    CHECK(bytes_a.rfind("t,r,w1,", 0) == 0);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("syntax errors exit with code 1 and a line number") {
    const auto cfg = write_temp("dmatch_cli_bad.toml", "[chi\nchi1 = 1\n");
    const auto r = run("synth --config " + cfg.string());
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("line 1") != std::string::npos);
    fs::remove(cfg);
}

TEST_CASE("violated design constraints exit with code 2") {
    // chi3 above the quarter-square bound
    const auto cfg = write_temp("dmatch_cli_badchi.toml",
                                "[chi]\nchi1 = 1.0\nchi2 = 2.0\nchi3 = 5.0\nk2 = 0.1\n"
                                + kModelAndScenario);
    const auto r = run("synth --config " + cfg.string());
    CHECK(r.exit_code == 2);
    fs::remove(cfg);
}

TEST_CASE("simulate refuses a delay at or beyond the margin") {
    const auto r = run("simulate --config " DMATCH_EXAMPLE_CONFIG " --tau 0.6 --out "
                       + (fs::temp_directory_path() / "dmatch_cli_refuse").string());
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("allow-unstable") != std::string::npos);
}

TEST_CASE("a diverging run is truncated and exits with code 3") {
    // Lightly damped design far beyond its crossing delay, started off the
    // equilibrium so the unstable mode is actually excited.
    const auto cfg = write_temp("dmatch_cli_diverge.toml",
                                "[chi]\nchi1 = 1.0\nchi2 = 2.0\nchi3 = 0.9\nk2 = 0.1\n"
                                "[model]\ntime_constants = [0.04, 0.05, 0.06]\n"
                                "[scenario]\ntau = 6.0\nstep = 1e-2\nhorizon = 600\n"
                                "y2_offset = 0.1\n");
    const fs::path dir = fs::temp_directory_path() / "dmatch_cli_div";
    fs::remove_all(dir);
    const auto r = run("simulate --config " + cfg.string()
                       + " --allow-unstable --out " + dir.string());
    CHECK(r.exit_code == 3);
    CHECK(r.out.find("overflow") != std::string::npos);
    REQUIRE(fs::exists(dir / "trajectory.csv"));
    fs::remove_all(dir);
    fs::remove(cfg);
}

TEST_CASE("sweep prints one row per delay and keeps going after errors") {
    const auto r = run("sweep --config " DMATCH_EXAMPLE_CONFIG " --tau 0.1 --tau 0.45");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("tau_s,verdict,") != std::string::npos);
    CHECK(r.out.find("stable") != std::string::npos);

    const auto rr = run("sweep --config " DMATCH_EXAMPLE_CONFIG " --tau-range 0.1:0.3:0.1");
    CHECK(rr.exit_code == 0);
}

TEST_CASE("missing arguments exit non-zero") {
    CHECK(run("synth").exit_code != 0);
    CHECK(run("").exit_code != 0);
    CHECK(run("sweep --config " DMATCH_EXAMPLE_CONFIG).exit_code == 1);
}
