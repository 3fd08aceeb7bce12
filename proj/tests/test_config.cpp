#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "dmatch/config.hpp"
#include "dmatch/csv.hpp"
#include "dmatch/errors.hpp"

using namespace dmatch;

namespace {

const std::string kGoodText = R"(# demo scenario
[chi]
chi1 = 1.42662
chi2 = 217.2061
chi3 = 676.2171
k2 = 0.1

[model]
time_constants = [0.04, 0.05, 0.06]

[scenario]
tau = 0.1
step = 1e-4
horizon = 1.5

[output]
csv = "out.csv"
)";

} // namespace

TEST_CASE("parse_scenario_text accepts a full file") {
    const auto f = parse_scenario_text(kGoodText);
    CHECK(f.chi.chi1 == 1.42662);
    CHECK(f.chi.chi2 == 217.2061);
    CHECK(f.chi.chi3 == 676.2171);
    CHECK(f.chi.k2 == 0.1);
    REQUIRE(f.model.time_constants().has_value());
    CHECK(f.model.time_constants()->size() == 3);
    CHECK((*f.model.time_constants())[1] == 0.05);
    CHECK(f.has_scenario);
    CHECK(f.scenario.tau == 0.1);
    CHECK(f.scenario.step == 1e-4);
    CHECK(f.scenario.horizon == 1.5);
    CHECK(f.scenario.ybar1 == 0.5); // default
    CHECK(f.csv_path == "out.csv");
    CHECK_FALSE(f.plant.has_value());

    const auto sc = f.make_sim_scenario();
    CHECK(sc.tau == 0.1);
    CHECK(sc.h == 1e-4);
    CHECK(sc.y2_0 == 0.5);
}

TEST_CASE("explicit transfer-function model") {
    const auto f = parse_scenario_text(R"(
[chi]
chi1 = 1.42662
chi2 = 217.2061
chi3 = 676.2171
k2 = 0.1
[model]
num = [1.0]
den = [1.0, 3.0, 3.0, 1.0]
)");
    CHECK_FALSE(f.model.time_constants().has_value());
    CHECK(f.model.den_coeffs().size() == 4);
    CHECK(f.model.den_coeffs()[1] == 3.0);
}

TEST_CASE("unknown keys and sections are rejected with a line number") {
    try {
        parse_scenario_text(kGoodText + "\n[chi2]\nx = 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("chi2") != std::string::npos);
    }

    try {
        parse_scenario_text(R"(
[chi]
chi1 = 1.42662
chi2 = 217.2061
chi3 = 676.2171
k2 = 0.1
chi9 = 3.0
[model]
time_constants = [0.05]
)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("chi9") != std::string::npos);
        CHECK(e.line == 7);
    }
}

TEST_CASE("missing requirements are named") {
    try {
        parse_scenario_text("[chi]\nchi1 = 1\nchi2 = 2\nchi3 = 3\n[model]\ntime_constants = [0.1]\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("k2") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_scenario_text("[model]\ntime_constants = [0.1]\n"), ParseError);
    CHECK_THROWS_AS(
        parse_scenario_text("[chi]\nchi1 = 1\nchi2 = 2\nchi3 = 3\nk2 = 0\n[model]\nnum = [1.0]\n"),
        ParseError);
}

TEST_CASE("malformed lines are rejected") {
    CHECK_THROWS_AS(parse_scenario_text("[chi\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("chi1 = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("[chi]\nchi1\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("[chi]\nchi1 = abc\n"), ParseError);
    CHECK_THROWS_AS(parse_scenario_text("[chi]\nchi1 = 1\nchi1 = 2\n"), ParseError);
    CHECK_THROWS_AS(
        parse_scenario_text("[chi]\nchi1=1\nchi2=2\nchi3=3\nk2=0\n[model]\ntime_constants = []\n"),
        ParseError);
}

TEST_CASE("plant section is optional but validated") {
    const std::string base = R"(
[chi]
chi1 = 1.42662
chi2 = 217.2061
chi3 = 676.2171
k2 = 0.1
[model]
time_constants = [0.04, 0.05, 0.06]
)";
    const auto f = parse_scenario_text(base + "[plant]\nr_w = 0.035\nb_w = 0.2\na15 = 2.0\na26 = 1.5\n");
    REQUIRE(f.plant.has_value());
    CHECK(f.plant->r_w == 0.035);
    CHECK(f.plant->a15 == 2.0);
    CHECK(f.plant->a11 == 0.0);

    CHECK_THROWS_AS(
        parse_scenario_text(base + "[plant]\nr_w = 0.035\nb_w = 0.2\na15 = 0.0\na26 = 1.5\n"),
        ParseError);
    CHECK_THROWS_AS(
        parse_scenario_text(base + "[plant]\nr_w = -1\nb_w = 0.2\na15 = 2.0\na26 = 1.5\n"),
        ParseError);
}

TEST_CASE("trajectory CSV round-trips doubles exactly") {
    Trajectory traj;
    const double vals[] = {0.0, 1.0 / 3.0, std::sqrt(2.0), -1e-17, 6.02214076e23};
    for (double v : vals) {
        traj.t.push_back(v);
        traj.r.push_back(v * 2.0);
        traj.w1.push_back(v / 7.0);
        traj.w_tilde2.push_back(-v);
        traj.w2.push_back(v + 1.0);
        traj.y1.push_back(v * v);
        traj.y2.push_back(std::cos(v));
        traj.y2dot.push_back(std::sin(v));
        traj.psi5.push_back(v - 0.25);
        traj.psi6.push_back(v * 1e-8);
        traj.g_out.push_back(v * 3.0);
        traj.y2_ref.push_back(std::cos(v) + 1e-16);
        traj.err.push_back(-1e-16);
    }

    const auto path = std::filesystem::temp_directory_path() / "dmatch_roundtrip.csv";
    write_trajectory_csv(traj, path);
    const auto back = read_trajectory_csv(path);
    std::filesystem::remove(path);

    REQUIRE(back.t.size() == traj.t.size());
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        REQUIRE(back.t[i] == traj.t[i]);
        REQUIRE(back.y2[i] == traj.y2[i]);
        REQUIRE(back.y2_ref[i] == traj.y2_ref[i]);
        REQUIRE(back.err[i] == traj.err[i]);
        REQUIRE(back.psi6[i] == traj.psi6[i]);
    }

    const auto text = trajectory_csv(traj);
    CHECK(text.rfind("t,r,w1,w_tilde2,w2,y1,y2,y2dot,psi5,psi6,g_out,y2_ref,err\n", 0) == 0);
}

TEST_CASE("CSV reader rejects a foreign header") {
    const auto path = std::filesystem::temp_directory_path() / "dmatch_badheader.csv";
    {
        std::FILE* fp = std::fopen(path.string().c_str(), "w");
        std::fputs("a,b,c\n1,2,3\n", fp);
        std::fclose(fp);
    }
    CHECK_THROWS_AS(read_trajectory_csv(path), std::runtime_error);
    std::filesystem::remove(path);
}
