#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gpx/cli.hpp"

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"gpx"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return gpx::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("byte-identical reports across repeated runs") {
    std::vector<std::string> base{"invariants", "--profile", "{\"kind\":\"soliton\",\"c\":0.3}",
                                  "--grid", "L=40,N=1024", "--seed", "7"};
    auto a = base;
    a.push_back("--out");
    a.push_back("cli_rep_a.json");
    auto b = base;
    b.push_back("--out");
    b.push_back("cli_rep_b.json");
    CHECK(run_cli(a) == 0);
    CHECK(run_cli(b) == 0);
    CHECK(slurp("cli_rep_a.json") == slurp("cli_rep_b.json"));
    CHECK(slurp("cli_rep_a.json").find("config_hash") != std::string::npos);
    std::remove("cli_rep_a.json");
    std::remove("cli_rep_b.json");
}

TEST_CASE("exit codes: usage and numerical regime") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({"invariants", "--grid", "Q=40"}) == 2);
    // lambda on the cut is a numerical-regime failure, exit 3
    CHECK(run_cli({"transmission", "--profile", "constant_one", "--grid", "L=20,N=256",
                   "--lambda", "1.5"}) == 3);
}

TEST_CASE("energy subcommand emits the ladder schema") {
    CHECK(run_cli({"energy", "--profile", "{\"kind\":\"perturbed_background\",\"beta_re\":0.05,"
                   "\"beta_im\":0.02,\"width\":2.0,\"phase_ramp\":0.1}",
                   "--grid", "L=40,N=512", "--s", "0.5", "--tau0", "2", "--out",
                   "cli_energy.json"}) == 0);
    auto text = slurp("cli_energy.json");
    for (const char* key : {"\"s\"", "\"tau0\"", "\"value\"", "\"quad_error\"",
                            "\"tail_fraction\"", "\"nodes\""})
        CHECK(text.find(key) != std::string::npos);
    std::remove("cli_energy.json");
}

TEST_CASE("eigs subcommand reports pairings") {
    CHECK(run_cli({"eigs", "--profile", "{\"kind\":\"soliton\",\"c\":0.5}", "--grid",
                   "L=20,N=512", "--band", "-0.8", "0.8", "--resolution", "1e-5", "--out",
                   "cli_eigs.json"}) == 0);
    auto text = slurp("cli_eigs.json");
    CHECK(text.find("hausdorff") != std::string::npos);
    CHECK(text.find("tc_zeros") != std::string::npos);
    std::remove("cli_eigs.json");
}
