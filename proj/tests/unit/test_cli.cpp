#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nep/cli.hpp"

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "nep");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return nep::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("exit codes") {
    const std::string out = "cli_test_out.csv";
    CHECK(run({"-o", out, "rate-curve", "--pmf", "0.12,0.88", "--lambda", "0:0.5:2"}) == 0);
    CHECK(run({"-o", out, "rate-curve", "--pmf", "0.12,0.8"}) == 2);              // bad mass
    CHECK(run({"-o", out, "rate-curve", "--pmf", "0.12,0.88", "--lambda", "1,0"}) == 2); // unsorted grid
    CHECK(run({"-o", out, "no-such-command"}) == 2);
    CHECK(run({"-o", out, "coding", "--pmf", "0.5,0.5", "--epsilon", "0.1", "--n", "10"}) == 1);
    CHECK(run({"-o", out, "tail-bound", "--pmf", "0.12,0.88", "--n", "0", "--delta", "0.1"}) != 0);
    // beyond the largest deviation the weak bound is 0 and the strong columns stay empty
    CHECK(run({"-o", out, "tail-bound", "--pmf", "0.12,0.88", "--n", "10", "--delta", "5"}) == 0);
    CHECK(slurp(out).find("5,10,0,,,") != std::string::npos);
    CHECK(run({"-o", out, "tail-bound", "--pmf", "0.12,0.88", "--bsc", "0.1", "--n", "10", "--delta", "0.1"}) == 2);
    std::remove(out.c_str());
}

TEST_CASE("csv output") {
    const std::string out = "cli_test_curve.csv";
    REQUIRE(run({"-o", out, "rate-curve", "--pmf", "0.12,0.88", "--delta", "0.1,0.2"}) == 0);
    const auto text = slurp(out);
    CHECK(text.rfind("lambda,", 0) == 0);
    CHECK(text.find("0.039536585926018") != std::string::npos);
    std::remove(out.c_str());
}

TEST_CASE("json output and bits") {
    const std::string out = "cli_test_curve.json";
    REQUIRE(run({"-o", out, "--format", "json", "--bits", "rate-curve", "--pmf", "0.12,0.88", "--delta", "0.2"}) == 0);
    const auto text = slurp(out);
    CHECK(text.find("\"command\"") != std::string::npos);
    CHECK(text.find("\"units\"") != std::string::npos);
    CHECK(text.find("bits") != std::string::npos);
    // 0.039536585926018311 nats / ln 2
    CHECK(text.find("0.057039236449") != std::string::npos);
    std::remove(out.c_str());
}
