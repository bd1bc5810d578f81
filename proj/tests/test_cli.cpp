#include "sigmanoise/cli.hpp"

#include <doctest.h>

#include <stdexcept>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sigmanoise;

namespace {

struct Run {
    int status;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("every subcommand is registered") {
    const auto names = cli::subcommands();
    CHECK(names.size() == 16);
    for (const char* name : {"sample-path", "covariance", "ito-isometry", "sigma-inner", "equivalence", "ifs-moments",
                             "cuntz-check", "bernoulli-density", "bernoulli-scaling", "ac2-proxy", "boundary-embed",
                             "szego-check", "julia-kernel", "set-kernel", "fourier-isometry", "fbm-variance"}) {
        CHECK(std::find(names.begin(), names.end(), name) != names.end());
    }
}

TEST_CASE("parse produces a complete descriptor") {
    const auto d = cli::parse({"covariance", "--measure", "lebesgue:0,1", "--A", "0,0.6", "--B", "0.4,1", "--N", "100000",
                               "--seed", "7"});
    CHECK(d.subcommand == "covariance");
    CHECK(d.seed == 7);
    CHECK(d.options.at("A") == "0,0.6");
    CHECK(d.options.at("J") == "0");
    const auto j = nlohmann::json::parse(d.to_json());
    CHECK(j["seed"] == 7);
    CHECK(j["options"]["N"] == "100000");
    const auto b = cli::parse({"bernoulli-density", "--lambda", "0.5", "--N", "1000000"});
    CHECK(b.options.at("h") == "0.01");
}

TEST_CASE("usage errors name the flag") {
    CHECK_THROWS_WITH_AS(cli::parse({"covariance", "--N", "10"}), doctest::Contains("--N"), cli::UsageError);
    CHECK_THROWS_WITH_AS(cli::parse({"covariance", "--N", "1e9"}), doctest::Contains("--N"), cli::UsageError);
    CHECK_THROWS_WITH_AS(cli::parse({"covariance", "--J", "abc"}), doctest::Contains("--J"), cli::UsageError);
    CHECK_THROWS_AS(cli::parse({"no-such-command"}), cli::UsageError);
    CHECK_THROWS_AS(cli::parse({"covariance", "--format", "xml"}), cli::UsageError);
    CHECK_THROWS_AS(cli::parse({"covariance", "--bogus", "1"}), cli::UsageError);
}

TEST_CASE("exit codes and error records") {
    const Run low = run({"covariance", "--N", "10"});
    CHECK(low.status == cli::kUsage);
    const auto record = nlohmann::json::parse(low.err);
    CHECK(record["error"] == "usage");
    CHECK(record["subcommand"] == "covariance");
    CHECK(run({"covariance", "--measure", "{\"kind\":"}).status == cli::kUsage);
    CHECK(run({"covariance", "--measure", "lebesgue:-inf,inf", "--A", "0,inf"}).status == cli::kUsage);
    CHECK(run({"fbm-variance", "--H", "1.5"}).status == cli::kUsage);
    const Run help = run({"covariance", "--help"});
    CHECK(help.status == cli::kOk);
    CHECK(help.out.find("--measure") != std::string::npos);
}

TEST_CASE("covariance csv embeds the descriptor") {
    const Run r = run({"covariance", "--measure", "lebesgue:0,1", "--A", "0,0.6", "--B", "0.4,1", "--N", "100000",
                       "--seed", "7"});
    REQUIRE(r.status == 0);
    std::istringstream in(r.out);
    std::string first, header, row;
    std::getline(in, first);
    std::getline(in, header);
    std::getline(in, row);
    CHECK(first.rfind("# {", 0) == 0);
    CHECK(first.find("\"seed\":7") != std::string::npos);
    CHECK(header == "estimate,stderr,target,samples,J,brackets");
    std::vector<std::string> fields;
    for (std::istringstream cells(row); std::getline(cells, fields.emplace_back(), ',');) {
    }
    REQUIRE(fields.size() >= 3);
    CHECK(std::stod(fields[2]) == doctest::Approx(0.2).epsilon(1e-14));  // target μ(A∩B)
    CHECK(row.back() == '1');
    CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("json output") {
    const Run r = run({"ifs-moments", "--degree", "3", "--format", "json"});
    REQUIRE(r.status == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["descriptor"]["subcommand"] == "ifs-moments");
    CHECK(doc["tables"][0]["rows"][2][1] == "3/8");
    CHECK(doc["tables"][0]["rows"][3][1] == "5/16");
}

TEST_CASE("cuntz and boundary runs meet their tolerances") {
    const Run c = run({"cuntz-check", "--ifs", "cantor", "--depth", "8", "--format", "json"});
    const auto cj = nlohmann::json::parse(c.out);
    CHECK(cj["tables"][0]["rows"][0][2].get<double>() < 1e-10);
    CHECK(cj["tables"][0]["rows"][0][3].get<double>() < 1e-10);
    const Run b = run({"boundary-embed", "--kernel", "brownian", "--points", "16", "--J", "10000", "--format", "json"});
    const auto bj = nlohmann::json::parse(b.out);
    CHECK(bj["tables"][0]["rows"].size() == 120);
    CHECK(bj["tables"][1]["rows"][0][1].get<double>() < 5e-3);
}

TEST_CASE("output directory from the environment") {
    const auto dir = std::filesystem::temp_directory_path() / "sigmanoise-cli-test";
    std::filesystem::create_directories(dir);
    setenv("SIGMANOISE_OUTPUT_DIR", dir.c_str(), 1);
    const Run a = run({"fbm-variance"});
    const Run b = run({"fbm-variance", "--output", "named.csv"});
    unsetenv("SIGMANOISE_OUTPUT_DIR");
    REQUIRE(a.status == 0);
    REQUIRE(b.status == 0);
    std::ifstream first(dir / "fbm-variance.csv"), second(dir / "named.csv");
    std::stringstream x, y;
    x << first.rdbuf();
    y << second.rdbuf();
    CHECK(!x.str().empty());
    CHECK(x.str() == y.str());
    std::filesystem::remove_all(dir);
}

TEST_CASE("workers do not change the output") {
    const Run one = run({"ito-isometry", "--N", "20000"});
    const Run three = run({"ito-isometry", "--N", "20000", "--workers", "3"});
    CHECK(one.out.substr(one.out.find('\n')) == three.out.substr(three.out.find('\n')));
}

}
