#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "bcls/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int status = -1;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("bcls_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Result run(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + BCLS_CLI_PATH + "\" " + args + " 2> \"" + err.string() + "\" > /dev/null";
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = fs::exists(err) ? bcls::read_file(err) : "";
    return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("estimate routes to the fit and writes both outputs") {
    const auto dir = scratch("estimate");
    bcls::write_file_atomic(dir / "v.csv", "0,0.9,-0.8,0.1\n0.9,0,0.2,-0.7\n-0.8,0.2,0,0.95\n0.1,-0.7,0.95,0\n");
    bcls::write_file_atomic(dir / "m.csv", "0,1,1,1\n1,0,1,1\n1,1,0,1\n1,1,1,0\n");
    const auto r = run("estimate --values " + q(dir / "v.csv") + " --mask " + q(dir / "m.csv") +
                           " --p 1.0 --k 2 --symmetric --M 1 --seed 7 --out " + q(dir),
                       dir);
    CHECK(r.status == 0);
    const auto theta = bcls::read_matrix_csv(dir / "theta_hat.csv");
    CHECK(theta.rows() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(theta(i, j) == theta(j, i));
    }
    const auto fit = nlohmann::json::parse(bcls::read_file(dir / "fit.json"));
    for (const char* key : {"objective", "iterations", "k1", "k2", "labels", "q"}) CHECK(fit.contains(key));
    CHECK(fit["k1"] == 2);
}

TEST_CASE("usage errors exit 2 and name the problem") {
    const auto dir = scratch("usage");
    auto r = run("estimate --mask m.csv --p 1 --k 2 --seed 1", dir);
    CHECK(r.status == 2);
    CHECK(r.err.find("--values") != std::string::npos);
    CHECK(r.err.find('\n') == r.err.size() - 1);

    r = run("generate --scenario gaussian-asym --n 10 --k 2", dir);
    CHECK(r.status == 2);
    CHECK(r.err.find("--seed") != std::string::npos);

    r = run("frobnicate", dir);
    CHECK(r.status == 2);
}

TEST_CASE("component errors exit 1") {
    const auto dir = scratch("component");
    const auto r = run("estimate --values " + q(dir / "missing.csv") + " --mask " + q(dir / "missing.csv") +
                           " --p 1 --k 2 --seed 1 --out " + q(dir),
                       dir);
    CHECK(r.status == 1);
    CHECK(r.err.rfind("error:", 0) == 0);
    CHECK_FALSE(fs::exists(dir / "theta_hat.csv"));
}

TEST_CASE("generate then estimate works for every scenario") {
    struct Case {
        std::string scenario, generate_flags, estimate_flags;
    };
    const Case cases[] = {
        {"gaussian-asym", "--n1 12 --n2 10 --k 2 --p 0.8 --M 2", "--p 0.8 --k 2 --M 2"},
        {"gaussian-sym", "--n 12 --k 2 --p 0.8 --M 2", "--p 0.8 --k 2 --symmetric --M 2"},
        {"sbm", "--n 12 --k 2 --rho 0.5", "--p 1 --k 2 --symmetric --M 0.5"},
        {"graphon", "--n 12 --rho 0.5", "--p 1 --k 3 --symmetric --M 0.5"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.scenario);
        const auto dir = scratch("roundtrip_" + c.scenario);
        auto r = run("generate --scenario " + c.scenario + " " + c.generate_flags + " --seed 3 --out " + q(dir), dir);
        REQUIRE(r.status == 0);
        const auto truth = nlohmann::json::parse(bcls::read_file(dir / "truth.json"));
        CHECK(truth.contains("theta"));
        r = run("estimate --values " + q(dir / "values.csv") + " --mask " + q(dir / "mask.csv") + " " +
                    c.estimate_flags + " --seed 4 --out " + q(dir),
                dir);
        CHECK(r.status == 0);
        CHECK(fs::exists(dir / "fit.json"));
    }
}

TEST_CASE("repeated invocations write identical files") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    for (const auto& dir : {a, b}) {
        REQUIRE(run("generate --scenario gaussian-asym --n 16 --k 2 --p 0.7 --seed 11 --out " + q(dir), dir).status == 0);
        REQUIRE(run("adapt --values " + q(dir / "values.csv") + " --mask " + q(dir / "mask.csv") +
                        " --kmax 3 --restarts 4 --select-restarts 2 --seed 5 --out " + q(dir),
                    dir)
                    .status == 0);
    }
    for (const char* name : {"values.csv", "mask.csv", "truth.json", "theta_hat.csv", "adapt.json"}) {
        CAPTURE(name);
        CHECK(bcls::read_file(a / name) == bcls::read_file(b / name));
    }
    const auto report = nlohmann::json::parse(bcls::read_file(a / "adapt.json"));
    CHECK(report["p_estimated"] == true);
}
