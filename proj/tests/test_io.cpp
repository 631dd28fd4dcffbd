#include <filesystem>
#include <limits>

#include "doctest.h"

#include "bcls/io.hpp"
#include "bcls/rng.hpp"

using namespace bcls;

TEST_CASE("format_real") {
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(1.5) == "1.5");
    CHECK(format_real(-2.0) == "-2");
    CHECK(std::stod(format_real(0.1)) == 0.1);
}

TEST_CASE("matrix CSV round trip is lossless") {
    Rng rng(5);
    Matrix m(7, 4);
    for (auto& v : m.flat()) v = rng.normal() * 1e3;
    m(0, 0) = std::numeric_limits<double>::denorm_min();
    m(1, 1) = -0.0;
    const std::string text = matrix_to_csv(m);
    CHECK(matrix_from_csv(text) == m);
    CHECK(matrix_to_csv(matrix_from_csv(text)) == text);
}

TEST_CASE("matrix CSV parsing") {
    CHECK(matrix_from_csv("1,2\n3,4\n") == matrix_from_csv("1,2\r\n3,4"));
    CHECK_THROWS_AS(matrix_from_csv("1,2\n3\n"), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_csv("1,x\n"), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_csv(""), std::invalid_argument);
}

TEST_CASE("mask CSV") {
    Mask m(2, 3, 0);
    m(0, 1) = 1;
    m(1, 2) = 1;
    CHECK(mask_to_csv(m) == "0,1,0\n0,0,1\n");
    CHECK(mask_from_csv(mask_to_csv(m)) == m);
    CHECK_THROWS_AS(mask_from_csv("0,2\n"), std::invalid_argument);
    CHECK_THROWS_AS(mask_from_csv("0,0.5\n"), std::invalid_argument);
}

TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "bcls_test_io";
    std::filesystem::create_directories(dir);
    const auto path = dir / "m.csv";
    write_file_atomic(path, "1,2\n");
    CHECK(read_file(path) == "1,2\n");
    CHECK_FALSE(std::filesystem::exists(dir / "m.csv.tmp"));
    CHECK(read_matrix_csv(path)(0, 1) == 2.0);
    CHECK_THROWS(read_file(dir / "missing.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("model JSON") {
    ModelFile model{ModelSpec::asymmetric(3, 2, 2, 1, 2.5), {{0, 1, 1}, {0, 0}, 2, 1}, {Matrix(2, 1), 2.5}};
    model.q.q(0, 0) = 0.25;
    model.q.q(1, 0) = -1.0;
    const auto j = model_to_json(model);
    CHECK(j["z1"] == nlohmann::json::array({1, 2, 2}));
    CHECK(j["kind"] == "asymmetric");
    const auto back = model_from_json(j);
    CHECK(back.assignment.z1 == model.assignment.z1);
    CHECK(back.q.q == model.q.q);
    CHECK(back.spec.bound == 2.5);

    auto bad = j;
    bad["z1"] = nlohmann::json::array({0, 1, 1});
    CHECK_THROWS(model_from_json(bad));
    bad = j;
    bad["q"] = nlohmann::json::array({nlohmann::json::array({3.0}), nlohmann::json::array({0.0})});
    CHECK_THROWS(model_from_json(bad));
}
