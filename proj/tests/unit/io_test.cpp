#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "stoqmc/errors.hpp"
#include "stoqmc/io.hpp"
#include "stoqmc/oracle.hpp"

namespace stoqmc {
namespace {

const std::filesystem::path kFixtures{STOQMC_FIXTURES_DIR};

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "<no error>";
}

TEST(Io, FixturesLoad) {
  const json minus_x = load_json_file(kFixtures / "minus_x.json");
  EXPECT_EQ(detect_format(minus_x), ModelFormat::hamiltonian);
  EXPECT_NEAR(ground_energy_exact(hamiltonian_from_json(minus_x)), -1.0, 1e-12);

  const json tim = load_json_file(kFixtures / "tim_n2.json");
  EXPECT_EQ(detect_format(tim), ModelFormat::tim);
  EXPECT_NEAR(partition_exact(tim_from_json(tim)).value, 12.5495082, 1e-7);
  EXPECT_EQ(any_hamiltonian_from_json(tim).qubits(), 2);

  const json pair = load_json_file(kFixtures / "ising_pair.json");
  EXPECT_EQ(detect_format(pair), ModelFormat::ising);
  EXPECT_NEAR(std::exp(partition_exact_enum(ising_from_json(pair))), 6.1723225, 1e-7);
  EXPECT_THROW(any_hamiltonian_from_json(pair), ValidationError);
}

TEST(Io, RoundTrips) {
  const StoquasticHamiltonian h = hamiltonian_from_json(load_json_file(kFixtures / "minus_x.json"));
  const StoquasticHamiltonian h2 = hamiltonian_from_json(to_json(h));
  EXPECT_LT((build_dense(h) - build_dense(h2)).norm(), 1e-15);

  const TimModel tim = tim_from_json(load_json_file(kFixtures / "tim_n3.json"));
  EXPECT_EQ(to_json(tim_from_json(to_json(tim))), to_json(tim));

  const ClassicalIsingModel m(3, {{0, 1, 0.5}, {1, 2, 0.25}}, -1.5);
  const ClassicalIsingModel m2 = ising_from_json(to_json(m));
  EXPECT_EQ(m2.edges().size(), 2U);
  EXPECT_DOUBLE_EQ(m2.log_prefactor(), -1.5);
}

TEST(Io, FileErrorsNamePath) {
  EXPECT_NE(error_of([] { load_json_file("/nonexistent/model.json"); }).find("/nonexistent/model.json"),
            std::string::npos);
  const auto bad = std::filesystem::temp_directory_path() / "stoqmc_io_test_bad.json";
  std::ofstream(bad) << "{\"n\": 1, \"terms\": [";
  EXPECT_NE(error_of([&] { load_json_file(bad); }).find("malformed JSON"), std::string::npos);
  std::filesystem::remove(bad);
}

TEST(Io, FieldErrorsNameTheField) {
  EXPECT_NE(error_of([] { hamiltonian_from_json(json::parse(R"({"terms": []})")); }).find("\"n\""), std::string::npos);
  EXPECT_NE(error_of([] {
              hamiltonian_from_json(json::parse(R"({"n": 1, "terms": [{"qubits": [0], "matrix": [[0, "a"], [0, 0]]}]})"));
            }).find("terms[0].matrix[0][1]"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              hamiltonian_from_json(json::parse(R"({"n": 1, "terms": [{"qubits": [0], "matrix": [[0, 1], [1, 0]]}]})"));
            }).find("terms[0]"),
            std::string::npos);
  EXPECT_THROW(hamiltonian_from_json(json::parse(R"({"n": 1, "terms": [{"qubits": [0], "matrix": [[0, 1], [1, 0]]}]})")),
               NotStoquasticError);
  EXPECT_NE(error_of([] {
              hamiltonian_from_json(json::parse(R"({"n": 2, "terms": [{"qubits": [0, 0], "matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}]})"));
            }).find("terms[0]"),
            std::string::npos);
  EXPECT_NE(error_of([] { tim_from_json(json::parse(R"({"n": 2, "couplings": [[0, 1]], "fields": [1, 1]})")); })
                .find("couplings[0]"),
            std::string::npos);
  EXPECT_NE(error_of([] { tim_from_json(json::parse(R"({"n": 2, "fields": [1, "x"]})")); }).find("fields[1]"),
            std::string::npos);
  EXPECT_NE(error_of([] { ising_from_json(json::parse(R"({"N": 2, "edges": [[0, 1, -1]]})")); }).find("edges[0]"),
            std::string::npos);
  EXPECT_NE(error_of([] { hamiltonian_from_json(json::parse(R"({"n": 1.5, "terms": []})")); }).find("n"),
            std::string::npos);
  EXPECT_THROW(detect_format(json::parse(R"({"n": 1})")), ValidationError);
  EXPECT_THROW(detect_format(json::parse("[1, 2]")), ValidationError);
}

}  // namespace
}  // namespace stoqmc
