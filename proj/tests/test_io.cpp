#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>

#include "qentropy/qentropy.hpp"

using namespace qentropy;
using io::json;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "qentropy_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

bool bit_identical(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(Complex)) == 0;
}

}  // namespace

TEST_CASE("matrix JSON round-trip is bit-identical") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const TensorShape shape = seed % 3 == 0 ? TensorShape{2, 2, 2} : TensorShape{2, 1 + seed % 3};
    const auto rho = random_density(shape.total(), 1 + seed % shape.total(), seed);
    const auto text = io::matrix_to_json(rho.matrix(), shape).dump();
    const auto back = io::matrix_from_json(json::parse(text));
    CHECK(back.shape == shape);
    CHECK(bit_identical(back.matrix, rho.matrix()));
  }
  SECTION("through a file") {
    const auto path = scratch_dir() / "rho.json";
    const auto rho = random_density(6, 3, 77);
    io::write_matrix_file(path, rho.matrix(), {3, 2});
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    const auto back = io::read_matrix_file(path);
    CHECK(bit_identical(back.matrix, rho.matrix()));
    CHECK(validate_density(back.matrix).dim() == 6);
  }
}

TEST_CASE("matrix JSON parse errors") {
  auto kind = [](const json& doc) {
    try {
      (void)io::matrix_from_json(doc);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  CHECK(kind(json::array()) == ErrorKind::Parse);
  CHECK(kind(json{{"entries", json::array()}}) == ErrorKind::Parse);
  CHECK(kind(json{{"dims", {2}}}) == ErrorKind::Parse);
  CHECK(kind(json{{"dims", {2}}, {"entries", {{1, 0}, {0, 0}, {0, 0}}}}) == ErrorKind::Parse);
  CHECK(kind(json{{"dims", {1}}, {"entries", {{1, 0, 0}}}}) == ErrorKind::Parse);
  CHECK(kind(json{{"dims", {0}}, {"entries", json::array()}}) == ErrorKind::Parse);
  CHECK(kind(json{{"dims", {1}}, {"entries", {{"a", 0}}}}) == ErrorKind::Parse);
  CHECK_THROWS_AS(io::read_matrix_file(scratch_dir() / "missing.json"), Error);
  CHECK_NOTHROW(io::matrix_from_json(json{{"dims", {1}}, {"entries", {{1, 0}}}}));
}

TEST_CASE("atomic write replaces existing contents") {
  const auto path = scratch_dir() / "report.json";
  io::write_file_atomically(path, "first");
  io::write_file_atomically(path, "second");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  CHECK(s == "second");
}

TEST_CASE("certificate JSON schema") {
  const auto p = slater_pair(3);
  auto doc = io::certificate_to_json(subadditivity_certificate(p.rho, p.shape));
  for (const char* key : {"name", "lhs", "infinite_lhs", "bounds", "slacks", "residuals", "tolerance", "notes", "verdict"})
    CHECK(doc.contains(key));
  CHECK(doc["name"] == "subadditivity");
  CHECK(doc["verdict"] == "pass");
  CHECK(doc["bounds"].contains("renyi"));
  CHECK(doc["residuals"]["overlap_identity"]["limit"] == 1e-8);

  auto inf = io::certificate_to_json(divergence_bounds_certificate(pure_state({1.0, 0.0}), maximally_mixed(2)));
  CHECK(inf["lhs"].is_number());
  const auto flagged = io::certificate_to_json(
      divergence_bounds_certificate(validate_density(Matrix::identity(2) * 0.5), pure_state({1.0, 0.0})));
  CHECK(flagged["lhs"].is_null());
  CHECK(flagged["infinite_lhs"] == true);
  CHECK(flagged["slacks"]["pinsker"].is_null());
  // Shortest round-trip formatting keeps doubles exact.
  CHECK(json::parse(doc.dump())["lhs"].get<double>() == doc["lhs"].get<double>());
}
