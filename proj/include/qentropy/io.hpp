#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qentropy/error.hpp"
#include "qentropy/matrix.hpp"
#include "qentropy/tensor.hpp"
#include "qentropy/theorems.hpp"

namespace qentropy::io {

using json = nlohmann::json;

/// Contents of a matrix file: {"dims": [d1, ...], "entries": [[re, im], ...]} with the
/// entries in row-major order and (prod d_i)^2 of them.
struct MatrixFile {
  TensorShape shape;
  Matrix matrix;
};

inline json matrix_to_json(const Matrix& m, const TensorShape& shape) {
  shape.require_matches(m.rows());
  json entries = json::array();
  for (const auto& z : m.data()) entries.push_back(json::array({z.real(), z.imag()}));
  return {{"dims", shape.dims()}, {"entries", std::move(entries)}};
}

inline MatrixFile matrix_from_json(const json& doc) {
  auto fail = [](const std::string& what) -> MatrixFile { throw Error(ErrorKind::Parse, "matrix file: " + what); };
  if (!doc.is_object()) return fail("top level must be an object");
  if (!doc.contains("dims") || !doc["dims"].is_array()) return fail("missing \"dims\" array");
  if (!doc.contains("entries") || !doc["entries"].is_array()) return fail("missing \"entries\" array");

  std::vector<std::size_t> dims;
  for (const auto& d : doc["dims"]) {
    if (!d.is_number_integer() || d.get<long long>() <= 0) return fail("dims must be positive integers");
    dims.push_back(static_cast<std::size_t>(d.get<long long>()));
  }
  if (dims.empty()) return fail("dims must not be empty");
  TensorShape shape(std::move(dims));
  const std::size_t n = shape.total();
  const auto& entries = doc["entries"];
  if (entries.size() != n * n) {
    std::ostringstream os;
    os << "expected " << n * n << " entries for dims " << shape.to_string() << ", found " << entries.size();
    return fail(os.str());
  }
  std::vector<Complex> data;
  data.reserve(n * n);
  for (const auto& e : entries) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      return fail("each entry must be a [re, im] pair of numbers");
    }
    data.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return {std::move(shape), Matrix(n, n, std::move(data))};
}

/// Writes through a temporary sibling and renames it over `path`.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw Error(ErrorKind::InvalidArgument, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_matrix_file(const std::filesystem::path& path, const Matrix& m, const TensorShape& shape) {
  write_file_atomically(path, matrix_to_json(m, shape).dump(2) + "\n");
}

inline MatrixFile read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return matrix_from_json(doc);
}

/// JSON number, or null for non-finite values.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json certificate_to_json(const Certificate& c) {
  json bounds = json::object(), slacks = json::object(), residuals = json::object();
  for (const auto& b : c.bounds) bounds[b.label] = number(b.value);
  for (const auto& s : c.slacks) slacks[s.label] = number(s.value);
  for (const auto& r : c.residuals) {
    residuals[r.label] = {{"value", number(r.value)}, {"limit", r.limit ? number(*r.limit) : json(nullptr)}};
  }
  return {
      {"name", c.name},
      {"lhs", number(c.lhs)},
      {"infinite_lhs", c.infinite_lhs},
      {"bounds", std::move(bounds)},
      {"slacks", std::move(slacks)},
      {"residuals", std::move(residuals)},
      {"tolerance", c.tolerance},
      {"notes", c.notes},
      {"verdict", c.pass() ? "pass" : "fail"},
  };
}

}  // namespace qentropy::io
