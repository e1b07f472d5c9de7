#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcs/errors.hpp"
#include "pcs/periodic_system.hpp"
#include "pcs/quasi_affine.hpp"

namespace pcs::cli {

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable input or unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

nlohmann::json load_json(const std::filesystem::path& path);

/// {"period", "segments": [{"start", "end", "A", "B"}], "U"} or the constant
/// form {"period", "A", "B", "U"}. U is {"box": {"lower", "upper"}},
/// {"polytope": [[...], ...]} or {"ball": {"dim", "radius"}}.
PeriodicSystem parse_system(const nlohmann::json& j);

ControlRange parse_range(const nlohmann::json& j);

/// {"A": [A0, ..., Ap], "B": {"affine": [B0, ...]} | {"table": {"axes", "values"}},
///  "U", "V"}.
QuasiAffineSystem parse_quasi_affine(const nlohmann::json& j);

/// {"signals": [{"period", "pieces": [{"start", "end", "value"}]}]}, or a
/// generated family {"period", "max_members"}.
std::vector<PeriodicParameterSignal> parse_family(const nlohmann::json& j, const QuasiAffineSystem& qsys);

MatrixXd parse_matrix(const nlohmann::json& j);
VectorXd parse_vector(const nlohmann::json& j);
nlohmann::json to_json(const MatrixXd& m);
nlohmann::json to_json(const VectorXd& v);

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);

/// Numbers as 17-digit doubles; non-finite values become strings.
nlohmann::json number(double x);

/// A CSV table with an optional comment header line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(const std::vector<double>& row);
  void add_row(const std::vector<std::string>& row);
  std::size_t rows() const { return rows_.size(); }

  std::string str(const std::string& comment = "") const;
  nlohmann::json to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pcs::cli
