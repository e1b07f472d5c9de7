#include "pcs/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pcs::cli {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double to_double(const json& j) {
  if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
  return j.get<double>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

MatrixXd parse_matrix(const json& j) {
  if (j.is_number()) return MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty matrix");
  if (!j.front().is_array()) {
    MatrixXd m(j.size(), 1);
    for (std::size_t i = 0; i < j.size(); ++i) m(i, 0) = to_double(j[i]);
    return m;
  }
  const std::size_t cols = j.front().size();
  MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ConfigError("ragged matrix rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = to_double(j[i][k]);
  }
  return m;
}

VectorXd parse_vector(const json& j) {
  if (j.is_number()) return VectorXd::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError("expected a vector");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = to_double(j[i]);
  return v;
}

json number(double x) {
  if (std::isfinite(x)) return json::parse(format_double(x));
  return format_double(x);
}

json to_json(const MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(number(m(i, k)));
    out.push_back(row);
  }
  return out;
}

json to_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

ControlRange parse_range(const json& j) {
  if (j.is_object() && j.contains("box")) {
    const json& b = j.at("box");
    return ControlRange(ControlRange::Box{parse_vector(field(b, "lower")), parse_vector(field(b, "upper"))});
  }
  if (j.is_object() && j.contains("polytope")) {
    std::vector<VectorXd> verts;
    for (const auto& v : j.at("polytope")) verts.push_back(parse_vector(v));
    return ControlRange(ControlRange::Polytope{verts});
  }
  if (j.is_object() && j.contains("ball")) {
    const json& b = j.at("ball");
    return ControlRange(ControlRange::Ball{field(b, "dim").get<int>(), to_double(field(b, "radius"))});
  }
  throw ConfigError("control range must be one of box, polytope, ball");
}

PeriodicSystem parse_system(const json& j) {
  const double period = to_double(field(j, "period"));
  const ControlRange range = parse_range(field(j, "U"));
  if (j.contains("segments")) {
    std::vector<CoefficientSegment> segs;
    for (const auto& s : j.at("segments")) {
      segs.push_back({to_double(field(s, "start")), to_double(field(s, "end")), parse_matrix(field(s, "A")),
                      parse_matrix(field(s, "B"))});
    }
    return PeriodicSystem(period, std::move(segs), range);
  }
  return PeriodicSystem::constant(parse_matrix(field(j, "A")), parse_matrix(field(j, "B")), period, range);
}

QuasiAffineSystem parse_quasi_affine(const json& j) {
  std::vector<MatrixXd> a;
  for (const auto& m : field(j, "A")) a.push_back(parse_matrix(m));
  const json& b = field(j, "B");
  std::variant<AffineInput, TableInput> input;
  if (b.contains("affine")) {
    AffineInput aff;
    for (const auto& m : b.at("affine")) aff.terms.push_back(parse_matrix(m));
    input = aff;
  } else if (b.contains("table")) {
    TableInput tab;
    for (const auto& axis : field(b.at("table"), "axes")) tab.axes.push_back(axis.get<std::vector<double>>());
    for (const auto& m : field(b.at("table"), "values")) tab.values.push_back(parse_matrix(m));
    input = tab;
  } else {
    throw ConfigError("B must be given as \"affine\" or \"table\"");
  }
  std::optional<ControlRange> v;
  if (j.contains("V")) v = parse_range(j.at("V"));
  return QuasiAffineSystem(std::move(a), std::move(input), parse_range(field(j, "U")), v);
}

std::vector<PeriodicParameterSignal> parse_family(const json& j, const QuasiAffineSystem& qsys) {
  if (j.contains("signals")) {
    std::vector<PeriodicParameterSignal> out;
    for (const auto& s : j.at("signals")) {
      PeriodicParameterSignal sig;
      sig.period = to_double(field(s, "period"));
      for (const auto& p : field(s, "pieces")) {
        sig.pieces.push_back({to_double(field(p, "start")), to_double(field(p, "end")), parse_vector(field(p, "value"))});
      }
      out.push_back(std::move(sig));
    }
    if (out.empty()) throw ConfigError("family has no signals");
    return out;
  }
  const double period = j.contains("period") ? to_double(j.at("period")) : 1.0;
  const std::size_t cap = j.contains("max_members") ? j.at("max_members").get<std::size_t>() : 64;
  return default_family(qsys, period, cap);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (double x : row) cells.push_back(format_double(x));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& row) {
  if (row.size() != columns_.size()) throw Error("csv row width does not match the header");
  rows_.push_back(row);
}

std::string CsvTable::str(const std::string& comment) const {
  std::ostringstream out;
  if (!comment.empty()) out << "# " << comment << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << csv_escape(columns_[i]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
    out << '\n';
  }
  return out.str();
}

json CsvTable::to_json() const {
  json rows = json::array();
  for (const auto& row : rows_) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& cell = row[i];
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (end && *end == '\0' && !cell.empty() && std::isfinite(x)) {
        obj[columns_[i]] = json::parse(cell);
      } else {
        obj[columns_[i]] = cell;
      }
    }
    rows.push_back(obj);
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace pcs::cli
