#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nhtdse/evolve.hpp"

namespace nhtdse {

/// Matrices and vectors as nested [re, im] pairs, row-major.
nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const RealVector& v);
/// Accepts [re, im] pairs or plain real numbers for each entry.
Matrix matrix_from_json(const nlohmann::json& j);
Vector vector_from_json(const nlohmann::json& j);

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double x);

/// Header row plus rows of numbers or short text cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& cell(double x);
  CsvTable& cell(std::string_view text);
  CsvTable& cell(long long n);
  void end_row();

  std::size_t columns() const { return header_.size(); }
  std::size_t rows() const { return rows_; }
  const std::string& str() const { return out_; }

 private:
  std::vector<std::string> header_;
  std::string out_;
  std::size_t col_ = 0;
  std::size_t rows_ = 0;
};

/// t, Re/Im of each psi component, |c_n|^2, drift.
CsvTable trajectory_csv(const Trajectory& tr);
nlohmann::json trajectory_json(const Trajectory& tr);

}  // namespace nhtdse
