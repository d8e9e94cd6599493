#include "nhtdse/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace nhtdse {

using nlohmann::json;

namespace {

json pair(cplx z) { return json::array({z.real(), z.imag()}); }

cplx entry(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw std::invalid_argument("matrix entry must be a number or an [re, im] pair");
}

}  // namespace

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(pair(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(pair(v(i)));
  return out;
}

json to_json(const RealVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a non-empty list of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw std::invalid_argument("matrix rows must be non-empty lists");
  const auto m = static_cast<Eigen::Index>(j[0].size());
  Matrix out(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
      throw std::invalid_argument("matrix rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < m; ++c) out(r, c) = entry(row[static_cast<std::size_t>(c)]);
  }
  return out;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("vector must be a non-empty list");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = entry(j[i]);
  return v;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out_ += ',';
    out_ += header_[i];
  }
  out_ += '\n';
}

CsvTable& CsvTable::cell(double x) { return cell(std::string_view(format_number(x))); }

CsvTable& CsvTable::cell(long long n) { return cell(std::string_view(std::to_string(n))); }

CsvTable& CsvTable::cell(std::string_view text) {
  if (col_ >= header_.size()) throw std::logic_error("csv row has more cells than the header");
  if (col_) out_ += ',';
  out_ += text;
  ++col_;
  return *this;
}

void CsvTable::end_row() {
  if (col_ != header_.size()) throw std::logic_error("csv row has fewer cells than the header");
  out_ += '\n';
  col_ = 0;
  ++rows_;
}

CsvTable trajectory_csv(const Trajectory& tr) {
  const Eigen::Index n = tr.samples.empty() ? 0 : tr.samples.front().wave.psi.size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < n; ++i) {
    header.push_back("re_psi" + std::to_string(i));
    header.push_back("im_psi" + std::to_string(i));
  }
  for (Eigen::Index i = 0; i < n; ++i) header.push_back("c" + std::to_string(i) + "_sq");
  header.emplace_back("drift");

  CsvTable csv(std::move(header));
  for (const auto& s : tr.samples) {
    csv.cell(s.t);
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(s.wave.psi(i).real()).cell(s.wave.psi(i).imag());
    for (Eigen::Index i = 0; i < n; ++i) csv.cell(s.wave.populations(i));
    csv.cell(s.drift);
    csv.end_row();
  }
  return csv;
}

json trajectory_json(const Trajectory& tr) {
  json samples = json::array();
  for (const auto& s : tr.samples) {
    samples.push_back({{"t", s.t},
                       {"psi", to_json(s.wave.psi)},
                       {"populations", to_json(s.wave.populations)},
                       {"normalizer", s.wave.normalizer},
                       {"damping", to_json(s.metric.damping)},
                       {"drift", s.drift}});
  }
  json quenches = json::array();
  for (const auto& q : tr.quenches) quenches.push_back({{"t", q.t_q}, {"jump", to_json(q.jump)}});
  return {{"variant", std::string(variant_name(tr.variant))},
          {"unitarity_drift", tr.unitarity_drift},
          {"accepted_steps", tr.accepted_steps},
          {"rejected_steps", tr.rejected_steps},
          {"quenches", quenches},
          {"samples", samples}};
}

}  // namespace nhtdse
