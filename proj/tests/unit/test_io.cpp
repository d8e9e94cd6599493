#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "nhtdse/io.hpp"

using namespace nhtdse;
using nlohmann::json;

TEST_CASE("matrix json round trip", "[io]") {
  Matrix m(2, 3);
  m << cplx(1, 2), 0.5, cplx(-3, 0.25), 0.0, cplx(0, -1), 7.0;
  const json j = to_json(m);
  CHECK(j.size() == 2);
  CHECK(j[0][0] == json::array({1.0, 2.0}));
  CHECK(matrix_from_json(j) == m);
  CHECK(matrix_from_json(json::parse(j.dump())) == m);

  const Matrix plain = matrix_from_json(json::parse("[[1, 2], [3, [0, 4]]]"));
  CHECK(plain(1, 1) == cplx(0, 4));
  CHECK(plain(0, 1) == cplx(2, 0));

  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, 2], [3]]")), std::invalid_argument);
  CHECK_THROWS_AS(matrix_from_json(json::parse("[]")), std::invalid_argument);
  CHECK_THROWS_AS(matrix_from_json(json::parse("[[1, \"x\"]]")), std::invalid_argument);
  CHECK_THROWS_AS(vector_from_json(json::parse("[[1, 2, 3]]")), std::invalid_argument);
  CHECK(vector_from_json(json::parse("[1, [0, 1]]"))(1) == cplx(0, 1));
}

TEST_CASE("numbers print in shortest round-trip form", "[io]") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(-2.0) == "-2");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv rows must match the header", "[io]") {
  CsvTable t({"a", "b"});
  t.cell(1.5).cell(std::string_view("x"));
  t.end_row();
  t.cell(2LL).cell(0.25);
  t.end_row();
  CHECK(t.str() == "a,b\n1.5,x\n2,0.25\n");
  CHECK(t.rows() == 2);
  t.cell(1.0);
  CHECK_THROWS_AS(t.end_row(), std::logic_error);
  t.cell(1.0);
  CHECK_THROWS_AS(t.cell(1.0), std::logic_error);
}

TEST_CASE("trajectory tables", "[io]") {
  Matrix h(2, 2);
  h << cplx(1, -0.1), 0.3, 0.2, cplx(-1, 0.1);
  const auto s = HamiltonianSchedule::constant(0, 1, h);
  const double times[] = {0.5, 1.0};
  const Trajectory tr = evolve(TdseVariant::NewNH, s, Vector::Ones(2), times);
  const CsvTable csv = trajectory_csv(tr);
  CHECK(csv.columns() == 1 + 4 + 2 + 1);
  CHECK(csv.rows() == 3);
  CHECK(csv.str().rfind("t,re_psi0,im_psi0,re_psi1,im_psi1,c0_sq,c1_sq,drift\n", 0) == 0);
  const json j = trajectory_json(tr);
  CHECK(j["variant"] == "NewNH");
  CHECK(j["samples"].size() == 3);
  CHECK(j["samples"][2]["t"] == 1.0);
}
