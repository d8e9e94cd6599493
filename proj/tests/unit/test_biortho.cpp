#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nhtdse/biortho.hpp"
#include "nhtdse/errors.hpp"
#include "oracles.hpp"

using namespace nhtdse;
using Catch::Matchers::WithinAbs;

namespace {

Matrix m2(cplx a, cplx b, cplx c, cplx d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const NumericalError& e) {
    return e.kind();
  }
  FAIL("no NumericalError thrown");
  return ErrorKind::NonFinite;
}

}  // namespace

TEST_CASE("diagonal NH matrix has the standard basis on both sides", "[biortho]") {
  const auto b = eig_biortho(m2(1.0, 0.0, 0.0, cplx(0, 2)));
  CHECK(std::abs(b.eigenvalues(0) - cplx(0, 2)) < 1e-14);  // (Re, Im) order: 0+2i before 1
  CHECK(std::abs(b.eigenvalues(1) - 1.0) < 1e-14);
  CHECK((b.right - m2(0.0, 1.0, 1.0, 0.0)).norm() < 1e-14);
  CHECK((b.left - m2(0.0, 1.0, 1.0, 0.0)).norm() < 1e-14);
}

TEST_CASE("upper triangular 2x2 eigensystem", "[biortho]") {
  const Matrix h = m2(1.0, 1.0, 0.0, 2.0);
  const auto b = eig_biortho(h);
  CHECK(std::abs(b.eigenvalues(0) - 1.0) < 1e-14);
  CHECK(std::abs(b.eigenvalues(1) - 2.0) < 1e-14);
  const double r = 1 / std::sqrt(2.0);
  CHECK((b.ket(0) - Vector::Unit(2, 0)).norm() < 1e-12);
  CHECK((b.ket(1) - Vector(Eigen::Vector2cd(r, r))).norm() < 1e-12);
  CHECK((b.left.row(0).transpose() - Vector(Eigen::Vector2cd(1, -1))).norm() < 1e-12);
  CHECK((b.left.row(1).transpose() - Vector(Eigen::Vector2cd(0, std::sqrt(2.0)))).norm() < 1e-12);
  for (Eigen::Index n = 0; n < 2; ++n) CHECK((h * b.ket(n) - b.eigenvalues(n) * b.ket(n)).norm() < 1e-12);

  const Matrix w = instantaneous_metric(b).tilde;
  CHECK((w - m2(1.0, -1.0, -1.0, 3.0)).norm() < 1e-12);
  CHECK(hermiticity_defect(w) < 1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  CHECK(es.eigenvalues().minCoeff() > 0);
}

TEST_CASE("Jordan block and non-finite input are rejected", "[biortho]") {
  CHECK(kind_of([] { eig_biortho(m2(0.0, 1.0, 0.0, 0.0)); }) == ErrorKind::Defective);
  CHECK(kind_of([] { eig_biortho(m2(0.0, NAN, 0.0, 0.0)); }) == ErrorKind::NonFinite);
  CHECK(kind_of([] { eig_biortho(m2(1.0, 1.0, 1e-20, 1.0)); }) == ErrorKind::Defective);
}

TEST_CASE("biorthonormality and gauge hold for random matrices", "[biortho]") {
  std::mt19937_64 rng(11);
  for (int dim : {2, 3, 5, 8}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix h = oracle::random_nh(rng, dim);
      const auto b = eig_biortho(h);
      CHECK((b.left * b.right - Matrix::Identity(dim, dim)).norm() < 1e-10);
      CHECK((b.right * b.left - Matrix::Identity(dim, dim)).norm() < 1e-10);  // completeness
      for (Eigen::Index n = 0; n < dim; ++n) {
        CHECK(std::abs(b.ket(n).norm() - 1.0) < 1e-14);
        Eigen::Index first = 0;
        while (std::abs(b.right(first, n)) <= 1e-10) ++first;
        CHECK(b.right(first, n).imag() == 0.0);
        CHECK(b.right(first, n).real() > 0.0);
        if (n > 0) {
          const cplx a = b.eigenvalues(n - 1), c = b.eigenvalues(n);
          CHECK((a.real() < c.real() || (a.real() == c.real() && a.imag() <= c.imag())));
        }
      }
      const MetricState m = instantaneous_metric(b);
      Matrix sum = Matrix::Zero(dim, dim);
      for (const auto& p : m.projectors) sum += p;
      CHECK((sum - m.tilde).norm() < 1e-12);
      CHECK(hermiticity_defect(m.tilde) < 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> es(m.tilde);
      CHECK(es.eigenvalues().minCoeff() > 0);
    }
  }
}

TEST_CASE("hermitian sources collapse the metric to the identity", "[biortho]") {
  const auto sx = eig_biortho(m2(0.0, 1.0, 1.0, 0.0));
  CHECK((instantaneous_metric(sx).tilde - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((instantaneous_metric(eig_biortho(m2(1.0, 0.0, 0.0, cplx(0, 2)))).tilde - Matrix::Identity(2, 2)).norm() < 1e-12);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix k = oracle::random_matrix(rng, 4);
    const Matrix h = 0.5 * (k + k.adjoint());
    const MetricState m = instantaneous_metric(eig_biortho(h));
    CHECK((m.tilde - Matrix::Identity(4, 4)).norm() < 1e-10);
    CHECK((m.connection - Matrix::Identity(4, 4)).norm() < 1e-10);
    CHECK((m.eta - Matrix::Identity(4, 4)).norm() < 1e-10);
    const Vector psi = oracle::random_vector(rng, 4);
    const Matrix o = oracle::random_matrix(rng, 4);
    const Matrix oh = o + o.adjoint();
    CHECK(std::abs(observable(psi, oh, m) - psi.dot(oh * psi) / psi.squaredNorm()) < 1e-10);
  }
}

TEST_CASE("degenerate eigenspaces get a canonical metric", "[biortho]") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = h(1, 1) = 2.0;
  h(2, 2) = cplx(1.0, 0.5);
  h(0, 2) = 0.3;
  const auto b = eig_biortho(h);
  CHECK((b.left * b.right - Matrix::Identity(3, 3)).norm() < 1e-12);
  CHECK((h * b.right - b.right * b.eigenvalues.asDiagonal()).norm() < 1e-12);
  const Matrix w = instantaneous_metric(b).tilde;
  // same matrix after a unitary change of basis inside the degenerate block
  const Matrix p = m2(0.0, 1.0, 1.0, 0.0);
  Matrix big = Matrix::Identity(3, 3);
  big.topLeftCorner(2, 2) = p;
  const Matrix w2 = big * instantaneous_metric(eig_biortho(big * h * big)).tilde * big;
  CHECK((w - w2).norm() < 1e-12);
  CHECK((eig_biortho(Matrix::Identity(3, 3)).right - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("damping integrals and metric connection", "[biortho]") {
  SECTION("real spectrum means W equals W~") {
    const auto b = eig_biortho(m2(1.0, 1.0, 0.0, 2.0));
    const MetricState m = instantaneous_metric(b);
    CHECK((m.connection - m.tilde).norm() < 1e-14);
    CHECK((m.eta * m.eta - m.connection).norm() < 1e-12);
  }
  SECTION("constant E = {i, -i} over a unit interval") {
    const Matrix h = m2(cplx(0, 1), 0.0, 0.0, cplx(0, -1));
    const std::vector<TimedBasis> bases{{0.0, eig_biortho(h)}, {1.0, eig_biortho(h)}};
    const MetricState m = metric_connection(bases);
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = std::exp(2.0);
    expect(1, 1) = std::exp(-2.0);
    CHECK((m.connection - expect).norm() < 1e-12);
  }
  SECTION("Im E_1 = -sin t on [0, pi] integrates to -4") {
    const Matrix v = m2(1.0, 0.4, cplx(0.2, 0.1), 1.0);
    const Matrix vinv = v.inverse();
    const int steps = 40000;
    std::vector<TimedBasis> bases;
    for (int k = 0; k <= steps; ++k) {
      const double t = M_PI * k / steps;
      Matrix d = Matrix::Zero(2, 2);
      d(0, 0) = cplx(1.0, -std::sin(t));
      d(1, 1) = 3.0;
      bases.push_back({t, eig_biortho(v * d * vinv)});
    }
    const MetricState m = metric_connection(bases);
    CHECK_THAT(m.damping(0), WithinAbs(-4.0, 1e-8));
    CHECK_THAT(m.damping(1), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("components and the W~ = 1 demo model", "[biortho]") {
  std::mt19937_64 rng(3);
  const auto b = eig_biortho(oracle::random_nh(rng, 3));
  const MetricState m = instantaneous_metric(b);
  auto c = components(b.ket(0), m);
  CHECK_THAT(c.populations(0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(c.populations(1), WithinAbs(0.0, 1e-12));
  CHECK_THAT(c.populations(2), WithinAbs(0.0, 1e-12));

  for (int rep = 0; rep < 10; ++rep) {
    const auto b3 = eig_biortho(oracle::random_nh(rng, 3));
    RealVector d(3);
    d << 0.3, -0.7, 1.1;
    const auto c3 = components(oracle::random_vector(rng, 3), metric_with_damping(b3, d));
    CHECK_THAT(c3.populations.sum(), WithinAbs(1.0, 1e-12));
  }

  const auto bi = eig_biortho(m2(cplx(1, 0), 0.0, 0.0, cplx(2, 0.25)));
  Vector psi(2);
  psi << cplx(0.6, 0.2), cplx(-0.3, 0.7);
  RealVector damp(2);
  damp << 0.0, 0.8;
  const auto cd = components(psi, metric_with_damping(bi, damp));
  const double a = std::norm(psi(0)) + std::norm(psi(1)) * std::exp(0.8);
  CHECK_THAT(cd.normalizer, WithinAbs(a, 1e-12));
  CHECK_THAT(cd.populations(1), WithinAbs(std::norm(psi(1)) * std::exp(0.8) / a, 1e-12));

  CHECK_THROWS_AS(components(Vector::Zero(3), m), NumericalError);
}

TEST_CASE("observables ignore the unitary freedom of eta", "[biortho]") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const auto b = eig_biortho(oracle::random_nh(rng, 4));
    RealVector d = RealVector::Random(4);
    const MetricState m = metric_with_damping(b, d);
    const Vector psi = oracle::random_vector(rng, 4);
    CHECK(std::abs(observable(psi, Matrix::Identity(4, 4), m) - 1.0) < 1e-12);
    const Matrix k = oracle::random_matrix(rng, 4);
    const Matrix o = k + k.adjoint();
    const cplx v = observable(psi, o, m);
    CHECK(std::abs(v.imag()) < 1e-10);
    const Matrix u = oracle::random_unitary(rng, 4);
    CHECK(std::abs(observable(psi, u * o * u.adjoint(), Matrix(u * m.eta)) - v) < 1e-12);
    CHECK(std::abs(observable(psi, o, m.eta) - v) < 1e-12);
  }
  CHECK_THROWS_AS(observable(Vector::Ones(2), Matrix::Identity(3, 3), Matrix::Identity(2, 2)), NumericalError);
}

TEST_CASE("metric objects are invariant under eigenvector phases", "[biortho]") {
  std::mt19937_64 rng(23);
  const auto b = eig_biortho(oracle::random_nh(rng, 3));
  BiorthoBasis g = b;
  const double phases[] = {0.3, -1.2, 2.5};
  for (Eigen::Index n = 0; n < 3; ++n) {
    g.right.col(n) *= std::exp(kI * phases[n]);
    g.left.row(n) *= std::exp(-kI * phases[n]);
  }
  RealVector d(3);
  d << 0.2, -0.4, 0.1;
  const MetricState m1 = metric_with_damping(b, d), m2s = metric_with_damping(g, d);
  CHECK((m1.tilde - m2s.tilde).norm() < 1e-12);
  CHECK((m1.connection - m2s.connection).norm() < 1e-12);
  const Vector psi = oracle::random_vector(rng, 3);
  CHECK((components(psi, m1).populations - components(psi, m2s).populations).norm() < 1e-12);
  const Matrix o = Matrix::Identity(3, 3) + oracle::random_matrix(rng, 3).selfadjointView<Eigen::Upper>().toDenseMatrix();
  CHECK(std::abs(observable(psi, o, m1) - observable(psi, o, m2s)) < 1e-12);
}

TEST_CASE("state tracking", "[biortho]") {
  std::mt19937_64 rng(29);
  const auto b = eig_biortho(oracle::random_nh(rng, 3));
  CHECK(track_states(b, b) == std::vector<Eigen::Index>{0, 1, 2});

  const std::vector<Eigen::Index> swap{1, 0, 2};
  const BiorthoBasis swapped = permute_states(b, swap);
  CHECK(track_states(b, swapped) == swap);

  auto rot = [](double a) {
    Matrix r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
  };
  const Matrix h0 = m2(1.0, 0.5, 0.0, cplx(2.0, 0.3));
  const auto a0 = eig_biortho(h0);
  const auto a1 = eig_biortho(Matrix(rot(0.01) * h0 * rot(0.01).transpose()));
  CHECK(track_states(a0, a1) == std::vector<Eigen::Index>{0, 1});

  // every Fourier mode overlaps every site state by 1/sqrt(5)
  Matrix fourier(5, 5);
  Matrix spectrum = Matrix::Zero(5, 5);
  for (int j = 0; j < 5; ++j) {
    spectrum(j, j) = double(j);
    for (int k = 0; k < 5; ++k) fourier(j, k) = std::polar(1 / std::sqrt(5.0), 2 * M_PI * j * k / 5);
  }
  const auto e = eig_biortho(spectrum);
  const auto f = eig_biortho(Matrix(fourier * spectrum * fourier.adjoint()));
  CHECK_THROWS_AS(track_states(e, f), NumericalError);
}

TEST_CASE("hermitian positive-definite square root", "[linalg]") {
  CHECK((matrix_sqrt_pd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-14);
  CHECK((matrix_sqrt_pd(m2(4.0, 0.0, 0.0, 9.0)) - m2(2.0, 0.0, 0.0, 3.0)).norm() < 1e-14);
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix m = oracle::random_pd(rng, 4);
    const Matrix r = matrix_sqrt_pd(m);
    CHECK((r * r - m).norm() < 1e-10);
    CHECK(hermiticity_defect(r) < 1e-12);
    CHECK((matrix_inv_sqrt_pd(m) * r - Matrix::Identity(4, 4)).norm() < 1e-10);
  }
  CHECK(kind_of([] { matrix_sqrt_pd(m2(1.0, 0.0, 0.0, -1.0)); }) == ErrorKind::NotPositiveDefinite);
  CHECK(kind_of([] { matrix_sqrt_pd(m2(1.0, 0.5, 0.0, 1.0)); }) == ErrorKind::NotPositiveDefinite);
}
