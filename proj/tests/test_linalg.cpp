#include <doctest.h>

#include <cmath>

#include "reelbeam/linalg.hpp"
#include "reelbeam/rng.hpp"

using namespace reelbeam;

namespace {

ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m(values.size(), values.size());
  std::size_t i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

double reconstruction_error(const HermitianMatrix& h, const EigenDecomposition& e) {
  ComplexMatrix lam(h.dim(), h.dim());
  for (std::size_t i = 0; i < h.dim(); ++i) lam(i, i) = e.values[i];
  return frobenius_norm(e.vectors * lam * e.vectors.adjoint() - h.matrix());
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("eig of the identity") {
  const auto e = linalg::eig_hermitian(HermitianMatrix::identity(3));
  for (double v : e.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(frobenius_norm(e.vectors.adjoint() * e.vectors - ComplexMatrix::identity(3)) < 1e-10);
}

TEST_CASE("eig of a diagonal matrix sorts descending") {
  const auto e = linalg::eig_hermitian(HermitianMatrix(diag({0.0, 5.0, -1.0})));
  CHECK(e.values[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(e.values[2] == doctest::Approx(-1.0).epsilon(1e-14));
  // vectors are a permuted standard basis: each column has one unit entry
  for (std::size_t j = 0; j < 3; ++j) {
    double maxabs = 0.0;
    for (std::size_t i = 0; i < 3; ++i) maxabs = std::max(maxabs, std::abs(e.vectors(i, j)));
    CHECK(maxabs == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rank-one projector has spectrum (1, 0, ..., 0)") {
  Rng rng(11);
  ComplexMatrix h = rng.complex_gaussian_vector(6);
  h = (1.0 / vector_norm(h)) * h;
  const auto e = linalg::eig_hermitian(HermitianMatrix::outer(h));
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < 6; ++i) CHECK(std::abs(e.values[i]) < 1e-12);
}

TEST_CASE("eig invariants on random Hermitian matrices") {
  Rng rng(29);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + t % 9;
    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
    const HermitianMatrix h(g + g.adjoint());
    const auto e = linalg::eig_hermitian(h);
    CHECK(reconstruction_error(h, e) <= 1e-9 * (frobenius_norm(h.matrix()) + 1.0));
    CHECK(frobenius_norm(e.vectors.adjoint() * e.vectors - ComplexMatrix::identity(n)) < 1e-10);
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(e.values[i] >= e.values[i + 1]);
  }
}

TEST_CASE("unitary similarity preserves the spectrum") {
  Rng rng(31);
  const std::size_t n = 7;
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
  const HermitianMatrix h(g + g.adjoint());
  const ComplexMatrix u = linalg::rotation_matrix(rng.complex_gaussian_vector(n));
  const HermitianMatrix rotated = rotate_hermitian(h, u);
  const auto e1 = linalg::eig_hermitian(h);
  const auto e2 = linalg::eig_hermitian(rotated);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e1.values[i] - e2.values[i]) < 1e-9);
}

TEST_CASE("rotation_matrix maps e1 to the identity") {
  ComplexMatrix h(4, 1);
  h(0, 0) = 2.5;  // scaling must not matter
  const ComplexMatrix u = linalg::rotation_matrix(h);
  CHECK(frobenius_norm(u - ComplexMatrix::identity(4)) < 1e-14);
}

TEST_CASE("rotation_matrix for the 2-d diagonal channel") {
  ComplexMatrix h(2, 1);
  h(0, 0) = 1.0;
  h(1, 0) = 1.0;
  const ComplexMatrix u = linalg::rotation_matrix(h);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(u(0, 0) - cscalar(s, 0)) < 1e-14);
  CHECK(std::abs(u(1, 0) - cscalar(s, 0)) < 1e-14);
  // second column: unit norm, orthogonal to the first
  const ComplexMatrix c1 = u.col(1);
  CHECK(vector_norm(c1) == doctest::Approx(1.0).epsilon(1e-14));
  const ComplexMatrix ip = u.col(0).adjoint() * c1;
  CHECK(std::abs(ip(0, 0)) < 1e-14);
}

TEST_CASE("rotation_matrix null-space residual on a random channel") {
  Rng rng(5);
  const ComplexMatrix h = rng.complex_gaussian_vector(8);
  const ComplexMatrix u = linalg::rotation_matrix(h);
  CHECK(frobenius_norm(u.adjoint() * u - ComplexMatrix::identity(8)) < 1e-10);
  const ComplexMatrix r = h.adjoint() * u;  // 1 x 8
  for (std::size_t j = 1; j < 8; ++j) CHECK(std::abs(r(0, j)) <= 1e-10 * vector_norm(h));
  CHECK(r(0, 0).real() == doctest::Approx(vector_norm(h)).epsilon(1e-12));
}

TEST_CASE("rotation_matrix rejects the zero vector") {
  CHECK_THROWS_AS(linalg::rotation_matrix(ComplexMatrix(3, 1)), InvalidInputError);
}

TEST_CASE("psd_factor of the identity") {
  const ComplexMatrix b = linalg::psd_factor(HermitianMatrix::identity(2));
  REQUIRE(b.cols() == 2);
  CHECK(frobenius_norm(b * b.adjoint() - ComplexMatrix::identity(2)) < 1e-14);
}

TEST_CASE("psd_factor of the zero matrix has no columns") {
  const ComplexMatrix b = linalg::psd_factor(HermitianMatrix::zero(3));
  CHECK(b.cols() == 0);
  CHECK(b.rows() == 3);
}

TEST_CASE("psd_factor of a rank-one outer product") {
  Rng rng(17);
  const ComplexMatrix v = rng.complex_gaussian_vector(5);
  const HermitianMatrix x = HermitianMatrix::outer(v);
  const ComplexMatrix b = linalg::psd_factor(x);
  REQUIRE(b.cols() == 1);
  CHECK(frobenius_norm(b) == doctest::Approx(vector_norm(v)).epsilon(1e-12));
  CHECK(frobenius_norm(b * b.adjoint() - x.matrix()) <= 1e-10 * frobenius_norm(x.matrix()));
}

TEST_CASE("psd_factor rejects an indefinite matrix") {
  CHECK_THROWS_AS(linalg::psd_factor(HermitianMatrix(diag({1.0, -0.5}))), NotPsdError);
  try {
    linalg::psd_factor(HermitianMatrix(diag({1.0, -0.5})));
  } catch (const NotPsdError& e) {
    CHECK(e.eigenvalue() == doctest::Approx(-0.5).epsilon(1e-12));
  }
}

TEST_CASE("psd_factor column count matches numeric rank on random PSD input") {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 3 + t % 6;
    const std::size_t r = 1 + t % n;
    ComplexMatrix b(n, r);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < r; ++j) b(i, j) = rng.complex_gaussian();
    const HermitianMatrix x(b * b.adjoint());
    const ComplexMatrix f = linalg::psd_factor(x, 1e-10);
    CHECK(f.cols() == r);
    CHECK(f.cols() == linalg::numeric_rank(x, 1e-10));
    CHECK(frobenius_norm(f * f.adjoint() - x.matrix()) <=
          10.0 * 1e-10 * frobenius_norm(x.matrix()) + 1e-12);
  }
}

TEST_CASE("numeric_rank threshold arithmetic") {
  CHECK(linalg::numeric_rank(HermitianMatrix(diag({1.0, 0.5, 1e-9})), 1e-4) == 2);
  CHECK(linalg::numeric_rank(HermitianMatrix::identity(4), 1e-4) == 4);
  CHECK(linalg::numeric_rank(HermitianMatrix::zero(3), 1e-4) == 0);
}

TEST_CASE("numeric_rank counts an exact-threshold eigenvalue as nonzero") {
  // spectrum (3, 1) with fraction 1/4: threshold = (3 + 1)/4 = 1 exactly
  CHECK(linalg::numeric_rank(HermitianMatrix(diag({3.0, 1.0})), 0.25) == 2);
}

}  // TEST_SUITE
