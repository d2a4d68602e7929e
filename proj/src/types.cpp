#include "reelbeam/types.hpp"

#include <algorithm>
#include <cmath>

namespace reelbeam {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::column(const std::vector<cscalar>& v) {
  ComplexMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

ComplexMatrix ComplexMatrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                                   std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_)
    throw InvalidInputError("block indices out of range");
  ComplexMatrix r(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    for (std::size_t j = 0; j < ncols; ++j) r(i, j) = (*this)(row0 + i, col0 + j);
  return r;
}

ComplexMatrix ComplexMatrix::col(std::size_t j) const { return block(0, j, rows_, 1); }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInputError("matrix product dimension mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cscalar aik = a(i, k);
      if (aik == cscalar(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInputError("matrix sum dimension mismatch");
  ComplexMatrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
  return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInputError("matrix difference dimension mismatch");
  ComplexMatrix c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

ComplexMatrix operator*(cscalar s, const ComplexMatrix& a) {
  ComplexMatrix c = a;
  for (auto& v : c.data()) v *= s;
  return c;
}

ComplexMatrix operator*(double s, const ComplexMatrix& a) { return cscalar(s, 0.0) * a; }

cscalar trace(const ComplexMatrix& a) {
  cscalar t = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& v : a.data()) s += std::norm(v);
  return std::sqrt(s);
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const auto& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double vector_norm(const ComplexMatrix& v) {
  if (v.rows() != 1 && v.cols() != 1) throw InvalidInputError("vector_norm expects a vector");
  return frobenius_norm(v);
}

ComplexMatrix outer(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.cols() != 1 || v.cols() != 1) throw InvalidInputError("outer expects column vectors");
  ComplexMatrix r(u.rows(), v.rows());
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < v.rows(); ++j) r(i, j) = u(i, 0) * std::conj(v(j, 0));
  return r;
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInputError("Hermitian matrix must be square");
  const double scale = max_abs(m);
  const double tol = 1e-12 * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (std::abs(m(i, i).imag()) > tol)
      throw InvalidInputError("Hermitian matrix has non-real diagonal entry");
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > 2.0 * tol)
        throw InvalidInputError("matrix is not conjugate-symmetric");
    }
  }
  m_ = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    m_(i, i) = cscalar(m(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const cscalar avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m_(i, j) = avg;
      m_(j, i) = std::conj(avg);
    }
  }
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
  return HermitianMatrix(ComplexMatrix::identity(n));
}

HermitianMatrix HermitianMatrix::zero(std::size_t n) {
  return HermitianMatrix(ComplexMatrix(n, n));
}

HermitianMatrix HermitianMatrix::outer(const ComplexMatrix& v) {
  return HermitianMatrix(reelbeam::outer(v, v));
}

HermitianMatrix HermitianMatrix::symmetrized_product(const ComplexMatrix& u,
                                                     const ComplexMatrix& v) {
  return HermitianMatrix(reelbeam::outer(u, v) + reelbeam::outer(v, u));
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  return HermitianMatrix(a.matrix() + b.matrix());
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  return HermitianMatrix(a.matrix() - b.matrix());
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return HermitianMatrix(s * a.matrix());
}

double hermitian_inner(const HermitianMatrix& a, const ComplexMatrix& x) {
  if (a.dim() != x.rows() || x.rows() != x.cols())
    throw InvalidInputError("hermitian_inner dimension mismatch");
  // tr(a x) with a Hermitian: sum_ij a(i,j) x(j,i)
  cscalar t = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) t += a(i, j) * x(j, i);
  return t.real();
}

double hermitian_inner(const HermitianMatrix& a, const HermitianMatrix& x) {
  return hermitian_inner(a, x.matrix());
}

double real_trace(const HermitianMatrix& a) { return trace(a.matrix()).real(); }

HermitianMatrix rotate_hermitian(const HermitianMatrix& a, const ComplexMatrix& u) {
  ComplexMatrix r = u.adjoint() * a.matrix() * u;
  // round-off can leave r slightly non-Hermitian; resymmetrize before validating
  for (std::size_t i = 0; i < r.rows(); ++i) {
    r(i, i) = cscalar(r(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < r.cols(); ++j) {
      const cscalar avg = 0.5 * (r(i, j) + std::conj(r(j, i)));
      r(i, j) = avg;
      r(j, i) = std::conj(avg);
    }
  }
  return HermitianMatrix(r);
}

}  // namespace reelbeam
