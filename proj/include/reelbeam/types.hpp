#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace reelbeam {

using cscalar = std::complex<double>;

class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Matrix fails a positive-semidefiniteness requirement; carries the offending eigenvalue.
class NotPsdError : public std::runtime_error {
 public:
  NotPsdError(const std::string& what, double eigenvalue)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

// Iterative routine failed to meet its tolerance; carries the residual it got stuck at.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Dense complex matrix, row-major. Vectors are n x 1 matrices.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, cscalar(0.0, 0.0)) {}

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix column(const std::vector<cscalar>& v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }

  cscalar& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cscalar& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<cscalar>& data() { return a_; }
  const std::vector<cscalar>& data() const { return a_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
                      std::size_t ncols) const;
  ComplexMatrix col(std::size_t j) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cscalar> a_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cscalar s, const ComplexMatrix& a);
ComplexMatrix operator*(double s, const ComplexMatrix& a);

cscalar trace(const ComplexMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
// Euclidean norm of an n x 1 (or 1 x n) matrix.
double vector_norm(const ComplexMatrix& v);
ComplexMatrix outer(const ComplexMatrix& u, const ComplexMatrix& v);  // u v^H

// Complex Hermitian matrix. Construction validates conjugate symmetry to 1e-12
// relative to the largest entry magnitude, then stores the exactly symmetrized
// part so downstream code can rely on entry(i,j) == conj(entry(j,i)).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m);

  static HermitianMatrix identity(std::size_t n);
  static HermitianMatrix zero(std::size_t n);
  static HermitianMatrix outer(const ComplexMatrix& v);               // v v^H
  static HermitianMatrix symmetrized_product(const ComplexMatrix& u,
                                             const ComplexMatrix& v);  // u v^H + v u^H

  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  cscalar operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

 private:
  ComplexMatrix m_;
};

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
HermitianMatrix operator*(double s, const HermitianMatrix& a);
// Re tr(a x); exact inner product when x is Hermitian too.
double hermitian_inner(const HermitianMatrix& a, const ComplexMatrix& x);
double hermitian_inner(const HermitianMatrix& a, const HermitianMatrix& x);
double real_trace(const HermitianMatrix& a);
// U^H a U for a unitary U (validated by callers that require it).
HermitianMatrix rotate_hermitian(const HermitianMatrix& a, const ComplexMatrix& u);

struct EigenDecomposition {
  std::vector<double> values;  // sorted descending
  ComplexMatrix vectors;       // orthonormal columns, values[k] <-> column k
};

}  // namespace reelbeam
