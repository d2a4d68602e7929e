#pragma once

#include "reelbeam/types.hpp"

namespace reelbeam::linalg {

// Eigendecomposition of a complex Hermitian matrix via Householder
// tridiagonalization and implicit-shift QL with Wilkinson shifts.
// Eigenvalues come back sorted descending; each eigenvector is phased so its
// first nonzero entry is real nonnegative.
EigenDecomposition eig_hermitian(const HermitianMatrix& h);

// Unitary U = [h/||h||  F] where the columns of F span the orthogonal
// complement of h. Throws InvalidInputError on a zero channel vector.
ComplexMatrix rotation_matrix(const ComplexMatrix& h);

// Factor a PSD matrix as x = B B^H where B has numeric_rank(x, tol) columns.
// Eigenvalues below tol*trace are clamped to zero; an eigenvalue below
// -tol*trace raises NotPsdError. An explicit scale replaces the trace as the
// reference magnitude (used when x is a submatrix of a larger solution and
// its own trace may be at noise level).
ComplexMatrix psd_factor(const HermitianMatrix& x, double tol = 1e-10, double scale = -1.0);

// Number of eigenvalues >= fraction * (sum of eigenvalues); ties count as
// nonzero. The experiment convention uses fraction = 1e-4.
std::size_t numeric_rank(const HermitianMatrix& x, double fraction = 1e-4);

}  // namespace reelbeam::linalg
