#include "reelbeam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dense.hpp"

namespace reelbeam::linalg {

namespace {

void fix_column_phases(ComplexMatrix& vecs) {
  const std::size_t n = vecs.rows();
  for (std::size_t j = 0; j < vecs.cols(); ++j) {
    double colmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) colmax = std::max(colmax, std::abs(vecs(i, j)));
    if (colmax == 0.0) continue;
    std::size_t lead = 0;
    while (lead < n && std::abs(vecs(lead, j)) <= 1e-10 * colmax) ++lead;
    if (lead == n) continue;
    const cscalar v = vecs(lead, j);
    const cscalar phase = std::conj(v) / std::abs(v);
    for (std::size_t i = 0; i < n; ++i) vecs(i, j) *= phase;
    vecs(lead, j) = cscalar(std::abs(v), 0.0);
  }
}

}  // namespace

EigenDecomposition eig_hermitian(const HermitianMatrix& h) {
  const int n = static_cast<int>(h.dim());
  std::vector<cscalar> a(h.matrix().data());
  std::vector<cscalar> q(static_cast<std::size_t>(n) * n, cscalar(0.0, 0.0));
  for (int i = 0; i < n; ++i) q[i * n + i] = 1.0;

  std::vector<double> d, e;
  detail::tridiagonalize<cscalar>(n, a, d, e, q);
  double resid = 0.0;
  if (!detail::tql_implicit<cscalar>(n, d, e, q, 60, &resid))
    throw NumericalError("Hermitian eigensolver did not converge", resid);

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] > d[j]; });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = d[idx[k]];
    for (int i = 0; i < n; ++i) out.vectors(i, k) = q[i * n + idx[k]];
  }
  fix_column_phases(out.vectors);
  return out;
}

ComplexMatrix rotation_matrix(const ComplexMatrix& h) {
  if (h.cols() != 1) throw InvalidInputError("rotation_matrix expects a column vector");
  const std::size_t n = h.rows();
  const double nrm = vector_norm(h);
  if (!(nrm > 0.0)) throw InvalidInputError("rotation_matrix: zero channel vector");

  ComplexMatrix hbar(n, 1);
  for (std::size_t i = 0; i < n; ++i) hbar(i, 0) = h(i, 0) / nrm;

  // Householder reflector P with P hbar = c e1, |c| = 1. P is unitary and
  // Hermitian, so its trailing columns form an orthonormal basis of the
  // orthogonal complement of hbar.
  const cscalar h0 = hbar(0, 0);
  const double h0abs = std::abs(h0);
  const cscalar phase = h0abs > 0.0 ? h0 / h0abs : cscalar(1.0, 0.0);
  std::vector<cscalar> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = hbar(i, 0);
  u[0] += phase;  // u = hbar - (-phase) e1
  double unorm2 = 0.0;
  for (const auto& v : u) unorm2 += std::norm(v);

  ComplexMatrix U(n, n);
  for (std::size_t i = 0; i < n; ++i) U(i, 0) = hbar(i, 0);
  const double tau = 2.0 / unorm2;  // unorm2 = 2 + 2|h0| > 0
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const cscalar pij = (i == j ? cscalar(1.0, 0.0) : cscalar(0.0, 0.0)) -
                          tau * u[i] * std::conj(u[j]);
      U(i, j) = pij;
    }
  }
  return U;
}

ComplexMatrix psd_factor(const HermitianMatrix& x, double tol, double scale) {
  if (!(tol > 0.0)) throw InvalidInputError("psd_factor: tol must be positive");
  const EigenDecomposition eig = eig_hermitian(x);
  const double tr = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  if (!(scale > 0.0)) scale = std::max(tr, 0.0);
  const double threshold = tol * scale;
  if (!eig.values.empty() && eig.values.back() < -std::max(threshold, 1e-300))
    throw NotPsdError("psd_factor: matrix is not PSD within tolerance", eig.values.back());

  std::size_t r = 0;
  while (r < eig.values.size() && eig.values[r] >= threshold && eig.values[r] > 0.0) ++r;

  ComplexMatrix b(x.dim(), r);
  for (std::size_t k = 0; k < r; ++k) {
    const double s = std::sqrt(eig.values[k]);
    for (std::size_t i = 0; i < x.dim(); ++i) b(i, k) = s * eig.vectors(i, k);
  }
  return b;
}

std::size_t numeric_rank(const HermitianMatrix& x, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidInputError("numeric_rank: fraction must lie in (0, 1)");
  const EigenDecomposition eig = eig_hermitian(x);
  const double sum = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  const double threshold = fraction * std::max(sum, 0.0);
  std::size_t r = 0;
  while (r < eig.values.size() && eig.values[r] >= threshold && eig.values[r] > 0.0) ++r;
  return r;
}

}  // namespace reelbeam::linalg
