#include "dense.hpp"

#include <algorithm>
#include <numeric>

namespace reelbeam::detail {

bool sym_eig(int n, const RVec& a, RVec& q, RVec& w) {
  RVec work = a;
  q.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) q[i * n + i] = 1.0;
  RVec e;
  tridiagonalize<double>(n, work, w, e, q);
  if (!tql_implicit<double>(n, w, e, q, 60, nullptr)) return false;

  // sort ascending, permuting columns along
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return w[i] < w[j]; });
  RVec ws(n);
  RVec qs(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    ws[k] = w[idx[k]];
    for (int i = 0; i < n; ++i) qs[i * n + k] = q[i * n + idx[k]];
  }
  w = std::move(ws);
  q = std::move(qs);
  return true;
}

bool cholesky(int n, RVec& a) {
  for (int j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (int k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double lj = std::sqrt(d);
    a[j * n + j] = lj;
    for (int i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / lj;
    }
  }
  // zero strict upper triangle for cleanliness
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a[i * n + j] = 0.0;
  return true;
}

void chol_solve(int n, const RVec& chol, RVec& x) {
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= chol[i * n + k] * x[k];
    x[i] = s / chol[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= chol[k * n + i] * x[k];
    x[i] = s / chol[i * n + i];
  }
}

}  // namespace reelbeam::detail
