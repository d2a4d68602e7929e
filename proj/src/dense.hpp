#pragma once

// Internal dense kernels shared by the Hermitian eigensolver and the
// interior-point solver. Not part of the public API.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

namespace reelbeam::detail {

inline double conj_of(double x) { return x; }
inline std::complex<double> conj_of(const std::complex<double>& x) { return std::conj(x); }
inline double real_of(double x) { return x; }
inline double real_of(const std::complex<double>& x) { return x.real(); }

// Householder reduction of a Hermitian (or real symmetric) matrix to real
// tridiagonal form. A is n x n row-major and is destroyed; Q accumulates the
// unitary transformation (must come in as identity). On exit d holds the
// diagonal and e[0..n-2] the (real, nonnegative) subdiagonal.
template <typename T>
void tridiagonalize(int n, std::vector<T>& A, std::vector<double>& d, std::vector<double>& e,
                    std::vector<T>& Q) {
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  std::vector<T> ecplx(n > 0 ? n - 1 : 0, T(0));
  std::vector<T> u(n), p(n), w(n);

  for (int k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) xnorm2 += std::norm(A[i * n + k]);
    const double xnorm = std::sqrt(xnorm2);
    const T alpha = A[(k + 1) * n + k];
    const double aabs = std::abs(alpha);
    if (xnorm <= 0.0) {
      ecplx[k] = T(0);
      continue;
    }
    const T phase = aabs > 0.0 ? alpha / T(aabs) : T(1);
    const T beta = -phase * T(xnorm);
    const double unorm2 = 2.0 * xnorm2 + 2.0 * aabs * xnorm;
    const double tau = 2.0 / unorm2;

    for (int i = k + 1; i < n; ++i) u[i] = A[i * n + k];
    u[k + 1] -= beta;

    // p = tau * B u over the trailing block B = A[k+1:, k+1:]
    for (int i = k + 1; i < n; ++i) {
      T s = T(0);
      for (int j = k + 1; j < n; ++j) s += A[i * n + j] * u[j];
      p[i] = T(tau) * s;
    }
    // w = p - (tau/2) (u^H p) u ; u^H p is real for Hermitian B
    double uhp = 0.0;
    for (int i = k + 1; i < n; ++i) uhp += real_of(conj_of(u[i]) * p[i]);
    const double kappa = 0.5 * tau * uhp;
    for (int i = k + 1; i < n; ++i) w[i] = p[i] - T(kappa) * u[i];
    // B <- B - u w^H - w u^H
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        A[i * n + j] -= u[i] * conj_of(w[j]) + w[i] * conj_of(u[j]);

    A[(k + 1) * n + k] = beta;
    for (int i = k + 2; i < n; ++i) A[i * n + k] = T(0);
    ecplx[k] = beta;

    // Q <- Q (I - tau u u^H), acting on columns k+1..n-1
    for (int r = 0; r < n; ++r) {
      T s = T(0);
      for (int j = k + 1; j < n; ++j) s += Q[r * n + j] * u[j];
      s *= T(tau);
      for (int j = k + 1; j < n; ++j) Q[r * n + j] -= s * conj_of(u[j]);
    }
  }
  if (n >= 2) ecplx[n - 2] = A[(n - 1) * n + (n - 2)];
  for (int i = 0; i < n; ++i) d[i] = real_of(A[i * n + i]);

  // Phase pass: T' = D^H T D with D = diag(t_k) makes the subdiagonal real
  // nonnegative; fold D into Q so H = (Q D) T' (Q D)^H.
  T t = T(1);
  for (int k = 0; k + 1 < n; ++k) {
    const double mag = std::abs(ecplx[k]);
    const T tnext = mag > 0.0 ? ecplx[k] * t / T(mag) : t;
    e[k] = mag;
    if (!(tnext == T(1))) {
      for (int r = 0; r < n; ++r) Q[r * n + (k + 1)] *= tnext;
    }
    t = tnext;
  }
}

// Implicit-shift QL iteration with Wilkinson shifts on a real symmetric
// tridiagonal (d, e), accumulating rotations into the columns of Q.
// Returns false (with *off_residual set) if an eigenvalue fails to converge
// within max_sweeps sweeps.
template <typename T>
bool tql_implicit(int n, std::vector<double>& d, std::vector<double>& e, std::vector<T>& Q,
                  int max_sweeps, double* off_residual) {
  if (n <= 1) return true;
  std::vector<double> sub(n, 0.0);  // sub[i] couples d[i] and d[i+1]
  for (int i = 0; i + 1 < n; ++i) sub[i] = e[i];

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(sub[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == max_sweeps) {
          if (off_residual) *off_residual = std::abs(sub[l]);
          return false;
        }
        double g = (d[l + 1] - d[l]) / (2.0 * sub[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + sub[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        bool underflow = false;
        for (i = m - 1; i >= l; --i) {
          double f = s * sub[i];
          const double b = c * sub[i];
          r = std::hypot(f, g);
          sub[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            sub[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            const T fk = Q[k * n + (i + 1)];
            Q[k * n + (i + 1)] = T(s) * Q[k * n + i] + T(c) * fk;
            Q[k * n + i] = T(c) * Q[k * n + i] - T(s) * fk;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        sub[l] = g;
        sub[m] = 0.0;
      }
    } while (m != l);
  }
  return true;
}

// ---- real dense helpers (row-major square matrices as flat vectors) ----

using RVec = std::vector<double>;

inline void mat_mul(int n, const RVec& a, const RVec& b, RVec& c) {
  c.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      const double* brow = &b[static_cast<std::size_t>(k) * n];
      double* crow = &c[static_cast<std::size_t>(i) * n];
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
}

inline void symmetrize(int n, RVec& a) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a[i * n + j] + a[j * n + i]);
      a[i * n + j] = v;
      a[j * n + i] = v;
    }
}

inline double frob_inner(const RVec& a, const RVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Eigendecomposition of a real symmetric matrix: A = Q diag(w) Q^T with w
// ascending. Returns false on QL non-convergence.
bool sym_eig(int n, const RVec& a, RVec& q, RVec& w);

// In-place lower Cholesky; returns false if not positive definite.
bool cholesky(int n, RVec& a);
void chol_solve(int n, const RVec& chol, RVec& x);

// From an eigendecomposition (q, w), form q diag(f(w)) q^T.
template <typename F>
void eig_apply(int n, const RVec& q, const RVec& w, F f, RVec& out) {
  out.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    const double fk = f(w[k]);
    if (fk == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      const double qik = q[i * n + k] * fk;
      if (qik == 0.0) continue;
      for (int j = 0; j < n; ++j) out[i * n + j] += qik * q[j * n + k];
    }
  }
}

}  // namespace reelbeam::detail
