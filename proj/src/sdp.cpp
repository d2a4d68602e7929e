#include "reelbeam/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dense.hpp"
#include "reelbeam/linalg.hpp"

namespace reelbeam::sdp {

using detail::RVec;

void StandardSdp::validate() const {
  if (block_dims.empty()) throw InvalidInputError("StandardSdp: no blocks");
  if (objective.size() != block_dims.size())
    throw InvalidInputError("StandardSdp: objective must have one matrix per block");
  for (std::size_t b = 0; b < block_dims.size(); ++b) {
    if (block_dims[b] == 0) throw InvalidInputError("StandardSdp: zero block dimension");
    if (objective[b].dim() != block_dims[b])
      throw InvalidInputError("StandardSdp: objective dimension mismatch");
  }
  for (const auto& row : constraints) {
    if (row.coeffs.size() != block_dims.size())
      throw InvalidInputError("StandardSdp: constraint row must have one matrix per block");
    for (std::size_t b = 0; b < block_dims.size(); ++b)
      if (row.coeffs[b].dim() != block_dims[b])
        throw InvalidInputError("StandardSdp: constraint coefficient dimension mismatch");
    if (!std::isfinite(row.rhs)) throw InvalidInputError("StandardSdp: non-finite rhs");
  }
  for (const auto& ds : double_sided) {
    if (ds.block >= block_dims.size())
      throw InvalidInputError("StandardSdp: double-sided block index out of range");
    if (ds.coeff.dim() != block_dims[ds.block])
      throw InvalidInputError("StandardSdp: double-sided coefficient dimension mismatch");
    if (ds.lower > ds.upper)
      throw InvalidInputError("StandardSdp: double-sided bounds out of order");
    if (ds.lower == kInf || ds.upper == -kInf)
      throw InvalidInputError("StandardSdp: double-sided bound has wrong sign of infinity");
  }
  if (constraints.empty() && double_sided.empty())
    throw InvalidInputError("StandardSdp: problem has no constraints");
}

std::size_t dual_slot_count(const StandardSdp& p) {
  return p.constraints.size() + 2 * p.double_sided.size();
}

std::vector<ExpandedRow> expand_rows(const StandardSdp& p) {
  std::vector<ExpandedRow> rows;
  rows.reserve(p.constraints.size() + 2 * p.double_sided.size());
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    ExpandedRow r;
    for (std::size_t b = 0; b < p.block_dims.size(); ++b)
      r.terms.push_back({b, &p.constraints[i].coeffs[b]});
    r.sense = p.constraints[i].sense;
    r.rhs = p.constraints[i].rhs;
    r.dual_slot = i;
    rows.push_back(std::move(r));
  }
  for (std::size_t d = 0; d < p.double_sided.size(); ++d) {
    const auto& ds = p.double_sided[d];
    const std::size_t base = p.constraints.size() + 2 * d;
    if (std::isfinite(ds.lower)) {
      ExpandedRow r;
      r.terms.push_back({ds.block, &ds.coeff});
      r.sense = Sense::GE;
      r.rhs = ds.lower;
      r.dual_slot = base;
      rows.push_back(std::move(r));
    }
    if (std::isfinite(ds.upper)) {
      ExpandedRow r;
      r.terms.push_back({ds.block, &ds.coeff});
      r.sense = Sense::LE;
      r.rhs = ds.upper;
      r.dual_slot = base + 1;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

RealMatrix embed_hermitian(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  RealMatrix r;
  r.n = 2 * n;
  r.a.assign(4 * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const cscalar v = h(i, j);
      r.at(i, j) = v.real();
      r.at(n + i, n + j) = v.real();
      r.at(i, n + j) = -v.imag();
      r.at(n + i, j) = v.imag();
    }
  return r;
}

HermitianMatrix complex_from_embedded(const RealMatrix& x) {
  if (x.n % 2 != 0) throw InvalidInputError("embedded matrix must have even dimension");
  const std::size_t n = x.n / 2;
  ComplexMatrix c(n, n);
  // structure-average: the embedding commutes with J = [[0, I], [-I, 0]], so
  // averaging X with J^T X J projects onto the embedded subspace.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = 0.5 * (x.at(i, j) + x.at(n + i, n + j));
      const double im = 0.5 * (x.at(n + i, j) - x.at(i, n + j));
      c(i, j) = cscalar(re, im);
    }
  // exact Hermitian cleanup
  for (std::size_t i = 0; i < n; ++i) {
    c(i, i) = cscalar(c(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const cscalar avg = 0.5 * (c(i, j) + std::conj(c(j, i)));
      c(i, j) = avg;
      c(j, i) = std::conj(avg);
    }
  }
  return HermitianMatrix(c);
}

EmbeddedSdp embed_real(const StandardSdp& p) {
  p.validate();
  EmbeddedSdp e;
  for (std::size_t d : p.block_dims) e.block_dims.push_back(2 * d);
  for (const auto& c : p.objective) e.objective.push_back(embed_hermitian(c));
  for (const auto& row : expand_rows(p)) {
    EmbeddedRow er;
    for (const auto& t : row.terms) er.terms.emplace_back(t.block, embed_hermitian(*t.coeff));
    er.sense = row.sense;
    er.rhs = 2.0 * row.rhs;
    er.dual_slot = row.dual_slot;
    e.rows.push_back(std::move(er));
  }
  e.dual_slots = dual_slot_count(p);
  return e;
}

namespace {

struct BlockRef {
  int row;
  const RVec* mat;
};

struct EigCache {
  RVec q;
  RVec w;
};

bool sym_eig_checked(int n, const RVec& a, EigCache& out) {
  return detail::sym_eig(n, a, out.q, out.w);
}

// q diag(f(w)) q^T with eigenvalue clamping for inverse powers
RVec eig_power(int n, const EigCache& e, double p) {
  const double wmax = e.w.empty() ? 0.0 : std::max(std::abs(e.w.front()), std::abs(e.w.back()));
  const double floor_ = std::max(wmax * 1e-16, 1e-300);
  RVec out;
  detail::eig_apply(
      n, e.q, e.w,
      [&](double w) {
        const double wc = std::max(w, floor_);
        return std::pow(wc, p);
      },
      out);
  return out;
}

double min_eig(int n, const RVec& a) {
  EigCache e;
  if (!sym_eig_checked(n, a, e)) return -std::numeric_limits<double>::infinity();
  return e.w.front();
}

double max_eig(int n, const RVec& a) {
  EigCache e;
  if (!sym_eig_checked(n, a, e)) return std::numeric_limits<double>::infinity();
  return e.w.back();
}

struct Solver {
  // problem in embedded form
  int nb = 0;
  std::vector<int> dims;
  std::vector<RVec> C;
  int m = 0;
  std::vector<std::vector<std::pair<int, RVec>>> rows;  // per row: (block, matrix)
  std::vector<std::vector<BlockRef>> by_block;          // per block: rows touching it
  RVec b;
  std::vector<int> sigma;      // +1 LE, -1 GE, 0 EQ
  std::vector<int> slack_idx;  // per row, index into slack vectors or -1
  int n_slack = 0;
  std::vector<double> row_scale;
  std::vector<std::size_t> dual_slot;

  SolveOptions opts;

  // iterates
  std::vector<RVec> X, Z;
  RVec y;
  RVec s, z;  // slack primal/dual

  // per-iteration scaling data
  std::vector<EigCache> eigX, eigZ, eigW, eigV;
  std::vector<RVec> W, Whalf, Wihalf, Xihalf, Zihalf, Vmat;
  RVec wlp;  // LP scaling per slack

  // workspace
  std::vector<std::vector<RVec>> T;  // per row, per touched block: W A W
  RVec M, Mfact;

  int total_dim() const {
    int t = n_slack;
    for (int d : dims) t += d;
    return t;
  }

  void build(const EmbeddedSdp& e, const SolveOptions& o) {
    opts = o;
    nb = static_cast<int>(e.block_dims.size());
    dims.assign(e.block_dims.begin(), e.block_dims.end());
    C.clear();
    for (const auto& c : e.objective) C.push_back(c.a);
    m = static_cast<int>(e.rows.size());
    rows.resize(m);
    by_block.assign(nb, {});
    b.assign(m, 0.0);
    sigma.assign(m, 0);
    slack_idx.assign(m, -1);
    row_scale.assign(m, 1.0);
    dual_slot.resize(m);
    for (int i = 0; i < m; ++i) {
      const auto& er = e.rows[i];
      double nrm2 = 0.0;
      for (const auto& t : er.terms) nrm2 += detail::frob_inner(t.second.a, t.second.a);
      const double scale = std::max(1.0, std::sqrt(nrm2));
      row_scale[i] = scale;
      for (const auto& t : er.terms) {
        RVec a = t.second.a;
        for (double& v : a) v /= scale;
        rows[i].emplace_back(static_cast<int>(t.first), std::move(a));
      }
      b[i] = er.rhs / scale;
      sigma[i] = er.sense == Sense::LE ? 1 : (er.sense == Sense::GE ? -1 : 0);
      if (sigma[i] != 0) slack_idx[i] = n_slack++;
      dual_slot[i] = er.dual_slot;
      for (const auto& t : rows[i]) by_block[t.first].push_back({i, &t.second});
    }
  }

  void initialize() {
    double bmax = 0.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    const double rho = 1.0 + bmax;
    X.assign(nb, {});
    Z.assign(nb, {});
    for (int bl = 0; bl < nb; ++bl) {
      const int n = dims[bl];
      X[bl].assign(static_cast<std::size_t>(n) * n, 0.0);
      Z[bl].assign(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i) {
        X[bl][i * n + i] = rho;
        Z[bl][i * n + i] = rho;
      }
    }
    y.assign(m, 0.0);
    s.assign(n_slack, rho);
    z.assign(n_slack, rho);
  }

  double block_inner(int bl, const RVec& a, const RVec& x) const {
    (void)bl;
    return detail::frob_inner(a, x);
  }

  void primal_residual(RVec& rp) const {
    rp.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double v = 0.0;
      for (const auto& t : rows[i]) v += detail::frob_inner(t.second, X[t.first]);
      if (slack_idx[i] >= 0) v += sigma[i] * s[slack_idx[i]];
      rp[i] = b[i] - v;
    }
  }

  void dual_residual(std::vector<RVec>& Rd, RVec& rds) const {
    Rd.assign(nb, {});
    for (int bl = 0; bl < nb; ++bl) {
      Rd[bl] = C[bl];
      for (std::size_t k = 0; k < Rd[bl].size(); ++k) Rd[bl][k] -= Z[bl][k];
      for (const auto& ref : by_block[bl]) {
        const double yi = y[ref.row];
        if (yi == 0.0) continue;
        const RVec& a = *ref.mat;
        for (std::size_t k = 0; k < a.size(); ++k) Rd[bl][k] -= yi * a[k];
      }
    }
    rds.assign(n_slack, 0.0);
    for (int i = 0; i < m; ++i)
      if (slack_idx[i] >= 0) rds[slack_idx[i]] = -sigma[i] * y[i] - z[slack_idx[i]];
  }

  double mu() const {
    double t = 0.0;
    for (int bl = 0; bl < nb; ++bl) t += detail::frob_inner(X[bl], Z[bl]);
    for (int i = 0; i < n_slack; ++i) t += s[i] * z[i];
    return t / total_dim();
  }

  bool update_scaling() {
    const int prev = static_cast<int>(eigX.size());
    if (prev != nb) {
      eigX.resize(nb);
      eigZ.resize(nb);
      eigW.resize(nb);
      eigV.resize(nb);
      W.resize(nb);
      Whalf.resize(nb);
      Wihalf.resize(nb);
      Xihalf.resize(nb);
      Zihalf.resize(nb);
      Vmat.resize(nb);
    }
    RVec tmp1, tmp2, xhalf;
    for (int bl = 0; bl < nb; ++bl) {
      const int n = dims[bl];
      if (!sym_eig_checked(n, X[bl], eigX[bl])) return false;
      if (!sym_eig_checked(n, Z[bl], eigZ[bl])) return false;
      xhalf = eig_power(n, eigX[bl], 0.5);
      Xihalf[bl] = eig_power(n, eigX[bl], -0.5);
      Zihalf[bl] = eig_power(n, eigZ[bl], -0.5);
      // S = X^1/2 Z X^1/2
      detail::mat_mul(n, xhalf, Z[bl], tmp1);
      detail::mat_mul(n, tmp1, xhalf, tmp2);
      detail::symmetrize(n, tmp2);
      EigCache eigS;
      if (!sym_eig_checked(n, tmp2, eigS)) return false;
      const RVec sihalf = eig_power(n, eigS, -0.5);
      detail::mat_mul(n, xhalf, sihalf, tmp1);
      detail::mat_mul(n, tmp1, xhalf, W[bl]);
      detail::symmetrize(n, W[bl]);
      if (!sym_eig_checked(n, W[bl], eigW[bl])) return false;
      Whalf[bl] = eig_power(n, eigW[bl], 0.5);
      Wihalf[bl] = eig_power(n, eigW[bl], -0.5);
      detail::mat_mul(n, Whalf[bl], Z[bl], tmp1);
      detail::mat_mul(n, tmp1, Whalf[bl], Vmat[bl]);
      detail::symmetrize(n, Vmat[bl]);
      if (!sym_eig_checked(n, Vmat[bl], eigV[bl])) return false;
    }
    wlp.assign(n_slack, 1.0);
    for (int i = 0; i < n_slack; ++i) wlp[i] = std::sqrt(s[i] / std::max(z[i], 1e-300));
    return true;
  }

  bool assemble_schur() {
    T.assign(m, {});
    for (int i = 0; i < m; ++i) T[i].resize(rows[i].size());
    RVec tmp;
    for (int bl = 0; bl < nb; ++bl) {
      const int n = dims[bl];
      for (const auto& ref : by_block[bl]) {
        // locate term index within the row
        const auto& rterms = rows[ref.row];
        for (std::size_t ti = 0; ti < rterms.size(); ++ti) {
          if (rterms[ti].first != bl) continue;
          detail::mat_mul(n, W[bl], rterms[ti].second, tmp);
          detail::mat_mul(n, tmp, W[bl], T[ref.row][ti]);
          detail::symmetrize(n, T[ref.row][ti]);
        }
      }
    }
    M.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int bl = 0; bl < nb; ++bl) {
      const auto& list = by_block[bl];
      for (std::size_t aj = 0; aj < list.size(); ++aj) {
        const int j = list[aj].row;
        const RVec* Tj = nullptr;
        for (std::size_t ti = 0; ti < rows[j].size(); ++ti)
          if (rows[j][ti].first == bl) Tj = &T[j][ti];
        for (std::size_t ai = 0; ai < list.size(); ++ai) {
          const int i = list[ai].row;
          if (i > j) continue;
          M[i * m + j] += detail::frob_inner(*list[ai].mat, *Tj);
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      if (slack_idx[i] >= 0) M[i * m + i] += wlp[slack_idx[i]] * wlp[slack_idx[i]];
      for (int j = 0; j < i; ++j) M[i * m + j] = M[j * m + i];
    }
    // factor with ridge escalation
    double base = 0.0;
    for (int i = 0; i < m; ++i) base = std::max(base, M[i * m + i]);
    base = std::max(base, 1e-300);
    double ridge = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Mfact = M;
      if (ridge > 0.0)
        for (int i = 0; i < m; ++i) Mfact[i * m + i] += ridge;
      if (detail::cholesky(m, Mfact)) return true;
      ridge = ridge == 0.0 ? base * 1e-14 : ridge * 100.0;
    }
    return false;
  }

  void solve_normal(const RVec& rhs, RVec& dy) const {
    dy = rhs;
    detail::chol_solve(m, Mfact, dy);
    // one step of iterative refinement against the unfactored matrix
    RVec resid(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double v = rhs[i];
      for (int j = 0; j < m; ++j) v -= M[i * m + j] * dy[j];
      resid[i] = v;
    }
    detail::chol_solve(m, Mfact, resid);
    for (int i = 0; i < m; ++i) dy[i] += resid[i];
  }

  struct Direction {
    std::vector<RVec> dX, dZ;
    RVec dy, ds, dz;
  };

  // Solve the Newton system for given complementarity targets Rc (blocks) and
  // rc (slacks); rp, Rd, rds are the current residuals.
  void newton_step(const RVec& rp, const std::vector<RVec>& Rd, const RVec& rds,
                   const std::vector<RVec>& Rc, const RVec& rc, Direction& d) const {
    RVec h = rp;
    RVec Nb, tmp;
    for (int bl = 0; bl < nb; ++bl) {
      const int n = dims[bl];
      detail::mat_mul(n, W[bl], Rd[bl], tmp);
      detail::mat_mul(n, tmp, W[bl], Nb);
      detail::symmetrize(n, Nb);
      RVec P = Rc[bl];
      for (std::size_t k = 0; k < P.size(); ++k) P[k] -= Nb[k];
      for (const auto& ref : by_block[bl]) h[ref.row] -= detail::frob_inner(*ref.mat, P);
    }
    for (int i = 0; i < m; ++i) {
      if (slack_idx[i] < 0) continue;
      const int k = slack_idx[i];
      h[i] -= sigma[i] * (rc[k] - wlp[k] * wlp[k] * rds[k]);
    }
    solve_normal(h, d.dy);

    d.dZ.assign(nb, {});
    d.dX.assign(nb, {});
    for (int bl = 0; bl < nb; ++bl) {
      const int n = dims[bl];
      d.dZ[bl] = Rd[bl];
      for (const auto& ref : by_block[bl]) {
        const double dyi = d.dy[ref.row];
        if (dyi == 0.0) continue;
        const RVec& a = *ref.mat;
        for (std::size_t k = 0; k < a.size(); ++k) d.dZ[bl][k] -= dyi * a[k];
      }
      detail::mat_mul(n, W[bl], d.dZ[bl], tmp);
      detail::mat_mul(n, tmp, W[bl], Nb);
      d.dX[bl] = Rc[bl];
      for (std::size_t k = 0; k < Nb.size(); ++k) d.dX[bl][k] -= Nb[k];
      detail::symmetrize(n, d.dX[bl]);
    }
    d.dz.assign(n_slack, 0.0);
    d.ds.assign(n_slack, 0.0);
    for (int i = 0; i < m; ++i) {
      if (slack_idx[i] < 0) continue;
      const int k = slack_idx[i];
      d.dz[k] = rds[k] - sigma[i] * d.dy[i];
      d.ds[k] = rc[k] - wlp[k] * wlp[k] * d.dz[k];
    }
  }

  // largest step alpha with B + alpha dB staying PSD, via lambda_min of
  // Bihalf dB Bihalf
  double psd_step(const std::vector<RVec>& B, const std::vector<RVec>& dB,
                  const std::vector<RVec>& Bihalf) const {
    double alpha = std::numeric_limits<double>::infinity();
    RVec tmp1, tmp2;
    for (int bl = 0; bl < nb; ++bl) {
      const int n = dims[bl];
      (void)B;
      detail::mat_mul(n, Bihalf[bl], dB[bl], tmp1);
      detail::mat_mul(n, tmp1, Bihalf[bl], tmp2);
      detail::symmetrize(n, tmp2);
      const double lmin = min_eig(n, tmp2);
      if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
  }

  double vec_step(const RVec& v, const RVec& dv) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
    return alpha;
  }

  double pobj() const {
    double v = 0.0;
    for (int bl = 0; bl < nb; ++bl) v += detail::frob_inner(C[bl], X[bl]);
    return v;
  }

  double dobj() const { return detail::frob_inner(b, y); }

  // Farkas-style check: does y (up to scale) certify primal infeasibility?
  // Returns the certificate violation relative to b'y = 1, or +inf.
  double certificate_violation(RVec& ray) const {
    const double by = dobj();
    if (!(by > 0.0)) return std::numeric_limits<double>::infinity();
    ray.assign(m, 0.0);
    for (int i = 0; i < m; ++i) ray[i] = y[i] / by;
    double viol = 0.0;
    RVec acc;
    for (int bl = 0; bl < nb; ++bl) {
      const int n = dims[bl];
      acc.assign(static_cast<std::size_t>(n) * n, 0.0);
      for (const auto& ref : by_block[bl]) {
        const double yi = ray[ref.row];
        if (yi == 0.0) continue;
        const RVec& a = *ref.mat;
        for (std::size_t k = 0; k < a.size(); ++k) acc[k] += yi * a[k];
      }
      viol = std::max(viol, max_eig(n, acc));
    }
    for (int i = 0; i < m; ++i)
      if (sigma[i] != 0) viol = std::max(viol, sigma[i] * ray[i]);
    double ynorm = 0.0;
    for (int i = 0; i < m; ++i) ynorm = std::max(ynorm, std::abs(ray[i]));
    return viol / std::max(1.0, ynorm);
  }
};

}  // namespace

SdpSolution solve(const StandardSdp& p, const SolveOptions& opts) {
  const EmbeddedSdp emb = embed_real(p);
  Solver sv;
  sv.build(emb, opts);
  sv.initialize();

  SdpSolution sol;
  sol.duals.assign(emb.dual_slots, 0.0);
  sol.status = SolveStatus::NumericalTrouble;

  double bmax = 0.0;
  for (double v : sv.b) bmax = std::max(bmax, std::abs(v));
  double cmax = 0.0;
  for (const auto& c : sv.C)
    for (double v : c) cmax = std::max(cmax, std::abs(v));

  RVec rp, rds;
  std::vector<RVec> Rd;
  Solver::Direction aff, dir;
  int stall = 0;
  int iter = 0;
  bool converged = false;

  for (iter = 0; iter < opts.max_iters; ++iter) {
    sv.primal_residual(rp);
    sv.dual_residual(Rd, rds);
    const double mu = sv.mu();

    double pinf = 0.0;
    for (double v : rp) pinf = std::max(pinf, std::abs(v));
    pinf /= 1.0 + bmax;
    double dinf = 0.0;
    for (int bl = 0; bl < sv.nb; ++bl)
      for (double v : Rd[bl]) dinf = std::max(dinf, std::abs(v));
    for (double v : rds) dinf = std::max(dinf, std::abs(v));
    dinf /= 1.0 + cmax;
    const double po = sv.pobj();
    const double dk = sv.dobj();
    const double relgap = std::abs(po - dk) / (1.0 + std::abs(po) + std::abs(dk));

    if (opts.verbose)
      std::printf("iter %3d  mu %.3e  pinf %.3e  dinf %.3e  gap %.3e\n", iter, mu, pinf, dinf,
                  relgap);

    if (pinf <= opts.tol_feas && dinf <= opts.tol_feas && relgap <= opts.tol_gap) {
      converged = true;
      break;
    }

    // primal infeasibility: the dual objective diverges along an improving ray
    if (dk > 100.0 * (1.0 + bmax) && dinf <= 1e-6) {
      RVec ray;
      const double viol = sv.certificate_violation(ray);
      if (viol <= 1e-8) {
        sol.status = SolveStatus::Infeasible;
        sol.infeasibility_ray.assign(emb.dual_slots, 0.0);
        for (int i = 0; i < sv.m; ++i)
          sol.infeasibility_ray[sv.dual_slot[i]] = ray[i] / sv.row_scale[i];
        sol.infeasibility_measure = viol;
        sol.iterations = iter;
        return sol;
      }
    }

    if (!sv.update_scaling()) break;
    if (!sv.assemble_schur()) break;

    // predictor
    std::vector<RVec> Rc(sv.nb);
    for (int bl = 0; bl < sv.nb; ++bl) {
      Rc[bl] = sv.X[bl];
      for (double& v : Rc[bl]) v = -v;
    }
    RVec rc(sv.n_slack);
    for (int i = 0; i < sv.n_slack; ++i) rc[i] = -sv.s[i];
    sv.newton_step(rp, Rd, rds, Rc, rc, aff);

    double ap = std::min({1.0, sv.psd_step(sv.X, aff.dX, sv.Xihalf), sv.vec_step(sv.s, aff.ds)});
    double ad = std::min({1.0, sv.psd_step(sv.Z, aff.dZ, sv.Zihalf), sv.vec_step(sv.z, aff.dz)});

    double mu_aff = 0.0;
    {
      RVec xa, za;
      for (int bl = 0; bl < sv.nb; ++bl) {
        const int n = sv.dims[bl];
        xa = sv.X[bl];
        za = sv.Z[bl];
        for (std::size_t k = 0; k < xa.size(); ++k) {
          xa[k] += ap * aff.dX[bl][k];
          za[k] += ad * aff.dZ[bl][k];
        }
        (void)n;
        mu_aff += detail::frob_inner(xa, za);
      }
      for (int i = 0; i < sv.n_slack; ++i)
        mu_aff += (sv.s[i] + ap * aff.ds[i]) * (sv.z[i] + ad * aff.dz[i]);
      mu_aff /= sv.total_dim();
    }
    const double ratio = mu > 0.0 ? std::max(mu_aff, 0.0) / mu : 0.0;
    const double sigma_c = std::clamp(ratio * ratio * ratio, 1e-10, 1.0);

    // corrector: in the scaled space, lambda o (Dx + Dz) =
    // sigma*mu*I - lambda^2 - sym(Dx_aff Dz_aff)
    RVec dxs, dzs, tmp1, tmp2, E, G;
    for (int bl = 0; bl < sv.nb; ++bl) {
      const int n = sv.dims[bl];
      detail::mat_mul(n, sv.Wihalf[bl], aff.dX[bl], tmp1);
      detail::mat_mul(n, tmp1, sv.Wihalf[bl], dxs);
      detail::mat_mul(n, sv.Whalf[bl], aff.dZ[bl], tmp1);
      detail::mat_mul(n, tmp1, sv.Whalf[bl], dzs);
      detail::mat_mul(n, dxs, dzs, E);
      detail::symmetrize(n, E);
      // G = sigma*mu*I - V^2 - E, then the Lyapunov solve in V's eigenbasis
      detail::mat_mul(n, sv.Vmat[bl], sv.Vmat[bl], G);
      for (std::size_t k = 0; k < G.size(); ++k) G[k] = -G[k] - E[k];
      for (int i = 0; i < n; ++i) G[i * n + i] += sigma_c * mu;
      // rotate into eigenbasis: Ghat = Qv^T G Qv
      const RVec& Qv = sv.eigV[bl].q;
      const RVec& dv = sv.eigV[bl].w;
      RVec qt(static_cast<std::size_t>(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) qt[i * n + j] = Qv[j * n + i];
      detail::mat_mul(n, qt, G, tmp1);
      detail::mat_mul(n, tmp1, Qv, tmp2);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double den = std::max(dv[i] + dv[j], 1e-300);
          tmp2[i * n + j] = 2.0 * tmp2[i * n + j] / den;
        }
      detail::mat_mul(n, Qv, tmp2, tmp1);
      detail::mat_mul(n, tmp1, qt, G);
      // Rc = W^1/2 G W^1/2
      detail::mat_mul(n, sv.Whalf[bl], G, tmp1);
      detail::mat_mul(n, tmp1, sv.Whalf[bl], Rc[bl]);
      detail::symmetrize(n, Rc[bl]);
    }
    for (int i = 0; i < sv.n_slack; ++i)
      rc[i] = (sigma_c * mu - aff.ds[i] * aff.dz[i]) / std::max(sv.z[i], 1e-300) - sv.s[i];

    sv.newton_step(rp, Rd, rds, Rc, rc, dir);

    ap = std::min({1.0, 0.99 * sv.psd_step(sv.X, dir.dX, sv.Xihalf),
                   0.99 * sv.vec_step(sv.s, dir.ds)});
    ad = std::min({1.0, 0.99 * sv.psd_step(sv.Z, dir.dZ, sv.Zihalf),
                   0.99 * sv.vec_step(sv.z, dir.dz)});

    if (ap < 1e-8 && ad < 1e-8) {
      if (++stall >= 3) break;
    } else {
      stall = 0;
    }

    for (int bl = 0; bl < sv.nb; ++bl) {
      for (std::size_t k = 0; k < sv.X[bl].size(); ++k) {
        sv.X[bl][k] += ap * dir.dX[bl][k];
        sv.Z[bl][k] += ad * dir.dZ[bl][k];
      }
    }
    for (int i = 0; i < sv.m; ++i) sv.y[i] += ad * dir.dy[i];
    for (int i = 0; i < sv.n_slack; ++i) {
      sv.s[i] += ap * dir.ds[i];
      sv.z[i] += ad * dir.dz[i];
    }
  }

  // one more certificate attempt before reporting numerical trouble
  if (!converged) {
    RVec ray;
    const double viol = sv.certificate_violation(ray);
    if (viol <= 1e-8 && sv.dobj() > 100.0 * (1.0 + bmax)) {
      sol.status = SolveStatus::Infeasible;
      sol.infeasibility_ray.assign(emb.dual_slots, 0.0);
      for (int i = 0; i < sv.m; ++i)
        sol.infeasibility_ray[sv.dual_slot[i]] = ray[i] / sv.row_scale[i];
      sol.infeasibility_measure = viol;
      sol.iterations = iter;
      return sol;
    }
  }

  // extract complex iterate (best available even on failure)
  sol.x_blocks.clear();
  for (int bl = 0; bl < sv.nb; ++bl) {
    RealMatrix xr;
    xr.n = sv.dims[bl];
    xr.a = sv.X[bl];
    sol.x_blocks.push_back(complex_from_embedded(xr));
  }
  for (int i = 0; i < sv.m; ++i) sol.duals[sv.dual_slot[i]] = sv.y[i] / sv.row_scale[i];
  double obj = 0.0;
  for (std::size_t bl = 0; bl < p.block_dims.size(); ++bl)
    obj += hermitian_inner(p.objective[bl], sol.x_blocks[bl]);
  sol.objective_value = obj;
  sol.iterations = iter;
  sol.status = converged ? SolveStatus::Optimal : SolveStatus::NumericalTrouble;
  sol.kkt = kkt_report(p, sol);
  return sol;
}

KktInfo kkt_report(const StandardSdp& p, const SdpSolution& s) {
  p.validate();
  if (s.x_blocks.size() != p.block_dims.size())
    throw InvalidInputError("kkt_report: block count mismatch");
  for (std::size_t b = 0; b < p.block_dims.size(); ++b)
    if (s.x_blocks[b].dim() != p.block_dims[b])
      throw InvalidInputError("kkt_report: block dimension mismatch");
  if (s.duals.size() != dual_slot_count(p))
    throw InvalidInputError("kkt_report: dual vector has wrong length");

  const auto rows = expand_rows(p);
  KktInfo k;

  // primal side: row violations plus PSD violation of the iterate
  for (const auto& row : rows) {
    double val = 0.0;
    for (const auto& t : row.terms) val += hermitian_inner(*t.coeff, s.x_blocks[t.block]);
    double viol = 0.0;
    switch (row.sense) {
      case Sense::GE: viol = std::max(0.0, row.rhs - val); break;
      case Sense::LE: viol = std::max(0.0, val - row.rhs); break;
      case Sense::EQ: viol = std::abs(val - row.rhs); break;
    }
    k.primal_residual = std::max(k.primal_residual, viol / (1.0 + std::abs(row.rhs)));
  }
  for (std::size_t b = 0; b < p.block_dims.size(); ++b) {
    const auto eig = linalg::eig_hermitian(s.x_blocks[b]);
    const double tr = std::max(real_trace(s.x_blocks[b]), 0.0);
    if (!eig.values.empty())
      k.primal_residual =
          std::max(k.primal_residual, std::max(0.0, -eig.values.back()) / (1.0 + tr));
  }

  // dual side: Z = C - sum_i y_i A_i must be PSD and multiplier signs must match senses
  double dual_obj = 0.0;
  std::vector<ComplexMatrix> zc;
  for (std::size_t b = 0; b < p.block_dims.size(); ++b) zc.push_back(p.objective[b].matrix());
  for (const auto& row : rows) {
    const double yi = s.duals[row.dual_slot];
    dual_obj += yi * row.rhs;
    for (const auto& t : row.terms)
      zc[t.block] = zc[t.block] - cscalar(yi, 0.0) * t.coeff->matrix();
    double sign_viol = 0.0;
    if (row.sense == Sense::GE) sign_viol = std::max(0.0, -yi);
    if (row.sense == Sense::LE) sign_viol = std::max(0.0, yi);
    k.dual_residual = std::max(k.dual_residual, sign_viol / (1.0 + std::abs(yi)));
  }
  double comp = 0.0;
  for (std::size_t b = 0; b < p.block_dims.size(); ++b) {
    const HermitianMatrix zb(zc[b]);
    const auto eig = linalg::eig_hermitian(zb);
    const double cn = frobenius_norm(p.objective[b].matrix());
    if (!eig.values.empty())
      k.dual_residual = std::max(k.dual_residual, std::max(0.0, -eig.values.back()) / (1.0 + cn));
    comp += hermitian_inner(zb, s.x_blocks[b]);
  }
  k.complementarity = comp;

  double primal_obj = 0.0;
  for (std::size_t b = 0; b < p.block_dims.size(); ++b)
    primal_obj += hermitian_inner(p.objective[b], s.x_blocks[b]);
  k.gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj) + std::abs(dual_obj));
  return k;
}

}  // namespace reelbeam::sdp
