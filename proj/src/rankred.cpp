#include "reelbeam/rankred.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dense.hpp"
#include "reelbeam/linalg.hpp"

namespace reelbeam::rankred {

namespace {

// One scalar functional: sum of (block, coeff) inner products. A double-sided
// row contributes a single functional carrying both bounds, so preserving its
// value preserves both sides.
struct Functional {
  std::vector<std::pair<std::size_t, const HermitianMatrix*>> terms;
  sdp::Sense sense = sdp::Sense::GE;  // for one-sided rows
  bool double_sided = false;
  double rhs = 0.0;    // one-sided rows
  double lower = 0.0;  // double-sided rows
  double upper = 0.0;
};

std::vector<Functional> collect_functionals(const sdp::StandardSdp& p) {
  std::vector<Functional> fs;
  for (const auto& row : p.constraints) {
    Functional f;
    for (std::size_t b = 0; b < row.coeffs.size(); ++b) f.terms.push_back({b, &row.coeffs[b]});
    f.sense = row.sense;
    f.rhs = row.rhs;
    fs.push_back(std::move(f));
  }
  for (const auto& ds : p.double_sided) {
    Functional f;
    f.terms.push_back({ds.block, &ds.coeff});
    f.double_sided = true;
    f.lower = ds.lower;
    f.upper = ds.upper;
    fs.push_back(std::move(f));
  }
  return fs;
}

double functional_value(const Functional& f, const std::vector<HermitianMatrix>& x) {
  double v = 0.0;
  for (const auto& t : f.terms) v += hermitian_inner(*t.second, x[t.first]);
  return v;
}

bool is_active(const Functional& f, double value, double tol) {
  if (!f.double_sided) {
    switch (f.sense) {
      case sdp::Sense::EQ: return true;
      case sdp::Sense::GE: return value - f.rhs <= tol * (1.0 + std::abs(f.rhs));
      case sdp::Sense::LE: return f.rhs - value <= tol * (1.0 + std::abs(f.rhs));
    }
  }
  if (std::isfinite(f.lower) && value - f.lower <= tol * (1.0 + std::abs(f.lower))) return true;
  if (std::isfinite(f.upper) && f.upper - value <= tol * (1.0 + std::abs(f.upper))) return true;
  return false;
}

// Allowed step range [cap_neg, cap_pos] (both >= 0, for -Delta and +Delta)
// so an inactive functional stays feasible when its value moves by t * delta.
void slack_caps(const Functional& f, double value, double delta, double& cap_pos,
                double& cap_neg) {
  auto cap_ge = [&](double slack) {  // value must not drop below value - slack
    if (slack < 0.0) slack = 0.0;
    if (delta < 0.0) cap_pos = std::min(cap_pos, slack / (-delta));
    if (delta > 0.0) cap_neg = std::min(cap_neg, slack / delta);
  };
  auto cap_le = [&](double slack) {  // value must not rise above value + slack
    if (slack < 0.0) slack = 0.0;
    if (delta > 0.0) cap_pos = std::min(cap_pos, slack / delta);
    if (delta < 0.0) cap_neg = std::min(cap_neg, slack / (-delta));
  };
  if (!f.double_sided) {
    if (f.sense == sdp::Sense::GE) cap_ge(value - f.rhs);
    if (f.sense == sdp::Sense::LE) cap_le(f.rhs - value);
    return;
  }
  if (std::isfinite(f.lower)) cap_ge(value - f.lower);
  if (std::isfinite(f.upper)) cap_le(f.upper - value);
}

// tr(B Delta) as a real row over the Hermitian parameterization of Delta:
// r diagonal entries, then (Re, Im) per strictly-lower entry (l > k).
void append_row_coeffs(const HermitianMatrix& b, std::vector<double>& row, std::size_t offset) {
  const std::size_t r = b.dim();
  std::size_t pos = offset;
  for (std::size_t k = 0; k < r; ++k) row[pos++] += b(k, k).real();
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = k + 1; l < r; ++l) {
      row[pos++] += 2.0 * b(l, k).real();
      row[pos++] += 2.0 * b(l, k).imag();
    }
}

HermitianMatrix delta_from_params(const double* v, std::size_t r) {
  ComplexMatrix d(r, r);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < r; ++k) d(k, k) = v[pos++];
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = k + 1; l < r; ++l) {
      const cscalar val(v[pos], v[pos + 1]);
      pos += 2;
      d(l, k) = val;
      d(k, l) = std::conj(val);
    }
  return HermitianMatrix(d);
}

HermitianMatrix compress(const ComplexMatrix& v, const HermitianMatrix& a) {
  // V^H A V, resymmetrized
  ComplexMatrix r = v.adjoint() * a.matrix() * v;
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

}  // namespace

RankProfile rank_profile(const sdp::SdpSolution& s, const sdp::StandardSdp& p, double fraction) {
  const std::size_t m = p.block_dims.size();
  if (s.x_blocks.size() != m) throw InvalidInputError("rank_profile: block count mismatch");
  RankProfile rp;
  for (const auto& x : s.x_blocks) rp.ranks.push_back(linalg::numeric_rank(x, fraction));
  rp.sum_sq = 0;
  for (std::size_t r : rp.ranks) rp.sum_sq += r * r;
  rp.bound = p.constraints.size() + p.double_sided.size();
  rp.per_user_bound = static_cast<std::size_t>(
      std::floor(std::sqrt(static_cast<double>(rp.bound >= m ? rp.bound - m + 1 : 1)) + 1e-9));

  // Lemma-5-style reporting needs the double-sided rows to be inactive at the
  // solution or structurally of the form coeff . X >= 0 / == 0.
  const std::size_t pm = p.double_sided.size();
  const bool p_is_two = m > 0 && pm == 2 * m;
  bool prereqs = p_is_two;
  if (p_is_two) {
    for (const auto& ds : p.double_sided) {
      const bool ge_zero = ds.lower == 0.0 && ds.upper == sdp::kInf;
      const bool eq_zero = ds.lower == 0.0 && ds.upper == 0.0;
      if (ge_zero || eq_zero) continue;
      const double v = hermitian_inner(ds.coeff, s.x_blocks[ds.block]);
      bool inactive = true;
      if (std::isfinite(ds.lower) && v - ds.lower <= 1e-6 * (1.0 + std::abs(ds.lower)))
        inactive = false;
      if (std::isfinite(ds.upper) && ds.upper - v <= 1e-6 * (1.0 + std::abs(ds.upper)))
        inactive = false;
      if (!inactive) {
        prereqs = false;
        break;
      }
    }
  }
  rp.lemma5_prereqs = prereqs;
  rp.lemma5_bound = p.constraints.size() >= m ? p.constraints.size() - m + 1 : 1;
  const std::size_t maxrank = rp.ranks.empty() ? 0 : *std::max_element(rp.ranks.begin(),
                                                                       rp.ranks.end());
  rp.lemma5_certified = prereqs && maxrank <= rp.lemma5_bound;
  return rp;
}

sdp::SdpSolution reduce(const sdp::SdpSolution& s, const sdp::StandardSdp& p,
                        double active_tol) {
  p.validate();
  if (s.status != sdp::SolveStatus::Optimal)
    throw InvalidInputError("reduce: solution must be Optimal");
  if (s.x_blocks.size() != p.block_dims.size())
    throw InvalidInputError("reduce: block count mismatch");

  const std::size_t nb = p.block_dims.size();
  const auto functionals = collect_functionals(p);
  const std::size_t bound = p.constraints.size() + p.double_sided.size();

  std::vector<HermitianMatrix> X = s.x_blocks;
  const double obj0 = s.objective_value;

  // factor tolerance: interior-point tails of ~1e-9 relative trace are noise
  constexpr double kFactorTol = 1e-9;
  constexpr double kNullTol = 1e-8;
  const int max_rounds = 400;

  std::vector<ComplexMatrix> V(nb);
  std::vector<std::size_t> ranks(nb);

  auto refactor = [&]() {
    for (std::size_t b = 0; b < nb; ++b) {
      V[b] = linalg::psd_factor(X[b], kFactorTol);
      ranks[b] = V[b].cols();
      X[b] = HermitianMatrix(V[b] * V[b].adjoint());
    }
  };
  refactor();

  for (int round = 0; round < max_rounds; ++round) {
    // unknown layout: per block, r diagonal + 2 * r(r-1)/2 off-diagonal reals
    std::vector<std::size_t> offset(nb + 1, 0);
    for (std::size_t b = 0; b < nb; ++b) offset[b + 1] = offset[b] + ranks[b] * ranks[b];
    const std::size_t dim = offset[nb];
    if (dim == 0) break;

    std::vector<double> values(functionals.size());
    std::vector<bool> active(functionals.size());
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      values[f] = functional_value(functionals[f], X);
      active[f] = is_active(functionals[f], values[f], active_tol);
    }

    // compressed coefficients B = V^H A V for every functional and the objective
    std::vector<std::vector<std::pair<std::size_t, HermitianMatrix>>> comp(functionals.size());
    for (std::size_t f = 0; f < functionals.size(); ++f)
      for (const auto& t : functionals[f].terms) {
        if (ranks[t.first] == 0) continue;
        comp[f].push_back({t.first, compress(V[t.first], *t.second)});
      }

    std::vector<std::vector<double>> rowsG;
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      if (!active[f]) continue;
      std::vector<double> row(dim, 0.0);
      for (const auto& [b, bm] : comp[f]) append_row_coeffs(bm, row, offset[b]);
      rowsG.push_back(std::move(row));
    }
    {
      std::vector<double> row(dim, 0.0);
      for (std::size_t b = 0; b < nb; ++b) {
        if (ranks[b] == 0) continue;
        append_row_coeffs(compress(V[b], p.objective[b]), row, offset[b]);
      }
      rowsG.push_back(std::move(row));
    }

    // normalized rows; null vector of G via the smallest eigenpair of G^T G
    detail::RVec gtg(dim * dim, 0.0);
    for (auto& row : rowsG) {
      double nrm = 0.0;
      for (double v : row) nrm += v * v;
      nrm = std::sqrt(nrm);
      if (nrm < 1e-14) continue;
      for (double& v : row) v /= nrm;
      for (std::size_t i = 0; i < dim; ++i) {
        if (row[i] == 0.0) continue;
        for (std::size_t j = 0; j < dim; ++j) gtg[i * dim + j] += row[i] * row[j];
      }
    }
    detail::RVec q, w;
    if (!detail::sym_eig(static_cast<int>(dim), gtg, q, w))
      throw NumericalError("reduce: eigensolver failed on the direction system", 0.0);
    const double resid = std::sqrt(std::max(w[0], 0.0));
    if (resid > kNullTol) break;  // no reducing direction left

    // assemble Delta and normalize to unit spectral radius
    std::vector<double> vparam(dim);
    for (std::size_t i = 0; i < dim; ++i) vparam[i] = q[i * dim + 0];
    std::vector<HermitianMatrix> delta(nb);
    std::vector<EigenDecomposition> deig(nb);
    double spec = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      delta[b] = delta_from_params(vparam.data() + offset[b], ranks[b]);
      deig[b] = linalg::eig_hermitian(delta[b]);
      for (double lam : deig[b].values) spec = std::max(spec, std::abs(lam));
    }
    if (spec < 1e-12) break;
    for (std::size_t b = 0; b < nb; ++b) {
      delta[b] = (1.0 / spec) * delta[b];
      for (double& lam : deig[b].values) lam /= spec;
    }

    // PSD boundary steps for +Delta and -Delta (spectral radius is 1, so both
    // are finite and >= 1 unless the direction is one-sided)
    double t_pos = sdp::kInf, t_neg = sdp::kInf;
    for (std::size_t b = 0; b < nb; ++b)
      for (double lam : deig[b].values) {
        if (lam < 0.0) t_pos = std::min(t_pos, -1.0 / lam);
        if (lam > 0.0) t_neg = std::min(t_neg, 1.0 / lam);
      }

    // caps from inactive functionals
    double cap_pos = sdp::kInf, cap_neg = sdp::kInf;
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      if (active[f]) continue;
      double d = 0.0;
      for (const auto& [b, bm] : comp[f]) d += hermitian_inner(bm, delta[b].matrix());
      if (d == 0.0) continue;
      slack_caps(functionals[f], values[f], d, cap_pos, cap_neg);
    }

    const bool pos_hits_boundary = t_pos <= cap_pos;
    const bool neg_hits_boundary = t_neg <= cap_neg;
    double step = 0.0;
    int sign = +1;
    if (pos_hits_boundary && (!neg_hits_boundary || t_pos <= t_neg)) {
      step = t_pos;
      sign = +1;
    } else if (neg_hits_boundary) {
      step = t_neg;
      sign = -1;
    } else {
      // no eigenvalue boundary reachable: step to the nearest slack cap so the
      // blocking row joins the active set next round
      if (cap_pos >= cap_neg) {
        step = cap_pos;
        sign = +1;
      } else {
        step = cap_neg;
        sign = -1;
      }
      if (!std::isfinite(step) || step < 1e-10) break;
      step *= (1.0 + 1e-12);
    }
    if (!std::isfinite(step) || step <= 0.0) break;

    for (std::size_t b = 0; b < nb; ++b) {
      if (ranks[b] == 0) continue;
      ComplexMatrix core = ComplexMatrix::identity(ranks[b]) +
                           (sign > 0 ? step : -step) * delta[b].matrix();
      X[b] = HermitianMatrix(V[b] * core * V[b].adjoint());
    }
    refactor();
  }

  sdp::SdpSolution out = s;
  out.x_blocks = X;
  double obj = 0.0;
  for (std::size_t b = 0; b < nb; ++b) obj += hermitian_inner(p.objective[b], X[b]);
  out.objective_value = obj;
  if (std::abs(obj - obj0) > 1e-7 * (1.0 + std::abs(obj0)))
    throw NumericalError("reduce: objective drifted beyond tolerance",
                         std::abs(obj - obj0) / (1.0 + std::abs(obj0)));
  out.kkt = sdp::kkt_report(p, out);
  if (out.kkt.primal_residual > 1e-7)
    throw NumericalError("reduce: feasibility drifted beyond tolerance",
                         out.kkt.primal_residual);

  std::size_t sum_sq = 0;
  for (std::size_t b = 0; b < nb; ++b) sum_sq += ranks[b] * ranks[b];
  if (sum_sq > bound) {
    throw NumericalError(
        "reduce: no reducing direction although the rank bound is violated "
        "(sum of squared ranks " +
            std::to_string(sum_sq) + " > " + std::to_string(bound) + ")",
        static_cast<double>(sum_sq));
  }
  return out;
}

}  // namespace reelbeam::rankred
