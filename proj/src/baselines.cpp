#include "reelbeam/baselines.hpp"

#include <cmath>

#include "reelbeam/linalg.hpp"
#include "reelbeam/rng.hpp"

namespace reelbeam::baselines {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::RankOne: return "RankOne";
    case Scheme::Alamouti2: return "Alamouti2";
    case Scheme::Ostbc4: return "Ostbc4";
  }
  return "?";
}

std::size_t scheme_width(Scheme s) {
  switch (s) {
    case Scheme::RankOne: return 1;
    case Scheme::Alamouti2: return 2;
    case Scheme::Ostbc4: return 4;
  }
  return 1;
}

namespace {

Scheme scheme_from_width(std::size_t width) {
  switch (width) {
    case 1: return Scheme::RankOne;
    case 2: return Scheme::Alamouti2;
    case 4: return Scheme::Ostbc4;
  }
  throw InvalidInputError("baselines: width must be 1, 2 or 4");
}

// worst relative violation of every problem constraint under covariances
// X_m = W_m W_m^H
double worst_violation(const model::BeamformingProblem& p,
                       const std::vector<HermitianMatrix>& x) {
  const std::size_t m = p.n_users();
  double worst = 0.0;
  const auto sinr_rows = model::sinr_matrices(p);
  auto row_violation = [&](const model::JointConstraint& row) {
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j) v += hermitian_inner(row.coeffs[j], x[j]);
    switch (row.sense) {
      case sdp::Sense::GE: return std::max(0.0, row.threshold - v) / (1.0 + std::abs(row.threshold));
      case sdp::Sense::LE: return std::max(0.0, v - row.threshold) / (1.0 + std::abs(row.threshold));
      case sdp::Sense::EQ: return std::abs(v - row.threshold) / (1.0 + std::abs(row.threshold));
    }
    return 0.0;
  };
  for (const auto& row : sinr_rows) worst = std::max(worst, row_violation(row));
  for (const auto& row : p.joint) worst = std::max(worst, row_violation(row));
  for (const auto& grp : p.individual)
    for (std::size_t u = 0; u < m; ++u) {
      const auto& e = grp.per_user[u];
      const double v = hermitian_inner(e.coeff, x[u]);
      if (std::isfinite(e.lower))
        worst = std::max(worst, std::max(0.0, e.lower - v) / (1.0 + std::abs(e.lower)));
      if (std::isfinite(e.upper))
        worst = std::max(worst, std::max(0.0, v - e.upper) / (1.0 + std::abs(e.upper)));
    }
  return worst;
}

std::vector<HermitianMatrix> covariances(const std::vector<ComplexMatrix>& w) {
  std::vector<HermitianMatrix> x;
  x.reserve(w.size());
  for (const auto& wm : w) x.push_back(HermitianMatrix(wm * wm.adjoint()));
  return x;
}

// min sum_m c_m t_m over t >= 0 subject to the SINR rows and one-sided joint
// rows evaluated at covariances t_m G_m; equality rows are not scaled for.
// Returns the scale factors, or nullopt when the LP is infeasible/failed.
std::optional<std::vector<double>> scaling_lp(const model::BeamformingProblem& p,
                                              const std::vector<HermitianMatrix>& g,
                                              const std::vector<double>& cost,
                                              const sdp::SolveOptions& solver) {
  const std::size_t m = p.n_users();
  sdp::StandardSdp lp;
  lp.block_dims.assign(m, 1);
  for (std::size_t j = 0; j < m; ++j) {
    ComplexMatrix c(1, 1);
    c(0, 0) = cost[j];
    lp.objective.push_back(HermitianMatrix(c));
  }
  auto add_row = [&](const model::JointConstraint& row) {
    if (row.sense == sdp::Sense::EQ) return;
    sdp::ConstraintRow cr;
    for (std::size_t j = 0; j < m; ++j) {
      ComplexMatrix a(1, 1);
      a(0, 0) = hermitian_inner(row.coeffs[j], g[j]);
      cr.coeffs.push_back(HermitianMatrix(a));
    }
    cr.sense = row.sense;
    cr.rhs = row.threshold;
    lp.constraints.push_back(std::move(cr));
  };
  for (const auto& row : model::sinr_matrices(p)) add_row(row);
  for (const auto& row : p.joint) add_row(row);
  if (lp.constraints.empty()) return std::vector<double>(m, 1.0);

  const sdp::SdpSolution s = sdp::solve(lp, solver);
  if (s.status != sdp::SolveStatus::Optimal) return std::nullopt;
  std::vector<double> t(m);
  for (std::size_t j = 0; j < m; ++j) t[j] = std::max(0.0, s.x_blocks[j](0, 0).real());
  return t;
}

}  // namespace

std::optional<std::vector<ComplexMatrix>> exact_if_low_rank(const sdp::SdpSolution& s,
                                                            std::size_t max_rank) {
  if (s.status != sdp::SolveStatus::Optimal)
    throw InvalidInputError("exact_if_low_rank: solution must be Optimal");
  for (const auto& x : s.x_blocks)
    if (linalg::numeric_rank(x, 1e-4) > max_rank) return std::nullopt;
  std::vector<ComplexMatrix> w;
  for (const auto& x : s.x_blocks) {
    ComplexMatrix b = linalg::psd_factor(x, 1e-9);
    ComplexMatrix padded(x.dim(), max_rank);
    const std::size_t keep = std::min(b.cols(), max_rank);
    for (std::size_t c = 0; c < keep; ++c)
      for (std::size_t i = 0; i < x.dim(); ++i) padded(i, c) = b(i, c);
    w.push_back(std::move(padded));
  }
  return w;
}

BaselineResult gaussian_randomization(const sdp::SdpSolution& s,
                                      const model::BeamformingProblem& p, std::size_t width,
                                      std::size_t n_inst, std::uint64_t seed) {
  if (s.status != sdp::SolveStatus::Optimal)
    throw InvalidInputError("gaussian_randomization: solution must be Optimal");
  if (n_inst < 1) throw InvalidInputError("gaussian_randomization: n_inst must be >= 1");
  p.validate();
  BaselineResult best;
  best.scheme = scheme_from_width(width);
  best.feasible = false;
  best.n_randomizations_used = n_inst;
  best.sdp_bound = s.objective_value;

  const std::size_t m = p.n_users();
  std::vector<ComplexMatrix> factors;
  factors.reserve(m);
  for (const auto& x : s.x_blocks) factors.push_back(linalg::psd_factor(x, 1e-9));

  sdp::SolveOptions lp_opts;
  lp_opts.tol_gap = 1e-9;
  lp_opts.tol_feas = 1e-9;

  for (std::size_t inst = 0; inst < n_inst; ++inst) {
    Rng rng(seed + inst);
    std::vector<ComplexMatrix> cand;
    cand.reserve(m);
    bool degenerate = false;
    for (std::size_t u = 0; u < m; ++u) {
      const std::size_t r = factors[u].cols();
      ComplexMatrix wu(p.n_tx(), width);
      for (std::size_t c = 0; c < width; ++c) {
        const ComplexMatrix gvec = rng.complex_gaussian_vector(r);
        const ComplexMatrix col = factors[u] * gvec;
        for (std::size_t i = 0; i < p.n_tx(); ++i) wu(i, c) = col(i, 0);
      }
      if (!(frobenius_norm(wu) > 0.0)) degenerate = true;
      cand.push_back(std::move(wu));
    }
    if (degenerate) continue;

    std::vector<HermitianMatrix> g = covariances(cand);
    std::vector<double> cost(m);
    for (std::size_t u = 0; u < m; ++u) cost[u] = real_trace(g[u]);
    const auto t = scaling_lp(p, g, cost, lp_opts);
    if (!t) continue;

    std::vector<ComplexMatrix> scaled;
    std::vector<HermitianMatrix> x;
    double power = 0.0;
    for (std::size_t u = 0; u < m; ++u) {
      const double root = std::sqrt((*t)[u]);
      scaled.push_back(root * cand[u]);
      x.push_back(HermitianMatrix((*t)[u] * g[u].matrix()));
      power += (*t)[u] * cost[u];
    }
    if (worst_violation(p, x) > 1e-6) continue;
    if (!best.feasible || power < *best.power) {
      best.feasible = true;
      best.power = power;
      best.beamformers = std::move(scaled);
    }
  }
  return best;
}

std::vector<BaselineResult> evaluate_baselines(const model::BeamformingProblem& p,
                                               double rate_bits, const BaselineOptions& opts) {
  p.validate();
  const double gamma_full = std::pow(2.0, rate_bits) - 1.0;
  const double gamma_ostbc = model::ostbc_sinr_target(rate_bits, 0.75);

  auto with_targets = [&](double gamma) {
    model::BeamformingProblem q = p;
    q.sinr_targets.assign(q.n_users(), gamma);
    return q;
  };

  struct Solved {
    model::BeamformingProblem prob;
    sdp::SdpSolution sol;
    rankred::RankProfile profile;
    bool ok = false;
  };
  auto solve_for = [&](double gamma) {
    Solved out{with_targets(gamma), {}, {}, false};
    const sdp::StandardSdp sp = model::build_original_sdp(out.prob);
    out.sol = sdp::solve(sp, opts.solver);
    if (out.sol.status != sdp::SolveStatus::Optimal) return out;
    if (opts.rank_reduce) out.sol = rankred::reduce(out.sol, sp);
    out.profile = rankred::rank_profile(out.sol, sp);
    out.ok = true;
    return out;
  };

  const Solved full = solve_for(gamma_full);
  const Solved ostbc = solve_for(gamma_ostbc);

  std::vector<BaselineResult> results;
  const Scheme schemes[] = {Scheme::RankOne, Scheme::Alamouti2, Scheme::Ostbc4};
  for (std::size_t si = 0; si < 3; ++si) {
    const Scheme sc = schemes[si];
    const Solved& sv = sc == Scheme::Ostbc4 ? ostbc : full;
    const std::size_t width = scheme_width(sc);
    BaselineResult r;
    r.scheme = sc;
    if (!sv.ok) {
      results.push_back(std::move(r));
      continue;
    }
    r.sdp_bound = sv.sol.objective_value;
    r.profile = sv.profile;
    if (auto exact = exact_if_low_rank(sv.sol, width)) {
      std::vector<HermitianMatrix> x = covariances(*exact);
      if (worst_violation(sv.prob, x) <= opts.feas_tol) {
        r.feasible = true;
        double power = 0.0;
        for (const auto& xm : x) power += real_trace(xm);
        r.power = power;
        r.beamformers = std::move(*exact);
        r.n_randomizations_used = 0;
        results.push_back(std::move(r));
        continue;
      }
    }
    BaselineResult rr = gaussian_randomization(sv.sol, sv.prob, width, opts.n_randomizations,
                                               opts.seed + 1000 * si);
    rr.profile = sv.profile;
    results.push_back(std::move(rr));
  }
  return results;
}

}  // namespace reelbeam::baselines
