#include "reelbeam/reelbf.hpp"

#include <cmath>

#include "reelbeam/linalg.hpp"

namespace reelbeam::reelbf {

std::size_t select_k(std::size_t L, std::size_t P, std::size_t M, std::size_t n_tx,
                     bool lemma5_ok) {
  if (M < 1 || n_tx < 2) throw InvalidInputError("select_k: need M >= 1 and n_tx >= 2");
  const double root = std::sqrt(static_cast<double>(L + P * M + 1));
  std::size_t k = static_cast<std::size_t>(std::ceil(root - 1e-12)) + 2;
  if (lemma5_ok) k = std::min(k, L + 3);
  k = std::min(k, n_tx);
  return std::max<std::size_t>(k, 1);
}

RotatedSolution rotate(const sdp::SdpSolution& s, const std::vector<ComplexMatrix>& rotations,
                       double eta_tol) {
  if (s.status != sdp::SolveStatus::Optimal)
    throw InvalidInputError("rotate: solution must be Optimal");
  if (rotations.size() != s.x_blocks.size())
    throw InvalidInputError("rotate: one rotation per user required");
  RotatedSolution out;
  for (std::size_t m = 0; m < s.x_blocks.size(); ++m) {
    const ComplexMatrix& u = rotations[m];
    const std::size_t n = s.x_blocks[m].dim();
    if (u.rows() != n || u.cols() != n) throw InvalidInputError("rotate: dimension mismatch");
    if (frobenius_norm(u.adjoint() * u - ComplexMatrix::identity(n)) > 1e-8)
      throw InvalidInputError("rotate: rotation is not unitary");
    const HermitianMatrix xbar = rotate_hermitian(s.x_blocks[m], u);
    RotatedUser ru;
    ru.eta = xbar(0, 0).real();
    ru.xi = ComplexMatrix(n - 1, 1);
    for (std::size_t i = 1; i < n; ++i) ru.xi(i - 1, 0) = xbar(i, 0);
    ru.gamma = HermitianMatrix(xbar.matrix().block(1, 1, n - 1, n - 1));
    ru.trace = real_trace(xbar);
    if (!(ru.eta > eta_tol * std::max(ru.trace, 1e-300)))
      throw NumericalError("rotate: eta is not positive (degenerate solution for user " +
                               std::to_string(m) + ")",
                           ru.eta);
    out.users.push_back(std::move(ru));
  }
  return out;
}

std::vector<UserDecomposition> decompose(const RotatedSolution& r, double tol) {
  std::vector<UserDecomposition> out;
  for (const auto& u : r.users) {
    if (!(u.eta > 0.0)) throw InvalidInputError("decompose: eta must be positive");
    UserDecomposition d;
    d.alpha = std::sqrt(u.eta);
    d.beta = (1.0 / d.alpha) * u.xi;
    const HermitianMatrix schur =
        HermitianMatrix(u.gamma.matrix() - (1.0 / u.eta) * outer(u.xi, u.xi));
    d.omega_bar = linalg::psd_factor(schur, tol, std::max(u.trace, 0.0));
    d.R = d.omega_bar.cols();
    out.push_back(std::move(d));
  }
  return out;
}

ReelBfSolution assemble(const std::vector<UserDecomposition>& d,
                        const std::vector<ComplexMatrix>& rotations, std::size_t K,
                        double sdp_bound) {
  if (d.size() != rotations.size())
    throw InvalidInputError("assemble: decomposition/rotation count mismatch");
  if (K < 1) throw InvalidInputError("assemble: K must be at least 1");
  ReelBfSolution sol;
  sol.K = K;
  for (std::size_t m = 0; m < d.size(); ++m) {
    const std::size_t n = rotations[m].rows();
    if (d[m].R > K - 1)
      throw InvalidInputError("assemble: K too small for user " + std::to_string(m) +
                              " (R = " + std::to_string(d[m].R) + " > K - 1)");
    ComplexMatrix inner(n, K);
    inner(0, 0) = d[m].alpha;
    for (std::size_t i = 1; i < n; ++i) inner(i, 0) = d[m].beta(i - 1, 0);
    for (std::size_t c = 0; c < d[m].R; ++c)
      for (std::size_t i = 1; i < n; ++i) inner(i, c + 1) = d[m].omega_bar(i - 1, c);
    UserBeamformer ub;
    ub.alpha = d[m].alpha;
    ub.beta = d[m].beta;
    ub.Omega = ComplexMatrix(n - 1, K - 1);
    for (std::size_t c = 0; c < d[m].R; ++c)
      for (std::size_t i = 0; i + 1 < n; ++i) ub.Omega(i, c) = d[m].omega_bar(i, c);
    ub.R = d[m].R;
    ub.W = rotations[m] * inner;
    const double p = frobenius_norm(ub.W);
    sol.power += p * p;
    sol.users.push_back(std::move(ub));
  }
  sol.sdp_bound = sdp_bound > 0.0 ? sdp_bound : sol.power;
  return sol;
}

Algorithm1Result run_algorithm1_detailed(const model::BeamformingProblem& p,
                                         const Algorithm1Options& opts) {
  p.validate();
  Algorithm1Result res;
  const std::size_t m = p.n_users();
  const std::size_t l = p.joint.size();
  const std::size_t pg = p.individual.size();
  res.K = opts.force_k ? *opts.force_k : select_k(l, pg, m, p.n_tx(), opts.lemma5);

  const sdp::StandardSdp sdp_p = model::build_original_sdp(p);
  sdp::SdpSolution sol = sdp::solve(sdp_p, opts.solver);
  res.status = sol.status;
  if (sol.status != sdp::SolveStatus::Optimal) {
    res.sdp_solution = std::move(sol);
    return res;
  }
  if (opts.rank_reduce) sol = rankred::reduce(sol, sdp_p);
  res.profile = rankred::rank_profile(sol, sdp_p);

  std::vector<ComplexMatrix> rotations;
  rotations.reserve(m);
  for (const auto& h : p.channels) rotations.push_back(linalg::rotation_matrix(h));

  const RotatedSolution rot = rotate(sol, rotations);
  const auto dec = decompose(rot, opts.decomposition_tol);
  res.solution = assemble(dec, rotations, res.K, sol.objective_value);
  res.sdp_solution = std::move(sol);
  return res;
}

ReelBfSolution run_algorithm1(const model::BeamformingProblem& p, const Algorithm1Options& opts) {
  Algorithm1Result res = run_algorithm1_detailed(p, opts);
  if (res.status == sdp::SolveStatus::Infeasible)
    throw NumericalError("run_algorithm1: problem is infeasible",
                         res.sdp_solution.infeasibility_measure);
  if (res.status != sdp::SolveStatus::Optimal || !res.solution)
    throw NumericalError("run_algorithm1: solver reported numerical trouble",
                         res.sdp_solution.kkt.gap);
  return *res.solution;
}

std::vector<double> achieved_sinr(const ReelBfSolution& sol, const model::BeamformingProblem& p) {
  p.validate();
  if (sol.users.size() != p.n_users())
    throw InvalidInputError("achieved_sinr: user count mismatch");
  const std::size_t m = p.n_users();
  std::vector<double> gains(m * m, 0.0);  // gains[i*m+j] = h_i h_i^H . W_j W_j^H
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const ComplexMatrix hw = p.channels[i].adjoint() * sol.users[j].W;  // 1 x K
      const double g = frobenius_norm(hw);
      gains[i * m + j] = g * g;
    }
  }
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double interference = p.noise_vars[i];
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) interference += gains[i * m + j];
    out[i] = gains[i * m + i] / interference;

    // orthogonality makes the numerator collapse to the information column
    const ComplexMatrix hw1 = p.channels[i].adjoint() * sol.users[i].W.col(0);
    const double num1 = std::norm(hw1(0, 0));
    if (std::abs(num1 - gains[i * m + i]) > 1e-7 * (1.0 + gains[i * m + i]))
      throw NumericalError("achieved_sinr: orthogonality identity violated for user " +
                               std::to_string(i),
                           std::abs(num1 - gains[i * m + i]));
  }
  return out;
}

}  // namespace reelbeam::reelbf
