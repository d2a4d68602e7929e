#pragma once

#include <optional>

#include "reelbeam/model.hpp"
#include "reelbeam/rankred.hpp"
#include "reelbeam/sdp.hpp"
#include "reelbeam/types.hpp"

namespace reelbeam::reelbf {

// Per-user beamforming matrix W = U [[alpha, 0], [beta, Omega]] of width K:
// column 1 carries the information symbol, columns 2..K the shaping signals,
// all orthogonal to the user's channel.
struct UserBeamformer {
  ComplexMatrix W;      // n_tx x K
  double alpha = 0.0;   // real nonnegative by convention
  ComplexMatrix beta;   // (n_tx - 1) x 1
  ComplexMatrix Omega;  // (n_tx - 1) x (K - 1), shaping block zero-padded on the right
  std::size_t R = 0;    // rank of the shaping Schur complement
};

struct ReelBfSolution {
  std::size_t K = 0;
  std::vector<UserBeamformer> users;
  double power = 0.0;      // sum_m tr(W_m W_m^H)
  double sdp_bound = 0.0;  // optimal value of the relaxation; power matches it
};

struct RotatedUser {
  double eta = 0.0;
  ComplexMatrix xi;       // (n_tx - 1) x 1
  HermitianMatrix gamma;  // (n_tx - 1) x (n_tx - 1)
  double trace = 0.0;     // eta + tr(gamma), kept as the scale reference
};
struct RotatedSolution {
  std::vector<RotatedUser> users;
};

// Smallest beamformer count that guarantees the shaping rank fits:
// min(ceil(sqrt(L + P*M + 1) + 2), n_tx), further capped at L + 3 when the
// double-sided prerequisites hold.
std::size_t select_k(std::size_t L, std::size_t P, std::size_t M, std::size_t n_tx,
                     bool lemma5_ok = false);

// Partition U_m^H X_m U_m into (eta, xi, Gamma). eta below eta_tol * trace
// signals a degenerate solution and throws NumericalError.
RotatedSolution rotate(const sdp::SdpSolution& s, const std::vector<ComplexMatrix>& rotations,
                       double eta_tol = 1e-10);

struct UserDecomposition {
  double alpha = 0.0;
  ComplexMatrix beta;
  ComplexMatrix omega_bar;  // (n_tx - 1) x R
  std::size_t R = 0;
};
// alpha = sqrt(eta), beta = xi / sqrt(eta), omega_bar a PSD factor of
// Gamma - xi xi^H / eta.
std::vector<UserDecomposition> decompose(const RotatedSolution& r, double tol = 1e-7);

// W_m = U_m [[alpha, 0], [beta, [omega_bar 0]]]. Throws InvalidInputError if
// some R_m > K - 1 (only reachable by forcing K below select_k's choice).
ReelBfSolution assemble(const std::vector<UserDecomposition>& d,
                        const std::vector<ComplexMatrix>& rotations, std::size_t K,
                        double sdp_bound = -1.0);

struct Algorithm1Options {
  bool lemma5 = false;
  bool rank_reduce = true;  // lemmas 4-5 presuppose the reduced solution
  std::optional<std::size_t> force_k;
  sdp::SolveOptions solver;
  double decomposition_tol = 1e-7;
};

struct Algorithm1Result {
  sdp::SolveStatus status = sdp::SolveStatus::NumericalTrouble;
  std::size_t K = 0;
  sdp::SdpSolution sdp_solution;  // post rank reduction when enabled
  rankred::RankProfile profile;
  std::optional<ReelBfSolution> solution;  // present iff status == Optimal
};

Algorithm1Result run_algorithm1_detailed(const model::BeamformingProblem& p,
                                         const Algorithm1Options& opts = {});

// Convenience wrapper that throws NumericalError on Infeasible/NumericalTrouble.
ReelBfSolution run_algorithm1(const model::BeamformingProblem& p,
                              const Algorithm1Options& opts = {});

// SINR_m = h_m h_m^H . W_m W_m^H / (sum_{j != m} h_m h_m^H . W_j W_j^H + sigma^2_m);
// cross-checked against |h_m^H w_m1|^2, which must agree by orthogonality.
std::vector<double> achieved_sinr(const ReelBfSolution& sol, const model::BeamformingProblem& p);

}  // namespace reelbeam::reelbf
