#pragma once

// Test-side oracles, independent of the solver paths they check.

#include <optional>

#include "reelbeam/model.hpp"
#include "reelbeam/rng.hpp"

namespace reelbeam::testsupport {

// Brute-force optimum of the SINR-only power minimization over rank-one
// beamformers for n_tx = 2 and M in {1, 2}: dense grid over beamformer
// directions plus local refinement, powers from the binding SINR equations.
// Valid because rank-one is optimal when there are no shaping constraints.
double rank_one_oracle(const model::BeamformingProblem& p);

// Random feasible instance with mixed GE/LE/EQ joint rows and double-sided
// groups, built around an explicit feasible point (an inflated SINR-only
// solution) so thresholds are consistent by construction.
struct InstanceSpec {
  std::size_t n_tx = 4;
  std::size_t n_users = 2;
  std::size_t n_joint = 4;
  std::size_t n_groups = 1;
  double gamma_db = 3.0;
  double noise_var = 0.1;
};
std::optional<model::BeamformingProblem> random_feasible_instance(const InstanceSpec& spec,
                                                                  Rng& rng);

HermitianMatrix random_hermitian(Rng& rng, std::size_t n, double scale = 1.0);

}  // namespace reelbeam::testsupport
