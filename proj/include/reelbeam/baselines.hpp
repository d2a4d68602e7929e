#pragma once

#include <cstdint>
#include <optional>

#include "reelbeam/model.hpp"
#include "reelbeam/rankred.hpp"
#include "reelbeam/sdp.hpp"

namespace reelbeam::baselines {

enum class Scheme { RankOne, Alamouti2, Ostbc4 };

const char* scheme_name(Scheme s);
std::size_t scheme_width(Scheme s);  // 1, 2, 4

struct BaselineResult {
  Scheme scheme = Scheme::RankOne;
  bool feasible = false;
  std::optional<double> power;
  std::vector<ComplexMatrix> beamformers;  // per user, n_tx x width
  std::size_t n_randomizations_used = 0;   // 0 on the exact-recovery path
  double sdp_bound = 0.0;
  rankred::RankProfile profile;  // of the scheme's own SDP solution
};

// When every block has numeric rank <= max_rank, recover W_m = psd_factor(X_m)
// zero-padded to width max_rank; the power then equals the SDP bound exactly.
std::optional<std::vector<ComplexMatrix>> exact_if_low_rank(const sdp::SdpSolution& s,
                                                            std::size_t max_rank);

// Draw candidate columns from CN(0, X_m), rescale per user by a nonnegative
// factor found with a small LP over the SINR and one-sided shaping rows, and
// post-check equality and double-sided rows. Keeps the best feasible draw of
// n_inst; determinism comes from per-instance seeds seed + instance index.
BaselineResult gaussian_randomization(const sdp::SdpSolution& s,
                                      const model::BeamformingProblem& p, std::size_t width,
                                      std::size_t n_inst, std::uint64_t seed);

struct BaselineOptions {
  std::size_t n_randomizations = 100;
  std::uint64_t seed = 0;
  bool rank_reduce = true;
  sdp::SolveOptions solver;
  double feas_tol = 1e-6;
};

// Full-rate schemes use gamma = 2^r - 1; the rate-3/4 order-4 OSTBC scheme
// rebuilds the problem at gamma = 2^(4r/3) - 1. Each scheme tries exact
// recovery first, then randomization.
std::vector<BaselineResult> evaluate_baselines(const model::BeamformingProblem& p,
                                               double rate_bits,
                                               const BaselineOptions& opts = {});

}  // namespace reelbeam::baselines
