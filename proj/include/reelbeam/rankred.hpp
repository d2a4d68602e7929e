#pragma once

#include "reelbeam/sdp.hpp"
#include "reelbeam/types.hpp"

namespace reelbeam::rankred {

struct RankProfile {
  std::vector<std::size_t> ranks;  // per user, numeric_rank at the 1e-4 fraction
  std::size_t sum_sq = 0;
  std::size_t bound = 0;  // M + L + PM = total number of scalar shaping functionals
  // Second-moment bound: every per-user rank must satisfy rank^2 <= bound - M + 1.
  std::size_t per_user_bound = 0;
  // The L+1 bound holds only under specific prerequisites on the double-sided
  // rows; it is reported, never enforced.
  bool lemma5_prereqs = false;
  bool lemma5_certified = false;
  std::size_t lemma5_bound = 0;
};

// Null-space purification: walk along directions that keep every active
// constraint value and the objective fixed, stepping to the PSD boundary so a
// rank drops, until no such direction remains. Inactive inequality rows cap
// the step and join the active set when reached. Throws NumericalError if the
// sum-of-squared-ranks bound is still violated when no direction exists.
sdp::SdpSolution reduce(const sdp::SdpSolution& s, const sdp::StandardSdp& p,
                        double active_tol = 1e-6);

RankProfile rank_profile(const sdp::SdpSolution& s, const sdp::StandardSdp& p,
                         double fraction = 1e-4);

}  // namespace reelbeam::rankred
