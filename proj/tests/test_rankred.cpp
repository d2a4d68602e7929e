#include <doctest.h>

#include <cmath>

#include "reelbeam/linalg.hpp"
#include "reelbeam/model.hpp"
#include "reelbeam/rankred.hpp"
#include "reelbeam/rng.hpp"
#include "support/oracles.hpp"

using namespace reelbeam;

TEST_SUITE("rankred") {

TEST_CASE("rank-one solutions are a fixed point") {
  Rng rng(2);
  model::BeamformingProblem p;
  p.channels = {rng.complex_gaussian_vector(4)};
  p.noise_vars = {1.0};
  p.sinr_targets = {2.0};
  const auto sp = model::build_original_sdp(p);
  const auto s = sdp::solve(sp);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);
  REQUIRE(linalg::numeric_rank(s.x_blocks[0], 1e-4) == 1);
  const auto red = rankred::reduce(s, sp);
  CHECK(linalg::numeric_rank(red.x_blocks[0], 1e-4) == 1);
  CHECK(red.objective_value == doctest::Approx(s.objective_value).epsilon(1e-9));
  CHECK(frobenius_norm(red.x_blocks[0].matrix() - s.x_blocks[0].matrix()) <
        1e-6 * frobenius_norm(s.x_blocks[0].matrix()));
}

TEST_CASE("a fattened optimum is purified back to rank one") {
  Rng rng(8);
  model::BeamformingProblem p;
  p.channels = {rng.complex_gaussian_vector(4)};
  p.noise_vars = {1.0};
  p.sinr_targets = {2.0};
  const auto sp = model::build_original_sdp(p);
  auto s = sdp::solve(sp);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);

  // add mass along a direction orthogonal to the channel: the SINR row value
  // is unchanged, the trace (objective) grows, rank becomes 2
  const ComplexMatrix u = linalg::rotation_matrix(p.channels[0]);
  const ComplexMatrix f = u.col(2);
  s.x_blocks[0] = HermitianMatrix(s.x_blocks[0].matrix() + 0.3 * outer(f, f));
  s.objective_value += 0.3;
  REQUIRE(linalg::numeric_rank(s.x_blocks[0], 1e-4) == 2);

  const auto red = rankred::reduce(s, sp);
  CHECK(linalg::numeric_rank(red.x_blocks[0], 1e-4) == 1);
  CHECK(red.objective_value == doctest::Approx(s.objective_value).epsilon(1e-8));
  CHECK(red.kkt.primal_residual <= 1e-7);
}

TEST_CASE("EH LoS solution lands within the per-user rank bound") {
  const auto p = model::scenario_eh_los(30, 16, 0.0, 10.0, 0.1);
  const auto sp = model::build_original_sdp(p);
  const auto s = sdp::solve(sp);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);
  const auto red = rankred::reduce(s, sp);
  const auto prof = rankred::rank_profile(red, sp);
  CHECK(prof.per_user_bound == 5);  // floor(sqrt(30 + 0 + 1))
  CHECK(prof.ranks[0] <= 5);
  CHECK(prof.sum_sq <= prof.bound);
  CHECK(red.objective_value == doctest::Approx(s.objective_value).epsilon(1e-7));
}

TEST_CASE("profile bookkeeping") {
  Rng rng(91);
  model::BeamformingProblem p;
  p.channels = {rng.complex_gaussian_vector(3)};
  p.noise_vars = {1.0};
  p.sinr_targets = {1.0};
  const auto sp = model::build_original_sdp(p);
  const auto s = sdp::solve(sp);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);
  const auto prof = rankred::rank_profile(s, sp);
  CHECK(prof.ranks == std::vector<std::size_t>{1});
  CHECK(prof.sum_sq == 1);
  CHECK(prof.bound == 1);  // M = 1, L = 0, P = 0

  // bound arithmetic: M = 3, L = 19, P = 0 -> M + L
  model::BeamformingProblem q;
  for (int i = 0; i < 3; ++i) q.channels.push_back(rng.complex_gaussian_vector(4));
  q.noise_vars.assign(3, 1.0);
  q.sinr_targets.assign(3, 1.0);
  for (int i = 0; i < 19; ++i) {
    model::JointConstraint jc;
    jc.coeffs.assign(3, testsupport::random_hermitian(rng, 4));
    jc.sense = sdp::Sense::LE;
    jc.threshold = 100.0;
    q.joint.push_back(jc);
  }
  const auto sq = model::build_original_sdp(q);
  sdp::SdpSolution fake;
  fake.x_blocks.assign(3, HermitianMatrix::identity(4));
  const auto prof2 = rankred::rank_profile(fake, sq);
  CHECK(prof2.bound == 3 + 19);
}

TEST_CASE("reduce preserves feasibility and objective on random mixed instances") {
  Rng rng(303);
  int reduced_any = 0;
  for (int t = 0; t < 6; ++t) {
    testsupport::InstanceSpec spec;
    spec.n_tx = 4 + (t % 2) * 2;
    spec.n_users = 1 + t % 3;
    spec.n_joint = 3 + t % 4;
    spec.n_groups = t % 2;
    auto bp = testsupport::random_feasible_instance(spec, rng);
    REQUIRE(bp.has_value());
    const auto sp = model::build_original_sdp(*bp);
    const auto s = sdp::solve(sp);
    if (s.status != sdp::SolveStatus::Optimal) continue;
    const auto before = rankred::rank_profile(s, sp);
    const auto red = rankred::reduce(s, sp);
    const auto after = rankred::rank_profile(red, sp);
    CHECK(after.sum_sq <= before.sum_sq);
    CHECK(after.sum_sq <= after.bound);
    for (std::size_t r : after.ranks) {
      CHECK(r >= 1);  // SINR keeps every user's block nonzero
      CHECK(r <= after.per_user_bound);
    }
    CHECK(red.objective_value == doctest::Approx(s.objective_value).epsilon(1e-7));
    CHECK(red.kkt.primal_residual <= 1e-7);
    if (after.sum_sq < before.sum_sq) ++reduced_any;
  }
  CHECK(reduced_any >= 1);  // the matrix must exercise actual reductions
}

TEST_CASE("lemma-5 prerequisite detection") {
  model::RelaxedNullingParams params;
  params.n_tx = 8;
  params.L = 2;
  params.F = 1;
  params.seed = 31;
  const auto p = model::scenario_relaxed_nulling(params);
  const auto sp = model::build_original_sdp(p);
  const auto s = sdp::solve(sp);
  REQUIRE(s.status == sdp::SolveStatus::Optimal);
  const auto prof = rankred::rank_profile(s, sp);
  // P = 2 groups of the structural form 0 <= C.X <= inf
  CHECK(prof.lemma5_prereqs);
  CHECK(prof.lemma5_bound == p.joint.size() + 1);

  // a double-sided row with both bounds finite and active-prone breaks them
  Rng rng(1);
  model::BeamformingProblem q;
  q.channels = {rng.complex_gaussian_vector(3)};
  q.noise_vars = {1.0};
  q.sinr_targets = {1.0};
  const auto sq = model::build_original_sdp(q);
  const auto ssq = sdp::solve(sq);
  const auto prof2 = rankred::rank_profile(ssq, sq);
  CHECK_FALSE(prof2.lemma5_prereqs);  // P = 0
}

TEST_CASE("reduce rejects non-optimal input") {
  Rng rng(5);
  model::BeamformingProblem p;
  p.channels = {rng.complex_gaussian_vector(3)};
  p.noise_vars = {1.0};
  p.sinr_targets = {1.0};
  const auto sp = model::build_original_sdp(p);
  sdp::SdpSolution s;
  s.status = sdp::SolveStatus::NumericalTrouble;
  s.x_blocks = {HermitianMatrix::identity(3)};
  CHECK_THROWS_AS(rankred::reduce(s, sp), InvalidInputError);
}

}  // TEST_SUITE
