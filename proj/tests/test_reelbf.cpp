#include <doctest.h>

#include <cmath>

#include "reelbeam/linalg.hpp"
#include "reelbeam/reelbf.hpp"
#include "reelbeam/rng.hpp"
#include "support/oracles.hpp"

using namespace reelbeam;
using namespace reelbeam::reelbf;

TEST_SUITE("reelbf") {

TEST_CASE("select_k closed forms") {
  CHECK(select_k(0, 0, 2, 8) == 3);       // ceil(sqrt(1) + 2)
  CHECK(select_k(110, 0, 1, 16) == 13);   // ceil(sqrt(111) + 2) = 13
  CHECK(select_k(0, 2, 2, 16, true) == 3);  // min(L + 3, sqrt(5) + 2 -> 5, 16)
  CHECK(select_k(5, 0, 1, 2) == 2);       // clamped at n_tx
  CHECK(select_k(0, 0, 1, 4) == 3);
  CHECK_THROWS_AS(select_k(0, 0, 0, 4), InvalidInputError);
}

TEST_CASE("rotate partitions a diagonal solution") {
  sdp::SdpSolution s;
  ComplexMatrix x(2, 2);
  x(0, 0) = 2.0;
  x(1, 1) = 1.0;
  s.x_blocks = {HermitianMatrix(x)};
  s.status = sdp::SolveStatus::Optimal;
  const auto rot = rotate(s, {ComplexMatrix::identity(2)});
  REQUIRE(rot.users.size() == 1);
  CHECK(rot.users[0].eta == doctest::Approx(2.0));
  CHECK(vector_norm(rot.users[0].xi) == doctest::Approx(0.0));
  CHECK(rot.users[0].gamma(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("rotate of a channel-aligned rank-one solution") {
  ComplexMatrix h(2, 1);
  h(0, 0) = cscalar(1.0 / std::sqrt(2.0), 0.0);
  h(1, 0) = cscalar(1.0 / std::sqrt(2.0), 0.0);
  sdp::SdpSolution s;
  s.x_blocks = {HermitianMatrix::outer(h)};
  s.status = sdp::SolveStatus::Optimal;
  const ComplexMatrix u = linalg::rotation_matrix(h);
  const auto rot = rotate(s, {u});
  CHECK(rot.users[0].eta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vector_norm(rot.users[0].xi) < 1e-12);
  CHECK(frobenius_norm(rot.users[0].gamma.matrix()) < 1e-12);
}

TEST_CASE("rotate preserves the trace") {
  Rng rng(15);
  sdp::SdpSolution s;
  ComplexMatrix b(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) b(i, j) = rng.complex_gaussian();
  s.x_blocks = {HermitianMatrix(b * b.adjoint())};
  s.status = sdp::SolveStatus::Optimal;
  const ComplexMatrix u = linalg::rotation_matrix(rng.complex_gaussian_vector(5));
  const auto rot = rotate(s, {u});
  CHECK(rot.users[0].eta + real_trace(rot.users[0].gamma) ==
        doctest::Approx(real_trace(s.x_blocks[0])).epsilon(1e-10));
}

TEST_CASE("rotate flags a degenerate eta") {
  sdp::SdpSolution s;
  ComplexMatrix x(2, 2);
  x(1, 1) = 1.0;  // no mass along the channel direction e1
  s.x_blocks = {HermitianMatrix(x)};
  s.status = sdp::SolveStatus::Optimal;
  CHECK_THROWS_AS(rotate(s, {ComplexMatrix::identity(2)}), NumericalError);
}

TEST_CASE("decompose closed forms") {
  RotatedSolution r;
  RotatedUser u0;
  u0.eta = 4.0;
  u0.xi = ComplexMatrix(2, 1);
  u0.gamma = HermitianMatrix::zero(2);
  u0.trace = 4.0;
  r.users.push_back(u0);
  auto d = decompose(r);
  CHECK(d[0].alpha == doctest::Approx(2.0));
  CHECK(vector_norm(d[0].beta) == 0.0);
  CHECK(d[0].R == 0);
  CHECK(d[0].omega_bar.cols() == 0);

  RotatedSolution r2;
  RotatedUser u1;
  u1.eta = 1.0;
  u1.xi = ComplexMatrix(2, 1);
  u1.gamma = HermitianMatrix::identity(2);
  u1.trace = 3.0;
  r2.users.push_back(u1);
  d = decompose(r2);
  CHECK(d[0].alpha == doctest::Approx(1.0));
  CHECK(d[0].R == 2);
  CHECK(frobenius_norm(d[0].omega_bar * d[0].omega_bar.adjoint() -
                       ComplexMatrix::identity(2)) < 1e-10);
}

TEST_CASE("decompose reconstructs a random PSD rotated block") {
  Rng rng(44);
  ComplexMatrix b(5, 4);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) b(i, j) = rng.complex_gaussian();
  const HermitianMatrix xbar(b * b.adjoint());
  RotatedUser u;
  u.eta = xbar(0, 0).real();
  u.xi = ComplexMatrix(4, 1);
  for (std::size_t i = 1; i < 5; ++i) u.xi(i - 1, 0) = xbar(i, 0);
  u.gamma = HermitianMatrix(xbar.matrix().block(1, 1, 4, 4));
  u.trace = real_trace(xbar);
  RotatedSolution r;
  r.users.push_back(u);
  const auto d = decompose(r);
  // rebuild via u u^H + sum q q^H
  ComplexMatrix uvec(5, 1);
  uvec(0, 0) = d[0].alpha;
  for (std::size_t i = 1; i < 5; ++i) uvec(i, 0) = d[0].beta(i - 1, 0) * d[0].alpha / d[0].alpha;
  ComplexMatrix rebuilt = outer(uvec, uvec);
  for (std::size_t c = 0; c < d[0].R; ++c) {
    ComplexMatrix q(5, 1);
    for (std::size_t i = 1; i < 5; ++i) q(i, 0) = d[0].omega_bar(i - 1, c);
    rebuilt = rebuilt + outer(q, q);
  }
  CHECK(frobenius_norm(rebuilt - xbar.matrix()) <= 1e-8 * frobenius_norm(xbar.matrix()));
}

TEST_CASE("assemble embeds MRT with zero shaping columns") {
  Rng rng(31);
  const ComplexMatrix h = rng.complex_gaussian_vector(4);
  model::BeamformingProblem p;
  p.channels = {h};
  p.noise_vars = {0.5};
  p.sinr_targets = {2.0};
  Algorithm1Options opts;
  opts.force_k = 3;
  const auto res = run_algorithm1_detailed(p, opts);
  REQUIRE(res.status == sdp::SolveStatus::Optimal);
  const auto& sol = *res.solution;
  CHECK(sol.K == 3);
  const double h2 = vector_norm(h) * vector_norm(h);
  const double expect_norm = std::sqrt(2.0 * 0.5 / h2);  // sqrt(gamma sigma^2)/||h||
  CHECK(vector_norm(sol.users[0].W.col(0)) == doctest::Approx(expect_norm).epsilon(1e-6));
  CHECK(vector_norm(sol.users[0].W.col(1)) < 1e-9);
  CHECK(vector_norm(sol.users[0].W.col(2)) < 1e-9);
  // the information beamformer is aligned with the channel
  const ComplexMatrix ip = h.adjoint() * sol.users[0].W.col(0);
  CHECK(std::abs(ip(0, 0)) ==
        doctest::Approx(vector_norm(h) * expect_norm).epsilon(1e-6));
}

TEST_CASE("assemble rejects K smaller than the shaping rank") {
  std::vector<UserDecomposition> d(1);
  d[0].alpha = 1.0;
  d[0].beta = ComplexMatrix(3, 1);
  d[0].omega_bar = ComplexMatrix(3, 2);
  d[0].omega_bar(0, 0) = 1.0;
  d[0].omega_bar(1, 1) = 1.0;
  d[0].R = 2;
  CHECK_THROWS_AS(assemble(d, {ComplexMatrix::identity(4)}, 2), InvalidInputError);
  // K = R + 1 is the boundary: no padding columns beyond omega_bar
  const auto sol = assemble(d, {ComplexMatrix::identity(4)}, 3);
  CHECK(sol.users[0].W.cols() == 3);
}

TEST_CASE("run_algorithm1 reproduces the single-user closed form") {
  Rng rng(61);
  for (int t = 0; t < 3; ++t) {
    model::BeamformingProblem p;
    p.channels = {rng.complex_gaussian_vector(5)};
    p.noise_vars = {0.1};
    p.sinr_targets = {model::db_to_linear(3.0)};
    const auto sol = run_algorithm1(p);
    const double h2 = vector_norm(p.channels[0]) * vector_norm(p.channels[0]);
    CHECK(sol.power == doctest::Approx(p.sinr_targets[0] * 0.1 / h2).epsilon(1e-8));
    CHECK(sol.power == doctest::Approx(sol.sdp_bound).epsilon(1e-9));
  }
}

TEST_CASE("run_algorithm1 matches the rank-one oracle without shaping") {
  Rng rng(67);
  for (int t = 0; t < 3; ++t) {
    model::BeamformingProblem p;
    p.channels = {rng.complex_gaussian_vector(2), rng.complex_gaussian_vector(2)};
    p.noise_vars = {1.0, 1.0};
    p.sinr_targets = {1.0, 1.0};
    const auto sol = run_algorithm1(p);
    const double oracle = testsupport::rank_one_oracle(p);
    CHECK(std::abs(sol.power - oracle) <= 1e-4 * oracle);
    for (const auto& u : sol.users) CHECK(u.R == 0);  // rank-one optimal here
  }
}

TEST_CASE("tightness and orthogonality on a shaped instance") {
  Rng rng(71);
  testsupport::InstanceSpec spec;
  spec.n_tx = 6;
  spec.n_users = 2;
  spec.n_joint = 6;
  spec.n_groups = 2;
  auto bp = testsupport::random_feasible_instance(spec, rng);
  REQUIRE(bp.has_value());
  const auto res = run_algorithm1_detailed(*bp);
  REQUIRE(res.status == sdp::SolveStatus::Optimal);
  const auto& sol = *res.solution;
  CHECK(std::abs(sol.power - sol.sdp_bound) <= 1e-6 * sol.sdp_bound);
  for (std::size_t m = 0; m < 2; ++m) {
    CHECK(sol.users[m].R <= sol.K - 1);
    const auto& h = bp->channels[m];
    for (std::size_t k = 1; k < sol.K; ++k) {
      const ComplexMatrix col = sol.users[m].W.col(k);
      if (vector_norm(col) == 0.0) continue;
      const ComplexMatrix ip = h.adjoint() * col;
      CHECK(std::abs(ip(0, 0)) <= 1e-8 * vector_norm(h) * vector_norm(col));
    }
    // covariance consistency with the (reduced) SDP block
    const ComplexMatrix ww = sol.users[m].W * sol.users[m].W.adjoint();
    CHECK(frobenius_norm(ww - res.sdp_solution.x_blocks[m].matrix()) <=
          1e-7 * frobenius_norm(res.sdp_solution.x_blocks[m].matrix()) + 1e-12);
  }
}

TEST_CASE("achieved SINR meets targets and collapses to the numerator form") {
  Rng rng(83);
  model::BeamformingProblem p;
  p.channels = {rng.complex_gaussian_vector(4), rng.complex_gaussian_vector(4)};
  p.noise_vars = {0.2, 0.3};
  p.sinr_targets = {1.5, 0.8};
  const auto sol = run_algorithm1(p);
  const auto sinr = achieved_sinr(sol, p);
  for (std::size_t m = 0; m < 2; ++m) CHECK(sinr[m] >= p.sinr_targets[m] - 1e-6);

  // single user with the lone constraint active: SINR equals the target
  model::BeamformingProblem q;
  q.channels = {rng.complex_gaussian_vector(3)};
  q.noise_vars = {1.0};
  q.sinr_targets = {2.5};
  const auto sq = run_algorithm1(q);
  CHECK(achieved_sinr(sq, q)[0] == doctest::Approx(2.5).epsilon(1e-7));

  // scaling every beamformer raises the SINR when noise is present
  ReelBfSolution scaled = sq;
  scaled.users[0].W = std::sqrt(2.0) * scaled.users[0].W;
  scaled.power *= 2.0;
  scaled.sdp_bound = scaled.power;
  CHECK(achieved_sinr(scaled, q)[0] > 2.5);
}

TEST_CASE("lemma-2 positivity of eta across random optimal instances") {
  Rng rng(97);
  for (int t = 0; t < 4; ++t) {
    testsupport::InstanceSpec spec;
    spec.n_tx = 4;
    spec.n_users = 2;
    spec.n_joint = 2 + t;
    auto bp = testsupport::random_feasible_instance(spec, rng);
    REQUIRE(bp.has_value());
    const auto res = run_algorithm1_detailed(*bp);
    if (res.status != sdp::SolveStatus::Optimal) continue;
    std::vector<ComplexMatrix> rotations;
    for (const auto& h : bp->channels) rotations.push_back(linalg::rotation_matrix(h));
    const auto rot = rotate(res.sdp_solution, rotations);
    for (const auto& u : rot.users) CHECK(u.eta > 1e-10 * u.trace);
  }
}

}  // TEST_SUITE
