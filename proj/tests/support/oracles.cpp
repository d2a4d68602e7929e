#include "support/oracles.hpp"

#include <cmath>

#include "reelbeam/sdp.hpp"

namespace reelbeam::testsupport {

namespace {

constexpr double kPi = 3.14159265358979323846;

ComplexMatrix unit_vector(double a, double b) {
  ComplexMatrix u(2, 1);
  u(0, 0) = std::cos(a);
  u(1, 0) = cscalar(std::sin(a) * std::cos(b), std::sin(a) * std::sin(b));
  return u;
}

// minimal total power with both SINR constraints binding at fixed directions;
// NaN when the direction pair cannot support the targets
double power_at(const model::BeamformingProblem& p, const ComplexMatrix& u1,
                const ComplexMatrix& u2) {
  auto gain = [](const ComplexMatrix& h, const ComplexMatrix& u) {
    const ComplexMatrix ip = h.adjoint() * u;
    return std::norm(ip(0, 0));
  };
  const double g11 = gain(p.channels[0], u1), g12 = gain(p.channels[0], u2);
  const double g21 = gain(p.channels[1], u1), g22 = gain(p.channels[1], u2);
  const double a = g11 / p.sinr_targets[0], b = -g12;
  const double c = -g21, d = g22 / p.sinr_targets[1];
  const double det = a * d - b * c;
  if (std::abs(det) < 1e-14) return std::nan("");
  const double p1 = (d * p.noise_vars[0] - b * p.noise_vars[1]) / det;
  const double p2 = (a * p.noise_vars[1] - c * p.noise_vars[0]) / det;
  if (!(p1 >= 0.0 && p2 >= 0.0)) return std::nan("");
  return p1 + p2;
}

}  // namespace

double rank_one_oracle(const model::BeamformingProblem& p) {
  p.validate();
  if (p.n_tx() != 2 || !p.joint.empty() || !p.individual.empty())
    throw InvalidInputError("rank_one_oracle handles n_tx = 2 SINR-only problems");
  if (p.n_users() == 1) {
    const double h2 = vector_norm(p.channels[0]) * vector_norm(p.channels[0]);
    return p.sinr_targets[0] * p.noise_vars[0] / h2;
  }
  if (p.n_users() != 2) throw InvalidInputError("rank_one_oracle handles M in {1, 2}");

  double best = std::numeric_limits<double>::infinity();
  double ba1 = 0, bb1 = 0, ba2 = 0, bb2 = 0;
  const int na = 13, nb = 16;
  for (int i1 = 0; i1 < na; ++i1)
    for (int j1 = 0; j1 < nb; ++j1)
      for (int i2 = 0; i2 < na; ++i2)
        for (int j2 = 0; j2 < nb; ++j2) {
          const double a1 = (kPi / 2) * i1 / (na - 1), b1 = 2 * kPi * j1 / nb;
          const double a2 = (kPi / 2) * i2 / (na - 1), b2 = 2 * kPi * j2 / nb;
          const double v = power_at(p, unit_vector(a1, b1), unit_vector(a2, b2));
          if (std::isfinite(v) && v < best) {
            best = v;
            ba1 = a1;
            bb1 = b1;
            ba2 = a2;
            bb2 = b2;
          }
        }
  // local refinement: shrink a 4-d box around the best grid point
  double ra = kPi / 2 / (na - 1), rb = 2 * kPi / nb;
  for (int round = 0; round < 12; ++round) {
    double nba1 = ba1, nbb1 = bb1, nba2 = ba2, nbb2 = bb2;
    for (int i1 = -2; i1 <= 2; ++i1)
      for (int j1 = -2; j1 <= 2; ++j1)
        for (int i2 = -2; i2 <= 2; ++i2)
          for (int j2 = -2; j2 <= 2; ++j2) {
            const double a1 = ba1 + ra * i1 / 2, b1 = bb1 + rb * j1 / 2;
            const double a2 = ba2 + ra * i2 / 2, b2 = bb2 + rb * j2 / 2;
            const double v = power_at(p, unit_vector(a1, b1), unit_vector(a2, b2));
            if (std::isfinite(v) && v < best) {
              best = v;
              nba1 = a1;
              nbb1 = b1;
              nba2 = a2;
              nbb2 = b2;
            }
          }
    ba1 = nba1;
    bb1 = nbb1;
    ba2 = nba2;
    bb2 = nbb2;
    ra /= 2.5;
    rb /= 2.5;
  }
  return best;
}

HermitianMatrix random_hermitian(Rng& rng, std::size_t n, double scale) {
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
  return HermitianMatrix(cscalar(0.5 * scale, 0.0) * (g + g.adjoint()));
}

std::optional<model::BeamformingProblem> random_feasible_instance(const InstanceSpec& spec,
                                                                  Rng& rng) {
  model::BeamformingProblem p;
  for (std::size_t i = 0; i < spec.n_users; ++i)
    p.channels.push_back(rng.complex_gaussian_vector(spec.n_tx));
  p.noise_vars.assign(spec.n_users, spec.noise_var);
  p.sinr_targets.assign(spec.n_users, model::db_to_linear(spec.gamma_db));

  // feasible reference point: inflated SINR-only optimum plus a ridge
  const sdp::StandardSdp base = model::build_original_sdp(p);
  const sdp::SdpSolution s0 = sdp::solve(base);
  if (s0.status != sdp::SolveStatus::Optimal) return std::nullopt;
  std::vector<HermitianMatrix> xref;
  double tr = 0.0;
  for (const auto& x : s0.x_blocks) tr += real_trace(x);
  double ridge = 0.05 * tr / static_cast<double>(spec.n_tx);
  auto sinr_margin_ok = [&](const std::vector<HermitianMatrix>& x) {
    for (std::size_t m = 0; m < spec.n_users; ++m) {
      const HermitianMatrix hh = HermitianMatrix::outer(p.channels[m]);
      double sig = hermitian_inner(hh, x[m]);
      double inter = p.noise_vars[m];
      for (std::size_t j = 0; j < spec.n_users; ++j)
        if (j != m) inter += hermitian_inner(hh, x[j]);
      if (sig < p.sinr_targets[m] * inter * (1.0 + 1e-3)) return false;
    }
    return true;
  };
  for (int attempt = 0; attempt < 60; ++attempt) {
    xref.clear();
    for (const auto& x : s0.x_blocks)
      xref.push_back(HermitianMatrix(1.5 * x.matrix() +
                                     ridge * ComplexMatrix::identity(spec.n_tx)));
    if (sinr_margin_ok(xref)) break;
    ridge /= 4.0;
    if (attempt == 59) return std::nullopt;
  }

  for (std::size_t i = 0; i < spec.n_joint; ++i) {
    const double pick = rng.uniform();
    model::JointConstraint row;
    if (pick < 0.3) {
      // EH-style PSD row, active or slack at the reference
      row.coeffs.assign(spec.n_users,
                        HermitianMatrix::outer(rng.complex_gaussian_vector(spec.n_tx)));
      row.sense = sdp::Sense::GE;
      double v = 0.0;
      for (std::size_t j = 0; j < spec.n_users; ++j) v += hermitian_inner(row.coeffs[j], xref[j]);
      row.threshold = rng.uniform() < 0.4 ? v : v * rng.uniform(0.5, 0.95);
    } else if (pick < 0.6) {
      row.coeffs.assign(spec.n_users,
                        HermitianMatrix::outer(rng.complex_gaussian_vector(spec.n_tx)));
      row.sense = sdp::Sense::LE;
      double v = 0.0;
      for (std::size_t j = 0; j < spec.n_users; ++j) v += hermitian_inner(row.coeffs[j], xref[j]);
      row.threshold = v * rng.uniform(1.05, 1.5) + 0.01;
    } else if (pick < 0.8) {
      for (std::size_t j = 0; j < spec.n_users; ++j)
        row.coeffs.push_back(random_hermitian(rng, spec.n_tx));
      row.sense = sdp::Sense::EQ;
      double v = 0.0;
      for (std::size_t j = 0; j < spec.n_users; ++j) v += hermitian_inner(row.coeffs[j], xref[j]);
      row.threshold = v;
    } else {
      for (std::size_t j = 0; j < spec.n_users; ++j)
        row.coeffs.push_back(random_hermitian(rng, spec.n_tx));
      row.sense = sdp::Sense::GE;
      double v = 0.0;
      for (std::size_t j = 0; j < spec.n_users; ++j) v += hermitian_inner(row.coeffs[j], xref[j]);
      row.threshold = v - std::abs(v) * rng.uniform(0.05, 0.4) - 0.01;
    }
    p.joint.push_back(std::move(row));
  }

  for (std::size_t g = 0; g < spec.n_groups; ++g) {
    model::IndividualGroup grp;
    for (std::size_t u = 0; u < spec.n_users; ++u) {
      model::IndividualEntry e;
      e.coeff = random_hermitian(rng, spec.n_tx);
      const double v = hermitian_inner(e.coeff, xref[u]);
      const double pad = 0.3 * std::abs(v) + 0.05;
      e.lower = std::min(0.0, v - pad);
      e.upper = rng.uniform() < 0.3 ? sdp::kInf : std::max(0.0, v + pad);
      grp.per_user.push_back(std::move(e));
    }
    p.individual.push_back(std::move(grp));
  }
  return p;
}

}  // namespace reelbeam::testsupport
