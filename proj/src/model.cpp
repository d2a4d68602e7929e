#include "reelbeam/model.hpp"

#include <cmath>

#include "reelbeam/rng.hpp"

namespace reelbeam::model {

namespace {
constexpr double kPi = 3.14159265358979323846;
double deg2rad(double d) { return d * kPi / 180.0; }
}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double v) { return 10.0 * std::log10(v); }

void BeamformingProblem::validate() const {
  const std::size_t m = n_users();
  if (m == 0) throw InvalidInputError("BeamformingProblem: no users");
  const std::size_t nt = n_tx();
  if (nt == 0) throw InvalidInputError("BeamformingProblem: empty channel");
  for (const auto& h : channels) {
    if (h.cols() != 1 || h.rows() != nt)
      throw InvalidInputError("BeamformingProblem: channels must be n_tx x 1 and same size");
    if (!(vector_norm(h) > 0.0)) throw InvalidInputError("BeamformingProblem: zero channel");
  }
  if (noise_vars.size() != m || sinr_targets.size() != m)
    throw InvalidInputError("BeamformingProblem: per-user arrays must have length M");
  for (double v : noise_vars)
    if (!(v > 0.0)) throw InvalidInputError("BeamformingProblem: noise variance must be > 0");
  for (double g : sinr_targets)
    if (!(g > 0.0)) throw InvalidInputError("BeamformingProblem: SINR targets must be > 0");
  for (const auto& jc : joint) {
    if (jc.coeffs.size() != m)
      throw InvalidInputError("BeamformingProblem: joint row needs one matrix per user");
    for (const auto& c : jc.coeffs)
      if (c.dim() != nt) throw InvalidInputError("BeamformingProblem: joint matrix dimension");
  }
  for (const auto& grp : individual) {
    if (grp.per_user.size() != m)
      throw InvalidInputError("BeamformingProblem: individual group needs one entry per user");
    for (const auto& e : grp.per_user) {
      if (e.coeff.dim() != nt)
        throw InvalidInputError("BeamformingProblem: individual matrix dimension");
      if (!(e.lower <= 0.0 && 0.0 <= e.upper))
        throw InvalidInputError("BeamformingProblem: individual bounds must satisfy l <= 0 <= u");
    }
  }
}

ComplexMatrix steering_vector(double theta_deg, const SteeringContext& ctx) {
  if (ctx.n_tx < 2) throw InvalidInputError("steering_vector: n_tx must be >= 2");
  const double st = std::sin(deg2rad(theta_deg));
  ComplexMatrix h(ctx.n_tx, 1);
  for (std::size_t n = 0; n < ctx.n_tx; ++n) {
    const double phase = kPi * static_cast<double>(n) * st;
    h(n, 0) = cscalar(std::cos(phase), std::sin(phase));
  }
  return h;
}

std::pair<ComplexMatrix, ComplexMatrix> steering_derivatives(double theta_deg,
                                                             const SteeringContext& ctx) {
  if (ctx.n_tx < 2) throw InvalidInputError("steering_derivatives: n_tx must be >= 2");
  const double th = deg2rad(theta_deg);
  const double st = std::sin(th);
  const double ct = std::cos(th);
  ComplexMatrix d1(ctx.n_tx, 1), d2(ctx.n_tx, 1);
  for (std::size_t n = 0; n < ctx.n_tx; ++n) {
    const double pn = kPi * static_cast<double>(n);
    const cscalar e = cscalar(std::cos(pn * st), std::sin(pn * st));
    const cscalar jpc = cscalar(0.0, pn * ct);
    d1(n, 0) = jpc * e;
    d2(n, 0) = (cscalar(0.0, -pn * st) + jpc * jpc) * e;
  }
  return {d1, d2};
}

std::vector<JointConstraint> sinr_matrices(const BeamformingProblem& p) {
  p.validate();
  const std::size_t m = p.n_users();
  std::vector<JointConstraint> rows;
  rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const HermitianMatrix hh = HermitianMatrix::outer(p.channels[i]);
    JointConstraint row;
    row.sense = sdp::Sense::GE;
    row.threshold = p.noise_vars[i];
    row.coeffs.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
      row.coeffs.push_back(j == i ? (1.0 / p.sinr_targets[i]) * hh : -1.0 * hh);
    rows.push_back(std::move(row));
  }
  return rows;
}

sdp::StandardSdp build_original_sdp(const BeamformingProblem& p) {
  p.validate();
  const std::size_t m = p.n_users();
  const std::size_t nt = p.n_tx();
  sdp::StandardSdp out;
  out.block_dims.assign(m, nt);
  out.objective.assign(m, HermitianMatrix::identity(nt));
  for (auto& row : sinr_matrices(p)) {
    sdp::ConstraintRow cr;
    cr.coeffs = std::move(row.coeffs);
    cr.sense = row.sense;
    cr.rhs = row.threshold;
    out.constraints.push_back(std::move(cr));
  }
  for (const auto& jc : p.joint) {
    sdp::ConstraintRow cr;
    cr.coeffs = jc.coeffs;
    cr.sense = jc.sense;
    cr.rhs = jc.threshold;
    out.constraints.push_back(std::move(cr));
  }
  for (const auto& grp : p.individual) {
    for (std::size_t u = 0; u < m; ++u) {
      sdp::DoubleSidedRow ds;
      ds.block = u;
      ds.coeff = grp.per_user[u].coeff;
      ds.lower = grp.per_user[u].lower;
      ds.upper = grp.per_user[u].upper;
      out.double_sided.push_back(std::move(ds));
    }
  }
  return out;
}

sdp::StandardSdp build_rotated_sdp(const BeamformingProblem& p,
                                   const std::vector<ComplexMatrix>& rotations) {
  sdp::StandardSdp out = build_original_sdp(p);
  if (rotations.size() != p.n_users())
    throw InvalidInputError("build_rotated_sdp: one rotation per user required");
  for (const auto& u : rotations) {
    if (u.rows() != p.n_tx() || u.cols() != p.n_tx())
      throw InvalidInputError("build_rotated_sdp: rotation dimension mismatch");
    const double dev = frobenius_norm(u.adjoint() * u - ComplexMatrix::identity(u.rows()));
    if (dev > 1e-8) throw InvalidInputError("build_rotated_sdp: rotation is not unitary");
  }
  for (std::size_t b = 0; b < out.block_dims.size(); ++b)
    out.objective[b] = rotate_hermitian(out.objective[b], rotations[b]);
  for (auto& row : out.constraints)
    for (std::size_t b = 0; b < row.coeffs.size(); ++b)
      row.coeffs[b] = rotate_hermitian(row.coeffs[b], rotations[b]);
  for (auto& ds : out.double_sided) ds.coeff = rotate_hermitian(ds.coeff, rotations[ds.block]);
  return out;
}

const std::vector<double>& eh_direction_table() {
  // [-90 : 1.5 : -3] followed by [2 : 1.5 : 77]; 59 + 51 = 110 directions
  static const std::vector<double> table = [] {
    std::vector<double> t;
    for (int k = 0; k <= 58; ++k) t.push_back(-90.0 + 1.5 * k);
    for (int k = 0; k <= 50; ++k) t.push_back(2.0 + 1.5 * k);
    return t;
  }();
  return table;
}

namespace {

JointConstraint eh_row(const ComplexMatrix& h, std::size_t m, double tau) {
  JointConstraint row;
  row.sense = sdp::Sense::GE;
  row.threshold = tau;
  row.coeffs.assign(m, HermitianMatrix::outer(h));
  return row;
}

}  // namespace

BeamformingProblem scenario_eh_los(std::size_t L, std::size_t n_tx, double gamma_db,
                                   double tau_db, double noise_var) {
  const auto& dirs = eh_direction_table();
  if (L > dirs.size())
    throw InvalidInputError("scenario_eh_los: at most 110 EH terminals are defined");
  const SteeringContext ctx{n_tx};
  BeamformingProblem p;
  p.channels = {steering_vector(0.0, ctx)};
  p.noise_vars = {noise_var};
  p.sinr_targets = {db_to_linear(gamma_db)};
  const double tau = db_to_linear(tau_db);
  for (std::size_t l = 0; l < L; ++l)
    p.joint.push_back(eh_row(steering_vector(dirs[l], ctx), 1, tau));
  return p;
}

BeamformingProblem scenario_rayleigh_eh(std::size_t L, std::size_t M, std::size_t n_tx,
                                        double gamma_db, double tau_db, double noise_var,
                                        std::uint64_t seed) {
  if (M == 0 || n_tx == 0) throw InvalidInputError("scenario_rayleigh_eh: counts must be positive");
  Rng rng(seed);
  BeamformingProblem p;
  for (std::size_t i = 0; i < M; ++i) p.channels.push_back(rng.complex_gaussian_vector(n_tx));
  p.noise_vars.assign(M, noise_var);
  p.sinr_targets.assign(M, db_to_linear(gamma_db));
  const double tau = db_to_linear(tau_db);
  for (std::size_t l = 0; l < L; ++l)
    p.joint.push_back(eh_row(rng.complex_gaussian_vector(n_tx), M, tau));
  return p;
}

BeamformingProblem scenario_interference_derivative(const InterferenceDerivativeParams& params) {
  const SteeringContext ctx{params.n_tx};
  Rng rng(params.seed);
  std::vector<double> users = params.user_angles_deg;
  std::vector<double> cochannel = params.cochannel_angles_deg;
  if (params.perturb_deg > 0.0) {
    for (double& a : users) a += rng.uniform(-params.perturb_deg, params.perturb_deg);
    for (double& a : cochannel) a += rng.uniform(-params.perturb_deg, params.perturb_deg);
  }
  const std::size_t m = users.size();
  BeamformingProblem p;
  for (double a : users) p.channels.push_back(steering_vector(a, ctx));
  p.noise_vars.assign(m, params.noise_var);
  p.sinr_targets.assign(m, std::pow(2.0, params.rate_bits) - 1.0);

  for (double a : cochannel) {
    const ComplexMatrix h = steering_vector(a, ctx);
    const auto [d1, d2] = steering_derivatives(a, ctx);

    JointConstraint cap;
    cap.sense = sdp::Sense::LE;
    cap.threshold = params.interference_cap;
    cap.coeffs.assign(m, HermitianMatrix::outer(h));
    p.joint.push_back(std::move(cap));

    // f'(theta): coefficient h' h^H + h h'^H, two-sided via a GE and an LE row
    const HermitianMatrix dcoef = HermitianMatrix::symmetrized_product(d1, h);
    JointConstraint dlo;
    dlo.sense = sdp::Sense::GE;
    dlo.threshold = -params.derivative_eps;
    dlo.coeffs.assign(m, dcoef);
    p.joint.push_back(std::move(dlo));
    JointConstraint dhi;
    dhi.sense = sdp::Sense::LE;
    dhi.threshold = params.derivative_eps;
    dhi.coeffs.assign(m, dcoef);
    p.joint.push_back(std::move(dhi));

    // f''(theta) >= curvature_min with coefficient h'' h^H + 2 h' h'^H + h h''^H
    const HermitianMatrix ccoef =
        HermitianMatrix::symmetrized_product(d2, h) + 2.0 * HermitianMatrix::outer(d1);
    JointConstraint curv;
    curv.sense = sdp::Sense::GE;
    curv.threshold = params.curvature_min;
    curv.coeffs.assign(m, ccoef);
    p.joint.push_back(std::move(curv));
  }
  return p;
}

BeamformingProblem scenario_relaxed_nulling(const RelaxedNullingParams& params) {
  if (params.M == 0 || params.n_tx == 0)
    throw InvalidInputError("scenario_relaxed_nulling: counts must be positive");
  Rng rng(params.seed);
  BeamformingProblem p;
  for (std::size_t i = 0; i < params.M; ++i)
    p.channels.push_back(rng.complex_gaussian_vector(params.n_tx));
  p.noise_vars.assign(params.M, params.noise_var);
  p.sinr_targets.assign(params.M, db_to_linear(params.gamma_db));
  const double tau = db_to_linear(params.tau_db);
  for (std::size_t l = 0; l < params.L; ++l)
    p.joint.push_back(eh_row(rng.complex_gaussian_vector(params.n_tx), params.M, tau));
  for (std::size_t j = 0; j < params.F; ++j) {
    JointConstraint row;
    row.sense = sdp::Sense::LE;
    row.threshold = params.interference_cap;
    row.coeffs.assign(params.M, HermitianMatrix::outer(rng.complex_gaussian_vector(params.n_tx)));
    p.joint.push_back(std::move(row));
  }
  for (std::size_t q = 0; q < params.P; ++q) {
    const ComplexMatrix g = rng.complex_gaussian_vector(params.n_tx);
    const double g2 = vector_norm(g) * vector_norm(g);
    const HermitianMatrix c = HermitianMatrix(params.varsigma * ComplexMatrix::identity(params.n_tx) -
                                              (1.0 / g2) * outer(g, g));
    IndividualGroup grp;
    for (std::size_t u = 0; u < params.M; ++u) grp.per_user.push_back({c, 0.0, sdp::kInf});
    p.individual.push_back(std::move(grp));
  }
  return p;
}

double ostbc_sinr_target(double rate_bits, double code_rate) {
  if (!(rate_bits > 0.0)) throw InvalidInputError("ostbc_sinr_target: rate must be positive");
  if (!(code_rate > 0.0 && code_rate <= 1.0))
    throw InvalidInputError("ostbc_sinr_target: code rate must lie in (0, 1]");
  return std::pow(2.0, rate_bits / code_rate) - 1.0;
}

}  // namespace reelbeam::model
