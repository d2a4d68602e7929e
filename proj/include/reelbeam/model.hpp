#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "reelbeam/sdp.hpp"
#include "reelbeam/types.hpp"

namespace reelbeam::model {

// sum_j coeffs[j] . X_j  (sense)  threshold
struct JointConstraint {
  std::vector<HermitianMatrix> coeffs;
  sdp::Sense sense = sdp::Sense::GE;
  double threshold = 0.0;
};

// lower <= coeff . X_m <= upper per user m of one group; lower <= 0 <= upper.
struct IndividualEntry {
  HermitianMatrix coeff;
  double lower = -sdp::kInf;
  double upper = sdp::kInf;
};
struct IndividualGroup {
  std::vector<IndividualEntry> per_user;  // one per user
};

struct BeamformingProblem {
  std::vector<ComplexMatrix> channels;  // h_m as n_tx x 1 columns
  std::vector<double> noise_vars;       // sigma^2_m
  std::vector<double> sinr_targets;     // gamma_m, linear and positive
  std::vector<JointConstraint> joint;
  std::vector<IndividualGroup> individual;

  std::size_t n_users() const { return channels.size(); }
  std::size_t n_tx() const { return channels.empty() ? 0 : channels[0].rows(); }
  void validate() const;
};

struct SteeringContext {
  std::size_t n_tx = 0;  // half-wavelength uniform linear array
};

// h(theta): entry n = exp(j pi n sin theta); angles in degrees at the API.
ComplexMatrix steering_vector(double theta_deg, const SteeringContext& ctx);
// (h', h'') with derivatives taken with respect to theta in radians.
std::pair<ComplexMatrix, ComplexMatrix> steering_derivatives(double theta_deg,
                                                             const SteeringContext& ctx);

// The M SINR rows in shaping form: A_mm = h_m h_m^H / gamma_m,
// A_mj = -h_m h_m^H for j != m, sense GE, rhs sigma^2_m.
std::vector<JointConstraint> sinr_matrices(const BeamformingProblem& p);

sdp::StandardSdp build_original_sdp(const BeamformingProblem& p);
// Same problem with every per-user coefficient B replaced by U_m^H B U_m.
// Throws InvalidInputError if a rotation is not unitary to 1e-8.
sdp::StandardSdp build_rotated_sdp(const BeamformingProblem& p,
                                   const std::vector<ComplexMatrix>& rotations);

// The 110 energy-harvesting terminal directions of the line-of-sight study,
// stored as a fixed table (the list has an irregular gap around broadside).
const std::vector<double>& eh_direction_table();

// Single broadside user plus the first L table directions as EH terminals.
BeamformingProblem scenario_eh_los(std::size_t L, std::size_t n_tx, double gamma_db,
                                   double tau_db, double noise_var = 0.1);

// All channels i.i.d. CN(0, I); L energy-harvesting rows at tau.
BeamformingProblem scenario_rayleigh_eh(std::size_t L, std::size_t M, std::size_t n_tx,
                                        double gamma_db, double tau_db, double noise_var,
                                        std::uint64_t seed);

struct InterferenceDerivativeParams {
  std::size_t n_tx = 18;
  std::vector<double> user_angles_deg = {-5.0, 10.0, 25.0};
  std::vector<double> cochannel_angles_deg = {
      -89.375, -80.0, -70.625, -61.25, -51.875, -42.5, -33.125, -23.75, -14.375, 2.0,
      3.0,     17.0,  18.0,    34.375, 43.75,   53.125, 62.5,   71.875, 81.25};
  double rate_bits = 2.0;  // gamma = 2^r - 1
  double noise_var = 0.1;
  double interference_cap = 0.1;
  double derivative_eps = 1e-5;
  double curvature_min = 1e-8;  // closed stand-in for the strict d2f > 0
  double perturb_deg = 0.0;     // uniform +-perturbation applied to every angle
  std::uint64_t seed = 0;
};
// Per co-channel angle: one cap row f <= cap, two derivative rows
// -eps <= f' <= eps, and one curvature row f'' >= curvature_min.
BeamformingProblem scenario_interference_derivative(const InterferenceDerivativeParams& params = {});

struct RelaxedNullingParams {
  std::size_t M = 2;
  std::size_t L = 20;   // EH rows
  std::size_t F = 10;   // one-sided interference rows
  std::size_t P = 2;    // relaxed-nulling groups
  std::size_t n_tx = 16;
  double varsigma = 0.02;
  double interference_cap = 0.01;
  double gamma_db = 5.0;
  double tau_db = 10.0;
  double noise_var = 0.1;
  std::uint64_t seed = 0;
};
// Rayleigh channels; C_pm = varsigma*I - g_p g_p^H / ||g_p||^2 with bounds
// [0, +inf) per user.
BeamformingProblem scenario_relaxed_nulling(const RelaxedNullingParams& params = {});

// gamma = 2^(rate/code_rate) - 1
double ostbc_sinr_target(double rate_bits, double code_rate);

double db_to_linear(double db);
double linear_to_db(double v);

}  // namespace reelbeam::model
