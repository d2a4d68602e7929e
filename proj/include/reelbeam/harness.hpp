#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "reelbeam/baselines.hpp"
#include "reelbeam/model.hpp"
#include "reelbeam/reelbf.hpp"

namespace reelbeam::harness {

enum class SchemeId { ReelBf, RankOne, Alamouti2, Ostbc4 };
const char* scheme_id_name(SchemeId s);
std::optional<SchemeId> scheme_id_from_name(const std::string& name);

// Superset of scenario parameters; each kind reads the fields it needs.
struct Scenario {
  enum class Kind { EhLos, RayleighEh, InterferenceDerivative, RelaxedNulling };
  Kind kind = Kind::EhLos;
  std::size_t n_tx = 16;
  std::size_t L = 10;
  std::size_t M = 1;
  std::size_t F = 10;
  std::size_t P = 2;
  double gamma_db = 0.0;
  double rate_bits = 0.0;  // when > 0, overrides gamma_db via gamma = 2^r - 1
  double tau_db = 10.0;
  double noise_var = 0.1;
  double varsigma = 0.02;
  double interference_cap = 0.01;   // relaxed nulling
  double cochannel_cap = 0.1;       // interference-derivative cap
  double derivative_eps = 1e-5;
  double curvature_min = 1e-8;
  double perturb_deg = 0.25;
};

model::BeamformingProblem build_scenario(const Scenario& sc, std::uint64_t run_seed);
double scenario_rate_bits(const Scenario& sc);

struct ExperimentConfig {
  Scenario scenario;
  std::string sweep_parameter = "L";  // "L" or "r_bits"
  std::vector<double> sweep_values;
  std::size_t n_monte_carlo = 1;
  std::size_t n_randomizations = 100;
  std::uint64_t base_seed = 1;
  std::vector<SchemeId> schemes = {SchemeId::ReelBf, SchemeId::RankOne, SchemeId::Alamouti2,
                                   SchemeId::Ostbc4};
  bool record_timings = false;  // timings break byte-level reproducibility
  bool rank_reduce = true;
  std::size_t jobs = 1;
  sdp::SolveOptions solver;
};

struct ExperimentRecord {
  std::string sweep_name;
  double sweep_value = 0.0;
  std::size_t run_index = 0;
  SchemeId scheme = SchemeId::ReelBf;
  bool feasible = false;
  std::optional<double> power_db;
  std::vector<std::size_t> ranks;
  std::size_t sum_rank_sq = 0;
  double wall_time_ms = 0.0;
  sdp::SolveStatus status = sdp::SolveStatus::NumericalTrouble;
  double sdp_bound = 0.0;  // linear units; 0 when unavailable
};

// Deterministic given base_seed: run i of every sweep value uses seed
// base_seed + i for channel generation and base_seed + i + 1000003 for the
// baselines' randomization draws. Individual run failures become infeasible
// records, never abort the sweep.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

// P(theta) = sum_m h(theta) h(theta)^H . W_m W_m^H over the grid.
std::vector<double> beampattern(const std::vector<ComplexMatrix>& beamformers,
                                const std::vector<double>& grid_deg,
                                const model::SteeringContext& ctx);

// Fraction of feasible runs; empty selection yields nullopt, not zero.
std::optional<double> feasibility_percentage(const std::vector<ExperimentRecord>& records,
                                             SchemeId scheme, double sweep_value);

struct RankDistributionRow {
  double sweep_value;
  std::size_t user;
  std::size_t rank;
  double percent;
};
std::vector<RankDistributionRow> rank_distribution(const std::vector<ExperimentRecord>& records,
                                                   SchemeId scheme = SchemeId::ReelBf);

// header: sweep_name,sweep_value,run_index,scheme,feasible,power_db,ranks,sum_rank_sq,wall_time_ms
// power_db is empty when infeasible; wall_time_ms is empty unless timings were
// recorded (they are off by default to keep reruns byte-identical).
std::string to_csv(const std::vector<ExperimentRecord>& records, bool include_timings = false);
std::string rank_distribution_csv(const std::vector<RankDistributionRow>& rows);

// Deterministic fan-out of n tasks over up to `jobs` threads.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace reelbeam::harness
