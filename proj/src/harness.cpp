#include "reelbeam/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>

namespace reelbeam::harness {

const char* scheme_id_name(SchemeId s) {
  switch (s) {
    case SchemeId::ReelBf: return "ReelBf";
    case SchemeId::RankOne: return "RankOne";
    case SchemeId::Alamouti2: return "Alamouti2";
    case SchemeId::Ostbc4: return "Ostbc4";
  }
  return "?";
}

std::optional<SchemeId> scheme_id_from_name(const std::string& name) {
  if (name == "ReelBf") return SchemeId::ReelBf;
  if (name == "RankOne") return SchemeId::RankOne;
  if (name == "Alamouti2") return SchemeId::Alamouti2;
  if (name == "Ostbc4") return SchemeId::Ostbc4;
  return std::nullopt;
}

double scenario_rate_bits(const Scenario& sc) {
  if (sc.rate_bits > 0.0) return sc.rate_bits;
  return std::log2(1.0 + model::db_to_linear(sc.gamma_db));
}

model::BeamformingProblem build_scenario(const Scenario& sc, std::uint64_t run_seed) {
  const double gamma_db =
      sc.rate_bits > 0.0 ? model::linear_to_db(std::pow(2.0, sc.rate_bits) - 1.0) : sc.gamma_db;
  switch (sc.kind) {
    case Scenario::Kind::EhLos:
      return model::scenario_eh_los(sc.L, sc.n_tx, gamma_db, sc.tau_db, sc.noise_var);
    case Scenario::Kind::RayleighEh:
      return model::scenario_rayleigh_eh(sc.L, sc.M, sc.n_tx, gamma_db, sc.tau_db, sc.noise_var,
                                         run_seed);
    case Scenario::Kind::InterferenceDerivative: {
      model::InterferenceDerivativeParams params;
      params.n_tx = sc.n_tx;
      params.rate_bits = scenario_rate_bits(sc);
      params.noise_var = sc.noise_var;
      params.interference_cap = sc.cochannel_cap;
      params.derivative_eps = sc.derivative_eps;
      params.curvature_min = sc.curvature_min;
      params.perturb_deg = sc.perturb_deg;
      params.seed = run_seed;
      return model::scenario_interference_derivative(params);
    }
    case Scenario::Kind::RelaxedNulling: {
      model::RelaxedNullingParams params;
      params.M = sc.M;
      params.L = sc.L;
      params.F = sc.F;
      params.P = sc.P;
      params.n_tx = sc.n_tx;
      params.varsigma = sc.varsigma;
      params.interference_cap = sc.interference_cap;
      params.gamma_db = gamma_db;
      params.tau_db = sc.tau_db;
      params.noise_var = sc.noise_var;
      params.seed = run_seed;
      return model::scenario_relaxed_nulling(params);
    }
  }
  throw InvalidInputError("build_scenario: unknown scenario kind");
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

Scenario with_sweep_value(const Scenario& sc, const std::string& param, double value) {
  Scenario out = sc;
  if (param == "L") {
    out.L = static_cast<std::size_t>(std::llround(value));
  } else if (param == "r_bits") {
    out.rate_bits = value;
  } else if (param == "n_tx") {
    out.n_tx = static_cast<std::size_t>(std::llround(value));
  } else {
    throw InvalidInputError("run_experiment: unknown sweep parameter '" + param + "'");
  }
  return out;
}

struct Task {
  double value;
  std::size_t run;
};

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.sweep_values.empty()) throw InvalidInputError("run_experiment: empty sweep");
  if (cfg.n_monte_carlo < 1) throw InvalidInputError("run_experiment: n_monte_carlo must be >= 1");
  if (cfg.schemes.empty()) throw InvalidInputError("run_experiment: no schemes selected");

  std::vector<Task> tasks;
  for (double v : cfg.sweep_values)
    for (std::size_t run = 0; run < cfg.n_monte_carlo; ++run) tasks.push_back({v, run});

  std::vector<std::vector<ExperimentRecord>> per_task(tasks.size());

  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const std::uint64_t run_seed = cfg.base_seed + task.run;
    const Scenario sc = with_sweep_value(cfg.scenario, cfg.sweep_parameter, task.value);
    std::vector<ExperimentRecord>& out = per_task[ti];

    auto base_record = [&](SchemeId scheme) {
      ExperimentRecord r;
      r.sweep_name = cfg.sweep_parameter;
      r.sweep_value = task.value;
      r.run_index = task.run;
      r.scheme = scheme;
      return r;
    };

    model::BeamformingProblem problem;
    try {
      problem = build_scenario(sc, run_seed);
    } catch (const std::exception&) {
      for (SchemeId scheme : cfg.schemes) out.push_back(base_record(scheme));
      return;
    }

    bool want_baselines = false;
    for (SchemeId scheme : cfg.schemes)
      if (scheme != SchemeId::ReelBf) want_baselines = true;

    for (SchemeId scheme : cfg.schemes) {
      if (scheme != SchemeId::ReelBf) continue;
      ExperimentRecord r = base_record(scheme);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        reelbf::Algorithm1Options opts;
        opts.rank_reduce = cfg.rank_reduce;
        opts.solver = cfg.solver;
        const auto res = reelbf::run_algorithm1_detailed(problem, opts);
        r.status = res.status;
        if (res.status == sdp::SolveStatus::Optimal && res.solution) {
          r.feasible = true;
          r.power_db = model::linear_to_db(res.solution->power);
          r.ranks = res.profile.ranks;
          r.sum_rank_sq = res.profile.sum_sq;
          r.sdp_bound = res.solution->sdp_bound;
        }
      } catch (const std::exception&) {
        r.status = sdp::SolveStatus::NumericalTrouble;
      }
      r.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      out.push_back(std::move(r));
    }

    if (!want_baselines) return;
    std::vector<baselines::BaselineResult> bl;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      baselines::BaselineOptions opts;
      opts.n_randomizations = cfg.n_randomizations;
      opts.seed = run_seed + 1000003;
      opts.rank_reduce = cfg.rank_reduce;
      opts.solver = cfg.solver;
      bl = baselines::evaluate_baselines(problem, scenario_rate_bits(sc), opts);
    } catch (const std::exception&) {
      bl.clear();
    }
    const double bl_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    auto find_result = [&](baselines::Scheme bs) -> const baselines::BaselineResult* {
      for (const auto& r : bl)
        if (r.scheme == bs) return &r;
      return nullptr;
    };
    for (SchemeId scheme : cfg.schemes) {
      baselines::Scheme bs;
      switch (scheme) {
        case SchemeId::RankOne: bs = baselines::Scheme::RankOne; break;
        case SchemeId::Alamouti2: bs = baselines::Scheme::Alamouti2; break;
        case SchemeId::Ostbc4: bs = baselines::Scheme::Ostbc4; break;
        default: continue;
      }
      ExperimentRecord r = base_record(scheme);
      r.wall_time_ms = bl_ms;
      if (const auto* br = find_result(bs)) {
        r.status = br->feasible ? sdp::SolveStatus::Optimal : sdp::SolveStatus::Infeasible;
        r.feasible = br->feasible;
        if (br->power) r.power_db = model::linear_to_db(*br->power);
        r.ranks = br->profile.ranks;
        r.sum_rank_sq = br->profile.sum_sq;
        r.sdp_bound = br->sdp_bound;
      }
      out.push_back(std::move(r));
    }
  });

  std::vector<ExperimentRecord> records;
  for (auto& chunk : per_task)
    for (auto& r : chunk) records.push_back(std::move(r));
  return records;
}

std::vector<double> beampattern(const std::vector<ComplexMatrix>& beamformers,
                                const std::vector<double>& grid_deg,
                                const model::SteeringContext& ctx) {
  std::vector<double> out;
  out.reserve(grid_deg.size());
  for (double theta : grid_deg) {
    if (theta < -90.0 || theta > 90.0)
      throw InvalidInputError("beampattern: grid angle outside [-90, 90] degrees");
    const ComplexMatrix h = model::steering_vector(theta, ctx);
    double p = 0.0;
    for (const auto& w : beamformers) {
      const ComplexMatrix hw = h.adjoint() * w;
      const double g = frobenius_norm(hw);
      p += g * g;
    }
    out.push_back(p);
  }
  return out;
}

std::optional<double> feasibility_percentage(const std::vector<ExperimentRecord>& records,
                                             SchemeId scheme, double sweep_value) {
  std::size_t total = 0, feas = 0;
  for (const auto& r : records) {
    if (r.scheme != scheme || r.sweep_value != sweep_value) continue;
    ++total;
    if (r.feasible) ++feas;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(feas) / static_cast<double>(total);
}

std::vector<RankDistributionRow> rank_distribution(const std::vector<ExperimentRecord>& records,
                                                   SchemeId scheme) {
  // (sweep value, user) -> rank -> count
  std::map<std::pair<double, std::size_t>, std::map<std::size_t, std::size_t>> hist;
  std::map<std::pair<double, std::size_t>, std::size_t> totals;
  for (const auto& r : records) {
    if (r.scheme != scheme || r.ranks.empty()) continue;
    for (std::size_t u = 0; u < r.ranks.size(); ++u) {
      hist[{r.sweep_value, u}][r.ranks[u]]++;
      totals[{r.sweep_value, u}]++;
    }
  }
  std::vector<RankDistributionRow> rows;
  for (const auto& [key, counts] : hist) {
    const double total = static_cast<double>(totals[key]);
    for (const auto& [rank, count] : counts)
      rows.push_back({key.first, key.second, rank, 100.0 * count / total});
  }
  return rows;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<ExperimentRecord>& records, bool include_timings) {
  std::string out =
      "sweep_name,sweep_value,run_index,scheme,feasible,power_db,ranks,sum_rank_sq,wall_time_ms\n";
  for (const auto& r : records) {
    out += r.sweep_name;
    out += ',';
    out += format_double(r.sweep_value);
    out += ',';
    out += std::to_string(r.run_index);
    out += ',';
    out += scheme_id_name(r.scheme);
    out += ',';
    out += r.feasible ? "true" : "false";
    out += ',';
    if (r.power_db) out += format_double(*r.power_db);
    out += ',';
    for (std::size_t i = 0; i < r.ranks.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(r.ranks[i]);
    }
    out += ',';
    out += std::to_string(r.sum_rank_sq);
    out += ',';
    if (include_timings) out += format_double(r.wall_time_ms);
    out += '\n';
  }
  return out;
}

std::string rank_distribution_csv(const std::vector<RankDistributionRow>& rows) {
  std::string out = "sweep_value,user,rank,percent\n";
  for (const auto& r : rows) {
    out += format_double(r.sweep_value);
    out += ',';
    out += std::to_string(r.user);
    out += ',';
    out += std::to_string(r.rank);
    out += ',';
    out += format_double(r.percent);
    out += '\n';
  }
  return out;
}

}  // namespace reelbeam::harness
