// reelbeam: downlink beamforming designs with shaping constraints.
// Subcommands: design, sweep, beampattern, validate.
// Exit codes: 0 ok, 1 validation failure, 2 infeasible, 3 numerical trouble,
// 64 usage/config error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "reelbeam/harness.hpp"
#include "reelbeam/json_io.hpp"
#include "reelbeam/linalg.hpp"
#include "reelbeam/reelbf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reelbeam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

json parse_config(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InvalidInputError("config is not valid JSON");
  return j;
}

// dotted-path overrides: scenario.L=70 lands in config["scenario"]["L"]
void apply_overrides(json& cfg, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw InvalidInputError("override '" + ov + "' is not of the form path=value");
    const std::string path = ov.substr(0, eq);
    const std::string value = ov.substr(eq + 1);
    json* node = &cfg;
    std::size_t start = 0;
    for (;;) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
      if (key.empty()) throw InvalidInputError("override path '" + path + "' has an empty key");
      if (dot == std::string::npos) {
        json parsed = json::parse(value, nullptr, false);
        (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }
}

std::uint64_t env_seed_override(std::uint64_t fallback) {
  const char* env = std::getenv("REELBEAM_SEED");
  if (!env || !*env) return fallback;
  return std::strtoull(env, nullptr, 10);
}

model::BeamformingProblem problem_from_config(const json& cfg, std::uint64_t seed) {
  if (cfg.contains("problem")) return json_io::problem_from_json(cfg.at("problem").dump());
  if (cfg.contains("scenario")) {
    const auto sc = json_io::scenario_from_json(cfg.at("scenario").dump());
    return harness::build_scenario(sc, seed);
  }
  throw InvalidInputError("config needs a 'problem' or 'scenario' section");
}

reelbf::Algorithm1Options design_options(const json& cfg) {
  reelbf::Algorithm1Options opts;
  const json d = cfg.value("design", json::object());
  opts.lemma5 = d.value("lemma5", false);
  opts.rank_reduce = d.value("rank_reduce", true);
  if (d.contains("force_k")) opts.force_k = d.at("force_k").get<std::size_t>();
  const json solver = cfg.value("solver", json::object());
  opts.solver.max_iters = solver.value("max_iters", opts.solver.max_iters);
  opts.solver.tol_gap = solver.value("tol_gap", opts.solver.tol_gap);
  opts.solver.tol_feas = solver.value("tol_feas", opts.solver.tol_feas);
  return opts;
}

std::string format_db(double linear) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f dB", model::linear_to_db(linear));
  return buf;
}

// Constraint echo computed from the raw beamformers, independent of the solver.
struct EchoReport {
  double max_violation = 0.0;
  std::vector<std::string> lines;
};

EchoReport constraint_echo(const model::BeamformingProblem& p,
                           const std::vector<ComplexMatrix>& w) {
  EchoReport rep;
  const std::size_t m = p.n_users();
  std::vector<HermitianMatrix> x;
  for (const auto& wm : w) x.push_back(HermitianMatrix(wm * wm.adjoint()));
  auto note = [&](const std::string& what, double viol) {
    rep.max_violation = std::max(rep.max_violation, viol);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-28s violation %.3e", what.c_str(), viol);
    rep.lines.push_back(buf);
  };
  for (std::size_t i = 0; i < m; ++i) {
    double sig = 0.0, inter = p.noise_vars[i];
    for (std::size_t j = 0; j < m; ++j) {
      const ComplexMatrix hw = p.channels[i].adjoint() * w[j];
      const double g = frobenius_norm(hw) * frobenius_norm(hw);
      if (j == i)
        sig = g;
      else
        inter += g;
    }
    const double sinr = sig / inter;
    note("SINR user " + std::to_string(i),
         std::max(0.0, (p.sinr_targets[i] - sinr) / p.sinr_targets[i]));
  }
  std::size_t idx = 0;
  for (const auto& row : p.joint) {
    double v = 0.0;
    for (std::size_t j = 0; j < m; ++j) v += hermitian_inner(row.coeffs[j], x[j]);
    double viol = 0.0;
    if (row.sense == sdp::Sense::GE) viol = std::max(0.0, row.threshold - v);
    if (row.sense == sdp::Sense::LE) viol = std::max(0.0, v - row.threshold);
    if (row.sense == sdp::Sense::EQ) viol = std::abs(v - row.threshold);
    note("joint row " + std::to_string(idx++), viol / (1.0 + std::abs(row.threshold)));
  }
  idx = 0;
  for (const auto& grp : p.individual) {
    for (std::size_t u = 0; u < m; ++u) {
      const auto& e = grp.per_user[u];
      const double v = hermitian_inner(e.coeff, x[u]);
      double viol = 0.0;
      if (std::isfinite(e.lower)) viol = std::max(viol, (e.lower - v) / (1.0 + std::abs(e.lower)));
      if (std::isfinite(e.upper)) viol = std::max(viol, (v - e.upper) / (1.0 + std::abs(e.upper)));
      note("individual grp " + std::to_string(idx) + " user " + std::to_string(u),
           std::max(0.0, viol));
    }
    ++idx;
  }
  return rep;
}

int run_design(const std::string& config_path, const std::string& out_dir,
               const std::vector<std::string>& overrides) {
  json cfg = parse_config(read_file(config_path));
  apply_overrides(cfg, overrides);
  const std::uint64_t seed = env_seed_override(cfg.value("seed", 1ULL));
  const model::BeamformingProblem problem = problem_from_config(cfg, seed);
  const reelbf::Algorithm1Options opts = design_options(cfg);

  const auto res = reelbf::run_algorithm1_detailed(problem, opts);
  fs::create_directories(out_dir);

  if (res.status == sdp::SolveStatus::Infeasible) {
    std::ostringstream rep;
    rep << "status: infeasible\n";
    rep << "infeasibility measure: " << res.sdp_solution.infeasibility_measure << "\n";
    rep << "dual improving ray entries: " << res.sdp_solution.infeasibility_ray.size() << "\n";
    write_file(fs::path(out_dir) / "report.txt", rep.str());
    std::cerr << "design: problem is infeasible (certificate written to report.txt)\n";
    return kExitInfeasible;
  }
  if (res.status != sdp::SolveStatus::Optimal || !res.solution) {
    std::ostringstream rep;
    rep << "status: numerical trouble\n";
    const auto& k = res.sdp_solution.kkt;
    rep << "residuals: primal " << k.primal_residual << " dual " << k.dual_residual << " gap "
        << k.gap << "\n";
    rep << "iterations: " << res.sdp_solution.iterations << "\n";
    write_file(fs::path(out_dir) / "report.txt", rep.str());
    std::cerr << "design: solver reported numerical trouble\n";
    return kExitNumerical;
  }

  const auto& sol = *res.solution;
  write_file(fs::path(out_dir) / "solution.json", json_io::solution_to_json(sol));

  std::ostringstream rep;
  rep << "status: optimal\n";
  rep << "users: " << problem.n_users() << "  antennas: " << problem.n_tx()
      << "  joint rows: " << problem.joint.size()
      << "  individual groups: " << problem.individual.size() << "\n";
  rep << "K: " << sol.K << "\n";
  std::vector<ComplexMatrix> w;
  for (std::size_t u = 0; u < sol.users.size(); ++u) {
    rep << "user " << u << ": R = " << sol.users[u].R << ", rank(X) = " << res.profile.ranks[u]
        << "\n";
    w.push_back(sol.users[u].W);
  }
  char line[160];
  std::snprintf(line, sizeof(line), "power: %.9f W (%s)\n", sol.power,
                format_db(sol.power).c_str());
  rep << line;
  std::snprintf(line, sizeof(line), "sdp bound: %.9f W, relative difference %.3e\n",
                sol.sdp_bound, std::abs(sol.power - sol.sdp_bound) / sol.sdp_bound);
  rep << line;
  rep << "rank profile: sum of squared ranks " << res.profile.sum_sq << " (bound "
      << res.profile.bound << ")\n";
  const auto echo = constraint_echo(problem, w);
  rep << "constraint echo (max violation " << echo.max_violation << "):\n";
  for (const auto& l : echo.lines) rep << l << "\n";
  const auto& k = res.sdp_solution.kkt;
  std::snprintf(line, sizeof(line), "kkt: primal %.3e dual %.3e gap %.3e\n", k.primal_residual,
                k.dual_residual, k.gap);
  rep << line;
  write_file(fs::path(out_dir) / "report.txt", rep.str());
  std::cout << "design: wrote " << (fs::path(out_dir) / "solution.json").string() << "\n";
  return kExitOk;
}

int run_sweep(const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& overrides, std::size_t jobs, bool desk_scale) {
  json cfg = parse_config(read_file(config_path));
  apply_overrides(cfg, overrides);
  if (!cfg.contains("sweep")) throw InvalidInputError("sweep config needs a 'sweep' section");
  harness::ExperimentConfig ec = json_io::config_from_json(cfg.dump());
  ec.base_seed = env_seed_override(ec.base_seed);
  if (jobs > 0) ec.jobs = jobs;
  if (desk_scale) {
    ec.scenario.n_tx = std::min<std::size_t>(ec.scenario.n_tx, 8);
    ec.scenario.L = std::min<std::size_t>(ec.scenario.L, 40);
    ec.n_monte_carlo = std::min<std::size_t>(ec.n_monte_carlo, 10);
    ec.n_randomizations = std::min<std::size_t>(ec.n_randomizations, 50);
    if (ec.sweep_parameter == "L") {
      std::vector<double> kept;
      for (double v : ec.sweep_values)
        if (v <= 40.0) kept.push_back(v);
      if (!kept.empty()) ec.sweep_values = kept;
    }
  }

  const auto records = harness::run_experiment(ec);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "records.csv", harness::to_csv(records, ec.record_timings));
  write_file(fs::path(out_dir) / "config.json", json_io::config_to_json(ec));
  write_file(fs::path(out_dir) / "ranks.csv",
             harness::rank_distribution_csv(harness::rank_distribution(records)));
  std::cout << "sweep: wrote " << records.size() << " records to "
            << (fs::path(out_dir) / "records.csv").string() << "\n";
  return kExitOk;
}

std::vector<double> parse_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0)
    throw InvalidInputError("grid must be start:stop:step with positive step");
  std::vector<double> grid;
  for (double v = start; v <= stop + 1e-12; v += step) grid.push_back(v);
  return grid;
}

int run_beampattern(const std::string& solution_path, const std::string& grid_spec,
                    const std::string& out_path) {
  const auto sol = json_io::solution_from_json(read_file(solution_path));
  if (sol.users.empty()) throw InvalidInputError("solution has no users");
  std::vector<ComplexMatrix> w;
  for (const auto& u : sol.users) w.push_back(u.W);
  const model::SteeringContext ctx{w[0].rows()};
  const auto grid = parse_grid(grid_spec);
  const auto pattern = harness::beampattern(w, grid, ctx);
  std::string csv = "theta_deg,power\n";
  char buf[64];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", grid[i], pattern[i]);
    csv += buf;
  }
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  return kExitOk;
}

int run_validate(const std::string& solution_path, const std::string& config_path,
                 const std::vector<std::string>& overrides) {
  json cfg = parse_config(read_file(config_path));
  apply_overrides(cfg, overrides);
  const std::uint64_t seed = env_seed_override(cfg.value("seed", 1ULL));
  const model::BeamformingProblem problem = problem_from_config(cfg, seed);
  const auto sol = json_io::solution_from_json(read_file(solution_path));

  std::vector<std::string> violations;
  auto fail = [&](const std::string& why) { violations.push_back(why); };

  if (sol.users.size() != problem.n_users())
    fail("user count mismatch");
  else {
    const std::size_t nt = problem.n_tx();
    bool dims_ok = true;
    for (const auto& u : sol.users)
      if (u.W.rows() != nt || u.W.cols() != sol.K) dims_ok = false;
    if (!dims_ok) fail("beamformer dimensions do not match the problem/K");
    if (dims_ok) {
      double power = 0.0;
      std::vector<ComplexMatrix> w;
      for (const auto& u : sol.users) {
        const double f = frobenius_norm(u.W);
        power += f * f;
        w.push_back(u.W);
      }
      if (std::abs(power - sol.power) > 1e-9 * (1.0 + sol.power))
        fail("stored power does not equal sum tr(W W^H)");
      if (std::abs(sol.power - sol.sdp_bound) > 1e-6 * (1.0 + sol.sdp_bound))
        fail("power does not match the SDP bound to 1e-6");

      for (std::size_t m = 0; m < sol.users.size(); ++m) {
        const auto& h = problem.channels[m];
        for (std::size_t k = 1; k < sol.users[m].W.cols(); ++k) {
          const ComplexMatrix col = sol.users[m].W.col(k);
          const double wn = vector_norm(col);
          if (wn <= 0.0) continue;
          const ComplexMatrix ip = h.adjoint() * col;
          if (std::abs(ip(0, 0)) > 1e-8 * vector_norm(h) * wn) {
            fail("shaping column " + std::to_string(k) + " of user " + std::to_string(m) +
                 " is not orthogonal to the channel");
            break;
          }
        }
        if (!(sol.users[m].alpha >= 0.0)) fail("alpha must be real nonnegative");
        if (sol.users[m].R > sol.K - 1) fail("R exceeds K - 1");
      }

      const auto echo = constraint_echo(problem, w);
      if (echo.max_violation > 1e-6) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "constraint violation %.3e exceeds 1e-6",
                      echo.max_violation);
        fail(buf);
      }
    }
  }

  if (violations.empty()) {
    std::cout << "validate: all checks passed\n";
    return kExitOk;
  }
  std::cout << "validate: " << violations.size() << " violation(s)\n";
  for (const auto& v : violations) std::cout << "  - " << v << "\n";
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"REEL-BF downlink beamforming designs with shaping constraints"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", solution_path, grid_spec = "-90:90:0.5",
              pattern_out;
  std::vector<std::string> overrides;
  std::size_t jobs = 0;
  bool desk_scale = false;

  auto* design = app.add_subcommand("design", "solve one problem and emit solution + report");
  design->add_option("--config", config_path, "JSON config with a problem or scenario")
      ->required();
  design->add_option("--out", out_dir, "output directory");
  design->add_option("--set", overrides, "dotted-path override, e.g. scenario.L=70");

  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep and emit CSV records");
  sweep->add_option("--config", config_path, "JSON config with scenario + sweep sections")
      ->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--jobs", jobs, "worker threads (default: config value)");
  sweep->add_flag("--desk-scale", desk_scale, "shrink the experiment for quick runs");
  sweep->add_option("--set", overrides, "dotted-path override");

  auto* bp = app.add_subcommand("beampattern", "evaluate the beampattern of a solution");
  bp->add_option("--solution", solution_path, "solution.json from design")->required();
  bp->add_option("--grid-deg", grid_spec, "angle grid start:stop:step in degrees");
  bp->add_option("--out", pattern_out, "output CSV (default stdout)");

  auto* val = app.add_subcommand("validate", "re-check every invariant of a solution");
  val->add_option("--solution", solution_path, "solution.json to check")->required();
  val->add_option("--config", config_path, "config that produced it")->required();
  val->add_option("--set", overrides, "dotted-path override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (design->parsed()) return run_design(config_path, out_dir, overrides);
    if (sweep->parsed()) return run_sweep(config_path, out_dir, overrides, jobs, desk_scale);
    if (bp->parsed()) return run_beampattern(solution_path, grid_spec, pattern_out);
    if (val->parsed()) return run_validate(solution_path, config_path, overrides);
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotPsdError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
