#include "reelbeam/json_io.hpp"

#include <json.hpp>

namespace reelbeam::json_io {

using nlohmann::json;

namespace {

json complex_to_json(const cscalar& v) { return json::array({v.real(), v.imag()}); }

cscalar complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw InvalidInputError("expected complex entry as [re, im]");
  return cscalar(j[0].get<double>(), j[1].get<double>());
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInputError("expected a non-empty matrix");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw InvalidInputError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
  }
  return m;
}

json vector_to_json(const ComplexMatrix& v) {
  json out = json::array();
  for (std::size_t i = 0; i < v.rows(); ++i) out.push_back(complex_to_json(v(i, 0)));
  return out;
}

ComplexMatrix vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInputError("expected a non-empty vector");
  ComplexMatrix v(j.size(), 1);
  for (std::size_t i = 0; i < j.size(); ++i) v(i, 0) = complex_from_json(j[i]);
  return v;
}

json bound_to_json(double v) {
  if (v == sdp::kInf) return "inf";
  if (v == -sdp::kInf) return "-inf";
  return v;
}

double bound_from_json(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return sdp::kInf;
    if (s == "-inf") return -sdp::kInf;
    throw InvalidInputError("unknown bound string '" + s + "'");
  }
  return j.get<double>();
}

std::string sense_to_string(sdp::Sense s) {
  switch (s) {
    case sdp::Sense::LE: return "LE";
    case sdp::Sense::EQ: return "EQ";
    case sdp::Sense::GE: return "GE";
  }
  return "GE";
}

sdp::Sense sense_from_string(const std::string& s) {
  if (s == "LE") return sdp::Sense::LE;
  if (s == "EQ") return sdp::Sense::EQ;
  if (s == "GE") return sdp::Sense::GE;
  throw InvalidInputError("unknown sense '" + s + "'");
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InvalidInputError("malformed JSON");
  return j;
}

const char* kind_name(harness::Scenario::Kind k) {
  switch (k) {
    case harness::Scenario::Kind::EhLos: return "eh_los";
    case harness::Scenario::Kind::RayleighEh: return "rayleigh_eh";
    case harness::Scenario::Kind::InterferenceDerivative: return "interference_derivative";
    case harness::Scenario::Kind::RelaxedNulling: return "relaxed_nulling";
  }
  return "?";
}

harness::Scenario::Kind kind_from_name(const std::string& s) {
  if (s == "eh_los") return harness::Scenario::Kind::EhLos;
  if (s == "rayleigh_eh") return harness::Scenario::Kind::RayleighEh;
  if (s == "interference_derivative") return harness::Scenario::Kind::InterferenceDerivative;
  if (s == "relaxed_nulling") return harness::Scenario::Kind::RelaxedNulling;
  throw InvalidInputError("unknown scenario kind '" + s + "'");
}

json scenario_to_jobj(const harness::Scenario& sc) {
  json j;
  j["kind"] = kind_name(sc.kind);
  j["n_tx"] = sc.n_tx;
  j["L"] = sc.L;
  j["M"] = sc.M;
  j["F"] = sc.F;
  j["P"] = sc.P;
  j["gamma_db"] = sc.gamma_db;
  j["rate_bits"] = sc.rate_bits;
  j["tau_db"] = sc.tau_db;
  j["noise_var"] = sc.noise_var;
  j["varsigma"] = sc.varsigma;
  j["interference_cap"] = sc.interference_cap;
  j["cochannel_cap"] = sc.cochannel_cap;
  j["derivative_eps"] = sc.derivative_eps;
  j["curvature_min"] = sc.curvature_min;
  j["perturb_deg"] = sc.perturb_deg;
  return j;
}

harness::Scenario scenario_from_jobj(const json& j) {
  harness::Scenario sc;
  sc.kind = kind_from_name(j.at("kind").get<std::string>());
  sc.n_tx = j.value("n_tx", sc.n_tx);
  sc.L = j.value("L", sc.L);
  sc.M = j.value("M", sc.M);
  sc.F = j.value("F", sc.F);
  sc.P = j.value("P", sc.P);
  sc.gamma_db = j.value("gamma_db", sc.gamma_db);
  sc.rate_bits = j.value("rate_bits", sc.rate_bits);
  sc.tau_db = j.value("tau_db", sc.tau_db);
  sc.noise_var = j.value("noise_var", sc.noise_var);
  sc.varsigma = j.value("varsigma", sc.varsigma);
  sc.interference_cap = j.value("interference_cap", sc.interference_cap);
  sc.cochannel_cap = j.value("cochannel_cap", sc.cochannel_cap);
  sc.derivative_eps = j.value("derivative_eps", sc.derivative_eps);
  sc.curvature_min = j.value("curvature_min", sc.curvature_min);
  sc.perturb_deg = j.value("perturb_deg", sc.perturb_deg);
  return sc;
}

}  // namespace

std::string problem_to_json(const model::BeamformingProblem& p, int indent) {
  json j;
  json channels = json::array();
  for (const auto& h : p.channels) channels.push_back(vector_to_json(h));
  j["channels"] = std::move(channels);
  j["noise_vars"] = p.noise_vars;
  j["sinr_targets"] = p.sinr_targets;
  json joint = json::array();
  for (const auto& jc : p.joint) {
    json row;
    json coeffs = json::array();
    for (const auto& c : jc.coeffs) coeffs.push_back(matrix_to_json(c.matrix()));
    row["coeffs"] = std::move(coeffs);
    row["sense"] = sense_to_string(jc.sense);
    row["threshold"] = jc.threshold;
    joint.push_back(std::move(row));
  }
  j["joint"] = std::move(joint);
  json individual = json::array();
  for (const auto& grp : p.individual) {
    json entries = json::array();
    for (const auto& e : grp.per_user) {
      json entry;
      entry["coeff"] = matrix_to_json(e.coeff.matrix());
      entry["lower"] = bound_to_json(e.lower);
      entry["upper"] = bound_to_json(e.upper);
      entries.push_back(std::move(entry));
    }
    individual.push_back(json{{"per_user", std::move(entries)}});
  }
  j["individual"] = std::move(individual);
  return j.dump(indent);
}

model::BeamformingProblem problem_from_json(const std::string& text) {
  const json j = parse(text);
  model::BeamformingProblem p;
  for (const auto& h : j.at("channels")) p.channels.push_back(vector_from_json(h));
  p.noise_vars = j.at("noise_vars").get<std::vector<double>>();
  p.sinr_targets = j.at("sinr_targets").get<std::vector<double>>();
  for (const auto& row : j.value("joint", json::array())) {
    model::JointConstraint jc;
    for (const auto& c : row.at("coeffs")) jc.coeffs.push_back(HermitianMatrix(matrix_from_json(c)));
    jc.sense = sense_from_string(row.at("sense").get<std::string>());
    jc.threshold = row.at("threshold").get<double>();
    p.joint.push_back(std::move(jc));
  }
  for (const auto& grp : j.value("individual", json::array())) {
    model::IndividualGroup g;
    for (const auto& e : grp.at("per_user")) {
      model::IndividualEntry entry;
      entry.coeff = HermitianMatrix(matrix_from_json(e.at("coeff")));
      entry.lower = bound_from_json(e.at("lower"));
      entry.upper = bound_from_json(e.at("upper"));
      g.per_user.push_back(std::move(entry));
    }
    p.individual.push_back(std::move(g));
  }
  p.validate();
  return p;
}

std::string solution_to_json(const reelbf::ReelBfSolution& s, int indent) {
  json j;
  j["K"] = s.K;
  j["power"] = s.power;
  j["sdp_bound"] = s.sdp_bound;
  json users = json::array();
  for (const auto& u : s.users) {
    json ju;
    ju["W"] = matrix_to_json(u.W);
    ju["alpha"] = u.alpha;
    ju["beta"] = vector_to_json(u.beta);
    ju["Omega"] = matrix_to_json(u.Omega);
    ju["R"] = u.R;
    users.push_back(std::move(ju));
  }
  j["users"] = std::move(users);
  return j.dump(indent);
}

reelbf::ReelBfSolution solution_from_json(const std::string& text) {
  const json j = parse(text);
  reelbf::ReelBfSolution s;
  s.K = j.at("K").get<std::size_t>();
  s.power = j.at("power").get<double>();
  s.sdp_bound = j.at("sdp_bound").get<double>();
  for (const auto& ju : j.at("users")) {
    reelbf::UserBeamformer u;
    u.W = matrix_from_json(ju.at("W"));
    u.alpha = ju.at("alpha").get<double>();
    u.beta = vector_from_json(ju.at("beta"));
    u.Omega = matrix_from_json(ju.at("Omega"));
    u.R = ju.at("R").get<std::size_t>();
    s.users.push_back(std::move(u));
  }
  return s;
}

std::string scenario_to_json(const harness::Scenario& sc, int indent) {
  return scenario_to_jobj(sc).dump(indent);
}

harness::Scenario scenario_from_json(const std::string& text) {
  return scenario_from_jobj(parse(text));
}

std::string config_to_json(const harness::ExperimentConfig& cfg, int indent) {
  json j;
  j["scenario"] = scenario_to_jobj(cfg.scenario);
  json sweep;
  sweep["parameter"] = cfg.sweep_parameter;
  sweep["values"] = cfg.sweep_values;
  sweep["n_monte_carlo"] = cfg.n_monte_carlo;
  sweep["n_randomizations"] = cfg.n_randomizations;
  sweep["base_seed"] = cfg.base_seed;
  json schemes = json::array();
  for (auto s : cfg.schemes) schemes.push_back(harness::scheme_id_name(s));
  sweep["schemes"] = std::move(schemes);
  sweep["record_timings"] = cfg.record_timings;
  sweep["rank_reduce"] = cfg.rank_reduce;
  sweep["jobs"] = cfg.jobs;
  j["sweep"] = std::move(sweep);
  json solver;
  solver["max_iters"] = cfg.solver.max_iters;
  solver["tol_gap"] = cfg.solver.tol_gap;
  solver["tol_feas"] = cfg.solver.tol_feas;
  j["solver"] = std::move(solver);
  return j.dump(indent);
}

harness::ExperimentConfig config_from_json(const std::string& text) {
  const json j = parse(text);
  harness::ExperimentConfig cfg;
  cfg.scenario = scenario_from_jobj(j.at("scenario"));
  const json sweep = j.value("sweep", json::object());
  cfg.sweep_parameter = sweep.value("parameter", cfg.sweep_parameter);
  cfg.sweep_values = sweep.value("values", cfg.sweep_values);
  cfg.n_monte_carlo = sweep.value("n_monte_carlo", cfg.n_monte_carlo);
  cfg.n_randomizations = sweep.value("n_randomizations", cfg.n_randomizations);
  cfg.base_seed = sweep.value("base_seed", cfg.base_seed);
  if (sweep.contains("schemes")) {
    cfg.schemes.clear();
    for (const auto& s : sweep.at("schemes")) {
      const auto id = harness::scheme_id_from_name(s.get<std::string>());
      if (!id) throw InvalidInputError("unknown scheme '" + s.get<std::string>() + "'");
      cfg.schemes.push_back(*id);
    }
  }
  cfg.record_timings = sweep.value("record_timings", cfg.record_timings);
  cfg.rank_reduce = sweep.value("rank_reduce", cfg.rank_reduce);
  cfg.jobs = sweep.value("jobs", cfg.jobs);
  const json solver = j.value("solver", json::object());
  cfg.solver.max_iters = solver.value("max_iters", cfg.solver.max_iters);
  cfg.solver.tol_gap = solver.value("tol_gap", cfg.solver.tol_gap);
  cfg.solver.tol_feas = solver.value("tol_feas", cfg.solver.tol_feas);
  return cfg;
}

}  // namespace reelbeam::json_io
